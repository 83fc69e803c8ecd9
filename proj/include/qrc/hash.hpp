#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qrc {

// FNV-1a 64, used for output checksums and dataset/config fingerprints.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xCBF29CE484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

inline std::uint64_t fnv1a64(const std::vector<double>& v) {
    return fnv1a64(v.data(), v.size() * sizeof(double));
}

std::uint64_t hash_file(const std::string& path);
std::string hash_hex(std::uint64_t h);

}  // namespace qrc
