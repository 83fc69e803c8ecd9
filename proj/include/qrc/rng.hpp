#pragma once

#include <cstdint>
#include <random>

// All randomness in the project flows through these helpers so that runs are
// reproducible across platforms. Generator family: mt19937_64 seeded via
// splitmix64-derived sub-streams, uniforms taken from the top 53 bits.
// Manifests record this as "mt19937_64/53bit".

namespace qrc::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Independent sub-stream seed for (base, stream). Used to give every
// series / grid point / ensemble member its own generator.
inline std::uint64_t derive(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(splitmix64(base) ^ (0x632BE59BD9B4E019ull * (stream + 1)));
}

inline std::mt19937_64 engine(std::uint64_t seed) { return std::mt19937_64(seed); }

// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
// unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * uniform01(gen);
}

}  // namespace qrc::rng
