#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "qrc/config.hpp"
#include "qrc/errors.hpp"

namespace qrc {

// Deterministic CSV writer: doubles as %.17g, '\n' line endings. The CSV
// files are the reproducibility contract; identical runs produce identical
// bytes.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns);

    CsvWriter& field(const std::string& v);
    CsvWriter& field(double v);
    CsvWriter& field(long long v);
    CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
    CsvWriter& field(std::uint64_t v);
    void end_row();

private:
    std::ofstream out_;
    std::string path_;
    std::size_t columns_;
    std::size_t in_row_ = 0;

    void sep();
};

std::string format_double(double v);  // %.17g

// Run manifest: resolved config, decision ledger, seeds, output hashes.
// Written as pretty-printed JSON with stable key order and no timestamps,
// so identical runs produce identical manifests.
void write_manifest(const std::string& path, const Settings& settings,
                    const std::vector<std::string>& command,
                    const std::vector<std::string>& output_files,
                    const std::vector<std::pair<std::string, std::string>>& extra = {});

// Reads back the "config" block of a manifest for `qrc rerun`.
Settings settings_from_manifest(const std::string& path, std::string* experiment = nullptr);

// Creates the directory (and parents) if needed; returns dir + "/" + name.
std::string output_path(const std::string& dir, const std::string& name);

}  // namespace qrc
