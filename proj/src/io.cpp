#include "qrc/io.hpp"

#include <cstdio>
#include <filesystem>

#include <json.hpp>

#include "qrc/hash.hpp"
#include "qrc/version.hpp"

namespace qrc {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), path_(path), columns_(columns.size()) {
    if (!out_) throw input_error("cannot open for writing: " + path);
    for (std::size_t i = 0; i < columns.size(); ++i)
        out_ << columns[i] << (i + 1 == columns.size() ? "\n" : ",");
}

void CsvWriter::sep() {
    if (in_row_ > 0) out_ << ",";
    ++in_row_;
}

CsvWriter& CsvWriter::field(const std::string& v) {
    sep();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(format_double(v)); }

CsvWriter& CsvWriter::field(long long v) {
    sep();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::field(std::uint64_t v) {
    sep();
    out_ << v;
    return *this;
}

void CsvWriter::end_row() {
    if (in_row_ != columns_)
        throw input_error("csv row has " + std::to_string(in_row_) + " fields, expected " +
                          std::to_string(columns_) + " in " + path_);
    out_ << "\n";
    if (!out_) throw input_error("failed writing " + path_);
    in_row_ = 0;
}

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot hash missing file: " + path);
    std::uint64_t h = 0xCBF29CE484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_manifest(const std::string& path, const Settings& settings,
                    const std::vector<std::string>& command,
                    const std::vector<std::string>& output_files,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
    nlohmann::ordered_json j;
    j["experiment"] = settings.experiment;
    j["tool"] = {{"name", "qrc"}, {"version", kVersion}};
    j["command"] = command;

    nlohmann::ordered_json cfg;
    for (const auto& [k, v] : settings.to_kv()) cfg[k] = v;
    j["config"] = cfg;

    // The ledger of choices the underlying method leaves open; recorded in
    // every manifest so runs are self-describing.
    nlohmann::ordered_json decisions;
    decisions["encoding"] = "R_Y rotation, theta = pi * x";
    decisions["qubit_layout"] =
        "input qubits at chain sites 1..n_I (x repetitions before y), hidden after";
    decisions["hidden_init"] = "|0...0>";
    decisions["boundary"] = settings.boundary;
    decisions["tau"] = format_double(settings.tau);
    decisions["normalization"] =
        "logistic: divide by pooled training max; henon: per-variable min-max to "
        "[0,1]; test values clamped to [0,1] at encoding";
    decisions["lindblad_integrator"] =
        "fixed-step rk4, " + std::to_string(settings.substeps) + " substeps per tau";
    decisions["evaluation"] =
        "one-step readout over t in [eval_start, series end]; autonomous mode "
        "feeds back clamped predictions";
    decisions["measurement"] = "exact Pauli-X expectation values (no shot noise)";
    decisions["rng"] = "mt19937_64, 53-bit uniforms, splitmix64-derived streams";
    j["decisions"] = decisions;

    for (const auto& [k, v] : extra) j[k] = v;

    nlohmann::ordered_json outputs;
    for (const auto& f : output_files) {
        const std::filesystem::path p(f);
        outputs[p.filename().string()] = "fnv1a64:" + hash_hex(hash_file(f));
    }
    j["outputs"] = outputs;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw input_error("failed writing " + path);
}

Settings settings_from_manifest(const std::string& path, std::string* experiment) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open manifest: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw input_error("malformed manifest " + path + ": " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object())
        throw input_error("manifest " + path + " has no config block");
    Settings s;
    for (const auto& [k, v] : j["config"].items())
        s.set(k, v.get<std::string>());
    if (experiment) *experiment = j.value("experiment", s.experiment);
    return s;
}

std::string output_path(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace qrc
