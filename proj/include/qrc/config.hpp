#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qrc/experiments.hpp"

namespace qrc {

// Every tunable of the tool, in CLI/config-file/manifest form. Field
// initializers are the single source of defaults; `layers`, `reps` and
// `hidden` default to the per-map values when left at -1.
struct Settings {
    std::string experiment;

    // map
    std::string map = "logistic";
    double r = 3.9;
    double a = 1.4;
    double b = 0.3;

    // reservoir
    int layers = -1;  // logistic 2, henon 1
    int reps = -1;    // 2 for both maps
    int hidden = -1;  // logistic 4, henon 3
    double tau = 1.0;
    double gamma = 0.0;
    int substeps = 200;
    double coupling = 1.0;
    std::string boundary = "open";
    std::uint64_t seed = 42;
    bool bias = false;

    // dataset
    int n_train = 100;
    int train_len = 20;
    int n_test = 10;
    int test_len = 200;
    std::uint64_t data_seed = 7;

    // training / evaluation
    double epsilon = 1e-8;
    int gap = 0;
    int eval_start = 151;
    std::string mode = "teacher";  // teacher | autonomous
    int threads = 0;               // 0 = all available cores

    // sweeps
    double sweep_min = -1.0;  // logistic 2.5, henon 1.0 when < 0
    double sweep_max = -1.0;  // logistic 4.0, henon 1.4 when < 0
    int points = 100;
    std::string gammas = "0,0.01,0.05,0.1,0.5,1.0";
    std::string layers_range = "1..3";
    std::string reps_range = "1..4";
    int samples = 200;  // ensemble size (paper scale: 1000)
    int bins = 40;

    // lle
    long lle_transient = 1000;
    long lle_iters = 100000;

    // io
    std::string out_dir;  // empty: $QRC_OUT_DIR or ./qrc_out/<experiment>
    std::string model_path;
    bool dump_features = false;

    void set(const std::string& key, const std::string& value);
    std::vector<std::pair<std::string, std::string>> to_kv() const;
    static Settings from_kv(const std::vector<std::pair<std::string, std::string>>& kv);

    // Typed views; both validate and materialize per-map defaults.
    MapParams map_params() const;
    ExperimentConfig experiment_config() const;
    EvalMode eval_mode() const;
    Boundary boundary_kind() const;
    std::vector<double> gamma_grid() const;
    std::vector<int> layers_grid() const;
    std::vector<int> reps_grid() const;
    std::vector<double> sweep_grid() const;
    int resolved_threads() const;
};

// `key = value` per line, '#' comments. Unknown keys and malformed values
// raise input_error naming the key and line.
Settings parse_config(const std::string& path);

// Helpers shared with the CLI.
std::vector<int> parse_int_range(const std::string& text);      // "1..4" or "1,2,3"
std::vector<double> parse_double_list(const std::string& text); // "0,0.1,0.5"

}  // namespace qrc
