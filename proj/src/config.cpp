#include "qrc/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <thread>

namespace qrc {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw input_error("value '" + v + "' for key '" + key + "' is not a number");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return i;
    } catch (const std::exception&) {
        throw input_error("value '" + v + "' for key '" + key + "' is not an integer");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long i = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return i;
    } catch (const std::exception&) {
        throw input_error("value '" + v + "' for key '" + key + "' is not an unsigned integer");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw input_error("value '" + v + "' for key '" + key + "' is not a boolean");
}

}  // namespace

void Settings::set(const std::string& key, const std::string& value) {
    if (key == "experiment") experiment = value;
    else if (key == "map") map = value;
    else if (key == "r") r = to_double(key, value);
    else if (key == "a") a = to_double(key, value);
    else if (key == "b") b = to_double(key, value);
    else if (key == "layers") layers = static_cast<int>(to_int(key, value));
    else if (key == "reps") reps = static_cast<int>(to_int(key, value));
    else if (key == "hidden") hidden = static_cast<int>(to_int(key, value));
    else if (key == "tau") tau = to_double(key, value);
    else if (key == "gamma") gamma = to_double(key, value);
    else if (key == "substeps") substeps = static_cast<int>(to_int(key, value));
    else if (key == "coupling") coupling = to_double(key, value);
    else if (key == "boundary") boundary = value;
    else if (key == "seed") seed = to_u64(key, value);
    else if (key == "bias") bias = to_bool(key, value);
    else if (key == "n_train") n_train = static_cast<int>(to_int(key, value));
    else if (key == "train_len") train_len = static_cast<int>(to_int(key, value));
    else if (key == "n_test") n_test = static_cast<int>(to_int(key, value));
    else if (key == "test_len") test_len = static_cast<int>(to_int(key, value));
    else if (key == "data_seed") data_seed = to_u64(key, value);
    else if (key == "epsilon") epsilon = to_double(key, value);
    else if (key == "gap") gap = static_cast<int>(to_int(key, value));
    else if (key == "eval_start") eval_start = static_cast<int>(to_int(key, value));
    else if (key == "mode") mode = value;
    else if (key == "threads") threads = static_cast<int>(to_int(key, value));
    else if (key == "sweep_min") sweep_min = to_double(key, value);
    else if (key == "sweep_max") sweep_max = to_double(key, value);
    else if (key == "points") points = static_cast<int>(to_int(key, value));
    else if (key == "gammas") gammas = value;
    else if (key == "layers_range") layers_range = value;
    else if (key == "reps_range") reps_range = value;
    else if (key == "samples") samples = static_cast<int>(to_int(key, value));
    else if (key == "bins") bins = static_cast<int>(to_int(key, value));
    else if (key == "lle_transient") lle_transient = to_int(key, value);
    else if (key == "lle_iters") lle_iters = to_int(key, value);
    else if (key == "out_dir") out_dir = value;
    else if (key == "model_path") model_path = value;
    else if (key == "dump_features") dump_features = to_bool(key, value);
    else throw input_error("unknown config key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> Settings::to_kv() const {
    std::vector<std::pair<std::string, std::string>> kv;
    auto put = [&kv](const std::string& k, const std::string& v) { kv.emplace_back(k, v); };
    put("experiment", experiment);
    put("map", map);
    put("r", fmt_double(r));
    put("a", fmt_double(a));
    put("b", fmt_double(b));
    put("layers", std::to_string(layers));
    put("reps", std::to_string(reps));
    put("hidden", std::to_string(hidden));
    put("tau", fmt_double(tau));
    put("gamma", fmt_double(gamma));
    put("substeps", std::to_string(substeps));
    put("coupling", fmt_double(coupling));
    put("boundary", boundary);
    put("seed", std::to_string(seed));
    put("bias", bias ? "true" : "false");
    put("n_train", std::to_string(n_train));
    put("train_len", std::to_string(train_len));
    put("n_test", std::to_string(n_test));
    put("test_len", std::to_string(test_len));
    put("data_seed", std::to_string(data_seed));
    put("epsilon", fmt_double(epsilon));
    put("gap", std::to_string(gap));
    put("eval_start", std::to_string(eval_start));
    put("mode", mode);
    put("threads", std::to_string(threads));
    put("sweep_min", fmt_double(sweep_min));
    put("sweep_max", fmt_double(sweep_max));
    put("points", std::to_string(points));
    put("gammas", gammas);
    put("layers_range", layers_range);
    put("reps_range", reps_range);
    put("samples", std::to_string(samples));
    put("bins", std::to_string(bins));
    put("lle_transient", std::to_string(lle_transient));
    put("lle_iters", std::to_string(lle_iters));
    put("out_dir", out_dir);
    put("model_path", model_path);
    put("dump_features", dump_features ? "true" : "false");
    return kv;
}

Settings Settings::from_kv(const std::vector<std::pair<std::string, std::string>>& kv) {
    Settings s;
    for (const auto& [k, v] : kv) s.set(k, v);
    return s;
}

MapParams Settings::map_params() const {
    const MapKind kind = map_from_name(map);
    MapParams p = (kind == MapKind::Logistic) ? MapParams::logistic(r) : MapParams::henon(a, b);
    p.validate();
    return p;
}

EvalMode Settings::eval_mode() const {
    if (mode == "teacher") return EvalMode::TeacherForced;
    if (mode == "autonomous") return EvalMode::Autonomous;
    throw input_error("mode must be 'teacher' or 'autonomous', got '" + mode + "'");
}

Boundary Settings::boundary_kind() const {
    if (boundary == "open") return Boundary::Open;
    if (boundary == "periodic") return Boundary::Periodic;
    throw input_error("boundary must be 'open' or 'periodic', got '" + boundary + "'");
}

int Settings::resolved_threads() const {
    if (threads < 0) throw input_error("threads must be >= 0");
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

ExperimentConfig Settings::experiment_config() const {
    const MapKind kind = map_from_name(map);
    ExperimentConfig cfg = ExperimentConfig::defaults_for(kind);
    cfg.params = map_params();
    if (layers > 0) cfg.reservoir.layers = layers;
    if (reps > 0) cfg.reservoir.n_rep = reps;
    if (hidden > 0) cfg.reservoir.n_hidden = hidden;
    cfg.reservoir.tau = tau;
    cfg.reservoir.gamma = gamma;
    cfg.reservoir.n_substeps = substeps;
    cfg.reservoir.coupling = coupling;
    cfg.reservoir.boundary = boundary_kind();
    cfg.reservoir.seed = seed;
    cfg.reservoir.include_bias = bias;
    cfg.n_train = n_train;
    cfg.train_len = train_len;
    cfg.n_test = n_test;
    cfg.test_len = test_len;
    cfg.data_seed = data_seed;
    cfg.epsilon = epsilon;
    cfg.gap = gap;
    cfg.eval_start = eval_start;
    cfg.threads = resolved_threads();
    cfg.mode = eval_mode();
    cfg.reservoir.validate();
    if (!(epsilon > 0.0)) throw input_error("epsilon must be > 0");
    if (n_train < 1 || train_len < 1 || n_test < 1 || test_len < 1)
        throw input_error("dataset counts must be >= 1");
    return cfg;
}

std::vector<double> Settings::gamma_grid() const { return parse_double_list(gammas); }
std::vector<int> Settings::layers_grid() const { return parse_int_range(layers_range); }
std::vector<int> Settings::reps_grid() const { return parse_int_range(reps_range); }

std::vector<double> Settings::sweep_grid() const {
    const MapKind kind = map_from_name(map);
    double lo = sweep_min, hi = sweep_max;
    if (lo < 0.0) lo = (kind == MapKind::Logistic) ? 2.5 : 1.0;
    if (hi < 0.0) hi = (kind == MapKind::Logistic) ? 4.0 : 1.4;
    if (points < 1) throw input_error("sweep points must be >= 1");
    if (!(hi > lo) && points > 1) throw input_error("sweep range must satisfy max > min");
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i)
        grid[i] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    return grid;
}

Settings parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open config file: " + path);
    Settings s;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw input_error(path + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw input_error(path + ":" + std::to_string(line_no) + ": empty key");
        try {
            s.set(key, value);
        } catch (const input_error& e) {
            throw input_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return s;
}

std::vector<int> parse_int_range(const std::string& text) {
    const std::string t = trim(text);
    const auto dots = t.find("..");
    std::vector<int> out;
    if (dots != std::string::npos) {
        const long long lo = to_int("range", trim(t.substr(0, dots)));
        const long long hi = to_int("range", trim(t.substr(dots + 2)));
        if (hi < lo) throw input_error("range '" + text + "' is decreasing");
        for (long long v = lo; v <= hi; ++v) out.push_back(static_cast<int>(v));
        return out;
    }
    std::size_t start = 0;
    while (start <= t.size()) {
        const auto comma = t.find(',', start);
        const std::string tok =
            trim(t.substr(start, comma == std::string::npos ? std::string::npos
                                                            : comma - start));
        if (!tok.empty()) out.push_back(static_cast<int>(to_int("range", tok)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw input_error("empty integer range '" + text + "'");
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    const std::string t = trim(text);
    while (start <= t.size()) {
        const auto comma = t.find(',', start);
        const std::string tok =
            trim(t.substr(start, comma == std::string::npos ? std::string::npos
                                                            : comma - start));
        if (!tok.empty()) out.push_back(to_double("list", tok));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw input_error("empty number list '" + text + "'");
    return out;
}

}  // namespace qrc
