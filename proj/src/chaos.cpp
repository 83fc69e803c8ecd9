#include "qrc/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qrc/rng.hpp"

namespace qrc {

namespace {

constexpr double kHenonEscape = 10.0;  // attractor lives well inside |x| < 10
constexpr int kHenonBurnIn = 100;      // discarded so recorded orbits sit on the attractor
constexpr int kMaxInitRetries = 64;

void check_finite(const Eigen::VectorXd& state) {
    if (!state.allFinite()) throw numeric_error("divergent orbit: non-finite state");
}

}  // namespace

std::string map_name(MapKind kind) {
    return kind == MapKind::Logistic ? "logistic" : "henon";
}

MapKind map_from_name(const std::string& name) {
    if (name == "logistic") return MapKind::Logistic;
    if (name == "henon") return MapKind::Henon;
    throw input_error("unknown map '" + name + "' (expected logistic or henon)");
}

MapParams MapParams::logistic(double r) {
    MapParams p;
    p.kind = MapKind::Logistic;
    p.r = r;
    return p;
}

MapParams MapParams::henon(double a, double b) {
    MapParams p;
    p.kind = MapKind::Henon;
    p.a = a;
    p.b = b;
    return p;
}

void MapParams::validate() const {
    if (kind == MapKind::Logistic) {
        if (!(r >= 0.0 && r <= 4.0))
            throw input_error("logistic r must lie in [0, 4], got " + std::to_string(r));
    } else {
        if (!std::isfinite(a) || !std::isfinite(b))
            throw input_error("henon parameters must be finite");
    }
}

bool MapParams::outside_sweep_range() const {
    if (kind == MapKind::Logistic) return false;
    return a < 1.0 || a > 1.4 || b != 0.3;
}

Eigen::VectorXd map_step(const Eigen::VectorXd& state, const MapParams& params) {
    check_finite(state);
    if (params.kind == MapKind::Logistic) {
        if (state.size() != 1) throw input_error("logistic map expects a 1d state");
        const double x = state[0];
        Eigen::VectorXd next(1);
        next[0] = params.r * x * (1.0 - x);
        return next;
    }
    if (state.size() != 2) throw input_error("henon map expects a 2d state");
    const double x = state[0], y = state[1];
    Eigen::VectorXd next(2);
    next[0] = 1.0 - params.a * x * x + y;
    next[1] = params.b * x;
    return next;
}

TimeSeries generate_series(const MapParams& params, const Eigen::VectorXd& initial,
                           int length) {
    params.validate();
    if (length < 1) throw input_error("series length must be >= 1");
    if (initial.size() != map_dimension(params.kind))
        throw input_error("initial state dimension does not match map kind");
    check_finite(initial);

    TimeSeries series;
    series.params = params;
    series.initial_state = initial;
    series.values.resize(length, initial.size());

    Eigen::VectorXd state = initial;
    for (int t = 0; t < length; ++t) {
        if (params.kind == MapKind::Henon && std::abs(state[0]) > kHenonEscape)
            throw numeric_error("divergent orbit: henon escape at step " +
                                std::to_string(t + 1));
        check_finite(state);
        series.values.row(t) = state;
        if (t + 1 < length) state = map_step(state, params);
    }
    return series;
}

namespace {

Eigen::VectorXd sample_initial_state(const MapParams& params, std::mt19937_64& gen) {
    if (params.kind == MapKind::Logistic) {
        Eigen::VectorXd s(1);
        s[0] = rng::uniform(gen, 0.05, 0.95);
        return s;
    }
    Eigen::VectorXd s(2);
    s[0] = rng::uniform(gen, -0.5, 0.5);
    s[1] = rng::uniform(gen, -0.2, 0.2);
    return s;
}

// Draw a start, burn in (henon only), generate. Retries with fresh draws when
// the candidate escapes.
TimeSeries generate_with_retries(const MapParams& params, int length, std::mt19937_64& gen) {
    for (int attempt = 0; attempt < kMaxInitRetries; ++attempt) {
        Eigen::VectorXd start = sample_initial_state(params, gen);
        try {
            if (params.kind == MapKind::Henon) {
                Eigen::VectorXd state = start;
                for (int t = 0; t < kHenonBurnIn; ++t) {
                    if (std::abs(state[0]) > kHenonEscape) throw numeric_error("escape");
                    state = map_step(state, params);
                }
                start = state;
            }
            return generate_series(params, start, length);
        } catch (const numeric_error&) {
            continue;  // next candidate initial state
        }
    }
    throw numeric_error("could not find a bounded orbit for " + map_name(params.kind) +
                        " after " + std::to_string(kMaxInitRetries) + " initial states");
}

}  // namespace

NormalizedDataset build_dataset(const MapParams& params, int n_train, int train_len,
                                int n_test, int test_len, std::uint64_t seed) {
    params.validate();
    if (n_train < 1 || train_len < 1 || n_test < 1 || test_len < 1)
        throw input_error("dataset counts must be >= 1");

    NormalizedDataset ds;
    ds.params = params;
    ds.seed = seed;
    const int dim = map_dimension(params.kind);

    for (int i = 0; i < n_train; ++i) {
        auto gen = rng::engine(rng::derive(seed, static_cast<std::uint64_t>(i)));
        ds.train.push_back(generate_with_retries(params, train_len, gen));
    }
    for (int i = 0; i < n_test; ++i) {
        auto gen = rng::engine(rng::derive(seed, 0x10000u + static_cast<std::uint64_t>(i)));
        ds.test.push_back(generate_with_retries(params, test_len, gen));
    }

    // Bounds over the pooled training series, per variable.
    ds.raw_bounds.assign(dim, {std::numeric_limits<double>::infinity(),
                               -std::numeric_limits<double>::infinity()});
    for (const auto& s : ds.train)
        for (int v = 0; v < dim; ++v) {
            ds.raw_bounds[v].first = std::min(ds.raw_bounds[v].first, s.values.col(v).minCoeff());
            ds.raw_bounds[v].second = std::max(ds.raw_bounds[v].second, s.values.col(v).maxCoeff());
        }

    ds.scale.resize(dim);
    if (params.kind == MapKind::Logistic) {
        // The training pool is divided by its largest element.
        const double max_val = ds.raw_bounds[0].second;
        if (!(max_val > 0.0)) throw numeric_error("degenerate training pool: max <= 0");
        ds.scale[0] = AffineScale{0.0, 1.0 / max_val};
    } else {
        // Henon values are signed; min-max per variable lands the pool in [0,1].
        for (int v = 0; v < dim; ++v) {
            const auto [lo, hi] = ds.raw_bounds[v];
            if (!(hi > lo)) throw numeric_error("degenerate training pool: flat variable");
            ds.scale[v] = AffineScale{lo, 1.0 / (hi - lo)};
        }
    }

    auto apply_scale = [&](TimeSeries& s) {
        for (int v = 0; v < dim; ++v)
            for (int t = 0; t < s.length(); ++t)
                s.values(t, v) = ds.scale[v].forward(s.values(t, v));
    };
    for (auto& s : ds.train) apply_scale(s);
    for (auto& s : ds.test) {
        apply_scale(s);
        ds.clamp_count += static_cast<int>(
            (s.values.array() < 0.0 || s.values.array() > 1.0).count());
    }
    return ds;
}

LyapunovEstimate largest_lyapunov(const MapParams& params, const LyapunovConfig& cfg) {
    params.validate();
    if (cfg.n_iter < 1000) throw input_error("lyapunov n_iter must be >= 1000");
    if (cfg.transient < 100) throw input_error("lyapunov transient must be >= 100");

    auto gen = rng::engine(rng::derive(cfg.seed, 0xACCE5501u));
    Eigen::VectorXd state = [&] {
        if (params.kind == MapKind::Henon) {
            // reuse the retry/burn-in logic so the orbit starts on the attractor
            auto probe = generate_with_retries(params, 2, gen);
            return Eigen::VectorXd(probe.initial_state);
        }
        return sample_initial_state(params, gen);
    }();

    for (long t = 0; t < cfg.transient; ++t) state = map_step(state, params);

    double log_sum = 0.0;
    if (params.kind == MapKind::Logistic) {
        for (long t = 0; t < cfg.n_iter; ++t) {
            // tangent-space derivative |f'(x)| = |r (1 - 2x)|; clamp so a
            // superstable orbit yields a very negative, finite exponent
            const double deriv = std::max(std::abs(params.r * (1.0 - 2.0 * state[0])), 1e-300);
            log_sum += std::log(deriv);
            state = map_step(state, params);
        }
    } else {
        Eigen::Vector2d v(1.0, 0.0);
        for (long t = 0; t < cfg.n_iter; ++t) {
            if (std::abs(state[0]) > kHenonEscape)
                throw numeric_error("divergent orbit during lyapunov iteration");
            Eigen::Matrix2d jac;
            jac << -2.0 * params.a * state[0], 1.0, params.b, 0.0;
            v = jac * v;
            const double norm = std::max(v.norm(), 1e-300);
            log_sum += std::log(norm);
            v /= norm;
            state = map_step(state, params);
        }
    }

    LyapunovEstimate est;
    est.lambda_star = log_sum / static_cast<double>(cfg.n_iter);
    est.n_iter = cfg.n_iter;
    est.transient = cfg.transient;
    return est;
}

std::vector<Window> series_windows(const TimeSeries& series, int d, int gap, int series_id) {
    if (d < 1) throw input_error("window depth d must be >= 1");
    if (gap < 0) throw input_error("gap must be >= 0");
    const int count = series.length() - d - gap;
    if (count < 1)
        throw input_error("series of length " + std::to_string(series.length()) +
                          " too short for d=" + std::to_string(d) +
                          ", gap=" + std::to_string(gap));
    std::vector<Window> out;
    out.reserve(count);
    for (int start = 0; start < count; ++start) {
        Window w;
        w.values = series.values.middleRows(start, d);
        w.target = series.values.row(start + d + gap);
        w.series = series_id;
        w.target_index = start + d + gap;
        out.push_back(std::move(w));
    }
    return out;
}

std::vector<Window> build_windows(const NormalizedDataset& dataset, int d, int gap) {
    std::vector<Window> out;
    for (std::size_t i = 0; i < dataset.train.size(); ++i) {
        auto w = series_windows(dataset.train[i], d, gap, static_cast<int>(i));
        out.insert(out.end(), std::make_move_iterator(w.begin()),
                   std::make_move_iterator(w.end()));
    }
    return out;
}

}  // namespace qrc
