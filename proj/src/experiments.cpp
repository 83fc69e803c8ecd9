#include "qrc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "qrc/hash.hpp"
#include "qrc/rng.hpp"

namespace qrc {

ExperimentConfig ExperimentConfig::defaults_for(MapKind kind) {
    ExperimentConfig cfg;
    cfg.reservoir.map = kind;
    if (kind == MapKind::Logistic) {
        cfg.reservoir.layers = 2;
        cfg.reservoir.n_rep = 2;
        cfg.reservoir.n_hidden = 4;
        cfg.params = MapParams::logistic(3.9);
    } else {
        cfg.reservoir.layers = 1;
        cfg.reservoir.n_rep = 2;
        cfg.reservoir.n_hidden = 3;
        cfg.params = MapParams::henon(1.4, 0.3);
    }
    return cfg;
}

namespace {

std::uint64_t dataset_fingerprint(const NormalizedDataset& ds) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    auto mix_series = [&h](const TimeSeries& s) {
        h = fnv1a64(s.values.data(),
                    sizeof(double) * static_cast<std::size_t>(s.values.size()), h);
    };
    for (const auto& s : ds.train) mix_series(s);
    for (const auto& s : ds.test) mix_series(s);
    return h;
}

std::uint64_t windows_fingerprint(const std::vector<Window>& windows) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const auto& w : windows) {
        h = fnv1a64(w.values.data(),
                    sizeof(double) * static_cast<std::size_t>(w.values.size()), h);
        h = fnv1a64(w.target.data(),
                    sizeof(double) * static_cast<std::size_t>(w.target.size()), h);
    }
    return h;
}

Eigen::MatrixXd target_matrix(const std::vector<Window>& windows) {
    const Eigen::Index vars = windows.front().target.size();
    Eigen::MatrixXd y(vars, static_cast<Eigen::Index>(windows.size()));
    for (std::size_t i = 0; i < windows.size(); ++i)
        y.col(static_cast<Eigen::Index>(i)) = windows[i].target;
    return y;
}

std::uint64_t reservoir_fingerprint(const ReservoirConfig& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d|%d|%d|%d|%.17g|%.17g|%d|%.17g|%d|%llu|%d",
                  static_cast<int>(r.map), r.layers, r.n_rep, r.n_hidden, r.tau, r.gamma,
                  r.n_substeps, r.coupling, static_cast<int>(r.boundary),
                  static_cast<unsigned long long>(r.seed), r.include_bias ? 1 : 0);
    return fnv1a64(std::string(buf));
}

}  // namespace

ReadoutModel train_readout(const ExperimentConfig& cfg, const Propagator& prop,
                           const NormalizedDataset& dataset) {
    const auto windows = build_windows(dataset, cfg.reservoir.layers, cfg.gap);
    const Eigen::MatrixXd m = batch_features(cfg.reservoir, prop, windows, cfg.threads);
    ReadoutModel model = ridge_fit(m, target_matrix(windows), cfg.epsilon);
    model.meta.dataset_hash = dataset_fingerprint(dataset);
    model.meta.cfg_hash = reservoir_fingerprint(cfg.reservoir);
    return model;
}

TrainedRun train_and_evaluate(const ExperimentConfig& cfg, const Propagator& prop) {
    TrainedRun run;
    run.dataset = build_dataset(cfg.params, cfg.n_train, cfg.train_len, cfg.n_test,
                                cfg.test_len, cfg.data_seed);
    run.model = train_readout(cfg, prop, run.dataset);
    run.report = evaluate(cfg.reservoir, prop, run.model, run.dataset.test, cfg.gap,
                          cfg.mode, cfg.eval_start, cfg.threads);
    return run;
}

SweepResult bifurcation_sweep(MapKind kind, const std::vector<double>& grid,
                              const ExperimentConfig& base) {
    if (grid.empty()) throw input_error("sweep grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw input_error("sweep grid must be strictly increasing");

    SweepResult result;
    result.map = kind;
    result.grid = grid;

    // One reservoir for the whole sweep; only the map parameter varies.
    ExperimentConfig cfg = base;
    cfg.reservoir.map = kind;
    const Propagator prop = cfg.reservoir.make_propagator();

    for (std::size_t i = 0; i < grid.size(); ++i) {
        cfg.params = (kind == MapKind::Logistic)
                         ? MapParams::logistic(grid[i])
                         : MapParams::henon(grid[i], base.params.b);
        cfg.data_seed = rng::derive(base.data_seed, i);

        const TrainedRun run = train_and_evaluate(cfg, prop);

        LyapunovConfig lle_cfg;
        lle_cfg.seed = rng::derive(base.data_seed, 0x11E00000ull + i);

        SweepPoint point;
        point.control = grid[i];
        point.lle = largest_lyapunov(cfg.params, lle_cfg).lambda_star;
        point.rmse = run.report.aggregate_rmse;
        point.clamped = run.report.clamped_inputs;

        // Bifurcation tail from the first test series, back in raw units.
        const AffineScale& sx = run.dataset.scale[0];
        const Eigen::MatrixXd& pred = run.report.predicted.front();
        const Eigen::MatrixXd& truth = run.report.truth.front();
        point.true_tail.reserve(pred.rows());
        point.predicted_tail.reserve(pred.rows());
        for (Eigen::Index t = 0; t < pred.rows(); ++t) {
            point.true_tail.push_back(sx.inverse(truth(t, 0)));
            point.predicted_tail.push_back(sx.inverse(pred(t, 0)));
        }
        result.points.push_back(std::move(point));
    }
    return result;
}

namespace {

// Average ranks (1-based) with ties sharing the mean rank.
std::vector<double> average_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) throw input_error("spearman inputs differ in length");
    if (u.size() < 2) throw input_error("spearman needs at least 2 points");
    const auto ru = average_ranks(u);
    const auto rv = average_ranks(v);
    const double n = static_cast<double>(u.size());
    const double mean = (n + 1.0) / 2.0;
    double suu = 0.0, svv = 0.0, suv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double du = ru[i] - mean, dv = rv[i] - mean;
        suu += du * du;
        svv += dv * dv;
        suv += du * dv;
    }
    if (suu == 0.0 || svv == 0.0) throw input_error("degenerate ranks");
    return suv / std::sqrt(suu * svv);
}

double lle_rmse_correlation(const SweepResult& sweep, Region region) {
    if (sweep.points.size() < 10)
        throw input_error("correlation needs a sweep with >= 10 points");
    std::vector<double> lle, rmse;
    for (const auto& p : sweep.points) {
        if (region == Region::ChaoticOnly && !(p.lle > 0.0)) continue;
        lle.push_back(p.lle);
        rmse.push_back(p.rmse);
    }
    if (lle.size() < 2) throw input_error("fewer than 2 points after region filter");
    return spearman(lle, rmse);
}

int cluster_count(std::vector<double> values, double tol) {
    if (values.empty()) return 0;
    std::sort(values.begin(), values.end());
    int clusters = 1;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] - values[i - 1] > tol) ++clusters;
    return clusters;
}

std::pair<int, int> GridResult::argmin() const {
    double best = std::numeric_limits<double>::infinity();
    std::pair<int, int> where{layers.front(), reps.front()};
    for (Eigen::Index i = 0; i < rmse.rows(); ++i)
        for (Eigen::Index j = 0; j < rmse.cols(); ++j)
            if (std::isfinite(rmse(i, j)) && rmse(i, j) < best) {
                best = rmse(i, j);
                where = {layers[static_cast<std::size_t>(i)],
                         reps[static_cast<std::size_t>(j)]};
            }
    if (!std::isfinite(best)) throw numeric_error("grid has no finished cells");
    return where;
}

GridResult hyperparameter_grid(MapKind kind, double control,
                               const std::vector<int>& layers,
                               const std::vector<int>& reps, int gap,
                               const ExperimentConfig& base) {
    if (layers.empty() || reps.empty()) throw input_error("grid ranges must be non-empty");

    GridResult grid;
    grid.layers = layers;
    grid.reps = reps;
    grid.rmse.setConstant(static_cast<Eigen::Index>(layers.size()),
                          static_cast<Eigen::Index>(reps.size()),
                          std::numeric_limits<double>::quiet_NaN());

    ExperimentConfig cfg = base;
    cfg.reservoir.map = kind;
    cfg.params = (kind == MapKind::Logistic) ? MapParams::logistic(control)
                                             : MapParams::henon(control, base.params.b);
    cfg.gap = gap;

    // Same dataset for every cell (it depends only on the map parameters).
    const NormalizedDataset dataset = build_dataset(
        cfg.params, cfg.n_train, cfg.train_len, cfg.n_test, cfg.test_len, cfg.data_seed);

    for (std::size_t j = 0; j < reps.size(); ++j) {
        cfg.reservoir.n_rep = reps[j];
        if (cfg.reservoir.n_qubits() > kMaxQubits) {
            for (std::size_t i = 0; i < layers.size(); ++i)
                grid.skipped.emplace_back(layers[i], reps[j]);
            continue;
        }
        // One propagator per repetition count; the layer count only changes
        // how often it is applied.
        const Propagator prop = cfg.reservoir.make_propagator();
        for (std::size_t i = 0; i < layers.size(); ++i) {
            cfg.reservoir.layers = layers[i];
            if (cfg.train_len <= cfg.reservoir.layers + gap) {
                grid.skipped.emplace_back(layers[i], reps[j]);
                continue;
            }
            const ReadoutModel model = train_readout(cfg, prop, dataset);
            const PredictionReport report =
                evaluate(cfg.reservoir, prop, model, dataset.test, gap, cfg.mode,
                         cfg.eval_start, cfg.threads);
            grid.rmse(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                report.aggregate_rmse;
        }
    }
    return grid;
}

std::vector<NoisePoint> noise_robustness(MapKind kind, double control,
                                         const std::vector<double>& gammas,
                                         const ExperimentConfig& base) {
    if (gammas.empty()) throw input_error("noise study needs at least one gamma");
    for (double g : gammas)
        if (g < 0.0) throw input_error("gamma values must be >= 0");

    ExperimentConfig cfg = base;
    cfg.reservoir.map = kind;
    cfg.params = (kind == MapKind::Logistic) ? MapParams::logistic(control)
                                             : MapParams::henon(control, base.params.b);

    const NormalizedDataset dataset = build_dataset(
        cfg.params, cfg.n_train, cfg.train_len, cfg.n_test, cfg.test_len, cfg.data_seed);

    // Clean arm reference: readout trained on noiseless features.
    ExperimentConfig clean_cfg = cfg;
    clean_cfg.reservoir.gamma = 0.0;
    const Propagator clean_prop = clean_cfg.reservoir.make_propagator();
    const auto train_windows = build_windows(dataset, cfg.reservoir.layers, cfg.gap);
    const std::uint64_t window_hash = windows_fingerprint(train_windows);
    const ReadoutModel clean_model = train_readout(clean_cfg, clean_prop, dataset);

    std::vector<NoisePoint> out;
    for (double gamma : gammas) {
        ExperimentConfig noisy_cfg = cfg;
        noisy_cfg.reservoir.gamma = gamma;

        NoisePoint point;
        point.gamma = gamma;
        if (gamma == 0.0) {
            const PredictionReport rep =
                evaluate(clean_cfg.reservoir, clean_prop, clean_model, dataset.test,
                         cfg.gap, cfg.mode, cfg.eval_start, cfg.threads);
            point.rmse_clean_trained = rep.aggregate_rmse;
            point.rmse_insitu_trained = rep.aggregate_rmse;
        } else {
            const Propagator noisy_prop = noisy_cfg.reservoir.make_propagator();
            // Both arms consume identical window sets.
            const auto insitu_windows =
                build_windows(dataset, noisy_cfg.reservoir.layers, cfg.gap);
            if (windows_fingerprint(insitu_windows) != window_hash)
                throw numeric_error("noise arms disagree on training windows");

            const ReadoutModel insitu_model = train_readout(noisy_cfg, noisy_prop, dataset);
            const PredictionReport clean_rep =
                evaluate(noisy_cfg.reservoir, noisy_prop, clean_model, dataset.test,
                         cfg.gap, cfg.mode, cfg.eval_start, cfg.threads);
            const PredictionReport insitu_rep =
                evaluate(noisy_cfg.reservoir, noisy_prop, insitu_model, dataset.test,
                         cfg.gap, cfg.mode, cfg.eval_start, cfg.threads);
            point.rmse_clean_trained = clean_rep.aggregate_rmse;
            point.rmse_insitu_trained = insitu_rep.aggregate_rmse;
        }
        out.push_back(point);
    }
    return out;
}

EnsembleReport summarize_ensemble(const std::vector<double>& rmses, int n_bins,
                                  int failures, std::uint64_t base_seed) {
    if (rmses.empty()) throw input_error("ensemble has no successful samples");
    if (n_bins < 1) throw input_error("n_bins must be >= 1");

    EnsembleReport report;
    report.rmses = rmses;
    report.n_bins = n_bins;
    report.failures = failures;
    report.base_seed = base_seed;

    const auto [lo_it, hi_it] = std::minmax_element(rmses.begin(), rmses.end());
    report.bin_min = *lo_it;
    const double span = *hi_it - *lo_it;
    report.bin_width = span > 0.0 ? span / n_bins : 1.0;

    report.histogram.assign(n_bins, 0);
    double index_sum = 0.0;
    for (double r : rmses) {
        int bin = static_cast<int>((r - report.bin_min) / report.bin_width);
        bin = std::clamp(bin, 0, n_bins - 1);
        ++report.histogram[bin];
        index_sum += bin;
    }
    // Poisson over bin indices; the MLE of the rate is the mean index.
    report.poisson_rate = index_sum / static_cast<double>(rmses.size());
    return report;
}

EnsembleReport hamiltonian_ensemble(MapKind kind, double control, int n_samples,
                                    const ExperimentConfig& base, std::uint64_t base_seed) {
    if (n_samples < 10) throw input_error("ensemble needs n_samples >= 10");

    ExperimentConfig cfg = base;
    cfg.reservoir.map = kind;
    cfg.params = (kind == MapKind::Logistic) ? MapParams::logistic(control)
                                             : MapParams::henon(control, base.params.b);

    const NormalizedDataset dataset = build_dataset(
        cfg.params, cfg.n_train, cfg.train_len, cfg.n_test, cfg.test_len, cfg.data_seed);

    std::vector<double> rmses;
    rmses.reserve(n_samples);
    int failures = 0;
    for (int s = 0; s < n_samples; ++s) {
        cfg.reservoir.seed = rng::derive(base_seed, static_cast<std::uint64_t>(s));
        try {
            const Propagator prop = cfg.reservoir.make_propagator();
            const ReadoutModel model = train_readout(cfg, prop, dataset);
            const PredictionReport report =
                evaluate(cfg.reservoir, prop, model, dataset.test, cfg.gap, cfg.mode,
                         cfg.eval_start, cfg.threads);
            rmses.push_back(report.aggregate_rmse);
        } catch (const numeric_error&) {
            ++failures;
        }
    }
    return summarize_ensemble(rmses, /*n_bins=*/40, failures, base_seed);
}

}  // namespace qrc
