#include "qrc/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "qrc/io.hpp"
#include "qrc/rng.hpp"
#include "qrc/svg.hpp"

namespace qrc {

namespace {

void write_series_csv(const std::string& path, const std::vector<TimeSeries>& series) {
    const int dim = series.empty() ? 1 : series.front().dim();
    std::vector<std::string> cols = {"series_id", "t", "x"};
    if (dim == 2) cols.push_back("y");
    CsvWriter csv(path, cols);
    for (std::size_t i = 0; i < series.size(); ++i)
        for (int t = 0; t < series[i].length(); ++t) {
            csv.field(static_cast<long long>(i)).field(static_cast<long long>(t + 1));
            csv.field(series[i].values(t, 0));
            if (dim == 2) csv.field(series[i].values(t, 1));
            csv.end_row();
        }
}

std::vector<TimeSeries> denormalized(const NormalizedDataset& ds,
                                     const std::vector<TimeSeries>& normalized) {
    std::vector<TimeSeries> raw = normalized;
    for (auto& s : raw)
        for (int v = 0; v < s.dim(); ++v)
            for (int t = 0; t < s.length(); ++t)
                s.values(t, v) = ds.scale[v].inverse(s.values(t, v));
    return raw;
}

std::vector<std::string> run_generate(const Settings& s, const std::string& dir) {
    const ExperimentConfig cfg = s.experiment_config();
    const NormalizedDataset ds = build_dataset(cfg.params, cfg.n_train, cfg.train_len,
                                               cfg.n_test, cfg.test_len, cfg.data_seed);
    std::vector<std::string> files;
    files.push_back(output_path(dir, "train.csv"));
    write_series_csv(files.back(), denormalized(ds, ds.train));
    files.push_back(output_path(dir, "test.csv"));
    write_series_csv(files.back(), denormalized(ds, ds.test));
    files.push_back(output_path(dir, "train_normalized.csv"));
    write_series_csv(files.back(), ds.train);
    files.push_back(output_path(dir, "test_normalized.csv"));
    write_series_csv(files.back(), ds.test);

    files.push_back(output_path(dir, "scale.csv"));
    {
        CsvWriter csv(files.back(), {"var", "offset", "gain", "raw_min", "raw_max"});
        for (std::size_t v = 0; v < ds.scale.size(); ++v) {
            csv.field(static_cast<long long>(v))
                .field(ds.scale[v].offset)
                .field(ds.scale[v].gain)
                .field(ds.raw_bounds[v].first)
                .field(ds.raw_bounds[v].second);
            csv.end_row();
        }
    }
    std::cout << "generated " << ds.train.size() << " train + " << ds.test.size()
              << " test series (" << ds.clamp_count << " test values clamped)\n";
    return files;
}

std::vector<std::string> run_lle(const Settings& s, const std::string& dir) {
    const MapParams params = s.map_params();
    LyapunovConfig cfg;
    cfg.transient = s.lle_transient;
    cfg.n_iter = s.lle_iters;
    cfg.seed = s.seed;
    const LyapunovEstimate est = largest_lyapunov(params, cfg);
    std::cout << "lambda_star = " << format_double(est.lambda_star) << "  (" << map_name(params.kind)
              << ", control=" << format_double(params.control()) << ", n_iter=" << est.n_iter
              << ", transient=" << est.transient << ")\n";
    std::vector<std::string> files;
    files.push_back(output_path(dir, "lle.csv"));
    CsvWriter csv(files.back(), {"map", "control", "lambda_star", "transient", "n_iter"});
    csv.field(map_name(params.kind))
        .field(params.control())
        .field(est.lambda_star)
        .field(static_cast<long long>(est.transient))
        .field(static_cast<long long>(est.n_iter));
    csv.end_row();
    return files;
}

void write_features_csv(const std::string& path, const Eigen::MatrixXd& m) {
    std::vector<std::string> cols = {"feature"};
    for (Eigen::Index c = 0; c < m.cols(); ++c) cols.push_back("w" + std::to_string(c));
    CsvWriter csv(path, cols);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        csv.field(static_cast<long long>(r));
        for (Eigen::Index c = 0; c < m.cols(); ++c) csv.field(m(r, c));
        csv.end_row();
    }
}

std::vector<std::string> run_train(const Settings& s, const std::string& dir) {
    const ExperimentConfig cfg = s.experiment_config();
    const Propagator prop = cfg.reservoir.make_propagator();
    const NormalizedDataset ds = build_dataset(cfg.params, cfg.n_train, cfg.train_len,
                                               cfg.n_test, cfg.test_len, cfg.data_seed);
    const ReadoutModel model = train_readout(cfg, prop, ds);

    std::vector<std::string> files;
    const std::string model_file =
        s.model_path.empty() ? output_path(dir, "model.txt") : s.model_path;
    save_model(model, model_file);
    files.push_back(model_file);

    if (s.dump_features) {
        const auto windows = build_windows(ds, cfg.reservoir.layers, cfg.gap);
        files.push_back(output_path(dir, "features.csv"));
        write_features_csv(files.back(),
                           batch_features(cfg.reservoir, prop, windows, cfg.threads));
    }
    std::cout << "trained readout on " << model.meta.samples << " windows -> " << model_file
              << "\n";
    return files;
}

std::vector<std::string> run_predict(const Settings& s, const std::string& dir) {
    if (s.model_path.empty()) throw input_error("predict requires model_path");
    const ExperimentConfig cfg = s.experiment_config();
    const Propagator prop = cfg.reservoir.make_propagator();
    const NormalizedDataset ds = build_dataset(cfg.params, cfg.n_train, cfg.train_len,
                                               cfg.n_test, cfg.test_len, cfg.data_seed);
    const ReadoutModel model = load_model(s.model_path);
    const PredictionReport report = evaluate(cfg.reservoir, prop, model, ds.test, cfg.gap,
                                             cfg.mode, cfg.eval_start, cfg.threads);

    std::vector<std::string> files;
    files.push_back(output_path(dir, "predictions.csv"));
    {
        std::vector<std::string> cols = {"series_id", "t", "true_x", "predicted_x"};
        if (cfg.reservoir.n_vars() == 2) {
            cols.push_back("true_y");
            cols.push_back("predicted_y");
        }
        CsvWriter csv(files.back(), cols);
        for (std::size_t i = 0; i < report.predicted.size(); ++i)
            for (Eigen::Index t = 0; t < report.predicted[i].rows(); ++t) {
                csv.field(static_cast<long long>(i))
                    .field(static_cast<long long>(report.eval_start + t))
                    .field(report.truth[i](t, 0))
                    .field(report.predicted[i](t, 0));
                if (cfg.reservoir.n_vars() == 2)
                    csv.field(report.truth[i](t, 1)).field(report.predicted[i](t, 1));
                csv.end_row();
            }
    }
    files.push_back(output_path(dir, "report.csv"));
    {
        std::vector<std::string> cols = {"series_id", "rmse_x"};
        if (cfg.reservoir.n_vars() == 2) cols.push_back("rmse_y");
        CsvWriter csv(files.back(), cols);
        for (Eigen::Index i = 0; i < report.series_rmse.rows(); ++i) {
            csv.field(static_cast<long long>(i)).field(report.series_rmse(i, 0));
            if (cfg.reservoir.n_vars() == 2) csv.field(report.series_rmse(i, 1));
            csv.end_row();
        }
    }
    std::cout << eval_mode_name(report.mode) << " aggregate RMSE = "
              << format_double(report.aggregate_rmse) << " over " << report.predicted.size()
              << " test series\n";
    return files;
}

std::vector<std::string> run_sweep_bifurcation(const Settings& s, const std::string& dir) {
    const ExperimentConfig base = s.experiment_config();
    const MapKind kind = map_from_name(s.map);
    const SweepResult sweep = bifurcation_sweep(kind, s.sweep_grid(), base);

    std::vector<std::string> files;
    const std::string control = kind == MapKind::Logistic ? "r" : "a";
    files.push_back(output_path(dir, "sweep.csv"));
    {
        CsvWriter csv(files.back(), {"index", control, "lle", "rmse", "clamped"});
        for (std::size_t i = 0; i < sweep.points.size(); ++i) {
            const auto& p = sweep.points[i];
            csv.field(static_cast<long long>(i))
                .field(p.control)
                .field(p.lle)
                .field(p.rmse)
                .field(static_cast<long long>(p.clamped));
            csv.end_row();
        }
    }
    files.push_back(output_path(dir, "tails.csv"));
    {
        CsvWriter csv(files.back(), {control, "t", "true_x", "predicted_x"});
        for (const auto& p : sweep.points)
            for (std::size_t t = 0; t < p.true_tail.size(); ++t) {
                csv.field(p.control)
                    .field(static_cast<long long>(base.eval_start + t))
                    .field(p.true_tail[t])
                    .field(p.predicted_tail[t]);
                csv.end_row();
            }
    }

    // plots: bifurcation diagram (true vs predicted) and RMSE/LLE profile
    SvgSeries truth, pred;
    truth.color = "#c23b22";
    truth.label = "true x_inf";
    truth.points_only = true;
    pred.color = "#1f6fb4";
    pred.label = "predicted x_inf";
    pred.points_only = true;
    for (const auto& p : sweep.points)
        for (std::size_t t = 0; t < p.true_tail.size(); ++t) {
            truth.x.push_back(p.control);
            truth.y.push_back(p.true_tail[t]);
            pred.x.push_back(p.control);
            pred.y.push_back(p.predicted_tail[t]);
        }
    files.push_back(output_path(dir, "bifurcation.svg"));
    write_svg_chart(files.back(), "bifurcation diagram: " + map_name(kind), control,
                    "x_inf", {truth, pred});

    SvgSeries rmse, lle;
    rmse.color = "#1f6fb4";
    rmse.label = "RMSE";
    lle.color = "#333333";
    lle.label = "LLE";
    for (const auto& p : sweep.points) {
        rmse.x.push_back(p.control);
        rmse.y.push_back(p.rmse);
        lle.x.push_back(p.control);
        lle.y.push_back(p.lle);
    }
    files.push_back(output_path(dir, "rmse.svg"));
    write_svg_chart(files.back(), "prediction error: " + map_name(kind), control, "RMSE",
                    {rmse}, /*log_y=*/true);
    files.push_back(output_path(dir, "lle.svg"));
    write_svg_chart(files.back(), "largest Lyapunov exponent: " + map_name(kind), control,
                    "lambda*", {lle});

    double rs_all = NAN, rs_chaotic = NAN;
    try {
        rs_all = lle_rmse_correlation(sweep, Region::All);
        rs_chaotic = lle_rmse_correlation(sweep, Region::ChaoticOnly);
    } catch (const input_error&) {
        // small sweeps: correlation left out
    }
    std::cout << "sweep of " << sweep.points.size() << " points done; spearman(LLE,RMSE) all="
              << format_double(rs_all) << " chaotic=" << format_double(rs_chaotic) << "\n";
    return files;
}

std::vector<std::string> run_sweep_grid(const Settings& s, const std::string& dir) {
    const ExperimentConfig base = s.experiment_config();
    const MapKind kind = map_from_name(s.map);
    const double control = base.params.control();
    const GridResult grid =
        hyperparameter_grid(kind, control, s.layers_grid(), s.reps_grid(), s.gap, base);

    std::vector<std::string> files;
    files.push_back(output_path(dir, "grid.csv"));
    {
        CsvWriter csv(files.back(), {"layers", "reps", "rmse", "skipped"});
        for (std::size_t i = 0; i < grid.layers.size(); ++i)
            for (std::size_t j = 0; j < grid.reps.size(); ++j) {
                const double v = grid.rmse(static_cast<Eigen::Index>(i),
                                           static_cast<Eigen::Index>(j));
                csv.field(grid.layers[i])
                    .field(grid.reps[j])
                    .field(v)
                    .field(static_cast<long long>(std::isfinite(v) ? 0 : 1));
                csv.end_row();
            }
    }
    std::vector<std::string> row_labels, col_labels;
    for (int d : grid.layers) row_labels.push_back("d=" + std::to_string(d));
    for (int n : grid.reps) col_labels.push_back("rep=" + std::to_string(n));
    files.push_back(output_path(dir, "grid.svg"));
    write_svg_heatmap(files.back(),
                      "RMSE vs layers/repetitions (" + map_name(kind) + ", control=" +
                          format_double(control) + ", gap=" + std::to_string(s.gap) + ")",
                      "repetitions", "layers", grid.rmse, row_labels, col_labels);

    const auto [bd, br] = grid.argmin();
    std::cout << "grid done; lowest RMSE at layers=" << bd << ", reps=" << br << "\n";
    return files;
}

std::vector<std::string> run_sweep_noise(const Settings& s, const std::string& dir) {
    const ExperimentConfig base = s.experiment_config();
    const MapKind kind = map_from_name(s.map);
    const auto points = noise_robustness(kind, base.params.control(), s.gamma_grid(), base);

    std::vector<std::string> files;
    files.push_back(output_path(dir, "noise.csv"));
    {
        CsvWriter csv(files.back(), {"gamma", "rmse_clean_trained", "rmse_insitu_trained"});
        for (const auto& p : points) {
            csv.field(p.gamma).field(p.rmse_clean_trained).field(p.rmse_insitu_trained);
            csv.end_row();
        }
    }
    SvgSeries clean, insitu;
    clean.color = "#1f6fb4";
    clean.label = "trained without noise";
    insitu.color = "#c23b22";
    insitu.label = "trained in situ";
    for (const auto& p : points) {
        clean.x.push_back(p.gamma);
        clean.y.push_back(p.rmse_clean_trained);
        insitu.x.push_back(p.gamma);
        insitu.y.push_back(p.rmse_insitu_trained);
    }
    files.push_back(output_path(dir, "noise.svg"));
    write_svg_chart(files.back(), "dephasing robustness: " + map_name(kind), "gamma",
                    "RMSE", {clean, insitu}, /*log_y=*/true);
    std::cout << "noise sweep over " << points.size() << " gamma values done\n";
    return files;
}

std::vector<std::string> run_sweep_ensemble(const Settings& s, const std::string& dir) {
    const ExperimentConfig base = s.experiment_config();
    const MapKind kind = map_from_name(s.map);
    EnsembleReport report =
        hamiltonian_ensemble(kind, base.params.control(), s.samples, base, s.seed);
    if (s.bins != 40)
        report = summarize_ensemble(report.rmses, s.bins, report.failures, report.base_seed);

    std::vector<std::string> files;
    files.push_back(output_path(dir, "ensemble.csv"));
    {
        CsvWriter csv(files.back(), {"sample", "reservoir_seed", "rmse"});
        for (std::size_t i = 0; i < report.rmses.size(); ++i) {
            csv.field(static_cast<long long>(i))
                .field(rng::derive(report.base_seed, i))
                .field(report.rmses[i]);
            csv.end_row();
        }
    }
    files.push_back(output_path(dir, "histogram.csv"));
    {
        CsvWriter csv(files.back(),
                      {"bin", "lower_edge", "upper_edge", "count", "poisson_expected"});
        const double n = static_cast<double>(report.rmses.size());
        for (int k = 0; k < report.n_bins; ++k) {
            // Poisson pmf over bin indices, scaled to counts.
            const double logpmf = -report.poisson_rate + k * std::log(report.poisson_rate) -
                                  std::lgamma(k + 1.0);
            csv.field(k)
                .field(report.bin_min + k * report.bin_width)
                .field(report.bin_min + (k + 1) * report.bin_width)
                .field(report.histogram[k])
                .field(report.poisson_rate > 0.0 ? n * std::exp(logpmf) : (k == 0 ? n : 0.0));
            csv.end_row();
        }
    }
    SvgSeries counts, fit;
    counts.color = "#1f6fb4";
    counts.label = "samples";
    fit.color = "#c23b22";
    fit.label = "poisson fit";
    const double n = static_cast<double>(report.rmses.size());
    for (int k = 0; k < report.n_bins; ++k) {
        const double center = report.bin_min + (k + 0.5) * report.bin_width;
        counts.x.push_back(center);
        counts.y.push_back(report.histogram[k]);
        const double logpmf = -report.poisson_rate + k * std::log(report.poisson_rate) -
                              std::lgamma(k + 1.0);
        fit.x.push_back(center);
        fit.y.push_back(report.poisson_rate > 0.0 ? n * std::exp(logpmf) : (k == 0 ? n : 0.0));
    }
    files.push_back(output_path(dir, "ensemble.svg"));
    write_svg_chart(files.back(),
                    "RMSE over " + std::to_string(report.rmses.size()) +
                        " random reservoirs (" + map_name(kind) + ")",
                    "RMSE", "count", {counts, fit});
    std::cout << "ensemble of " << report.rmses.size() << " reservoirs done ("
              << report.failures << " failures), poisson rate = "
              << format_double(report.poisson_rate) << "\n";
    return files;
}

}  // namespace

std::string resolve_out_dir(const Settings& settings) {
    if (!settings.out_dir.empty()) return settings.out_dir;
    if (const char* env = std::getenv("QRC_OUT_DIR"))
        return (std::filesystem::path(env) / settings.experiment).string();
    return (std::filesystem::path("qrc_out") / settings.experiment).string();
}

std::vector<std::string> run_experiment(const Settings& settings, const std::string& out_dir,
                                        const std::vector<std::string>& command) {
    const std::string& name = settings.experiment;
    std::vector<std::string> files;
    if (name == "generate") files = run_generate(settings, out_dir);
    else if (name == "lle") files = run_lle(settings, out_dir);
    else if (name == "train") files = run_train(settings, out_dir);
    else if (name == "predict") files = run_predict(settings, out_dir);
    else if (name == "sweep-bifurcation") files = run_sweep_bifurcation(settings, out_dir);
    else if (name == "sweep-grid") files = run_sweep_grid(settings, out_dir);
    else if (name == "sweep-noise") files = run_sweep_noise(settings, out_dir);
    else if (name == "sweep-ensemble") files = run_sweep_ensemble(settings, out_dir);
    else throw input_error("unknown experiment '" + name + "'");

    const std::string manifest = output_path(out_dir, "manifest.json");
    write_manifest(manifest, settings, command, files);
    files.push_back(manifest);
    return files;
}

}  // namespace qrc
