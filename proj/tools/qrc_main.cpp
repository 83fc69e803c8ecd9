#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "qrc/io.hpp"
#include "qrc/runner.hpp"
#include "qrc/version.hpp"

namespace {

// Config file first, explicit flags second. The file is applied before the
// main parse so that bound options override it.
std::string find_config_arg(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return "";
}

void add_common_options(CLI::App* cmd, qrc::Settings& s) {
    cmd->add_option("--config", "config file (key = value per line)")
        ->expected(1)
        ->check(CLI::ExistingFile);
    cmd->add_option("--map", s.map, "logistic | henon");
    cmd->add_option("--r", s.r, "logistic control parameter");
    cmd->add_option("--a", s.a, "henon control parameter");
    cmd->add_option("--b", s.b, "henon contraction parameter");
    cmd->add_option("--layers,-d", s.layers, "quantum layers d (default per map)");
    cmd->add_option("--reps", s.reps, "encoding repetitions per variable");
    cmd->add_option("--hidden", s.hidden, "hidden qubits (default per map)");
    cmd->add_option("--tau", s.tau, "evolution time per layer (units of 1/J)");
    cmd->add_option("--gamma", s.gamma, "dephasing strength");
    cmd->add_option("--substeps", s.substeps, "Lindblad RK4 substeps per tau");
    cmd->add_option("--coupling", s.coupling, "XY exchange coupling J");
    cmd->add_option("--boundary", s.boundary, "open | periodic");
    cmd->add_option("--seed", s.seed, "reservoir field seed");
    cmd->add_flag("--bias", s.bias, "append a constant 1 feature");
    cmd->add_option("--n-train", s.n_train, "training series count");
    cmd->add_option("--train-len", s.train_len, "training series length");
    cmd->add_option("--n-test", s.n_test, "test series count");
    cmd->add_option("--test-len", s.test_len, "test series length");
    cmd->add_option("--data-seed", s.data_seed, "dataset seed");
    cmd->add_option("--epsilon", s.epsilon, "ridge regularization");
    cmd->add_option("--gap", s.gap, "prediction gap (0: x_t, 1: x_{t+1})");
    cmd->add_option("--eval-start", s.eval_start, "first predicted step (1-based)");
    cmd->add_option("--mode", s.mode, "teacher | autonomous");
    cmd->add_option("--threads", s.threads, "worker threads (0 = all cores)");
    cmd->add_option("--out", s.out_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
    qrc::Settings settings;

    const std::string config_path = find_config_arg(argc, argv);
    if (!config_path.empty()) {
        try {
            settings = qrc::parse_config(config_path);
        } catch (const qrc::input_error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }

    CLI::App app{"quantum reservoir computing for chaotic maps"};
    app.set_version_flag("--version", qrc::kVersion);
    app.require_subcommand(1);

    std::string manifest_path;

    auto* generate = app.add_subcommand("generate", "generate and normalize a dataset");
    add_common_options(generate, settings);
    auto* lle = app.add_subcommand("lle", "largest Lyapunov exponent of a map");
    add_common_options(lle, settings);
    lle->add_option("--transient", settings.lle_transient, "discarded steps");
    lle->add_option("--iters", settings.lle_iters, "tangent iterations");
    auto* train = app.add_subcommand("train", "train a readout model");
    add_common_options(train, settings);
    train->add_option("--model-out", settings.model_path, "model file to write");
    train->add_flag("--dump-features", settings.dump_features, "write feature matrix CSV");
    auto* predict = app.add_subcommand("predict", "evaluate a trained model");
    add_common_options(predict, settings);
    predict->add_option("--model", settings.model_path, "model file to load")->required();
    auto* sweep_bif = app.add_subcommand("sweep-bifurcation",
                                         "bifurcation + RMSE + LLE over a control grid");
    add_common_options(sweep_bif, settings);
    sweep_bif->add_option("--min", settings.sweep_min, "grid start (default per map)");
    sweep_bif->add_option("--max", settings.sweep_max, "grid end (default per map)");
    sweep_bif->add_option("--points", settings.points, "grid size");
    auto* sweep_grid = app.add_subcommand("sweep-grid", "RMSE over layers x repetitions");
    add_common_options(sweep_grid, settings);
    sweep_grid->add_option("--layers-range", settings.layers_range, "e.g. 1..3");
    sweep_grid->add_option("--reps-range", settings.reps_range, "e.g. 1..4");
    auto* sweep_noise = app.add_subcommand("sweep-noise",
                                           "clean-trained vs in-situ readout under dephasing");
    add_common_options(sweep_noise, settings);
    sweep_noise->add_option("--gammas", settings.gammas, "comma-separated gamma grid");
    auto* sweep_ens = app.add_subcommand("sweep-ensemble",
                                         "RMSE statistics over random reservoir Hamiltonians");
    add_common_options(sweep_ens, settings);
    sweep_ens->add_option("--samples", settings.samples, "ensemble size (paper: 1000)");
    sweep_ens->add_option("--bins", settings.bins, "histogram bins");
    auto* rerun = app.add_subcommand("rerun", "re-execute an experiment from its manifest");
    rerun->add_option("manifest", manifest_path, "manifest.json of a previous run")
        ->required()
        ->check(CLI::ExistingFile);
    std::string rerun_out;
    rerun->add_option("--out", rerun_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    std::vector<std::string> command(argv, argv + argc);
    try {
        if (rerun->parsed()) {
            qrc::Settings s = qrc::settings_from_manifest(manifest_path, nullptr);
            if (!rerun_out.empty()) s.out_dir = rerun_out;
            const std::string dir = qrc::resolve_out_dir(s);
            qrc::run_experiment(s, dir, command);
            std::cout << "rerun of '" << s.experiment << "' written to " << dir << "\n";
            return 0;
        }
        settings.experiment = app.get_subcommands().front()->get_name();
        const std::string dir = qrc::resolve_out_dir(settings);
        qrc::run_experiment(settings, dir, command);
        std::cout << "outputs written to " << dir << "\n";
        return 0;
    } catch (const qrc::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}
