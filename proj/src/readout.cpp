#include "qrc/readout.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qrc {

ReadoutModel ridge_fit(const Eigen::MatrixXd& m, const Eigen::MatrixXd& y, double epsilon) {
    if (m.cols() != y.cols())
        throw input_error("feature and target matrices disagree on sample count");
    if (m.cols() < 1) throw input_error("ridge_fit needs at least one sample");
    if (!(epsilon > 0.0)) throw input_error("epsilon must be > 0");
    if (!m.allFinite() || !y.allFinite())
        throw numeric_error("non-finite entries in features or targets");

    // (M M^T + eps I) X = M Y^T, W = X^T. Cholesky on the SPD normal matrix
    // instead of forming the inverse.
    Eigen::MatrixXd gram = m * m.transpose();
    gram.diagonal().array() += epsilon;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw numeric_error("ridge normal matrix is not positive definite");

    ReadoutModel model;
    model.epsilon = epsilon;
    model.w = llt.solve(m * y.transpose()).transpose();
    model.meta.samples = static_cast<long>(m.cols());
    if (!model.w.allFinite()) throw numeric_error("ridge solution is non-finite");
    return model;
}

Eigen::VectorXd predict(const ReadoutModel& model, const Eigen::VectorXd& features) {
    if (features.size() != model.w.cols())
        throw input_error("feature length " + std::to_string(features.size()) +
                          " does not match model width " + std::to_string(model.w.cols()));
    return model.w * features;
}

std::string eval_mode_name(EvalMode mode) {
    return mode == EvalMode::TeacherForced ? "teacher-forced" : "autonomous";
}

Eigen::MatrixXd autonomous_rollout(
    const std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>& step,
    const Eigen::MatrixXd& warmup, int d, int horizon, bool clamp01) {
    if (warmup.rows() < d) throw input_error("warmup shorter than window depth");
    if (horizon < 1) throw input_error("rollout horizon must be >= 1");

    const Eigen::Index vars = warmup.cols();
    Eigen::MatrixXd history = warmup.bottomRows(d);
    Eigen::MatrixXd out(horizon, vars);
    for (int t = 0; t < horizon; ++t) {
        Eigen::MatrixXd window = history;
        if (clamp01) clamp01_in_place(window);
        const Eigen::VectorXd next = step(window);
        if (next.size() != vars) throw input_error("rollout step returned wrong dimension");
        out.row(t) = next;
        history.topRows(d - 1) = history.bottomRows(d - 1).eval();
        history.row(d - 1) = next;
    }
    return out;
}

PredictionReport evaluate(const ReservoirConfig& cfg, const Propagator& prop,
                          const ReadoutModel& model, const std::vector<TimeSeries>& test,
                          int gap, EvalMode mode, int eval_start, int threads) {
    if (test.empty()) throw input_error("evaluate needs at least one test series");
    if (gap < 0) throw input_error("gap must be >= 0");
    if (mode == EvalMode::Autonomous && gap != 0)
        throw input_error("autonomous rollout requires gap == 0");
    const int d = cfg.layers;
    const int vars = cfg.n_vars();
    if (eval_start <= d + gap)
        throw input_error("eval_start must exceed d + gap");

    PredictionReport report;
    report.mode = mode;
    report.gap = gap;
    report.eval_start = eval_start;
    report.series_rmse.resize(static_cast<Eigen::Index>(test.size()), vars);

    for (std::size_t si = 0; si < test.size(); ++si) {
        const TimeSeries& series = test[si];
        if (series.length() <= d + gap)
            throw input_error("test series too short for d + gap");
        if (eval_start > series.length())
            throw input_error("eval_start beyond series end");
        const int horizon = series.length() - eval_start + 1;

        Eigen::MatrixXd predicted(horizon, vars);
        Eigen::MatrixXd truth(horizon, vars);
        for (int k = 0; k < horizon; ++k)
            truth.row(k) = series.values.row(eval_start - 1 + k);

        if (mode == EvalMode::TeacherForced) {
            // batch all windows of the evaluation span
            std::vector<Eigen::MatrixXd> windows;
            windows.reserve(horizon);
            for (int k = 0; k < horizon; ++k) {
                const int target_row = eval_start - 1 + k;
                Eigen::MatrixXd w = series.values.middleRows(target_row - gap - d, d);
                report.clamped_inputs += clamp01_in_place(w);
                windows.push_back(std::move(w));
            }
            const Eigen::MatrixXd feats = batch_features(cfg, prop, windows, threads);
            for (int k = 0; k < horizon; ++k)
                predicted.row(k) = predict(model, feats.col(k));
        } else {
            const Eigen::MatrixXd warmup = series.values.topRows(eval_start - 1);
            auto step = [&](const Eigen::MatrixXd& window) {
                return predict(model, run_window(cfg, prop, window));
            };
            predicted = autonomous_rollout(step, warmup, d, horizon, /*clamp01=*/true);
        }

        report.predicted.push_back(predicted);
        report.truth.push_back(truth);
        for (int v = 0; v < vars; ++v)
            report.series_rmse(static_cast<Eigen::Index>(si), v) =
                std::sqrt((predicted.col(v) - truth.col(v)).squaredNorm() / horizon);
    }

    report.aggregate_rmse = report.series_rmse.col(0).mean();
    return report;
}

void save_model(const ReadoutModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open model file for writing: " + path);
    out << "qrc-readout-model v1\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%lld %lld %.17g\n",
                  static_cast<long long>(model.w.rows()),
                  static_cast<long long>(model.w.cols()), model.epsilon);
    out << buf;
    out << model.meta.samples << " " << model.meta.cfg_hash << " "
        << model.meta.dataset_hash << "\n";
    for (Eigen::Index i = 0; i < model.w.rows(); ++i)
        for (Eigen::Index j = 0; j < model.w.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", model.w(i, j));
            out << buf << (j + 1 == model.w.cols() ? "\n" : " ");
        }
    if (!out) throw input_error("failed writing model file: " + path);
}

ReadoutModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open model file: " + path);
    std::string header;
    std::getline(in, header);
    if (header != "qrc-readout-model v1")
        throw input_error("unrecognized model file header in " + path);
    ReadoutModel model;
    Eigen::Index rows = 0, cols = 0;
    in >> rows >> cols >> model.epsilon;
    in >> model.meta.samples >> model.meta.cfg_hash >> model.meta.dataset_hash;
    if (!in || rows < 1 || cols < 1)
        throw input_error("malformed model dimensions in " + path);
    model.w.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            if (!(in >> model.w(i, j)))
                throw input_error("model file truncated: " + path);
    return model;
}

}  // namespace qrc
