#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qrc/chaos.hpp"
#include "qrc/reservoir.hpp"

namespace qrc {

// Linear readout W (targets x features) from ridge regression
// W = Y M^T (M M^T + eps I)^{-1}.
struct ReadoutModel {
    Eigen::MatrixXd w;
    double epsilon = 1e-8;
    struct Meta {
        long samples = 0;
        std::uint64_t cfg_hash = 0;
        std::uint64_t dataset_hash = 0;
    } meta;
};

ReadoutModel ridge_fit(const Eigen::MatrixXd& m, const Eigen::MatrixXd& y,
                       double epsilon = 1e-8);

// Raw linear prediction W * features (no clipping).
Eigen::VectorXd predict(const ReadoutModel& model, const Eigen::VectorXd& features);

enum class EvalMode { TeacherForced, Autonomous };

std::string eval_mode_name(EvalMode mode);

struct PredictionReport {
    EvalMode mode = EvalMode::TeacherForced;
    int gap = 0;
    int eval_start = 151;  // 1-based step index of the first predicted target
    std::vector<Eigen::MatrixXd> predicted;  // per series: horizon x n_vars
    std::vector<Eigen::MatrixXd> truth;      // per series: horizon x n_vars (normalized)
    Eigen::MatrixXd series_rmse;             // series x n_vars
    double aggregate_rmse = 0.0;             // mean over series of the x-component RMSE
    int clamped_inputs = 0;                  // encodings clamped to [0,1]
};

// Scores the model on test series (normalized). TeacherForced builds every
// window from true history; Autonomous warms up on true values until
// eval_start - 1 and then feeds predictions back (clamped to [0,1];
// requires gap == 0). RMSE is computed in normalized space over
// t = eval_start .. series end.
PredictionReport evaluate(const ReservoirConfig& cfg, const Propagator& prop,
                          const ReadoutModel& model, const std::vector<TimeSeries>& test,
                          int gap, EvalMode mode, int eval_start = 151, int threads = 1);

// Feedback rollout used by autonomous evaluation: `step` maps a d x n_vars
// window (oldest first) to the next value; predictions are appended to the
// history for `horizon` steps. Exposed so the rollout mechanics can be
// tested with an exact map oracle.
Eigen::MatrixXd autonomous_rollout(
    const std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>& step,
    const Eigen::MatrixXd& warmup, int d, int horizon, bool clamp01);

// Flat text serialization (dimension header + row-major values).
void save_model(const ReadoutModel& model, const std::string& path);
ReadoutModel load_model(const std::string& path);

}  // namespace qrc
