#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qrc/chaos.hpp"
#include "qrc/readout.hpp"
#include "qrc/reservoir.hpp"

namespace qrc {

// Shared settings for every study: reservoir + dataset + evaluation span.
struct ExperimentConfig {
    ReservoirConfig reservoir;
    MapParams params;
    int n_train = 100;
    int train_len = 20;
    int n_test = 10;
    int test_len = 200;
    int gap = 0;
    double epsilon = 1e-8;
    int eval_start = 151;
    std::uint64_t data_seed = 7;
    int threads = 1;
    EvalMode mode = EvalMode::TeacherForced;

    // Paper defaults: logistic d=2, n_rep=2, n_H=4; henon d=1, n_rep=2, n_H=3.
    static ExperimentConfig defaults_for(MapKind kind);
};

struct TrainedRun {
    NormalizedDataset dataset;
    ReadoutModel model;
    PredictionReport report;
};

// dataset -> windows -> features -> ridge -> evaluation, one shot.
TrainedRun train_and_evaluate(const ExperimentConfig& cfg, const Propagator& prop);

// Train a model on the dataset with the given propagator (the evaluation-free
// half of train_and_evaluate; the noise study trains and tests under
// different propagators).
ReadoutModel train_readout(const ExperimentConfig& cfg, const Propagator& prop,
                           const NormalizedDataset& dataset);

struct SweepPoint {
    double control = 0.0;
    double lle = 0.0;
    double rmse = 0.0;                  // aggregate teacher-forced RMSE (x component)
    std::vector<double> true_tail;      // raw-space tail of the first test series
    std::vector<double> predicted_tail; // raw-space predictions for the same steps
    int clamped = 0;
};

struct SweepResult {
    MapKind map = MapKind::Logistic;
    std::vector<double> grid;
    std::vector<SweepPoint> points;
};

// Per grid point: build dataset, train, evaluate, estimate the LLE, and
// record the predicted/true bifurcation tail (t = eval_start..end, first
// test series, mapped back to raw values).
SweepResult bifurcation_sweep(MapKind kind, const std::vector<double>& grid,
                              const ExperimentConfig& base);

// Rank correlation with average ranks for ties.
double spearman(const std::vector<double>& u, const std::vector<double>& v);

enum class Region { All, ChaoticOnly };

// spearman(LLE, RMSE) over sweep points; ChaoticOnly keeps LLE > 0.
double lle_rmse_correlation(const SweepResult& sweep, Region region);

// Number of clusters in a predicted tail: sorted values split where
// consecutive gaps exceed `tol`.
int cluster_count(std::vector<double> values, double tol);

struct GridResult {
    std::vector<int> layers;
    std::vector<int> reps;
    Eigen::MatrixXd rmse;  // layers x reps; NaN marks skipped cells
    std::vector<std::pair<int, int>> skipped;

    std::pair<int, int> argmin() const;  // (d, n_rep) of the smallest RMSE
};

// One trained-and-evaluated RMSE per (d, n_rep) cell over a fixed dataset
// and base seed. Cells whose qubit count exceeds the dense guard are
// skipped, not failed.
GridResult hyperparameter_grid(MapKind kind, double control,
                               const std::vector<int>& layers,
                               const std::vector<int>& reps, int gap,
                               const ExperimentConfig& base);

struct NoisePoint {
    double gamma = 0.0;
    double rmse_clean_trained = 0.0;  // readout fit at gamma = 0, tested at gamma
    double rmse_insitu_trained = 0.0; // readout fit and tested at the same gamma
};

// Both arms share datasets and seeds; only the training-time noise differs.
std::vector<NoisePoint> noise_robustness(MapKind kind, double control,
                                         const std::vector<double>& gammas,
                                         const ExperimentConfig& base);

struct EnsembleReport {
    std::vector<double> rmses;  // one per sampled Hamiltonian, sample order
    int n_bins = 40;
    std::vector<int> histogram;
    double bin_min = 0.0;
    double bin_width = 0.0;
    double poisson_rate = 0.0;  // MLE over bin indices
    int failures = 0;
    std::uint64_t base_seed = 0;
};

// Histogram + Poisson fit over already-computed RMSEs (separated so the
// statistics are testable without reservoir runs).
EnsembleReport summarize_ensemble(const std::vector<double>& rmses, int n_bins,
                                  int failures, std::uint64_t base_seed);

// n_samples reservoirs with independently drawn h fields (one per sample,
// derived from base_seed), each trained and evaluated on the same dataset.
EnsembleReport hamiltonian_ensemble(MapKind kind, double control, int n_samples,
                                    const ExperimentConfig& base, std::uint64_t base_seed);

}  // namespace qrc
