#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qrc/errors.hpp"

namespace qrc {

enum class MapKind { Logistic, Henon };

inline int map_dimension(MapKind kind) { return kind == MapKind::Logistic ? 1 : 2; }
std::string map_name(MapKind kind);
MapKind map_from_name(const std::string& name);

// Control parameters of a discrete map. Only the fields of the active kind
// are meaningful.
struct MapParams {
    MapKind kind = MapKind::Logistic;
    double r = 3.9;  // logistic growth rate, r in [0, 4]
    double a = 1.4;  // henon quadratic coefficient
    double b = 0.3;  // henon contraction

    static MapParams logistic(double r);
    static MapParams henon(double a, double b = 0.3);

    // Throws input_error on hard violations (logistic r outside [0,4]).
    void validate() const;
    // True for henon parameters outside the usual sweep box (a in [1,1.4],
    // b = 0.3). Allowed, but reported in manifests.
    bool outside_sweep_range() const;

    double control() const { return kind == MapKind::Logistic ? r : a; }
};

// One orbit. Row t of `values` is the state at step t+1 (step 1 is the
// initial state). Regenerating from (params, initial_state, length) is
// bit-identical.
struct TimeSeries {
    Eigen::MatrixXd values;  // length x dim
    MapParams params;
    Eigen::VectorXd initial_state;

    int length() const { return static_cast<int>(values.rows()); }
    int dim() const { return static_cast<int>(values.cols()); }
};

// Per-variable affine map used for normalization: norm = (raw - offset) * gain.
struct AffineScale {
    double offset = 0.0;
    double gain = 1.0;
    double forward(double raw) const { return (raw - offset) * gain; }
    double inverse(double norm) const { return norm / gain + offset; }
};

struct NormalizedDataset {
    std::vector<TimeSeries> train;  // values normalized to [0, 1]
    std::vector<TimeSeries> test;   // same transform; may leave [0,1] slightly
    std::vector<AffineScale> scale;                    // per variable
    std::vector<std::pair<double, double>> raw_bounds; // per variable, train pool
    int clamp_count = 0;  // test values outside [0,1] (clamped at encoding)
    MapParams params;
    std::uint64_t seed = 0;
};

struct LyapunovEstimate {
    double lambda_star = 0.0;  // nats per step
    long n_iter = 0;
    long transient = 0;
};

struct LyapunovConfig {
    long transient = 1000;
    long n_iter = 100000;
    std::uint64_t seed = 1;
};

// Supervised sample: `values` holds d consecutive states (oldest first),
// `target` the state gap+1 steps after the newest one.
struct Window {
    Eigen::MatrixXd values;  // d x dim
    Eigen::VectorXd target;  // dim
    int series = 0;
    int target_index = 0;  // 0-based position of the target in its series
};

// Single application of the map recurrence. Throws numeric_error on
// non-finite input ("divergent orbit").
Eigen::VectorXd map_step(const Eigen::VectorXd& state, const MapParams& params);

// Orbit of `length` steps including the initial state as step 1.
// Henon orbits leaving |x| > 10 throw numeric_error naming the step.
TimeSeries generate_series(const MapParams& params, const Eigen::VectorXd& initial,
                           int length);

// Training/test pool with pooled-train normalization. Deterministic in seed.
// Logistic series are divided by the pooled training maximum; henon series
// are mapped per variable to [0,1] by min-max over the pooled training set.
NormalizedDataset build_dataset(const MapParams& params, int n_train, int train_len,
                                int n_test, int test_len, std::uint64_t seed);

// Largest Lyapunov exponent by tangent-space iteration (analytic Jacobian,
// per-step renormalization for henon). Deterministic in cfg.seed.
LyapunovEstimate largest_lyapunov(const MapParams& params, const LyapunovConfig& cfg = {});

// Rolling windows with stride 1 over one series.
std::vector<Window> series_windows(const TimeSeries& series, int d, int gap,
                                   int series_id = 0);

// Rolling windows over every training series of the dataset.
std::vector<Window> build_windows(const NormalizedDataset& dataset, int d, int gap);

}  // namespace qrc
