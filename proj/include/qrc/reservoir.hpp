#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "qrc/chaos.hpp"
#include "qrc/quantum.hpp"

namespace qrc {

// All protocol hyperparameters. The chain has N = n_inputs + n_hidden qubits
// with input qubits on sites 1..n_inputs (for henon, the x repetitions
// precede the y repetitions); h fields are drawn from `seed`.
struct ReservoirConfig {
    MapKind map = MapKind::Logistic;
    int layers = 2;    // d
    int n_rep = 2;     // encoded copies of each input variable per layer
    int n_hidden = 4;  // hidden qubits
    double tau = 1.0;
    double gamma = 0.0;
    int n_substeps = 200;
    double coupling = 1.0;
    Boundary boundary = Boundary::Open;
    std::uint64_t seed = 42;
    bool include_bias = false;

    int n_vars() const { return map_dimension(map); }
    int n_inputs() const { return n_vars() * n_rep; }
    int n_qubits() const { return n_inputs() + n_hidden; }
    int n_features() const { return n_qubits() + (include_bias ? 1 : 0); }

    void validate() const;
    XYChainSpec chain_spec() const;
    Propagator make_propagator() const;  // unitary if gamma == 0
};

// Full protocol on one window (d x n_vars, values in [0,1], oldest first):
// the hidden register starts in |0..0>, and each layer encodes the layer's
// values (replicated n_rep times), injects them with the current hidden
// state, and evolves; between layers the inputs are traced out. Returns the
// Pauli-X expectations of all qubits after the final evolution (plus a 1 if
// include_bias).
Eigen::VectorXd run_window(const ReservoirConfig& cfg, const Propagator& prop,
                           const Eigen::MatrixXd& window);

// Reference implementation on dense density matrices; run_window uses a
// factorized state for unitary propagators and must agree with this to
// numerical precision.
Eigen::VectorXd run_window_dense(const ReservoirConfig& cfg, const Propagator& prop,
                                 const Eigen::MatrixXd& window);

// Feature matrix M: column i = run_window(windows[i]). Windows are
// independent; with threads > 1 they are evaluated concurrently into
// pre-assigned columns, so the result does not depend on scheduling.
Eigen::MatrixXd batch_features(const ReservoirConfig& cfg, const Propagator& prop,
                               const std::vector<Eigen::MatrixXd>& windows,
                               int threads = 1);
Eigen::MatrixXd batch_features(const ReservoirConfig& cfg, const Propagator& prop,
                               const std::vector<Window>& windows, int threads = 1);

// Values outside [0,1] are clamped for encoding; returns the clamp count.
int clamp01_in_place(Eigen::MatrixXd& values);

}  // namespace qrc
