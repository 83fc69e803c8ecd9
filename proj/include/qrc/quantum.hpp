#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <atomic>
#include <complex>
#include <cstdint>
#include <vector>

#include "qrc/errors.hpp"

namespace qrc {

using complexd = std::complex<double>;

enum class Boundary { Open, Periodic };

inline constexpr int kMaxQubits = 12;  // dense-kernel guard

// Transverse XY chain: H = J sum_j (X_j X_{j+1} + Y_j Y_{j+1}) + sum_j h_j Z_j.
// Open boundary couples j = 1..N-1; periodic adds the (N,1) bond.
struct XYChainSpec {
    int n_qubits = 1;
    double coupling = 1.0;       // J
    std::vector<double> fields;  // h_j, one per qubit, in [0,1]
    Boundary boundary = Boundary::Open;
    bool allow_field_override = false;  // permit h outside [0,1]

    int dim() const { return 1 << n_qubits; }
    void validate() const;
};

// Dense reservoir state. Qubit 1 is the most-significant tensor factor:
// basis index b has qubit j's bit at position (n_qubits - j).
struct DensityMatrix {
    Eigen::MatrixXcd m;

    int dim() const { return static_cast<int>(m.rows()); }
    int qubits() const;

    static DensityMatrix zero_state(int n_qubits);  // |0...0><0...0|
    static DensityMatrix maximally_mixed(int n_qubits);

    double trace_error() const;       // |tr(m) - 1|
    double hermiticity_error() const; // max|m - m^dagger|
    double min_eigenvalue() const;
};

// 2^N x 2^N Hermitian matrix for the chain spec.
Eigen::MatrixXcd build_hamiltonian(const XYChainSpec& spec);

enum class PropagatorMode { Unitary, Lindblad };

struct LindbladOptions {
    double gamma = 0.0;
    int n_substeps = 200;  // fixed-step RK4 substeps per application
};

// Precomputed time evolution over tau. Unitary mode stores
// U = V exp(-i Lambda tau) V^dagger from the eigendecomposition; Lindblad
// mode integrates drho/dt = -i[H,rho] + gamma sum_k (Z_k rho Z_k - rho)
// with classical fixed-step RK4. Immutable after construction and safe to
// share across threads.
class Propagator {
public:
    Propagator(const XYChainSpec& spec, double tau, PropagatorMode mode,
               LindbladOptions lindblad = {});

    DensityMatrix apply(const DensityMatrix& rho) const;

    // Unitary fast path: evolves a factor F of rho = F F^dagger (returns U*F).
    Eigen::MatrixXcd evolve_factor(const Eigen::MatrixXcd& factor) const;

    const Eigen::MatrixXcd& unitary() const;  // Unitary mode only

    const XYChainSpec& spec() const { return spec_; }
    double tau() const { return tau_; }
    PropagatorMode mode() const { return mode_; }
    double gamma() const { return lindblad_.gamma; }
    int n_substeps() const { return lindblad_.n_substeps; }
    int dim() const { return spec_.dim(); }

    // Number of times this propagator has been applied (any representation).
    long applications() const { return applications_.load(std::memory_order_relaxed); }

private:
    XYChainSpec spec_;
    double tau_;
    PropagatorMode mode_;
    LindbladOptions lindblad_;
    Eigen::MatrixXcd u_;                        // unitary mode
    Eigen::SparseMatrix<complexd> h_sparse_;    // lindblad mode
    Eigen::MatrixXcd dephasing_;                // -2 gamma * hamming(a,b)
    mutable std::atomic<long> applications_{0};
};

Propagator make_propagator(const XYChainSpec& spec, double tau);
Propagator make_propagator(const XYChainSpec& spec, double tau, const LindbladOptions& opts);

// Pure state R_Y(pi x)|0>: amplitudes (cos(pi x / 2), sin(pi x / 2)).
Eigen::Vector2cd encode_qubit_amplitudes(double x);

// Single-qubit density matrix for the encoded value; <Z> = cos(pi x),
// <X> = sin(pi x). x must already be clamped to [0,1].
DensityMatrix encode_qubit(double x);

// (inputs[0] ⊗ ... ⊗ inputs.back()) ⊗ hidden; inputs occupy chain sites 1..n_I.
DensityMatrix inject(const std::vector<DensityMatrix>& inputs, const DensityMatrix& hidden);

// Reduced state on the hidden register (traces out the first n_inputs qubits).
DensityMatrix partial_trace_inputs(const DensityMatrix& rho, int n_inputs);

// [<X_1>, ..., <X_N>], exact expectation values.
Eigen::VectorXd pauli_x_expectations(const DensityMatrix& rho);

}  // namespace qrc
