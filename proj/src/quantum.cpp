#include "qrc/quantum.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace qrc {

void XYChainSpec::validate() const {
    if (n_qubits < 1 || n_qubits > kMaxQubits)
        throw input_error("n_qubits must lie in [1, " + std::to_string(kMaxQubits) +
                          "], got " + std::to_string(n_qubits));
    if (static_cast<int>(fields.size()) != n_qubits)
        throw input_error("field vector length " + std::to_string(fields.size()) +
                          " does not match n_qubits " + std::to_string(n_qubits));
    if (!allow_field_override)
        for (double h : fields)
            if (!(h >= 0.0 && h <= 1.0))
                throw input_error("field strength " + std::to_string(h) +
                                  " outside the ordered phase [0, 1]");
    if (boundary == Boundary::Periodic && n_qubits < 2)
        throw input_error("periodic boundary requires at least 2 qubits");
}

int DensityMatrix::qubits() const {
    int n = 0;
    while ((1 << n) < dim()) ++n;
    return n;
}

DensityMatrix DensityMatrix::zero_state(int n_qubits) {
    DensityMatrix rho;
    rho.m = Eigen::MatrixXcd::Zero(1 << n_qubits, 1 << n_qubits);
    rho.m(0, 0) = 1.0;
    return rho;
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
    const int d = 1 << n_qubits;
    DensityMatrix rho;
    rho.m = Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d);
    return rho;
}

double DensityMatrix::trace_error() const { return std::abs(m.trace() - complexd(1.0)); }

double DensityMatrix::hermiticity_error() const {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((m + m.adjoint()) / 2.0,
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

namespace {

// Bit of qubit j (1-based) inside basis index b; qubit 1 is most significant.
inline int qubit_bit(int b, int j, int n) { return (b >> (n - j)) & 1; }
inline int qubit_mask(int j, int n) { return 1 << (n - j); }

}  // namespace

Eigen::MatrixXcd build_hamiltonian(const XYChainSpec& spec) {
    spec.validate();
    const int n = spec.n_qubits;
    const int d = spec.dim();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);

    for (int b = 0; b < d; ++b) {
        double diag = 0.0;
        for (int j = 1; j <= n; ++j)
            diag += spec.fields[j - 1] * (qubit_bit(b, j, n) ? -1.0 : 1.0);
        h(b, b) = diag;
    }

    // X_j X_{j+1} + Y_j Y_{j+1} flips antiparallel neighbours with weight 2.
    const int n_bonds = (spec.boundary == Boundary::Open) ? n - 1 : n;
    for (int bond = 1; bond <= n_bonds; ++bond) {
        const int j = bond;
        const int k = (bond % n) + 1;
        const int mask = qubit_mask(j, n) | qubit_mask(k, n);
        for (int b = 0; b < d; ++b)
            if (qubit_bit(b, j, n) != qubit_bit(b, k, n))
                h(b ^ mask, b) += 2.0 * spec.coupling;
    }
    return h;
}

Propagator::Propagator(const XYChainSpec& spec, double tau, PropagatorMode mode,
                       LindbladOptions lindblad)
    : spec_(spec), tau_(tau), mode_(mode), lindblad_(lindblad) {
    spec_.validate();
    if (!(tau > 0.0)) throw input_error("evolution time tau must be > 0");
    if (lindblad_.gamma < 0.0) throw input_error("dephasing strength gamma must be >= 0");
    if (lindblad_.n_substeps < 1) throw input_error("n_substeps must be >= 1");

    const Eigen::MatrixXcd h = build_hamiltonian(spec_);
    const int d = spec_.dim();

    if (mode_ == PropagatorMode::Unitary) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
        if (es.info() != Eigen::Success || !es.eigenvalues().allFinite())
            throw numeric_error("hamiltonian eigendecomposition failed");
        Eigen::VectorXcd phases(d);
        for (int i = 0; i < d; ++i)
            phases[i] = std::exp(complexd(0.0, -es.eigenvalues()[i] * tau_));
        u_ = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    } else {
        h_sparse_ = h.sparseView();
        h_sparse_.makeCompressed();
        // Dephasing acts elementwise: element (a,b) decays at rate
        // 2 gamma * hamming(a, b).
        dephasing_.resize(d, d);
        for (int b = 0; b < d; ++b)
            for (int a = 0; a < d; ++a)
                dephasing_(a, b) =
                    -2.0 * lindblad_.gamma *
                    static_cast<double>(std::popcount(static_cast<unsigned>(a ^ b)));
    }
}

DensityMatrix Propagator::apply(const DensityMatrix& rho) const {
    if (rho.dim() != dim()) throw input_error("state dimension does not match propagator");
    applications_.fetch_add(1, std::memory_order_relaxed);

    DensityMatrix out;
    if (mode_ == PropagatorMode::Unitary) {
        out.m.noalias() = u_ * rho.m * u_.adjoint();
        return out;
    }

    const double trace_before = rho.m.trace().real();
    const double dt = tau_ / lindblad_.n_substeps;
    const complexd minus_i(0.0, -1.0);
    auto deriv = [&](const Eigen::MatrixXcd& r) -> Eigen::MatrixXcd {
        Eigen::MatrixXcd k = minus_i * (h_sparse_ * r - r * h_sparse_);
        k += dephasing_.cwiseProduct(r);
        return k;
    };

    Eigen::MatrixXcd r = rho.m;
    for (int step = 0; step < lindblad_.n_substeps; ++step) {
        const Eigen::MatrixXcd k1 = deriv(r);
        const Eigen::MatrixXcd k2 = deriv(r + (dt / 2.0) * k1);
        const Eigen::MatrixXcd k3 = deriv(r + (dt / 2.0) * k2);
        const Eigen::MatrixXcd k4 = deriv(r + dt * k3);
        r += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    out.m = (r + r.adjoint()) / 2.0;
    if (std::abs(out.m.trace().real() - trace_before) > 1e-6)
        throw numeric_error("lindblad trace drift exceeds 1e-6; increase n_substeps");
    return out;
}

Eigen::MatrixXcd Propagator::evolve_factor(const Eigen::MatrixXcd& factor) const {
    if (mode_ != PropagatorMode::Unitary)
        throw input_error("factor evolution is only defined for unitary propagators");
    if (factor.rows() != dim()) throw input_error("factor dimension mismatch");
    applications_.fetch_add(1, std::memory_order_relaxed);
    return u_ * factor;
}

const Eigen::MatrixXcd& Propagator::unitary() const {
    if (mode_ != PropagatorMode::Unitary)
        throw input_error("propagator has no unitary matrix in lindblad mode");
    return u_;
}

Propagator make_propagator(const XYChainSpec& spec, double tau) {
    return Propagator(spec, tau, PropagatorMode::Unitary);
}

Propagator make_propagator(const XYChainSpec& spec, double tau, const LindbladOptions& opts) {
    return Propagator(spec, tau, PropagatorMode::Lindblad, opts);
}

Eigen::Vector2cd encode_qubit_amplitudes(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw input_error("encoded value " + std::to_string(x) +
                          " outside [0, 1]; clamp upstream");
    const double theta = std::numbers::pi * x;
    return Eigen::Vector2cd(std::cos(theta / 2.0), std::sin(theta / 2.0));
}

DensityMatrix encode_qubit(double x) {
    const Eigen::Vector2cd psi = encode_qubit_amplitudes(x);
    DensityMatrix rho;
    rho.m = psi * psi.adjoint();
    return rho;
}

DensityMatrix inject(const std::vector<DensityMatrix>& inputs, const DensityMatrix& hidden) {
    int total_qubits = hidden.qubits();
    for (const auto& q : inputs) {
        if (q.dim() != 2) throw input_error("inject expects single-qubit input states");
        total_qubits += 1;
    }
    if (total_qubits > kMaxQubits)
        throw input_error("inject would exceed the " + std::to_string(kMaxQubits) +
                          "-qubit dense kernel guard");

    DensityMatrix out = hidden;
    for (auto it = inputs.rbegin(); it != inputs.rend(); ++it) {
        const auto& q = *it;
        const int d = out.dim();
        Eigen::MatrixXcd next(2 * d, 2 * d);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                next.block(i * d, j * d, d, d) = q.m(i, j) * out.m;
        out.m = std::move(next);
    }
    return out;
}

DensityMatrix partial_trace_inputs(const DensityMatrix& rho, int n_inputs) {
    const int n = rho.qubits();
    if (n_inputs < 0 || n_inputs >= n)
        throw input_error("partial trace needs 0 <= n_inputs < total qubits");
    const int d_in = 1 << n_inputs;
    const int d_hid = 1 << (n - n_inputs);

    DensityMatrix out;
    out.m = Eigen::MatrixXcd::Zero(d_hid, d_hid);
    for (int i = 0; i < d_in; ++i)
        out.m += rho.m.block(i * d_hid, i * d_hid, d_hid, d_hid);
    return out;
}

Eigen::VectorXd pauli_x_expectations(const DensityMatrix& rho) {
    const int n = rho.qubits();
    if (rho.dim() != (1 << n)) throw input_error("state dimension is not a power of two");
    Eigen::VectorXd out(n);
    for (int j = 1; j <= n; ++j) {
        const int mask = qubit_mask(j, n);
        complexd acc = 0.0;
        for (int b = 0; b < rho.dim(); ++b) acc += rho.m(b ^ mask, b);
        out[j - 1] = acc.real();
    }
    return out;
}

}  // namespace qrc
