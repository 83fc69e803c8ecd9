#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qrc/quantum.hpp"
#include "qrc/rng.hpp"

using namespace qrc;

namespace {

XYChainSpec random_spec(int n, std::uint64_t seed, Boundary boundary = Boundary::Open) {
    XYChainSpec spec;
    spec.n_qubits = n;
    spec.boundary = boundary;
    auto gen = rng::engine(seed);
    spec.fields.resize(n);
    for (double& h : spec.fields) h = rng::uniform01(gen);
    return spec;
}

DensityMatrix random_state(int n, std::uint64_t seed) {
    // random rank-full PSD matrix with unit trace
    auto gen = rng::engine(seed);
    const int d = 1 << n;
    Eigen::MatrixXcd a(d, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i)
            a(i, j) = complexd(rng::uniform(gen, -1, 1), rng::uniform(gen, -1, 1));
    DensityMatrix rho;
    rho.m = a * a.adjoint();
    rho.m /= rho.m.trace();
    return rho;
}

}  // namespace

TEST_SUITE_BEGIN("quantum");

TEST_CASE("single-qubit hamiltonian is the Z term") {
    XYChainSpec spec;
    spec.n_qubits = 1;
    spec.fields = {0.5};
    const Eigen::MatrixXcd h = build_hamiltonian(spec);
    CHECK(h(0, 0) == complexd(0.5));
    CHECK(h(1, 1) == complexd(-0.5));
    CHECK(std::abs(h(0, 1)) == 0.0);
}

TEST_CASE("two-qubit XX+YY produces the flip-flop element") {
    XYChainSpec spec;
    spec.n_qubits = 2;
    spec.fields = {0.0, 0.0};
    const Eigen::MatrixXcd h = build_hamiltonian(spec);
    // |01> = index 1, |10> = index 2 (qubit 1 most significant)
    CHECK(h(1, 2) == complexd(2.0));
    CHECK(h(2, 1) == complexd(2.0));
    CHECK(h(0, 0) == complexd(0.0));
    CHECK(h(3, 3) == complexd(0.0));
    CHECK(std::abs(h(0, 3)) == 0.0);
}

TEST_CASE("hamiltonian is exactly hermitian and matches the pauli oracle") {
    for (auto boundary : {Boundary::Open, Boundary::Periodic}) {
        const XYChainSpec spec = random_spec(3, 17, boundary);
        const Eigen::MatrixXcd h = build_hamiltonian(spec);
        CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
        const Eigen::MatrixXcd ref = oracle::xy_hamiltonian(spec);
        CHECK((h - ref).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("spec validation") {
    XYChainSpec spec;
    spec.n_qubits = 13;
    spec.fields.assign(13, 0.5);
    CHECK_THROWS_AS(build_hamiltonian(spec), input_error);
    spec.n_qubits = 2;
    spec.fields = {0.5, 1.5};
    CHECK_THROWS_AS(build_hamiltonian(spec), input_error);
    spec.allow_field_override = true;
    CHECK_NOTHROW(build_hamiltonian(spec));
    XYChainSpec tiny;
    tiny.n_qubits = 1;
    tiny.fields = {0.2};
    tiny.boundary = Boundary::Periodic;
    CHECK_THROWS_AS(build_hamiltonian(tiny), input_error);
}

TEST_CASE("unitary propagator: tau guard, continuity, unitarity") {
    const XYChainSpec spec = random_spec(3, 5);
    CHECK_THROWS_AS(make_propagator(spec, 0.0), input_error);
    CHECK_THROWS_AS(make_propagator(spec, -1.0), input_error);

    const Propagator tiny = make_propagator(spec, 1e-9);
    CHECK((tiny.unitary() - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-7);

    const Propagator prop = make_propagator(spec, 1.3);
    const Eigen::MatrixXcd uu = prop.unitary().adjoint() * prop.unitary();
    CHECK((uu - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("J=0 propagator is diagonal with field phases") {
    XYChainSpec spec = random_spec(2, 8);
    spec.coupling = 0.0;
    const double tau = 0.7;
    const Propagator prop = make_propagator(spec, tau);
    const Eigen::MatrixXcd& u = prop.unitary();
    for (int b = 0; b < 4; ++b) {
        double energy = 0.0;
        energy += spec.fields[0] * ((b & 2) ? -1 : 1);
        energy += spec.fields[1] * ((b & 1) ? -1 : 1);
        CHECK(std::abs(u(b, b) - std::exp(complexd(0, -energy * tau))) < 1e-12);
        for (int a = 0; a < 4; ++a)
            if (a != b) CHECK(std::abs(u(a, b)) < 1e-14);
    }
}

TEST_CASE("unitary apply preserves the state invariants") {
    const XYChainSpec spec = random_spec(4, 21);
    const Propagator prop = make_propagator(spec, 2.0);
    const DensityMatrix rho = random_state(4, 22);
    const DensityMatrix out = prop.apply(rho);
    CHECK(out.trace_error() < 1e-10);
    CHECK(out.hermiticity_error() < 1e-10);
    CHECK(out.min_eigenvalue() > -1e-8);
}

TEST_CASE("lindblad gamma=0 equals unitary evolution") {
    const XYChainSpec spec = random_spec(3, 31);
    const Propagator uni = make_propagator(spec, 1.0);
    const Propagator lind = make_propagator(spec, 1.0, LindbladOptions{0.0, 200});
    const DensityMatrix rho = random_state(3, 32);
    const DensityMatrix a = uni.apply(rho);
    const DensityMatrix b = lind.apply(rho);
    CHECK((a.m - b.m).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("single-qubit dephasing matches the analytic solution") {
    // H = h Z: rho01(tau) = rho01(0) exp(-2 i h tau) exp(-2 gamma tau)
    XYChainSpec spec;
    spec.n_qubits = 1;
    spec.fields = {0.8};
    const double tau = 1.0, gamma = 0.3;
    const Propagator prop = make_propagator(spec, tau, LindbladOptions{gamma, 200});

    DensityMatrix rho = encode_qubit(0.37);  // has off-diagonal coherence
    const complexd before = rho.m(0, 1);
    const DensityMatrix after = prop.apply(rho);
    const complexd expected =
        before * std::exp(complexd(0.0, -2.0 * spec.fields[0] * tau)) *
        std::exp(-2.0 * gamma * tau);
    CHECK(std::abs(after.m(0, 1) - expected) < 1e-6);
    CHECK(after.trace_error() < 1e-8);
    // populations untouched by pure dephasing
    CHECK(std::abs(after.m(0, 0) - rho.m(0, 0)) < 1e-9);
}

TEST_CASE("maximally mixed state is a fixed point of both modes") {
    const XYChainSpec spec = random_spec(3, 41);
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(3);
    const DensityMatrix u = make_propagator(spec, 1.5).apply(mixed);
    CHECK((u.m - mixed.m).cwiseAbs().maxCoeff() < 1e-10);
    const DensityMatrix l =
        make_propagator(spec, 1.5, LindbladOptions{0.4, 200}).apply(mixed);
    CHECK((l.m - mixed.m).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("lindblad step-halving converges below 1e-6") {
    const XYChainSpec spec = random_spec(3, 51);
    const DensityMatrix rho = random_state(3, 52);
    const DensityMatrix coarse =
        make_propagator(spec, 1.0, LindbladOptions{0.5, 200}).apply(rho);
    const DensityMatrix fine =
        make_propagator(spec, 1.0, LindbladOptions{0.5, 400}).apply(rho);
    CHECK((coarse.m - fine.m).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("lindblad apply keeps trace, hermiticity and positivity bounds") {
    const XYChainSpec spec = random_spec(4, 61);
    const Propagator prop = make_propagator(spec, 1.0, LindbladOptions{0.25, 200});
    DensityMatrix rho = random_state(4, 62);
    for (int layer = 0; layer < 3; ++layer) {
        rho = prop.apply(rho);
        CHECK(rho.trace_error() < 1e-8);
        CHECK(rho.hermiticity_error() < 1e-8);
        CHECK(rho.min_eigenvalue() > -1e-8);
    }
}

TEST_CASE("J=0 diagonal product states are dephasing fixed points") {
    XYChainSpec spec = random_spec(2, 71);
    spec.coupling = 0.0;
    const Propagator prop = make_propagator(spec, 1.0, LindbladOptions{0.7, 200});
    DensityMatrix diag = DensityMatrix::zero_state(2);
    diag.m.setZero();
    diag.m(0, 0) = 0.4;
    diag.m(1, 1) = 0.25;
    diag.m(2, 2) = 0.2;
    diag.m(3, 3) = 0.15;
    const DensityMatrix out = prop.apply(diag);
    CHECK((out.m - diag.m).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("encode_qubit endpoints and midpoint") {
    const DensityMatrix zero = encode_qubit(0.0);
    CHECK(std::abs(zero.m(0, 0) - 1.0) < 1e-15);
    CHECK(pauli_x_expectations(zero)[0] == doctest::Approx(0.0).epsilon(1e-15));

    const DensityMatrix half = encode_qubit(0.5);
    CHECK(pauli_x_expectations(half)[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(half.m(0, 0) - 0.5) < 1e-12);

    const DensityMatrix one = encode_qubit(1.0);
    CHECK(std::abs(one.m(1, 1) - 1.0) < 1e-15);
    CHECK(std::abs(pauli_x_expectations(one)[0]) < 1e-15);

    CHECK_THROWS_AS(encode_qubit(-0.01), input_error);
    CHECK_THROWS_AS(encode_qubit(1.01), input_error);
}

TEST_CASE("encode_qubit bloch components follow cos/sin of pi x") {
    auto gen = rng::engine(81);
    for (int i = 0; i < 25; ++i) {
        const double x = rng::uniform01(gen);
        const DensityMatrix rho = encode_qubit(x);
        const double z = (rho.m(0, 0) - rho.m(1, 1)).real();
        CHECK(z == doctest::Approx(std::cos(std::numbers::pi * x)).epsilon(1e-12));
        CHECK(pauli_x_expectations(rho)[0] ==
              doctest::Approx(std::sin(std::numbers::pi * x)).epsilon(1e-12));
    }
}

TEST_CASE("inject builds the ordered tensor product") {
    const DensityMatrix prod =
        inject({encode_qubit(0.0)}, DensityMatrix::zero_state(1));
    CHECK(prod.dim() == 4);
    CHECK(std::abs(prod.m(0, 0) - 1.0) < 1e-15);

    // inputs occupy the most significant sites: |1> ⊗ |0> = index 2
    const DensityMatrix flipped =
        inject({encode_qubit(1.0)}, DensityMatrix::zero_state(1));
    CHECK(std::abs(flipped.m(2, 2) - 1.0) < 1e-12);

    const DensityMatrix two =
        inject({encode_qubit(0.3), encode_qubit(0.9)}, random_state(2, 91));
    CHECK(std::abs(two.m.trace() - complexd(1.0)) < 1e-12);

    // oracle cross-check via explicit kron
    const Eigen::MatrixXcd ref = oracle::kron(
        oracle::kron(encode_qubit(0.3).m, encode_qubit(0.9).m), random_state(2, 91).m);
    CHECK((two.m - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("inject respects the qubit guard") {
    std::vector<DensityMatrix> many(9, encode_qubit(0.5));
    CHECK_THROWS_AS(inject(many, DensityMatrix::zero_state(4)), input_error);
}

TEST_CASE("partial trace: product round trip, bell pair, trace preservation") {
    const DensityMatrix hidden = random_state(2, 101);
    const DensityMatrix joined = inject({encode_qubit(0.42)}, hidden);
    const DensityMatrix back = partial_trace_inputs(joined, 1);
    CHECK((back.m - hidden.m).cwiseAbs().maxCoeff() < 1e-12);

    DensityMatrix bell;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
    psi[0] = psi[3] = 1.0 / std::sqrt(2.0);
    bell.m = psi * psi.adjoint();
    const DensityMatrix reduced = partial_trace_inputs(bell, 1);
    CHECK((reduced.m - Eigen::MatrixXcd::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() < 1e-12);

    const DensityMatrix rho = random_state(3, 102);
    const DensityMatrix traced = partial_trace_inputs(rho, 2);
    CHECK(std::abs(traced.m.trace() - rho.m.trace()) < 1e-12);
}

TEST_CASE("partial trace matches the index-summation oracle for N<=3") {
    for (int n_in = 1; n_in <= 2; ++n_in) {
        const DensityMatrix rho = random_state(3, 111 + n_in);
        const DensityMatrix fast = partial_trace_inputs(rho, n_in);
        const Eigen::MatrixXcd ref = oracle::trace_out_first(rho.m, n_in, 3);
        CHECK((fast.m - ref).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("pauli_x_expectations on reference states and against the oracle") {
    CHECK(pauli_x_expectations(DensityMatrix::zero_state(3)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(pauli_x_expectations(DensityMatrix::maximally_mixed(3)).cwiseAbs().maxCoeff() == 0.0);

    const DensityMatrix rho = random_state(3, 121);
    const Eigen::VectorXd fast = pauli_x_expectations(rho);
    for (int j = 1; j <= 3; ++j) {
        CHECK(fast[j - 1] == doctest::Approx(oracle::x_expectation(rho.m, j, 3)).epsilon(1e-12));
        CHECK(fast[j - 1] >= -1.0);
        CHECK(fast[j - 1] <= 1.0);
    }
}

TEST_CASE("propagator application counter") {
    const XYChainSpec spec = random_spec(2, 131);
    const Propagator prop = make_propagator(spec, 1.0);
    CHECK(prop.applications() == 0);
    const DensityMatrix rho = random_state(2, 132);
    prop.apply(rho);
    prop.apply(rho);
    CHECK(prop.applications() == 2);
}

TEST_SUITE_END();
