#include "qrc/reservoir.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "qrc/rng.hpp"

namespace qrc {

void ReservoirConfig::validate() const {
    if (layers < 1) throw input_error("layers (d) must be >= 1");
    if (n_rep < 1) throw input_error("n_rep must be >= 1");
    if (n_hidden < 1) throw input_error("n_hidden must be >= 1");
    if (n_qubits() > kMaxQubits)
        throw input_error("n_inputs + n_hidden = " + std::to_string(n_qubits()) +
                          " exceeds the " + std::to_string(kMaxQubits) + "-qubit guard");
    if (gamma < 0.0) throw input_error("gamma must be >= 0");
    if (!(tau > 0.0)) throw input_error("tau must be > 0");
}

XYChainSpec ReservoirConfig::chain_spec() const {
    validate();
    XYChainSpec spec;
    spec.n_qubits = n_qubits();
    spec.coupling = coupling;
    spec.boundary = boundary;
    // h_j ~ U[0,1), a prefix of one stream so configs differing only in N
    // share the leading fields.
    auto gen = rng::engine(rng::derive(seed, 0x48F1E1D5u));
    spec.fields.resize(spec.n_qubits);
    for (double& h : spec.fields) h = rng::uniform01(gen);
    return spec;
}

Propagator ReservoirConfig::make_propagator() const {
    if (gamma == 0.0) return Propagator(chain_spec(), tau, PropagatorMode::Unitary);
    return Propagator(chain_spec(), tau, PropagatorMode::Lindblad,
                      LindbladOptions{gamma, n_substeps});
}

namespace {

void check_window(const ReservoirConfig& cfg, const Eigen::MatrixXd& window) {
    if (window.rows() != cfg.layers || window.cols() != cfg.n_vars())
        throw input_error("window shape " + std::to_string(window.rows()) + "x" +
                          std::to_string(window.cols()) + " does not match d=" +
                          std::to_string(cfg.layers) + ", n_vars=" +
                          std::to_string(cfg.n_vars()));
    if ((window.array() < 0.0).any() || (window.array() > 1.0).any())
        throw input_error("window values must lie in [0, 1]; clamp upstream");
}

// Encoded input register as a pure state: (x reps, then y reps) for the
// layer's values, qubit 1 most significant. Each new qubit is appended as
// the least significant factor, so earlier variables stay on lower sites.
Eigen::VectorXcd input_register_amplitudes(const ReservoirConfig& cfg,
                                           const Eigen::RowVectorXd& layer_values) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(1);
    for (int v = 0; v < cfg.n_vars(); ++v) {
        const Eigen::Vector2cd q = encode_qubit_amplitudes(layer_values[v]);
        for (int rep = 0; rep < cfg.n_rep; ++rep) {
            Eigen::VectorXcd next(psi.size() * 2);
            for (Eigen::Index i = 0; i < psi.size(); ++i) {
                next[2 * i] = psi[i] * q[0];
                next[2 * i + 1] = psi[i] * q[1];
            }
            psi = std::move(next);
        }
    }
    return psi;
}

Eigen::VectorXd append_bias(const ReservoirConfig& cfg, Eigen::VectorXd features) {
    if (!cfg.include_bias) return features;
    Eigen::VectorXd out(features.size() + 1);
    out.head(features.size()) = features;
    out[features.size()] = 1.0;
    return out;
}

// rho = F F^dagger throughout; keeps the unitary path at one tall-skinny
// product per layer instead of two full gemms.
Eigen::VectorXd run_window_factored(const ReservoirConfig& cfg, const Propagator& prop,
                                    const Eigen::MatrixXd& window) {
    const int d_hid = 1 << cfg.n_hidden;
    const int d_in = 1 << cfg.n_inputs();

    Eigen::MatrixXcd hidden_factor = Eigen::MatrixXcd::Zero(d_hid, 1);
    hidden_factor(0, 0) = 1.0;

    Eigen::MatrixXcd full;
    for (int layer = 0; layer < cfg.layers; ++layer) {
        const Eigen::VectorXcd psi_in = input_register_amplitudes(cfg, window.row(layer));
        const auto rank = hidden_factor.cols();
        full.resize(static_cast<Eigen::Index>(d_in) * d_hid, rank);
        for (int i = 0; i < d_in; ++i)
            full.middleRows(static_cast<Eigen::Index>(i) * d_hid, d_hid) =
                psi_in[i] * hidden_factor;

        full = prop.evolve_factor(full);

        if (layer + 1 == cfg.layers) break;

        // Tr_inputs(F F^dagger) = sum of block outer products, then re-factor
        // through the (small) hidden eigendecomposition.
        Eigen::MatrixXcd rho_hidden = Eigen::MatrixXcd::Zero(d_hid, d_hid);
        for (int i = 0; i < d_in; ++i) {
            const auto block = full.middleRows(static_cast<Eigen::Index>(i) * d_hid, d_hid);
            rho_hidden.noalias() += block * block.adjoint();
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_hidden);
        if (es.info() != Eigen::Success)
            throw numeric_error("hidden-state eigendecomposition failed");
        int kept = 0;
        for (int k = 0; k < d_hid; ++k)
            if (es.eigenvalues()[k] > 1e-14) ++kept;
        hidden_factor.resize(d_hid, kept);
        for (int k = d_hid - kept, c = 0; k < d_hid; ++k, ++c)
            hidden_factor.col(c) =
                es.eigenvectors().col(k) * std::sqrt(es.eigenvalues()[k]);
    }

    // <X_j> of F F^dagger: sum over columns of <f|X_j|f>.
    const int n = cfg.n_qubits();
    const int dim = 1 << n;
    Eigen::VectorXd features(n);
    for (int j = 1; j <= n; ++j) {
        const int mask = 1 << (n - j);
        double acc = 0.0;
        for (Eigen::Index c = 0; c < full.cols(); ++c)
            for (int b = 0; b < dim; ++b)
                acc += std::real(std::conj(full(b ^ mask, c)) * full(b, c));
        features[j - 1] = acc;
    }
    return append_bias(cfg, features);
}

}  // namespace

Eigen::VectorXd run_window_dense(const ReservoirConfig& cfg, const Propagator& prop,
                                 const Eigen::MatrixXd& window) {
    check_window(cfg, window);
    if (prop.dim() != (1 << cfg.n_qubits()))
        throw input_error("propagator dimension does not match config");

    DensityMatrix hidden = DensityMatrix::zero_state(cfg.n_hidden);
    DensityMatrix full;
    for (int layer = 0; layer < cfg.layers; ++layer) {
        std::vector<DensityMatrix> inputs;
        inputs.reserve(cfg.n_inputs());
        for (int v = 0; v < cfg.n_vars(); ++v)
            for (int rep = 0; rep < cfg.n_rep; ++rep)
                inputs.push_back(encode_qubit(window(layer, v)));
        full = prop.apply(inject(inputs, hidden));
        if (layer + 1 < cfg.layers) hidden = partial_trace_inputs(full, cfg.n_inputs());
    }
    return append_bias(cfg, pauli_x_expectations(full));
}

Eigen::VectorXd run_window(const ReservoirConfig& cfg, const Propagator& prop,
                           const Eigen::MatrixXd& window) {
    if (prop.mode() == PropagatorMode::Unitary) {
        check_window(cfg, window);
        if (prop.dim() != (1 << cfg.n_qubits()))
            throw input_error("propagator dimension does not match config");
        return run_window_factored(cfg, prop, window);
    }
    return run_window_dense(cfg, prop, window);
}

Eigen::MatrixXd batch_features(const ReservoirConfig& cfg, const Propagator& prop,
                               const std::vector<Eigen::MatrixXd>& windows, int threads) {
    if (windows.empty()) throw input_error("batch_features needs at least one window");
    Eigen::MatrixXd m(cfg.n_features(), static_cast<Eigen::Index>(windows.size()));

    const int n_workers =
        std::max(1, std::min<int>(threads, static_cast<int>(windows.size())));
    if (n_workers == 1) {
        for (std::size_t i = 0; i < windows.size(); ++i)
            m.col(static_cast<Eigen::Index>(i)) = run_window(cfg, prop, windows[i]);
        return m;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= windows.size() || failed.load()) return;
            try {
                m.col(static_cast<Eigen::Index>(i)) = run_window(cfg, prop, windows[i]);
            } catch (const std::exception& e) {
                std::scoped_lock lock(error_mutex);
                failed = true;
                if (error_message.empty()) error_message = e.what();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failed) throw numeric_error("batch_features worker failed: " + error_message);
    return m;
}

Eigen::MatrixXd batch_features(const ReservoirConfig& cfg, const Propagator& prop,
                               const std::vector<Window>& windows, int threads) {
    std::vector<Eigen::MatrixXd> values;
    values.reserve(windows.size());
    for (const auto& w : windows) {
        Eigen::MatrixXd v = w.values;
        clamp01_in_place(v);
        values.push_back(std::move(v));
    }
    return batch_features(cfg, prop, values, threads);
}

int clamp01_in_place(Eigen::MatrixXd& values) {
    int clamped = 0;
    for (Eigen::Index j = 0; j < values.cols(); ++j)
        for (Eigen::Index i = 0; i < values.rows(); ++i) {
            double& v = values(i, j);
            if (v < 0.0) {
                v = 0.0;
                ++clamped;
            } else if (v > 1.0) {
                v = 1.0;
                ++clamped;
            }
        }
    return clamped;
}

}  // namespace qrc
