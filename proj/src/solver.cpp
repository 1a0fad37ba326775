#include "aircomp/solver.hpp"

#include "aircomp/rng.hpp"

#include <cmath>

namespace aircomp {

namespace {

Eigen::VectorXd solve_ridge(const Eigen::MatrixXd& s, double noise_power) {
    Eigen::MatrixXd gram = s * s.transpose();
    gram.diagonal().array() += 0.5 * noise_power;
    return Eigen::LLT<Eigen::MatrixXd>(gram).solve(s.rowwise().sum());
}

// Signed bilinear reduced objective. Coincides with cmse_reduced once the
// per-frequency signs of (rx, bprime) agree, which holds on the alternation
// path and after canonicalization.
double reduced_objective(const Eigen::VectorXd& rx, const Eigen::MatrixXd& bprime,
                         const Eigen::MatrixXd& magnitudes, double noise_power) {
    double misfit = 0.0;
    for (int k = 0; k < bprime.rows(); ++k) {
        double gain = 0.0;
        for (int m = 0; m < bprime.cols(); ++m)
            gain += rx(m) * magnitudes(k, m) * bprime(k, m);
        misfit += (gain - 1.0) * (gain - 1.0);
    }
    return misfit + 0.5 * noise_power * rx.squaredNorm();
}

Eigen::MatrixXcd init_tx_full(const ChannelMatrix& channels, const SystemConfig& cfg,
                              const SolverOptions& opts) {
    const int k_count = cfg.sensors;
    const int m_count = cfg.frequencies;
    Eigen::MatrixXcd factors(k_count, m_count);
    if (opts.init_policy == TxInit::UniformAlignedTx) {
        const double amplitude = std::sqrt(cfg.power / m_count);
        for (int k = 0; k < k_count; ++k) {
            for (int m = 0; m < m_count; ++m) {
                const Complex h = channels.entry(k, m);
                const double mag = std::abs(h);
                factors(k, m) = mag == 0.0 ? Complex(0.0) : amplitude * std::conj(h) / mag;
            }
        }
    } else {
        for (int k = 0; k < k_count; ++k) {
            Rng rng = Rng::for_trial(opts.init_seed, static_cast<std::uint64_t>(k));
            Eigen::VectorXcd row(m_count);
            for (int m = 0; m < m_count; ++m) row(m) = Complex(rng.gaussian(), rng.gaussian());
            const double norm = row.norm();
            if (norm > 0.0) row *= std::sqrt(cfg.power) / norm;
            factors.row(k) = row.transpose();
        }
    }
    return factors;
}

Eigen::MatrixXd init_tx_reduced(const Eigen::MatrixXd& magnitudes, const SystemConfig& cfg,
                                const SolverOptions& opts) {
    const int k_count = cfg.sensors;
    const int m_count = cfg.frequencies;
    Eigen::MatrixXd bprime(k_count, m_count);
    if (opts.init_policy == TxInit::UniformAlignedTx) {
        const double amplitude = std::sqrt(cfg.power / m_count);
        for (int k = 0; k < k_count; ++k)
            for (int m = 0; m < m_count; ++m)
                bprime(k, m) = magnitudes(k, m) == 0.0 ? 0.0 : amplitude;
    } else {
        for (int k = 0; k < k_count; ++k) {
            Rng rng = Rng::for_trial(opts.init_seed, static_cast<std::uint64_t>(k));
            Eigen::VectorXd row(m_count);
            for (int m = 0; m < m_count; ++m) row(m) = std::abs(rng.gaussian());
            const double norm = row.norm();
            if (norm > 0.0) row *= std::sqrt(cfg.power) / norm;
            bprime.row(k) = row.transpose();
        }
    }
    return bprime;
}

}  // namespace

RxScaling optimal_rx(const SMatrix& s, double noise_power) {
    if (!(noise_power > 0.0)) throw std::invalid_argument("optimal_rx: noise_power must be > 0");
    if (s.rows() % 2 != 0) throw std::invalid_argument("optimal_rx: S must have 2M rows");
    return RxScaling(solve_ridge(s, noise_power));
}

Eigen::VectorXd rx_update_reduced(const Eigen::MatrixXd& bprime,
                                  const Eigen::MatrixXd& magnitudes, double noise_power) {
    if (!(noise_power > 0.0))
        throw std::invalid_argument("rx_update_reduced: noise_power must be > 0");
    // M x K gain matrix, entry (m, k) = |h_km| b'_km.
    const Eigen::MatrixXd gains = (magnitudes.array() * bprime.array()).matrix().transpose();
    return solve_ridge(gains, noise_power);
}

StackedGain stack_gain(const RxScaling& rx, const Eigen::VectorXcd& channel_row) {
    const int m_count = static_cast<int>(channel_row.size());
    if (rx.frequencies() != m_count)
        throw std::invalid_argument("stack_gain: rx and channel row disagree on M");
    StackedGain gain(2 * m_count);
    for (int m = 0; m < m_count; ++m) {
        const Eigen::Vector2d g = rx.block(m);
        const Complex prod = std::conj(channel_row(m)) * Complex(g(0), g(1));
        gain(2 * m) = prod.real();
        gain(2 * m + 1) = prod.imag();
    }
    return gain;
}

TxUpdate power_constrained_tx(const Eigen::VectorXd& gain, double power, double lambda_tol) {
    if (!(power > 0.0)) throw std::invalid_argument("power_constrained_tx: power must be > 0");
    if (!(lambda_tol > 0.0))
        throw std::invalid_argument("power_constrained_tx: lambda_tol must be > 0");

    const double norm_sq = gain.squaredNorm();
    if (norm_sq == 0.0) return TxUpdate{Eigen::VectorXd::Zero(gain.size()), 0.0};

    // Minimum-norm solution of (gain gain^T) b = gain has squared norm 1/|gain|^2.
    if (1.0 / norm_sq <= power) return TxUpdate{gain / norm_sq, 0.0};

    const auto squared_norm_at = [norm_sq](double lambda) {
        const double denom = norm_sq + lambda;
        return norm_sq / (denom * denom);
    };

    // hi = 2|gain|/sqrt(P) gives |b(hi)|^2 <= P/4, so the root is bracketed
    // immediately; the doubling loop only guards against rounding.
    double lo = 0.0;
    double hi = 2.0 * std::sqrt(norm_sq / power);
    while (squared_norm_at(hi) >= power) hi *= 2.0;

    const double residual_tol = 1e-10 * std::max(1.0, power);
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (squared_norm_at(mid) >= power)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < lambda_tol && power - squared_norm_at(hi) <= residual_tol) break;
    }
    return TxUpdate{gain / (norm_sq + hi), hi};
}

TxUpdate optimal_tx(const RxScaling& rx, const Eigen::VectorXcd& channel_row, double power,
                    double lambda_tol) {
    return power_constrained_tx(stack_gain(rx, channel_row), power, lambda_tol);
}

Eigen::VectorXd tx_at_lambda(const Eigen::VectorXd& gain, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("tx_at_lambda: lambda must be >= 0");
    const Eigen::MatrixXd outer = gain * gain.transpose();
    if (lambda == 0.0) {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(outer);
        return cod.pseudoInverse() * gain;
    }
    Eigen::MatrixXd system = outer;
    system.diagonal().array() += lambda;
    return Eigen::LDLT<Eigen::MatrixXd>(system).solve(gain);
}

SolveTrace alternate_minimize(const ChannelMatrix& channels, const SystemConfig& cfg,
                              const SolverOptions& opts) {
    cfg.validate();
    opts.validate();
    if (channels.sensors() != cfg.sensors || channels.frequencies() != cfg.frequencies)
        throw std::invalid_argument("alternate_minimize: channel dimensions disagree with config");

    SolveTrace trace;
    TxScalings tx(init_tx_full(channels, cfg, opts));
    SMatrix s = build_s(channels, tx);
    RxScaling rx = optimal_rx(s, cfg.noise_power);
    double cmse = cmse_full(rx, s, cfg.noise_power);
    trace.cmse_history.push_back(cmse);

    for (int sweep = 1; sweep <= opts.max_iters; ++sweep) {
        for (int k = 0; k < cfg.sensors; ++k) {
            const TxUpdate upd =
                optimal_tx(rx, channels.coefficients.row(k).transpose(), cfg.power,
                           opts.lambda_tol);
            for (int m = 0; m < cfg.frequencies; ++m)
                tx.factors(k, m) = Complex(upd.coeffs(2 * m), upd.coeffs(2 * m + 1));
        }
        s = build_s(channels, tx);
        rx = optimal_rx(s, cfg.noise_power);
        const double next = cmse_full(rx, s, cfg.noise_power);
        trace.cmse_history.push_back(next);
        trace.iterations_used = sweep;
        if (std::abs(next - cmse) < opts.cmse_tol) {
            trace.converged = true;
            cmse = next;
            break;
        }
        cmse = next;
    }

    trace.rx = std::move(rx);
    trace.tx = std::move(tx);
    return trace;
}

ReducedSolveTrace reduced_alternate_minimize(const Eigen::MatrixXd& magnitudes,
                                             const SystemConfig& cfg,
                                             const SolverOptions& opts) {
    cfg.validate();
    opts.validate();
    if (magnitudes.rows() != cfg.sensors || magnitudes.cols() != cfg.frequencies)
        throw std::invalid_argument(
            "reduced_alternate_minimize: magnitude dimensions disagree with config");
    if ((magnitudes.array() < 0.0).any())
        throw std::invalid_argument("reduced_alternate_minimize: magnitudes must be >= 0");

    ReducedSolveTrace trace;
    Eigen::MatrixXd bprime = init_tx_reduced(magnitudes, cfg, opts);
    Eigen::VectorXd rx = rx_update_reduced(bprime, magnitudes, cfg.noise_power);
    double cmse = reduced_objective(rx, bprime, magnitudes, cfg.noise_power);
    trace.cmse_history.push_back(cmse);

    Eigen::VectorXd sensor_gain(cfg.frequencies);
    for (int sweep = 1; sweep <= opts.max_iters; ++sweep) {
        for (int k = 0; k < cfg.sensors; ++k) {
            sensor_gain = (rx.array() * magnitudes.row(k).transpose().array()).matrix();
            bprime.row(k) =
                power_constrained_tx(sensor_gain, cfg.power, opts.lambda_tol).coeffs.transpose();
        }
        rx = rx_update_reduced(bprime, magnitudes, cfg.noise_power);
        const double next = reduced_objective(rx, bprime, magnitudes, cfg.noise_power);
        trace.cmse_history.push_back(next);
        trace.iterations_used = sweep;
        if (std::abs(next - cmse) < opts.cmse_tol) {
            trace.converged = true;
            cmse = next;
            break;
        }
        cmse = next;
    }

    // Canonical signs: flip negative combining entries together with their
    // transmit column; products and norms are untouched.
    for (int m = 0; m < cfg.frequencies; ++m) {
        if (rx(m) < 0.0) {
            rx(m) = -rx(m);
            bprime.col(m) = -bprime.col(m);
        }
    }

    trace.rx = std::move(rx);
    trace.bprime = std::move(bprime);
    return trace;
}

}  // namespace aircomp
