#include "aircomp/baselines.hpp"

#include "aircomp/model.hpp"
#include "aircomp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aircomp {

double cmse_cno(const CnoRxScaling& rx, const Eigen::MatrixXd& product_magnitudes,
                double noise_power) {
    const int k_count = static_cast<int>(product_magnitudes.rows());
    const int m_count = static_cast<int>(product_magnitudes.cols());
    if (rx.size() != m_count) throw std::invalid_argument("cmse_cno: dimension mismatch");

    double misfit = 0.0;
    for (int k = 0; k < k_count; ++k) {
        double gain = 0.0;
        for (int m = 0; m < m_count; ++m) gain += std::abs(rx(m)) * product_magnitudes(k, m);
        misfit += (gain - 1.0) * (gain - 1.0);
    }
    return misfit + noise_power * rx.squaredNorm();
}

CnoResult optimize_cno(const Eigen::MatrixXd& magnitudes, const SystemConfig& cfg,
                       const SolverOptions& opts) {
    SystemConfig doubled = cfg;
    doubled.noise_power *= 2.0;
    CnoResult result;
    result.trace = reduced_alternate_minimize(magnitudes, doubled, opts);
    result.bprime = result.trace.bprime;
    result.rx = result.trace.rx.cast<Complex>();
    result.cmse = result.trace.final_cmse();
    return result;
}

BaselineResult baseline_fixed_rx(const ChannelMatrix& channels, const SystemConfig& cfg) {
    cfg.validate();
    const Eigen::MatrixXd mags = channels.magnitudes();
    const Eigen::VectorXd rx_reduced = Eigen::VectorXd::Ones(cfg.frequencies);

    Eigen::MatrixXd bprime(cfg.sensors, cfg.frequencies);
    for (int k = 0; k < cfg.sensors; ++k) {
        const Eigen::VectorXd gain = mags.row(k).transpose();
        bprime.row(k) = power_constrained_tx(gain, cfg.power, 1e-10).coeffs.transpose();
    }

    EmbeddedPoint point = embed_reduced(rx_reduced, bprime, channels);
    const double cmse =
        cmse_full(point.rx, build_s(channels, point.tx), cfg.noise_power);
    return BaselineResult{std::move(point.rx), std::move(point.tx), cmse};
}

BaselineResult baseline_uniform_tx(const ChannelMatrix& channels, const SystemConfig& cfg) {
    cfg.validate();
    const Eigen::MatrixXd mags = channels.magnitudes();
    const double amplitude = std::sqrt(cfg.power / cfg.frequencies);
    Eigen::MatrixXd bprime(cfg.sensors, cfg.frequencies);
    for (int k = 0; k < cfg.sensors; ++k)
        for (int m = 0; m < cfg.frequencies; ++m)
            bprime(k, m) = mags(k, m) == 0.0 ? 0.0 : amplitude;

    const Eigen::VectorXd rx_reduced = rx_update_reduced(bprime, mags, cfg.noise_power);
    EmbeddedPoint point = embed_reduced(rx_reduced, bprime, channels);
    const double cmse =
        cmse_full(point.rx, build_s(channels, point.tx), cfg.noise_power);
    return BaselineResult{std::move(point.rx), std::move(point.tx), cmse};
}

double single_frequency_oracle(const Eigen::MatrixXd& magnitudes, const SystemConfig& cfg) {
    cfg.validate();
    if (cfg.frequencies != 1 || magnitudes.cols() != 1)
        throw std::invalid_argument("single_frequency_oracle: requires M = 1");
    if (magnitudes.rows() != cfg.sensors)
        throw std::invalid_argument("single_frequency_oracle: magnitude rows must equal K");

    // With the per-sensor clipped inversion substituted, the objective in g is
    //   phi(g) = sum_k max(0, 1 - c_k g)^2 + (sigma^2/2) g^2,  c_k = |h_k| sqrt(P),
    // which is convex on g >= 0.
    const Eigen::ArrayXd c = magnitudes.col(0).array() * std::sqrt(cfg.power);
    const auto phi = [&](double g) {
        const double misfit = (1.0 - c * g).max(0.0).square().sum();
        return misfit + 0.5 * cfg.noise_power * g * g;
    };
    const auto phi_slope = [&](double g) {
        const double misfit_slope = (-2.0 * c * (1.0 - c * g).max(0.0)).sum();
        return misfit_slope + cfg.noise_power * g;
    };

    double hi = 1.0;
    while (phi_slope(hi) < 0.0) hi *= 2.0;

    const double inv_golden = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0;
    double x1 = hi - inv_golden * (hi - lo);
    double x2 = lo + inv_golden * (hi - lo);
    double f1 = phi(x1);
    double f2 = phi(x2);
    while (hi - lo > 1e-10 * std::max(1.0, hi)) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_golden * (hi - lo);
            f1 = phi(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_golden * (hi - lo);
            f2 = phi(x2);
        }
    }
    return phi(0.5 * (lo + hi));
}

namespace {

// Joint reduced objective and gradient, written out locally so the oracle
// stays independent of the solver code paths.
struct JointObjective {
    const Eigen::MatrixXd& mags;
    double noise_power;

    double value(const Eigen::VectorXd& g, const Eigen::MatrixXd& bprime) const {
        double misfit = 0.0;
        for (int k = 0; k < bprime.rows(); ++k) {
            double gain = 0.0;
            for (int m = 0; m < bprime.cols(); ++m) gain += g(m) * mags(k, m) * bprime(k, m);
            misfit += (gain - 1.0) * (gain - 1.0);
        }
        return misfit + 0.5 * noise_power * g.squaredNorm();
    }

    void gradient(const Eigen::VectorXd& g, const Eigen::MatrixXd& bprime,
                  Eigen::VectorXd& grad_g, Eigen::MatrixXd& grad_b) const {
        const int k_count = static_cast<int>(bprime.rows());
        const int m_count = static_cast<int>(bprime.cols());
        grad_g = noise_power * g;
        grad_b.setZero(k_count, m_count);
        for (int k = 0; k < k_count; ++k) {
            double gain = 0.0;
            for (int m = 0; m < m_count; ++m) gain += g(m) * mags(k, m) * bprime(k, m);
            const double resid = 2.0 * (gain - 1.0);
            for (int m = 0; m < m_count; ++m) {
                grad_g(m) += resid * mags(k, m) * bprime(k, m);
                grad_b(k, m) = resid * g(m) * mags(k, m);
            }
        }
    }
};

void project_rows_to_ball(Eigen::MatrixXd& bprime, double power) {
    const double radius = std::sqrt(power);
    for (int k = 0; k < bprime.rows(); ++k) {
        const double norm = bprime.row(k).norm();
        if (norm > radius) bprime.row(k) *= radius / norm;
    }
}

}  // namespace

double brute_force_oracle(const ChannelMatrix& channels, const SystemConfig& cfg, int starts,
                          std::uint64_t seed) {
    cfg.validate();
    if (cfg.sensors > 3 || cfg.frequencies > 2)
        throw std::invalid_argument("brute_force_oracle: instance too large (needs K <= 3, M <= 2)");
    if (channels.sensors() != cfg.sensors || channels.frequencies() != cfg.frequencies)
        throw std::invalid_argument("brute_force_oracle: channel dimensions disagree with config");
    starts = std::max(starts, 64);

    const Eigen::MatrixXd mags = channels.magnitudes();
    const JointObjective objective{mags, cfg.noise_power};
    const int k_count = cfg.sensors;
    const int m_count = cfg.frequencies;

    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd grad_g(m_count);
    Eigen::MatrixXd grad_b(k_count, m_count);

    for (int s = 0; s < starts; ++s) {
        Rng rng = Rng::for_trial(seed, static_cast<std::uint64_t>(s));
        const double scale = std::pow(2.0, (s % 5) - 2);  // spread starts across magnitudes

        Eigen::VectorXd g(m_count);
        for (int m = 0; m < m_count; ++m) g(m) = scale * rng.gaussian();
        Eigen::MatrixXd bprime(k_count, m_count);
        for (int k = 0; k < k_count; ++k)
            for (int m = 0; m < m_count; ++m) bprime(k, m) = rng.gaussian();
        project_rows_to_ball(bprime, cfg.power);

        double value = objective.value(g, bprime);
        double step = 0.1;
        for (int iter = 0; iter < 3000 && step > 1e-14; ++iter) {
            objective.gradient(g, bprime, grad_g, grad_b);
            bool accepted = false;
            while (step > 1e-14) {
                Eigen::VectorXd g_next = g - step * grad_g;
                Eigen::MatrixXd b_next = bprime - step * grad_b;
                project_rows_to_ball(b_next, cfg.power);
                const double next = objective.value(g_next, b_next);
                if (next < value) {
                    g = std::move(g_next);
                    bprime = std::move(b_next);
                    accepted = true;
                    const bool stalled = value - next < 1e-15 * (1.0 + std::abs(value));
                    value = next;
                    if (stalled) step = 0.0;  // flat; stop this start
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break;
            step *= 1.3;
        }
        best = std::min(best, value);
    }
    return best;
}

}  // namespace aircomp
