#include "aircomp/validate.hpp"

#include "aircomp/baselines.hpp"
#include "aircomp/model.hpp"
#include "aircomp/montecarlo.hpp"
#include "aircomp/rng.hpp"
#include "aircomp/serialize.hpp"
#include "aircomp/solver.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace aircomp {

namespace {

struct Suite {
    const ValidateOptions& options;
    std::vector<CheckResult> results;

    void check(const std::string& name, const std::function<bool(std::ostream&)>& body) {
        std::ostringstream detail;
        bool passed = false;
        try {
            passed = body(detail);
        } catch (const std::exception& e) {
            detail << "exception: " << e.what();
        }
        results.push_back(CheckResult{name, passed, detail.str()});
    }
};

SystemConfig random_config(Rng& rng, int max_sensors = 20, int max_frequencies = 4) {
    const int k = 1 + static_cast<int>(rng.uniform() * max_sensors);
    const int m = 1 + static_cast<int>(rng.uniform() * max_frequencies);
    const double powers[] = {0.1, 1.0, 10.0};
    const double p = powers[static_cast<int>(rng.uniform() * 3)];
    return SystemConfig(k, m, p, 1.0);
}

// One manually unrolled sweep of the full alternation, so the suite can look
// at intermediate states the solver does not expose.
struct SweepState {
    TxScalings tx;
    RxScaling rx;
    std::vector<double> lambdas;
};

SweepState tx_then_rx_sweep(const ChannelMatrix& channels, const SystemConfig& cfg,
                            const RxScaling& rx_in) {
    SweepState state;
    state.tx = TxScalings(Eigen::MatrixXcd::Zero(cfg.sensors, cfg.frequencies));
    state.lambdas.resize(cfg.sensors);
    for (int k = 0; k < cfg.sensors; ++k) {
        const TxUpdate upd =
            optimal_tx(rx_in, channels.coefficients.row(k).transpose(), cfg.power);
        state.lambdas[k] = upd.lambda;
        for (int m = 0; m < cfg.frequencies; ++m)
            state.tx.factors(k, m) = Complex(upd.coeffs(2 * m), upd.coeffs(2 * m + 1));
    }
    state.rx = optimal_rx(build_s(channels, state.tx), cfg.noise_power);
    return state;
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidateOptions& options) {
    Suite suite{options, {}};
    const int instances = options.quick ? 8 : 40;
    const std::uint64_t seed = options.seed;

    suite.check("descent-monotonic", [&](std::ostream& detail) {
        double worst = 0.0;
        for (int i = 0; i < instances; ++i) {
            Rng rng = Rng::for_trial(seed, 100 + i);
            const SystemConfig cfg = random_config(rng);
            const ChannelMatrix channels = draw_channels(cfg.sensors, cfg.frequencies, rng);
            SolverOptions opts;
            opts.cmse_tol = 1e-9;
            const SolveTrace trace = alternate_minimize(channels, cfg, opts);
            for (size_t t = 1; t < trace.cmse_history.size(); ++t)
                worst = std::max(worst, trace.cmse_history[t] - trace.cmse_history[t - 1]);
            const ReducedSolveTrace red =
                reduced_alternate_minimize(channels.magnitudes(), cfg, opts);
            for (size_t t = 1; t < red.cmse_history.size(); ++t)
                worst = std::max(worst, red.cmse_history[t] - red.cmse_history[t - 1]);
        }
        detail << "max increase " << worst;
        return worst <= 1e-10;
    });

    suite.check("tx-power-feasible", [&](std::ostream& detail) {
        double worst = -1e300;
        for (int i = 0; i < instances; ++i) {
            Rng rng = Rng::for_trial(seed, 200 + i);
            const SystemConfig cfg = random_config(rng);
            const ChannelMatrix channels = draw_channels(cfg.sensors, cfg.frequencies, rng);
            SolverOptions opts;
            opts.init_policy = (i % 2 == 0) ? TxInit::UniformAlignedTx : TxInit::RandomTx;
            opts.init_seed = seed + i;
            RxScaling rx = optimal_rx(
                build_s(channels, TxScalings(Eigen::MatrixXcd::Constant(
                                      cfg.sensors, cfg.frequencies,
                                      std::sqrt(cfg.power / cfg.frequencies)))),
                cfg.noise_power);
            for (int sweep = 0; sweep < 5; ++sweep) {
                const SweepState state = tx_then_rx_sweep(channels, cfg, rx);
                worst = std::max(state.tx.max_power_violation(cfg.power), worst);
                rx = state.rx;
            }
        }
        detail << "max violation " << worst;
        return worst <= 1e-9;
    });

    suite.check("kkt-complementary-slackness", [&](std::ostream& detail) {
        double worst = 0.0;
        for (int i = 0; i < instances; ++i) {
            Rng rng = Rng::for_trial(seed, 300 + i);
            const SystemConfig cfg = random_config(rng);
            const ChannelMatrix channels = draw_channels(cfg.sensors, cfg.frequencies, rng);
            Eigen::VectorXd g(2 * cfg.frequencies);
            for (int j = 0; j < g.size(); ++j) g(j) = rng.gaussian();
            const RxScaling rx{g};
            for (int k = 0; k < cfg.sensors; ++k) {
                const TxUpdate upd =
                    optimal_tx(rx, channels.coefficients.row(k).transpose(), cfg.power);
                const double power = upd.coeffs.squaredNorm();
                if (upd.lambda > 0.0) worst = std::max(worst, std::abs(power - cfg.power));
                worst = std::max(worst, upd.lambda * std::abs(power - cfg.power));
            }
        }
        detail << "max residual " << worst;
        return worst <= 1e-8;
    });

    suite.check("tx-alignment", [&](std::ostream& detail) {
        double worst = 0.0;
        for (int i = 0; i < instances; ++i) {
            Rng rng = Rng::for_trial(seed, 400 + i);
            const SystemConfig cfg = random_config(rng);
            const ChannelMatrix channels = draw_channels(cfg.sensors, cfg.frequencies, rng);
            Eigen::VectorXd g(2 * cfg.frequencies);
            for (int j = 0; j < g.size(); ++j) g(j) = rng.gaussian();
            const RxScaling rx{g};
            const SweepState state = tx_then_rx_sweep(channels, cfg, rx);
            for (int k = 0; k < cfg.sensors; ++k) {
                for (int m = 0; m < cfg.frequencies; ++m) {
                    const Eigen::Vector2d gm = rx.block(m);
                    if (gm.norm() == 0.0) continue;
                    const Complex received =
                        channels.entry(k, m) * state.tx.factors(k, m);
                    const double cross =
                        received.real() * gm(1) - received.imag() * gm(0);
                    const double scale = std::max(1.0, std::abs(received) * gm.norm());
                    worst = std::max(worst, std::abs(cross) / scale);
                    // received = c_k |h_km|^2 g_m with c_k >= 0
                    const double dot = received.real() * gm(0) + received.imag() * gm(1);
                    if (dot < -1e-12) worst = std::max(worst, std::abs(dot));
                }
            }
        }
        detail << "max misalignment " << worst;
        return worst <= 1e-9;
    });

    suite.check("rx-stationarity", [&](std::ostream& detail) {
        const int perturbations = options.quick ? 50 : 200;
        double worst = 0.0;
        double worst_drop = 0.0;
        for (int i = 0; i < (options.quick ? 4 : 10); ++i) {
            Rng rng = Rng::for_trial(seed, 500 + i);
            const SystemConfig cfg = random_config(rng);
            const ChannelMatrix channels = draw_channels(cfg.sensors, cfg.frequencies, rng);
            const SolveTrace trace = alternate_minimize(channels, cfg);
            const SMatrix s = build_s(channels, trace.tx);
            const Eigen::VectorXd resid =
                2.0 * s * (s.transpose() * trace.rx.stacked - Eigen::VectorXd::Ones(cfg.sensors)) +
                cfg.noise_power * trace.rx.stacked;
            worst = std::max(worst, resid.norm());
            const double base = cmse_full(trace.rx, s, cfg.noise_power);
            for (int p = 0; p < perturbations; ++p) {
                Eigen::VectorXd direction(trace.rx.stacked.size());
                for (int j = 0; j < direction.size(); ++j) direction(j) = rng.gaussian();
                direction.normalize();
                const RxScaling perturbed{trace.rx.stacked + 1e-3 * direction};
                worst_drop = std::max(worst_drop, base - cmse_full(perturbed, s, cfg.noise_power));
            }
        }
        detail << "max gradient residual " << worst << ", max perturbation drop " << worst_drop;
        return worst <= 1e-9 && worst_drop <= 0.0;
    });

    suite.check("lambda-monotone", [&](std::ostream& detail) {
        double prev = 0.0;
        bool strict = true;
        Rng rng = Rng::for_trial(seed, 600);
        Eigen::VectorXd gain(6);
        for (int j = 0; j < gain.size(); ++j) gain(j) = rng.gaussian();
        for (int step = 0; step <= 100; ++step) {
            const double lambda = 0.1 * step;
            const double norm = tx_at_lambda(gain, lambda).norm();
            if (step > 0 && norm >= prev) strict = false;
            prev = norm;
        }
        detail << (strict ? "strictly decreasing on the grid" : "monotonicity violated");
        return strict;
    });

    suite.check("lambda-bisection-vs-closed-form", [&](std::ostream& detail) {
        double worst_lambda = 0.0;
        double worst_vec = 0.0;
        for (int i = 0; i < instances; ++i) {
            Rng rng = Rng::for_trial(seed, 700 + i);
            const int dim = 2 * (1 + static_cast<int>(rng.uniform() * 4));
            Eigen::VectorXd gain(dim);
            for (int j = 0; j < dim; ++j) gain(j) = rng.gaussian();
            const double power = 0.5 / gain.squaredNorm();  // force the constrained branch
            const TxUpdate upd = power_constrained_tx(gain, power, 1e-10);
            const double reference = closed_form_lambda(gain.norm(), power);
            worst_lambda =
                std::max(worst_lambda, std::abs(upd.lambda - reference) / (1.0 + reference));
            worst_vec = std::max(worst_vec,
                                 (tx_at_lambda(gain, upd.lambda) - upd.coeffs).norm());
        }
        detail << "lambda mismatch " << worst_lambda << ", dense-solve mismatch " << worst_vec;
        return worst_lambda <= 1e-8 && worst_vec <= 1e-9;
    });

    suite.check("reduced-full-equivalence", [&](std::ostream& detail) {
        double worst = 0.0;
        for (int i = 0; i < instances; ++i) {
            Rng rng = Rng::for_trial(seed, 800 + i);
            const SystemConfig cfg = random_config(rng);
            const ChannelMatrix channels = draw_channels(cfg.sensors, cfg.frequencies, rng);
            SolverOptions opts;
            opts.cmse_tol = 1e-9;
            const double full = alternate_minimize(channels, cfg, opts).final_cmse();
            const double reduced =
                reduced_alternate_minimize(channels.magnitudes(), cfg, opts).final_cmse();
            worst = std::max(worst, std::abs(full - reduced));
        }
        detail << "max |full - reduced| " << worst;
        return worst <= 1e-6;
    });

    suite.check("embedding-equality", [&](std::ostream& detail) {
        double worst = 0.0;
        for (int i = 0; i < instances; ++i) {
            Rng rng = Rng::for_trial(seed, 900 + i);
            const SystemConfig cfg = random_config(rng);
            const ChannelMatrix channels = draw_channels(cfg.sensors, cfg.frequencies, rng);
            Eigen::VectorXd g(cfg.frequencies);
            for (int m = 0; m < cfg.frequencies; ++m) g(m) = rng.uniform(0.0, 2.0);
            Eigen::MatrixXd bprime(cfg.sensors, cfg.frequencies);
            for (int k = 0; k < cfg.sensors; ++k)
                for (int m = 0; m < cfg.frequencies; ++m)
                    bprime(k, m) = rng.uniform(0.0, std::sqrt(cfg.power / cfg.frequencies));
            const double reduced = cmse_reduced(g, bprime, channels.magnitudes(), cfg.noise_power);
            const EmbeddedPoint point = embed_reduced(g, bprime, channels);
            const double full =
                cmse_full(point.rx, build_s(channels, point.tx), cfg.noise_power);
            worst = std::max(worst, std::abs(full - reduced) / std::max(1.0, reduced));
        }
        detail << "max relative mismatch " << worst;
        return worst <= 1e-10;
    });

    suite.check("cno-noise-identity", [&](std::ostream& detail) {
        double worst = 0.0;
        const bool fault = options.inject_fault == "cno-noise";
        for (int i = 0; i < instances; ++i) {
            Rng rng = Rng::for_trial(seed, 1000 + i);
            const SystemConfig cfg = random_config(rng);
            const ChannelMatrix channels = draw_channels(cfg.sensors, cfg.frequencies, rng);
            const Eigen::MatrixXd mags = channels.magnitudes();
            const CnoResult cno = optimize_cno(mags, cfg);
            SystemConfig doubled = cfg;
            doubled.noise_power *= 2.0;
            const double reduced_at_doubled =
                reduced_alternate_minimize(mags, doubled).final_cmse();
            worst = std::max(worst, std::abs(cno.cmse - reduced_at_doubled));
            // Independent route: evaluate the returned point with the CNO
            // objective directly.
            const Eigen::MatrixXd products = (mags.array() * cno.bprime.array()).matrix();
            const double noise = fault ? 2.0 * cfg.noise_power : cfg.noise_power;
            const double direct = cmse_cno(cno.rx, products, noise);
            worst = std::max(worst, std::abs(direct - cno.cmse));
        }
        detail << "max identity mismatch " << worst;
        return worst <= 1e-6;
    });

    suite.check("oracle-agreement-m1", [&](std::ostream& detail) {
        double worst = 0.0;
        double worst_below = 0.0;
        for (int i = 0; i < instances; ++i) {
            Rng rng = Rng::for_trial(seed, 1100 + i);
            const SystemConfig cfg(10, 1, i % 2 == 0 ? 10.0 : 1.0, 1.0);
            const ChannelMatrix channels = draw_channels(cfg.sensors, 1, rng);
            SolverOptions opts;
            opts.cmse_tol = 1e-9;
            opts.max_iters = 500;  // run to the fixed point before comparing
            const double solved =
                reduced_alternate_minimize(channels.magnitudes(), cfg, opts).final_cmse();
            const double oracle = single_frequency_oracle(channels.magnitudes(), cfg);
            worst = std::max(worst, std::abs(solved - oracle));
            worst_below = std::max(worst_below, oracle - solved);
        }
        detail << "max |solver - oracle| " << worst;
        return worst <= 1e-3 && worst_below <= 1e-6;
    });

    suite.check("baseline-dominance", [&](std::ostream& detail) {
        // Dominance is a statement about the converged optimized design, so
        // run the alternation past the default 20-sweep reporting horizon.
        SolverOptions opts;
        opts.cmse_tol = 1e-9;
        opts.max_iters = 500;
        double worst = 0.0;
        for (int i = 0; i < instances; ++i) {
            Rng rng = Rng::for_trial(seed, 1200 + i);
            const SystemConfig cfg = random_config(rng);
            const ChannelMatrix channels = draw_channels(cfg.sensors, cfg.frequencies, rng);
            const Eigen::MatrixXd mags = channels.magnitudes();
            const double optimized =
                reduced_alternate_minimize(mags, cfg, opts).final_cmse();
            worst = std::max(worst, optimized - baseline_fixed_rx(channels, cfg).cmse);
            worst = std::max(worst, optimized - baseline_uniform_tx(channels, cfg).cmse);
            worst = std::max(worst, optimized - optimize_cno(mags, cfg, opts).cmse);
        }
        detail << "max dominance violation " << worst;
        return worst <= 1e-9;
    });

    suite.check("min-norm-dominance", [&](std::ostream& detail) {
        double worst = 0.0;
        for (int i = 0; i < instances; ++i) {
            Rng rng = Rng::for_trial(seed, 1300 + i);
            const int dim = 2 * (1 + static_cast<int>(rng.uniform() * 4));
            Eigen::VectorXd gain(dim), shift(dim);
            for (int j = 0; j < dim; ++j) {
                gain(j) = rng.gaussian();
                shift(j) = rng.gaussian();
            }
            const Eigen::MatrixXd outer = gain * gain.transpose();
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(outer);
            const Eigen::MatrixXd pinv = cod.pseudoInverse();
            const Eigen::VectorXd min_norm = pinv * gain;
            const Eigen::VectorXd general =
                min_norm + (Eigen::MatrixXd::Identity(dim, dim) - pinv * outer) * shift;
            worst = std::max(worst, min_norm.norm() - general.norm());
        }
        detail << "max norm excess " << worst;
        return worst <= 1e-12;
    });

    return suite.results;
}

}  // namespace aircomp
