#include "aircomp/montecarlo.hpp"

#include "aircomp/baselines.hpp"
#include "aircomp/model.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace aircomp {

std::string policy_name(Policy policy) {
    switch (policy) {
        case Policy::OptimizedRNO: return "rno";
        case Policy::OptimizedCNO: return "cno";
        case Policy::FixedRx: return "fixed-rx";
        case Policy::UniformTx: return "uniform-tx";
        case Policy::SingleFreqOracle: return "oracle1f";
    }
    return "unknown";
}

std::optional<Policy> parse_policy(const std::string& name) {
    if (name == "rno") return Policy::OptimizedRNO;
    if (name == "cno") return Policy::OptimizedCNO;
    if (name == "fixed-rx") return Policy::FixedRx;
    if (name == "uniform-tx") return Policy::UniformTx;
    if (name == "oracle1f") return Policy::SingleFreqOracle;
    return std::nullopt;
}

ChannelMatrix draw_channels(int sensors, int frequencies, Rng& rng) {
    if (sensors < 1 || frequencies < 1)
        throw std::invalid_argument("draw_channels: dimensions must be >= 1");
    constexpr double component_std = 0.7071067811865476;  // sqrt(1/2)
    Eigen::MatrixXcd coeffs(sensors, frequencies);
    for (int k = 0; k < sensors; ++k) {
        for (int m = 0; m < frequencies; ++m) {
            const double re = component_std * rng.gaussian();
            const double im = component_std * rng.gaussian();
            coeffs(k, m) = Complex(re, im);
        }
    }
    return ChannelMatrix(std::move(coeffs));
}

namespace {

struct TrialOutcome {
    double cmse = 0.0;
    bool converged = true;
};

TrialOutcome evaluate_policy(Policy policy, const ChannelMatrix& channels,
                             const Eigen::MatrixXd& mags, const TrialPlan& plan) {
    switch (policy) {
        case Policy::OptimizedRNO: {
            const ReducedSolveTrace trace =
                reduced_alternate_minimize(mags, plan.config, plan.solver);
            return {trace.final_cmse(), trace.converged};
        }
        case Policy::OptimizedCNO: {
            const CnoResult result = optimize_cno(mags, plan.config, plan.solver);
            return {result.cmse, result.trace.converged};
        }
        case Policy::FixedRx:
            return {baseline_fixed_rx(channels, plan.config).cmse, true};
        case Policy::UniformTx:
            return {baseline_uniform_tx(channels, plan.config).cmse, true};
        case Policy::SingleFreqOracle:
            return {single_frequency_oracle(mags, plan.config), true};
    }
    throw std::logic_error("evaluate_policy: unknown policy");
}

}  // namespace

ExperimentResult run_plan(const TrialPlan& plan) {
    plan.config.validate();
    plan.solver.validate();
    if (plan.trials < 1) throw std::invalid_argument("run_plan: trials must be >= 1");
    if (plan.policies.empty()) throw std::invalid_argument("run_plan: no policies listed");
    for (Policy policy : plan.policies)
        if (policy == Policy::SingleFreqOracle && plan.config.frequencies != 1)
            throw std::invalid_argument("run_plan: oracle1f requires M = 1");
    if (plan.channel_override &&
        (plan.channel_override->sensors() != plan.config.sensors ||
         plan.channel_override->frequencies() != plan.config.frequencies))
        throw std::invalid_argument("run_plan: channel override dimensions disagree with config");

    const int n_policies = static_cast<int>(plan.policies.size());
    const int n_trials = plan.trials;
    std::vector<double> values(static_cast<size_t>(n_trials) * n_policies);
    std::vector<unsigned char> converged(values.size(), 1);

    const auto run_trial = [&](int trial) {
        Rng rng = Rng::for_trial(plan.seed, static_cast<std::uint64_t>(trial));
        const ChannelMatrix channels =
            plan.channel_override
                ? *plan.channel_override
                : draw_channels(plan.config.sensors, plan.config.frequencies, rng);
        const Eigen::MatrixXd mags = channels.magnitudes();
        for (int p = 0; p < n_policies; ++p) {
            const TrialOutcome outcome =
                evaluate_policy(plan.policies[p], channels, mags, plan);
            const size_t slot = static_cast<size_t>(trial) * n_policies + p;
            values[slot] = outcome.cmse;
            converged[slot] = outcome.converged ? 1 : 0;
        }
    };

    int threads = plan.threads;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n_trials));

    if (threads == 1) {
        for (int trial = 0; trial < n_trials; ++trial) run_trial(trial);
    } else {
        std::atomic<int> next_trial{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (int trial = next_trial.fetch_add(1); trial < n_trials;
                     trial = next_trial.fetch_add(1))
                    run_trial(trial);
            });
        }
        for (std::thread& worker : pool) worker.join();
    }

    ExperimentResult result;
    result.trials = n_trials;
    result.seed = plan.seed;
    result.config = plan.config;
    result.per_policy.resize(n_policies);
    for (int p = 0; p < n_policies; ++p) {
        double sum = 0.0;
        double sum_sq = 0.0;
        int failures = 0;
        for (int trial = 0; trial < n_trials; ++trial) {
            const size_t slot = static_cast<size_t>(trial) * n_policies + p;
            sum += values[slot];
            sum_sq += values[slot] * values[slot];
            failures += converged[slot] ? 0 : 1;
        }
        PolicyStats& stats = result.per_policy[p];
        stats.policy = plan.policies[p];
        stats.trials = n_trials;
        stats.non_converged = failures;
        stats.mean_cmse = sum / n_trials;
        if (n_trials > 1) {
            const double variance =
                std::max(0.0, (sum_sq - n_trials * stats.mean_cmse * stats.mean_cmse) /
                                  (n_trials - 1));
            stats.stderr_mean = std::sqrt(variance / n_trials);
        }
    }
    result.mean_cmse = result.per_policy.front().mean_cmse;
    result.stderr_mean = result.per_policy.front().stderr_mean;
    return result;
}

EmpiricalMse empirical_mse_detailed(const RxScaling& rx, const TxScalings& tx,
                                    const ChannelMatrix& channels, const SystemConfig& cfg,
                                    long n_draws, Rng& rng, SignalLaw law) {
    cfg.validate();
    if (n_draws < 1) throw std::invalid_argument("empirical_mse: n_draws must be >= 1");
    const SMatrix s = build_s(channels, tx);
    if (rx.stacked.size() != s.rows())
        throw std::invalid_argument("empirical_mse: rx length does not match S");

    const int k_count = cfg.sensors;
    const int rows = static_cast<int>(s.rows());
    const double noise_std = std::sqrt(0.5 * cfg.noise_power);
    const double uniform_half_width = std::sqrt(3.0);

    Eigen::VectorXd x(k_count);
    Eigen::VectorXd received(rows);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (long draw = 0; draw < n_draws; ++draw) {
        switch (law) {
            case SignalLaw::Gaussian:
                for (int k = 0; k < k_count; ++k) x(k) = rng.gaussian();
                break;
            case SignalLaw::Uniform:
                for (int k = 0; k < k_count; ++k)
                    x(k) = rng.uniform(-uniform_half_width, uniform_half_width);
                break;
            case SignalLaw::Zero:
                x.setZero();
                break;
        }
        received.noalias() = s * x;
        for (int i = 0; i < rows; ++i) received(i) += noise_std * rng.gaussian();
        const double estimate = rx.stacked.dot(received);
        const double err = estimate - x.sum();
        const double sq = err * err;
        sum += sq;
        sum_sq += sq * sq;
    }

    EmpiricalMse out;
    out.mean = sum / static_cast<double>(n_draws);
    if (n_draws > 1) {
        const double variance = std::max(
            0.0, (sum_sq - n_draws * out.mean * out.mean) / static_cast<double>(n_draws - 1));
        out.stderr_mean = std::sqrt(variance / static_cast<double>(n_draws));
    }
    return out;
}

double empirical_mse(const RxScaling& rx, const TxScalings& tx, const ChannelMatrix& channels,
                     const SystemConfig& cfg, long n_draws, Rng& rng, SignalLaw law) {
    return empirical_mse_detailed(rx, tx, channels, cfg, n_draws, rng, law).mean;
}

TxProfile tx_profile(const ChannelMatrix& channels, const SystemConfig& cfg,
                     const SolverOptions& opts) {
    TxProfile profile;
    profile.trace = alternate_minimize(channels, cfg, opts);
    profile.channel_mag = channels.magnitudes();
    profile.tx_mag = profile.trace.tx.factors.cwiseAbs();
    profile.power = profile.tx_mag.array().square();
    const double threshold = 1e-6 * cfg.power;
    const auto zero_count = (profile.power.array() < threshold).count();
    profile.zero_power_fraction =
        static_cast<double>(zero_count) / static_cast<double>(profile.power.size());
    return profile;
}

}  // namespace aircomp
