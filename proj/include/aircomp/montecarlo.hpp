#pragma once

#include "aircomp/rng.hpp"
#include "aircomp/solver.hpp"
#include "aircomp/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace aircomp {

enum class Policy {
    OptimizedRNO,
    OptimizedCNO,
    FixedRx,
    UniformTx,
    SingleFreqOracle,
};

/// CLI / serialization name of a policy ("rno", "cno", "fixed-rx", ...).
std::string policy_name(Policy policy);
std::optional<Policy> parse_policy(const std::string& name);

/// One Monte-Carlo experiment: draw channels `trials` times and evaluate
/// every listed policy on the same draw, so policies are compared on
/// matched channel realizations.
struct TrialPlan {
    SystemConfig config;
    int trials = 10000;
    std::uint64_t seed = 1;
    std::vector<Policy> policies = {Policy::OptimizedRNO};
    SolverOptions solver;
    /// When set, every trial uses this fixed channel instead of a random draw.
    std::optional<ChannelMatrix> channel_override;
    int threads = 0;  // 0 = hardware concurrency
};

struct PolicyStats {
    Policy policy = Policy::OptimizedRNO;
    double mean_cmse = 0.0;
    double stderr_mean = 0.0;
    int trials = 0;
    int non_converged = 0;
};

struct ExperimentResult {
    double mean_cmse = 0.0;   // first listed policy
    double stderr_mean = 0.0;
    int trials = 0;
    std::vector<PolicyStats> per_policy;
    std::uint64_t seed = 0;
    SystemConfig config;
};

/// Normalized Rayleigh fading draw: independent h_km with real and imaginary
/// parts N(0, 1/2), so E|h_km|^2 = 1. Entries are drawn sensor-major
/// (k outer, m inner), real part before imaginary part.
ChannelMatrix draw_channels(int sensors, int frequencies, Rng& rng);

/// Run a trial plan. Trials use independent sub-streams derived from
/// (seed, trial index) and may execute on several threads; aggregation is
/// done in trial order, so results are bit-identical for any thread count.
ExperimentResult run_plan(const TrialPlan& plan);

enum class SignalLaw {
    Gaussian,       // x_k ~ N(0, 1)
    Uniform,        // x_k ~ U(-sqrt(3), sqrt(3)), also unit variance
    Zero,           // x_k = 0: isolates the noise term
};

struct EmpiricalMse {
    double mean = 0.0;
    double stderr_mean = 0.0;
};

/// Signal-level Monte-Carlo estimate of the computation MSE: draws sensor
/// signals and per-frequency complex noise, runs the combine chain and
/// averages the squared estimation error. Converges to cmse_full.
EmpiricalMse empirical_mse_detailed(const RxScaling& rx, const TxScalings& tx,
                                    const ChannelMatrix& channels, const SystemConfig& cfg,
                                    long n_draws, Rng& rng,
                                    SignalLaw law = SignalLaw::Gaussian);

double empirical_mse(const RxScaling& rx, const TxScalings& tx, const ChannelMatrix& channels,
                     const SystemConfig& cfg, long n_draws, Rng& rng,
                     SignalLaw law = SignalLaw::Gaussian);

/// Optimized operating point of one channel draw, reported per (sensor,
/// frequency) for channel/Tx profile plots.
struct TxProfile {
    Eigen::MatrixXd channel_mag;  // |h_km|
    Eigen::MatrixXd tx_mag;       // |b_km|
    Eigen::MatrixXd power;        // |b_km|^2
    double zero_power_fraction = 0.0;  // share of pairs with power < 1e-6 * P
    SolveTrace trace;
};

TxProfile tx_profile(const ChannelMatrix& channels, const SystemConfig& cfg,
                     const SolverOptions& opts = {});

}  // namespace aircomp
