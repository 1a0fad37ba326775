#pragma once

#include "aircomp/solver.hpp"
#include "aircomp/types.hpp"

#include <cstdint>

namespace aircomp {

/// Complex per-frequency combining factors of the CNO-style fusion center.
using CnoRxScaling = Eigen::VectorXcd;

/// Computation MSE when the fusion center scales each complex channel
/// output as a whole:
///   sum_k (sum_m |g~_m| |h_km b_km| - 1)^2 + sigma^2 sum_m |g~_m|^2.
/// Relative to the real-operation objective the noise term is doubled.
double cmse_cno(const CnoRxScaling& rx, const Eigen::MatrixXd& product_magnitudes,
                double noise_power);

struct CnoResult {
    CnoRxScaling rx;
    Eigen::MatrixXd bprime;
    double cmse = 0.0;
    ReducedSolveTrace trace;
};

/// Best CNO design: by the noise-doubling identity this is the reduced
/// alternation run at 2 * sigma^2.
CnoResult optimize_cno(const Eigen::MatrixXd& magnitudes, const SystemConfig& cfg,
                       const SolverOptions& opts = {});

struct BaselineResult {
    RxScaling rx;
    TxScalings tx;
    double cmse = 0.0;
};

/// Baseline 1: unit combining factors g_m = [1, 0]; per-sensor Tx factors
/// optimized against that fixed combiner.
BaselineResult baseline_fixed_rx(const ChannelMatrix& channels, const SystemConfig& cfg);

/// Baseline 2: uniform channel-aligned transmit power P/M per frequency;
/// combining vector optimized against it.
BaselineResult baseline_uniform_tx(const ChannelMatrix& channels, const SystemConfig& cfg);

/// Exact single-frequency optimum by one-dimensional search. For fixed
/// combining gain g the per-sensor optimum is the clipped inversion
/// b'_k = min(sqrt(P), 1 / (g |h_k|)); the outer problem in g is convex and
/// solved by golden-section search. Requires M = 1.
double single_frequency_oracle(const Eigen::MatrixXd& magnitudes, const SystemConfig& cfg);

/// Ground-truth bound for desk-scale instances (K <= 3, M <= 2): multi-start
/// projected-gradient descent on the reduced joint objective, projecting
/// each sensor onto its power ball.
double brute_force_oracle(const ChannelMatrix& channels, const SystemConfig& cfg,
                          int starts = 64, std::uint64_t seed = 0x0A1C);

}  // namespace aircomp
