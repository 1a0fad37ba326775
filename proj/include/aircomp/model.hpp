#pragma once

#include "aircomp/types.hpp"

namespace aircomp {

/// Real 2x2 expansion of a complex gain: [[Re h, -Im h], [Im h, Re h]].
/// Acting on [Re v, Im v] it reproduces complex multiplication h * v.
Eigen::Matrix2d expand_channel(Complex h);

/// Assemble the 2M x K signal matrix with block (m, k) = expand_channel(h_km) * b_km.
/// Throws if the channel and transmit dimensions disagree.
SMatrix build_s(const ChannelMatrix& channels, const TxScalings& tx);

/// Computation MSE in the full real formulation:
///   (g^T S - 1^T)(g^T S - 1^T)^T + (sigma^2 / 2) g^T g.
double cmse_full(const RxScaling& rx, const SMatrix& s, double noise_power);

/// Computation MSE in the reduced per-frequency formulation. `rx` enters
/// through its absolute values; `bprime` is expected nonnegative (aligned).
double cmse_reduced(const Eigen::VectorXd& rx, const Eigen::MatrixXd& bprime,
                    const Eigen::MatrixXd& magnitudes, double noise_power);

struct EmbeddedPoint {
    RxScaling rx;
    TxScalings tx;
};

/// Lift a reduced solution into the full formulation: g_m -> [g_m, 0] and
/// b_km -> b'_km * conj(h_km) / |h_km|, so each received block lands on the
/// first real axis. The full CMSE of the result equals the reduced CMSE.
/// Throws if b'_km > 0 on a channel with |h_km| = 0.
EmbeddedPoint embed_reduced(const Eigen::VectorXd& rx_reduced, const Eigen::MatrixXd& bprime,
                            const ChannelMatrix& channels);

/// Zero-mean, unit-variance view of a measurement batch.
Eigen::VectorXd normalize(const MeasurementBatch& batch);

/// Inverse of `normalize` at the sum level: stddev * estimate + K * mean.
double denormalize_sum(double estimate, double mean, double stddev, int sensors);

}  // namespace aircomp
