#pragma once

#include "aircomp/model.hpp"
#include "aircomp/types.hpp"

#include <cstdint>
#include <vector>

namespace aircomp {

/// Per-sensor effective gain vector: block m is expand_channel(h_km)^T g_m,
/// i.e. the complex product conj(h_km) * g_m in stacked real form.
using StackedGain = Eigen::VectorXd;

enum class TxInit {
    UniformAlignedTx,  // b'_km = sqrt(P/M), phases aligned to the channels
    RandomTx,          // random direction per sensor, scaled to full power
};

struct SolverOptions {
    int max_iters = 20;
    double cmse_tol = 1e-3;
    double lambda_tol = 1e-10;
    TxInit init_policy = TxInit::UniformAlignedTx;
    std::uint64_t init_seed = 0;  // only used by RandomTx

    void validate() const {
        if (max_iters < 1) throw std::invalid_argument("SolverOptions: max_iters must be >= 1");
        if (!(cmse_tol > 0.0)) throw std::invalid_argument("SolverOptions: cmse_tol must be > 0");
        if (!(lambda_tol > 0.0))
            throw std::invalid_argument("SolverOptions: lambda_tol must be > 0");
    }
};

/// Alternating-minimization record. The CMSE history starts at the value
/// after the initial Rx update and appends one entry per (Tx, Rx) sweep;
/// it is non-increasing because every update solves its convex subproblem.
struct SolveTrace {
    std::vector<double> cmse_history;
    int iterations_used = 0;
    bool converged = false;
    RxScaling rx;
    TxScalings tx;

    double final_cmse() const { return cmse_history.back(); }
};

/// Reduced-form counterpart of SolveTrace; `rx` and `bprime` are returned
/// sign-canonicalized (rx >= 0 entrywise at convergence).
struct ReducedSolveTrace {
    std::vector<double> cmse_history;
    int iterations_used = 0;
    bool converged = false;
    Eigen::VectorXd rx;       // length M
    Eigen::MatrixXd bprime;   // K x M

    double final_cmse() const { return cmse_history.back(); }
};

/// Closed-form Rx scaling for fixed transmit factors:
///   g^T = 1^T S^T (S S^T + (sigma^2/2) I)^{-1}.
RxScaling optimal_rx(const SMatrix& s, double noise_power);

/// Reduced-form Rx update on the M x K gain matrix with entries |h_km| b'_km.
Eigen::VectorXd rx_update_reduced(const Eigen::MatrixXd& bprime,
                                  const Eigen::MatrixXd& magnitudes, double noise_power);

/// Stacked gain h_k for one sensor, given the combining vector and the
/// sensor's channel row (length M).
StackedGain stack_gain(const RxScaling& rx, const Eigen::VectorXcd& channel_row);

struct TxUpdate {
    Eigen::VectorXd coeffs;  // b_k (stacked real form) or reduced b'_k
    double lambda = 0.0;     // KKT multiplier of the power constraint
};

/// Solve min (gain^T b - 1)^2 subject to |b|^2 <= power.
///
/// Takes the minimum-norm solution gain / |gain|^2 when feasible; otherwise
/// finds the multiplier by monotone bisection on |b(lambda)|^2 = power,
/// where b(lambda) solves (gain gain^T + lambda I) b = gain. The bisection
/// bracket [0, hi] starts at hi = 2|gain|/sqrt(power) and doubles until
/// infeasible-side, then shrinks until it is narrower than lambda_tol and
/// the power residual is below 1e-10 * max(1, power).
TxUpdate power_constrained_tx(const Eigen::VectorXd& gain, double power, double lambda_tol);

/// Per-sensor optimal Tx factors for a fixed combining vector (full form).
TxUpdate optimal_tx(const RxScaling& rx, const Eigen::VectorXcd& channel_row, double power,
                    double lambda_tol = 1e-10);

/// Reference route for b(lambda): dense symmetric solve of
/// (gain gain^T + lambda I) b = gain; at lambda = 0 the minimum-norm
/// solution via the Moore-Penrose pseudoinverse. Used for cross-checks.
Eigen::VectorXd tx_at_lambda(const Eigen::VectorXd& gain, double lambda);

/// Exact multiplier for the rank-one KKT system, |gain| / sqrt(power) - |gain|^2.
inline double closed_form_lambda(double gain_norm, double power) {
    return gain_norm / std::sqrt(power) - gain_norm * gain_norm;
}

/// Alternating minimization in the full 2M-dimensional formulation.
/// Each iteration is one full sweep: Tx update for every sensor, then the
/// Rx update; the run starts with an Rx update against the initial Tx.
SolveTrace alternate_minimize(const ChannelMatrix& channels, const SystemConfig& cfg,
                              const SolverOptions& opts = {});

/// Same alternation carried out entirely in the reduced M-dimensional
/// formulation on channel magnitudes.
ReducedSolveTrace reduced_alternate_minimize(const Eigen::MatrixXd& magnitudes,
                                             const SystemConfig& cfg,
                                             const SolverOptions& opts = {});

}  // namespace aircomp
