#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace aircomp {

using Complex = std::complex<double>;

/// Problem dimensions and physical parameters of one AirComp instance.
///
/// Sensor measurements are assumed zero-mean with unit variance; `power` is
/// the per-sensor budget summed over all frequencies, `noise_power` the
/// complex noise power per frequency channel.
struct SystemConfig {
    int sensors = 1;         // K
    int frequencies = 1;     // M
    double power = 10.0;     // P
    double noise_power = 1.0;  // sigma^2

    SystemConfig() = default;
    SystemConfig(int sensors_, int frequencies_, double power_, double noise_power_)
        : sensors(sensors_), frequencies(frequencies_), power(power_), noise_power(noise_power_) {
        validate();
    }

    void validate() const {
        if (sensors < 1) throw std::invalid_argument("SystemConfig: sensors must be >= 1");
        if (frequencies < 1) throw std::invalid_argument("SystemConfig: frequencies must be >= 1");
        if (!(power > 0.0)) throw std::invalid_argument("SystemConfig: power must be > 0");
        if (!(noise_power > 0.0)) throw std::invalid_argument("SystemConfig: noise_power must be > 0");
    }
};

/// Complex channel gains, sensors along rows, frequencies along columns.
struct ChannelMatrix {
    Eigen::MatrixXcd coefficients;  // K x M

    ChannelMatrix() = default;
    explicit ChannelMatrix(Eigen::MatrixXcd coeffs) : coefficients(std::move(coeffs)) {
        if (!coefficients.allFinite())
            throw std::invalid_argument("ChannelMatrix: entries must be finite");
    }

    int sensors() const { return static_cast<int>(coefficients.rows()); }
    int frequencies() const { return static_cast<int>(coefficients.cols()); }
    Complex entry(int k, int m) const { return coefficients(k, m); }

    /// Entrywise |h_km|.
    Eigen::MatrixXd magnitudes() const { return coefficients.cwiseAbs(); }
};

/// Per-sensor, per-frequency complex transmit factors (K x M).
struct TxScalings {
    Eigen::MatrixXcd factors;

    TxScalings() = default;
    explicit TxScalings(Eigen::MatrixXcd f) : factors(std::move(f)) {}

    int sensors() const { return static_cast<int>(factors.rows()); }
    int frequencies() const { return static_cast<int>(factors.cols()); }

    /// Total transmit power of sensor k, summed over frequencies.
    double sensor_power(int k) const { return factors.row(k).squaredNorm(); }

    /// Largest per-sensor power overshoot above the budget (<= 0 when feasible).
    double max_power_violation(double power_budget) const {
        double worst = -power_budget;
        for (int k = 0; k < sensors(); ++k)
            worst = std::max(worst, sensor_power(k) - power_budget);
        return worst;
    }
};

/// Fusion-center combining vector: one real 2-vector per frequency, stacked.
struct RxScaling {
    Eigen::VectorXd stacked;  // length 2M

    RxScaling() = default;
    explicit RxScaling(Eigen::VectorXd v) : stacked(std::move(v)) {
        if (stacked.size() % 2 != 0)
            throw std::invalid_argument("RxScaling: stacked length must be even");
    }

    int frequencies() const { return static_cast<int>(stacked.size() / 2); }
    Eigen::Vector2d block(int m) const { return stacked.segment<2>(2 * m); }
};

/// 2M x K real matrix whose block (m, k) is the real channel expansion of
/// h_km applied to b_km; columns collect one sensor across all frequencies.
using SMatrix = Eigen::MatrixXd;

/// Raw sensor readings together with their assumed mean and spread.
struct MeasurementBatch {
    Eigen::VectorXd values;
    double mean = 0.0;
    double stddev = 1.0;
};

}  // namespace aircomp
