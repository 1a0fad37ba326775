#include "aircomp/model.hpp"

#include <cmath>
#include <sstream>

namespace aircomp {

Eigen::Matrix2d expand_channel(Complex h) {
    Eigen::Matrix2d e;
    e << h.real(), -h.imag(),  //
        h.imag(), h.real();
    return e;
}

SMatrix build_s(const ChannelMatrix& channels, const TxScalings& tx) {
    const int k_count = channels.sensors();
    const int m_count = channels.frequencies();
    if (tx.sensors() != k_count || tx.frequencies() != m_count) {
        std::ostringstream msg;
        msg << "build_s: dimension mismatch:";
        if (tx.sensors() != k_count)
            msg << " sensors K (channels " << k_count << ", tx " << tx.sensors() << ")";
        if (tx.frequencies() != m_count)
            msg << " frequencies M (channels " << m_count << ", tx " << tx.frequencies() << ")";
        throw std::invalid_argument(msg.str());
    }

    SMatrix s(2 * m_count, k_count);
    for (int k = 0; k < k_count; ++k) {
        for (int m = 0; m < m_count; ++m) {
            // expand_channel(h) * [Re b, Im b] is just the complex product h*b.
            const Complex prod = channels.entry(k, m) * tx.factors(k, m);
            s(2 * m, k) = prod.real();
            s(2 * m + 1, k) = prod.imag();
        }
    }
    return s;
}

double cmse_full(const RxScaling& rx, const SMatrix& s, double noise_power) {
    if (rx.stacked.size() != s.rows())
        throw std::invalid_argument("cmse_full: rx length does not match S rows");
    const Eigen::VectorXd gains = s.transpose() * rx.stacked;  // per-sensor g^T S column
    const double misfit = (gains.array() - 1.0).matrix().squaredNorm();
    return misfit + 0.5 * noise_power * rx.stacked.squaredNorm();
}

double cmse_reduced(const Eigen::VectorXd& rx, const Eigen::MatrixXd& bprime,
                    const Eigen::MatrixXd& magnitudes, double noise_power) {
    const int k_count = static_cast<int>(bprime.rows());
    const int m_count = static_cast<int>(bprime.cols());
    if (magnitudes.rows() != k_count || magnitudes.cols() != m_count || rx.size() != m_count)
        throw std::invalid_argument("cmse_reduced: dimension mismatch");

    double misfit = 0.0;
    for (int k = 0; k < k_count; ++k) {
        double gain = 0.0;
        for (int m = 0; m < m_count; ++m)
            gain += std::abs(rx(m)) * magnitudes(k, m) * bprime(k, m);
        misfit += (gain - 1.0) * (gain - 1.0);
    }
    return misfit + 0.5 * noise_power * rx.squaredNorm();
}

EmbeddedPoint embed_reduced(const Eigen::VectorXd& rx_reduced, const Eigen::MatrixXd& bprime,
                            const ChannelMatrix& channels) {
    const int k_count = channels.sensors();
    const int m_count = channels.frequencies();
    if (bprime.rows() != k_count || bprime.cols() != m_count || rx_reduced.size() != m_count)
        throw std::invalid_argument("embed_reduced: dimension mismatch");

    Eigen::VectorXd stacked = Eigen::VectorXd::Zero(2 * m_count);
    for (int m = 0; m < m_count; ++m) stacked(2 * m) = rx_reduced(m);

    Eigen::MatrixXcd factors(k_count, m_count);
    for (int k = 0; k < k_count; ++k) {
        for (int m = 0; m < m_count; ++m) {
            const Complex h = channels.entry(k, m);
            const double mag = std::abs(h);
            if (mag == 0.0) {
                if (bprime(k, m) != 0.0)
                    throw std::invalid_argument(
                        "embed_reduced: nonzero transmit factor on a zero-gain channel");
                factors(k, m) = Complex(0.0, 0.0);
            } else {
                factors(k, m) = bprime(k, m) * std::conj(h) / mag;
            }
        }
    }
    return EmbeddedPoint{RxScaling(std::move(stacked)), TxScalings(std::move(factors))};
}

Eigen::VectorXd normalize(const MeasurementBatch& batch) {
    if (!(batch.stddev > 0.0)) throw std::invalid_argument("normalize: stddev must be > 0");
    return (batch.values.array() - batch.mean) / batch.stddev;
}

double denormalize_sum(double estimate, double mean, double stddev, int sensors) {
    if (!(stddev > 0.0)) throw std::invalid_argument("denormalize_sum: stddev must be > 0");
    return stddev * estimate + static_cast<double>(sensors) * mean;
}

}  // namespace aircomp
