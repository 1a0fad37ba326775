#pragma once

#include <cstdint>
#include <random>

namespace aircomp {

/// SplitMix64 mixing step; also usable as a standalone 64-bit hash.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic random source. Gaussian variates use the Marsaglia polar
/// method on top of the raw engine, so sequences are bit-identical across
/// standard libraries (std::normal_distribution is not).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Sub-stream for one Monte-Carlo trial. The derivation rule is part of
    /// the reproducibility contract: stream(seed, i) is seeded with
    /// splitmix64(seed + (i + 1) * 0x9E3779B97F4A7C15), so trials are
    /// independent of execution order and thread count.
    static Rng for_trial(std::uint64_t seed, std::uint64_t trial_index) {
        return Rng(seed + (trial_index + 1) * 0x9E3779B97F4A7C15ULL);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal variate.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        have_spare_ = true;
        return u * scale;
    }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace aircomp
