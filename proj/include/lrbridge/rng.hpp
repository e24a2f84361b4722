#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace lrbridge {

// Counter-based random stream built on splitmix64. A stream is keyed by
// (seed, stream, index); typical use gives every customer its own stream,
// so generation can run on any number of threads in any order and still
// produce identical draws.
class RandomStream {
public:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Hash two words into a derived seed (used for attempt / cell sub-seeds).
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t salt) {
        return mix(seed + kGolden * (salt + 1));
    }

    RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
        : state_(mix(mix(seed + kGolden * stream) + kGolden * index)) {}

    explicit RandomStream(std::uint64_t seed) : state_(mix(seed)) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix(state_);
    }

    // Uniform on the open interval (0, 1); never returns 0 or 1, so logs are safe.
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (cosine branch).
    double next_normal() {
        const double u1 = next_unit();
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Student-t with df > 0 degrees of freedom, Bailey's polar method.
    double next_student_t(double df) {
        for (;;) {
            const double u = 2.0 * next_unit() - 1.0;
            const double v = 2.0 * next_unit() - 1.0;
            const double w = u * u + v * v;
            if (w > 0.0 && w < 1.0) {
                return u * std::sqrt(df * (std::pow(w, -2.0 / df) - 1.0) / w);
            }
        }
    }

    // Skew-normal with shape alpha (location 0, scale 1), delta construction.
    double next_skew_normal(double alpha) {
        const double delta = alpha / std::sqrt(1.0 + alpha * alpha);
        const double z0 = std::abs(next_normal());
        const double z1 = next_normal();
        return delta * z0 + std::sqrt(1.0 - delta * delta) * z1;
    }

private:
    std::uint64_t state_;
};

// Mean and variance of the unit skew-normal with shape alpha; used to
// standardize skew-normal errors to mean 0 / target variance.
inline double skew_normal_mean(double alpha) {
    const double delta = alpha / std::sqrt(1.0 + alpha * alpha);
    return delta * std::sqrt(2.0 / std::numbers::pi);
}

inline double skew_normal_variance(double alpha) {
    const double delta = alpha / std::sqrt(1.0 + alpha * alpha);
    return 1.0 - 2.0 * delta * delta / std::numbers::pi;
}

}  // namespace lrbridge
