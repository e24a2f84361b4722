#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lrbridge::kernels {

// Every kernel runs either serially or under OpenMP. Results are bit-identical
// between the two modes: element kernels derive all randomness from a
// per-index counter stream, and reductions accumulate fixed-size block
// partials that are combined in block order regardless of thread count.
enum class Exec { Serial, Parallel };

inline constexpr std::size_t kBlock = 4096;

template <class F>
void for_each_index(std::size_t n, Exec exec, F&& f) {
#ifdef _OPENMP
    if (exec == Exec::Parallel) {
        const std::int64_t sn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < sn; ++i) {
            f(static_cast<std::size_t>(i));
        }
        return;
    }
#else
    (void)exec;
#endif
    for (std::size_t i = 0; i < n; ++i) f(i);
}

// --- deterministic reductions ------------------------------------------------

// Sum of f(i) for i in [0, n): per-block partial sums combined in block order.
template <class F>
double block_sum_fn(std::size_t n, Exec exec, F&& f) {
    if (n == 0) return 0.0;
    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(nblocks, 0.0);
    for_each_index(nblocks, exec, [&](std::size_t b) {
        const std::size_t lo = b * kBlock;
        const std::size_t hi = lo + kBlock < n ? lo + kBlock : n;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += f(i);
        partial[b] = s;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

double block_sum(std::span<const double> xs, Exec exec);
double block_min(std::span<const double> xs, Exec exec);

// Straight left-to-right accumulation; the reference the blocked versions are
// tested against.
double naive_sum(std::span<const double> xs);

// Pearson correlation via blocked moment sums (deterministic).
double pearson_blocked(std::span<const double> xs, std::span<const double> ys, Exec exec);

// --- generation kernels -------------------------------------------------------

// Lognormal true losses with unit mean and coefficient of variation cv.
// Stream: (seed, channel, index).
void fill_true_losses(std::span<double> out, double cv, std::uint64_t seed, Exec exec);

// Multiplicative log-space model error: out[i] = losses[i] * exp(eps_i),
// eps_i ~ N(0, sigma2) independent of losses.
void fill_predictions_normal(std::span<const double> losses, std::span<double> out, double sigma2,
                             std::uint64_t seed, Exec exec);

// Min-anchored power-law conversion: c_i = (min(p) / p_i)^eta; max is exactly 1.
void fill_conversion_probabilities(std::span<const double> prices, std::span<double> out,
                                   double eta, Exec exec);

// One uniform per customer in index order; out[i] = 1.0 if converted else 0.0.
// Returns the number converted.
long fill_conversions(std::span<const double> probs, std::span<double> out, std::uint64_t seed,
                      Exec exec);

// Stream channels. Each pipeline stage draws from its own channel so stages
// stay independent however many variates each consumes.
inline constexpr std::uint64_t kChannelLoss = 1;
inline constexpr std::uint64_t kChannelError = 2;
inline constexpr std::uint64_t kChannelConvert = 3;

}  // namespace lrbridge::kernels
