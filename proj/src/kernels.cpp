#include "lrbridge/kernels.hpp"

#include <cmath>
#include <limits>

#include "lrbridge/errors.hpp"
#include "lrbridge/rng.hpp"

namespace lrbridge::kernels {

double block_sum(std::span<const double> xs, Exec exec) {
    return block_sum_fn(xs.size(), exec, [&](std::size_t i) { return xs[i]; });
}

double naive_sum(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
}

double block_min(std::span<const double> xs, Exec exec) {
    if (xs.empty()) throw domain_error("block_min of empty span");
    const std::size_t n = xs.size();
    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(nblocks, std::numeric_limits<double>::infinity());
    for_each_index(nblocks, exec, [&](std::size_t b) {
        const std::size_t lo = b * kBlock;
        const std::size_t hi = lo + kBlock < n ? lo + kBlock : n;
        double m = xs[lo];
        for (std::size_t i = lo + 1; i < hi; ++i) m = xs[i] < m ? xs[i] : m;
        partial[b] = m;
    });
    double m = partial[0];
    for (double p : partial) m = p < m ? p : m;
    return m;
}

double pearson_blocked(std::span<const double> xs, std::span<const double> ys, Exec exec) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw domain_error("pearson_blocked needs two equal-length spans of size >= 2");
    }
    const double n = static_cast<double>(xs.size());
    const double sx = block_sum(xs, exec);
    const double sy = block_sum(ys, exec);
    const double mx = sx / n;
    const double my = sy / n;
    const double sxy =
        block_sum_fn(xs.size(), exec, [&](std::size_t i) { return (xs[i] - mx) * (ys[i] - my); });
    const double sxx =
        block_sum_fn(xs.size(), exec, [&](std::size_t i) { return (xs[i] - mx) * (xs[i] - mx); });
    const double syy =
        block_sum_fn(xs.size(), exec, [&](std::size_t i) { return (ys[i] - my) * (ys[i] - my); });
    if (sxx == 0.0 || syy == 0.0) throw domain_error("pearson_blocked: zero-variance input");
    return sxy / std::sqrt(sxx * syy);
}

void fill_true_losses(std::span<double> out, double cv, std::uint64_t seed, Exec exec) {
    if (!(cv > 0.0)) throw domain_error("cv must be positive");
    const double log_var = std::log1p(cv * cv);
    const double mu = -0.5 * log_var;
    const double sd = std::sqrt(log_var);
    for_each_index(out.size(), exec, [&](std::size_t i) {
        RandomStream rng(seed, kChannelLoss, i);
        out[i] = std::exp(mu + sd * rng.next_normal());
    });
}

void fill_predictions_normal(std::span<const double> losses, std::span<double> out, double sigma2,
                             std::uint64_t seed, Exec exec) {
    if (!(sigma2 >= 0.0)) throw domain_error("sigma2 must be non-negative");
    if (losses.size() != out.size()) throw domain_error("span size mismatch");
    const double sd = std::sqrt(sigma2);
    for_each_index(out.size(), exec, [&](std::size_t i) {
        RandomStream rng(seed, kChannelError, i);
        out[i] = losses[i] * std::exp(sd * rng.next_normal());
    });
}

void fill_conversion_probabilities(std::span<const double> prices, std::span<double> out,
                                   double eta, Exec exec) {
    if (prices.empty()) throw domain_error("conversion probabilities of empty price vector");
    if (!(eta > 0.0)) throw domain_error("eta must be positive");
    if (prices.size() != out.size()) throw domain_error("span size mismatch");
    const double p_min = block_min(prices, exec);
    if (!(p_min > 0.0)) throw domain_error("prices must be positive");
    for_each_index(out.size(), exec, [&](std::size_t i) {
        out[i] = prices[i] == p_min ? 1.0 : std::pow(p_min / prices[i], eta);
    });
}

long fill_conversions(std::span<const double> probs, std::span<double> out, std::uint64_t seed,
                      Exec exec) {
    if (probs.size() != out.size()) throw domain_error("span size mismatch");
    for_each_index(out.size(), exec, [&](std::size_t i) {
        RandomStream rng(seed, kChannelConvert, i);
        out[i] = rng.next_unit() < probs[i] ? 1.0 : 0.0;
    });
    return static_cast<long>(block_sum(out, exec));
}

}  // namespace lrbridge::kernels
