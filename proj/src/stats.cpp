#include "lrbridge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include <boost/math/distributions/students_t.hpp>

#include "lrbridge/errors.hpp"

namespace lrbridge::stats {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw domain_error("mean of empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw domain_error("sample variance needs at least 2 values");
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

double sample_sd(std::span<const double> xs) { return std::sqrt(sample_variance(xs)); }

double median(std::span<const double> xs) {
    if (xs.empty()) throw domain_error("median of empty sample");
    std::vector<double> v(xs.begin(), xs.end());
    const std::size_t n = v.size();
    const std::size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    const double hi = v[mid];
    if (n % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + mid);
    return 0.5 * (lo + hi);
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw domain_error("pearson needs two equal-length samples of size >= 2");
    }
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw domain_error("pearson: zero-variance input");
    return sxy / std::sqrt(sxx * syy);
}

double student_t_quantile(double prob, double df) {
    if (!(prob > 0.0 && prob < 1.0)) throw domain_error("quantile probability must be in (0,1)");
    if (!(df > 0.0)) throw domain_error("degrees of freedom must be positive");
    boost::math::students_t_distribution<double> dist(df);
    return boost::math::quantile(dist, prob);
}

Interval t_confidence_interval(std::span<const double> samples, double confidence) {
    if (samples.size() < 2) throw domain_error("confidence interval needs at least 2 samples");
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw domain_error("confidence must be in (0,1)");
    }
    const double m = mean(samples);
    const double s = sample_sd(samples);
    const double n = static_cast<double>(samples.size());
    if (s == 0.0) return {m, m, m};
    const double t = student_t_quantile(0.5 * (1.0 + confidence), n - 1.0);
    const double half = t * s / std::sqrt(n);
    return {m - half, m + half, m};
}

}  // namespace lrbridge::stats
