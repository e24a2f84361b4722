#pragma once

#include <span>
#include <vector>

namespace lrbridge::stats {

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);  // ddof = 1
double sample_sd(std::span<const double> xs);

// Midpoint-of-two convention for even counts. Input is copied, not reordered.
double median(std::span<const double> xs);

double pearson(std::span<const double> xs, std::span<const double> ys);

// Two-sided Student-t quantile, P(T <= t) = prob, n - 1 degrees of freedom.
double student_t_quantile(double prob, double df);

struct Interval {
    double low;
    double high;
    double mean;
};

// Student-t confidence interval on the mean: mean +/- t_{n-1,(1+c)/2} * s / sqrt(n).
// Requires at least 2 samples.
Interval t_confidence_interval(std::span<const double> samples, double confidence);

}  // namespace lrbridge::stats
