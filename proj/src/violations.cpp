#include "lrbridge/violations.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "lrbridge/errors.hpp"
#include "lrbridge/formulas.hpp"
#include "lrbridge/rng.hpp"
#include "lrbridge/stats.hpp"

namespace lrbridge {

using kernels::Exec;

namespace {

// Shape constants for the alternative demand families, in units of the
// portfolio's median price. Chosen once so the four families span Table-1
// style severity: linear stays near-compatible with a fitted power law while
// logistic and exponential decay too sharply for one.
constexpr double kLinearSpanMedians = 80.0;
constexpr double kLogisticSteepnessPerMedian = 2.0;
constexpr double kExponentialRatePerMedian = 16.0;
constexpr double kLinearFloor = 1e-6;

// exp() argument clamp keeping prices/probabilities finite and nonzero.
constexpr double kMaxExpArg = 700.0;

double clamped_exp(double x) { return std::exp(std::clamp(x, -kMaxExpArg, kMaxExpArg)); }

double median_of(std::span<const double> xs) {
    std::vector<double> v(xs.begin(), xs.end());
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + mid);
    return 0.5 * (lo + hi);
}

}  // namespace

const char* to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::HeavyTail: return "heavy-tail";
        case ViolationKind::SkewNormal: return "skew";
        case ViolationKind::ErrorLossCorrelation: return "error-corr";
        case ViolationKind::DemandMismatch: return "demand";
    }
    return "?";
}

const char* to_string(DemandFamily family) {
    switch (family) {
        case DemandFamily::PowerLaw: return "power-law";
        case DemandFamily::Exponential: return "exponential";
        case DemandFamily::Logistic: return "logistic";
        case DemandFamily::Linear: return "linear";
    }
    return "?";
}

ViolationSpec ViolationSpec::heavy_tail(double df, BaselineParams b) {
    ViolationSpec s{ViolationKind::HeavyTail, df, DemandFamily::PowerLaw, b};
    s.validate();
    return s;
}

ViolationSpec ViolationSpec::skew_normal(double alpha, BaselineParams b) {
    ViolationSpec s{ViolationKind::SkewNormal, alpha, DemandFamily::PowerLaw, b};
    s.validate();
    return s;
}

ViolationSpec ViolationSpec::error_loss_correlation(double rho_el, BaselineParams b) {
    ViolationSpec s{ViolationKind::ErrorLossCorrelation, rho_el, DemandFamily::PowerLaw, b};
    s.validate();
    return s;
}

ViolationSpec ViolationSpec::demand_mismatch(DemandFamily family, BaselineParams b) {
    ViolationSpec s{ViolationKind::DemandMismatch, 0.0, family, b};
    s.validate();
    return s;
}

void ViolationSpec::validate() const {
    switch (kind) {
        case ViolationKind::HeavyTail:
            if (!(parameter > 2.0)) {
                throw domain_error("heavy-tail df must exceed 2 for finite variance");
            }
            break;
        case ViolationKind::SkewNormal:
            if (!(parameter >= 0.0)) throw domain_error("skew-normal alpha must be >= 0");
            break;
        case ViolationKind::ErrorLossCorrelation:
            if (!(parameter >= 0.0 && parameter < 0.5)) {
                throw domain_error("error-loss correlation must lie in [0, 0.5)");
            }
            break;
        case ViolationKind::DemandMismatch:
            break;
    }
}

std::vector<double> sample_violated_errors(const ViolationSpec& spec, double sigma2,
                                           std::span<const double> standardized_losses,
                                           std::uint64_t seed, Exec exec) {
    spec.validate();
    if (!(sigma2 > 0.0)) throw domain_error("sigma2 must be positive");
    const std::size_t n = standardized_losses.size();
    if (n == 0) throw domain_error("empty sample");
    std::vector<double> eps(n);
    const double sigma = std::sqrt(sigma2);

    switch (spec.kind) {
        case ViolationKind::HeavyTail: {
            const double df = spec.parameter;
            const double scale = std::sqrt(sigma2 * (df - 2.0) / df);
            kernels::for_each_index(n, exec, [&](std::size_t i) {
                RandomStream rng(seed, kernels::kChannelError, i);
                eps[i] = scale * rng.next_student_t(df);
            });
            break;
        }
        case ViolationKind::SkewNormal: {
            const double alpha = spec.parameter;
            const double m = skew_normal_mean(alpha);
            const double sd = std::sqrt(skew_normal_variance(alpha));
            kernels::for_each_index(n, exec, [&](std::size_t i) {
                RandomStream rng(seed, kernels::kChannelError, i);
                eps[i] = sigma * (rng.next_skew_normal(alpha) - m) / sd;
            });
            break;
        }
        case ViolationKind::ErrorLossCorrelation: {
            const double rho_el = spec.parameter;
            const double mix = std::sqrt(1.0 - rho_el * rho_el);
            kernels::for_each_index(n, exec, [&](std::size_t i) {
                RandomStream rng(seed, kernels::kChannelError, i);
                eps[i] = -rho_el * sigma * standardized_losses[i] + mix * sigma * rng.next_normal();
            });
            break;
        }
        case ViolationKind::DemandMismatch:
            throw domain_error("demand mismatch does not alter the error distribution");
    }
    return eps;
}

std::vector<double> generate_alternative_demand(DemandFamily family,
                                                std::span<const double> prices,
                                                double eta_reference, Exec exec) {
    if (prices.empty()) throw domain_error("empty price vector");
    if (!(eta_reference > 0.0)) throw domain_error("eta_reference must be positive");
    const double p_min = kernels::block_min(prices, exec);
    if (!(p_min > 0.0)) throw domain_error("prices must be positive");
    std::vector<double> probs(prices.size());

    switch (family) {
        case DemandFamily::PowerLaw:
            kernels::fill_conversion_probabilities(prices, probs, eta_reference, exec);
            break;
        case DemandFamily::Exponential: {
            const double k = kExponentialRatePerMedian / median_of(prices);
            kernels::for_each_index(prices.size(), exec, [&](std::size_t i) {
                probs[i] = clamped_exp(-k * (prices[i] - p_min));
            });
            break;
        }
        case DemandFamily::Logistic: {
            const double p_mid = median_of(prices);
            const double s = kLogisticSteepnessPerMedian / p_mid;
            const double g_min = 1.0 + clamped_exp(s * (p_min - p_mid));
            kernels::for_each_index(prices.size(), exec, [&](std::size_t i) {
                probs[i] = g_min / (1.0 + clamped_exp(s * (prices[i] - p_mid)));
            });
            break;
        }
        case DemandFamily::Linear: {
            const double span = kLinearSpanMedians * median_of(prices) - p_min;
            kernels::for_each_index(prices.size(), exec, [&](std::size_t i) {
                probs[i] = std::max(kLinearFloor, 1.0 - (prices[i] - p_min) / span);
            });
            break;
        }
    }
    return probs;
}

DemandFit fit_power_law_eta(std::span<const double> prices, std::span<const double> probs) {
    if (prices.size() != probs.size() || prices.size() < 2) {
        throw domain_error("power-law fit needs equal-length vectors of size >= 2");
    }
    double wsum = 0.0, xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (!(probs[i] > 0.0)) throw domain_error("power-law fit requires positive probabilities");
        if (!(prices[i] > 0.0)) throw domain_error("power-law fit requires positive prices");
        wsum += probs[i];
        xm += probs[i] * std::log(prices[i]);
        ym += probs[i] * std::log(probs[i]);
    }
    xm /= wsum;
    ym /= wsum;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < prices.size(); ++i) {
        const double dx = std::log(prices[i]) - xm;
        const double dy = std::log(probs[i]) - ym;
        sxy += probs[i] * dx * dy;
        sxx += probs[i] * dx * dx;
        syy += probs[i] * dy * dy;
    }
    if (sxx == 0.0) throw domain_error("power-law fit degenerate: all prices equal");
    DemandFit fit;
    fit.eta_hat = -sxy / sxx;
    fit.fit_r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

SimulationModel make_violation_model(const ViolationSpec& spec, Exec exec) {
    spec.validate();
    SimulationModel model;
    const BaselineParams b = spec.baseline;
    const double sigma2 = sigma2_from_rho(b.rho, b.cv);

    if (spec.kind == ViolationKind::DemandMismatch) {
        const DemandFamily family = spec.family;
        model.demand = [family, b, exec](std::span<const double> prices, std::span<double> out) {
            auto probs = generate_alternative_demand(family, prices, b.eta, exec);
            std::copy(probs.begin(), probs.end(), out.begin());
        };
        // Prediction uses the elasticity a practitioner would fit to the
        // observed conversion curve, not the generator's parameter.
        model.predicted_lr = [b](std::span<const double> prices, std::span<const double> probs) {
            const DemandFit fit = fit_power_law_eta(prices, probs);
            return expected_loss_ratio(b.rho, b.cv, fit.eta_hat, b.margin);
        };
        return model;
    }

    const ViolationSpec captured = spec;
    model.sample_errors = [captured, sigma2, b, exec](std::span<const double> losses,
                                                      std::uint64_t attempt_seed,
                                                      std::span<double> eps) {
        if (captured.kind == ViolationKind::ErrorLossCorrelation) {
            std::vector<double> standardized(losses.size());
            kernels::for_each_index(losses.size(), exec, [&](std::size_t i) {
                standardized[i] = (losses[i] - 1.0) / b.cv;
            });
            auto drawn = sample_violated_errors(captured, sigma2, standardized, attempt_seed, exec);
            std::copy(drawn.begin(), drawn.end(), eps.begin());
        } else {
            auto drawn = sample_violated_errors(captured, sigma2, losses, attempt_seed, exec);
            std::copy(drawn.begin(), drawn.end(), eps.begin());
        }
    };
    return model;
}

DegradationPoint run_violation_point(const ViolationSpec& spec, int reps,
                                     std::size_t portfolio_size, std::uint64_t base_seed,
                                     Exec exec) {
    if (reps < 1) throw domain_error("reps must be positive");
    const SimulationModel model = make_violation_model(spec, exec);

    PortfolioConfig config;
    config.n_potential = portfolio_size;
    config.cv = spec.baseline.cv;
    config.target_rho = spec.baseline.rho;
    config.eta = spec.baseline.eta;
    config.margin = spec.baseline.margin;
    config.min_converted = 1;
    config.max_resample_attempts = 20;

    std::vector<double> apes;
    apes.reserve(static_cast<std::size_t>(reps));
    for (int rep = 0; rep < reps; ++rep) {
        config.seed = RandomStream::derive(
            RandomStream::derive(base_seed, static_cast<std::uint64_t>(spec.kind) * 1000 +
                                                static_cast<std::uint64_t>(spec.family)),
            RandomStream::mix(static_cast<std::uint64_t>(rep) ^
                              std::bit_cast<std::uint64_t>(spec.parameter)));
        try {
            const SimulationOutcome out = run_simulation(config, model, exec);
            apes.push_back(std::abs(out.empirical_lr - out.predicted_lr) / out.empirical_lr *
                           100.0);
        } catch (const insufficient_conversions& e) {
            throw std::runtime_error(std::string("violation point ") + to_string(spec.kind) +
                                     " parameter " + std::to_string(spec.parameter) + ": " +
                                     e.what());
        }
    }

    DegradationPoint point;
    point.violation_parameter = spec.kind == ViolationKind::DemandMismatch
                                    ? static_cast<double>(spec.family)
                                    : spec.parameter;
    point.label = spec.kind == ViolationKind::DemandMismatch
                      ? std::string(to_string(spec.family))
                      : std::string(to_string(spec.kind)) + "=" + std::to_string(spec.parameter);
    point.n_reps = reps;
    if (reps >= 2) {
        const auto ci = stats::t_confidence_interval(apes, 0.95);
        point.mape_mean = ci.mean;
        point.ci_low = ci.low;
        point.ci_high = ci.high;
    } else {
        point.mape_mean = point.ci_low = point.ci_high = apes.front();
    }
    return point;
}

std::vector<DegradationPoint> run_violation_sweep(ViolationKind kind,
                                                  std::span<const double> parameter_grid,
                                                  int reps, std::size_t portfolio_size,
                                                  std::uint64_t base_seed, Exec exec) {
    if (kind == ViolationKind::DemandMismatch) {
        throw domain_error("demand mismatch sweeps iterate families, use run_demand_sweep");
    }
    std::vector<DegradationPoint> points;
    points.reserve(parameter_grid.size());
    for (double parameter : parameter_grid) {
        ViolationSpec spec{kind, parameter, DemandFamily::PowerLaw, BaselineParams{}};
        spec.validate();
        points.push_back(run_violation_point(spec, reps, portfolio_size, base_seed, exec));
    }
    return points;
}

std::vector<DegradationPoint> run_demand_sweep(std::span<const DemandFamily> families, int reps,
                                               std::size_t portfolio_size,
                                               std::uint64_t base_seed, Exec exec) {
    std::vector<DegradationPoint> points;
    points.reserve(families.size());
    for (DemandFamily family : families) {
        points.push_back(run_violation_point(ViolationSpec::demand_mismatch(family), reps,
                                             portfolio_size, base_seed, exec));
    }
    return points;
}

}  // namespace lrbridge
