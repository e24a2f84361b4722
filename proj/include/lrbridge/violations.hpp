#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lrbridge/kernels.hpp"
#include "lrbridge/portfolio.hpp"

namespace lrbridge {

// Assumption-violation experiments: generate portfolios whose error
// distribution or demand curve breaks a framework assumption, then measure how
// far the closed-form prediction drifts from the empirical loss ratio.

enum class ViolationKind { HeavyTail, SkewNormal, ErrorLossCorrelation, DemandMismatch };
enum class DemandFamily { PowerLaw, Exponential, Logistic, Linear };

const char* to_string(ViolationKind kind);
const char* to_string(DemandFamily family);

struct BaselineParams {
    double rho = 0.7;
    double cv = 2.0;
    double eta = 1.2;
    double margin = 1.0;
};

struct ViolationSpec {
    ViolationKind kind;
    double parameter = 0.0;  // df (HeavyTail), alpha (SkewNormal), rho_el (ErrorLossCorrelation)
    DemandFamily family = DemandFamily::PowerLaw;  // DemandMismatch only
    BaselineParams baseline;

    static ViolationSpec heavy_tail(double df, BaselineParams b = {});
    static ViolationSpec skew_normal(double alpha, BaselineParams b = {});
    static ViolationSpec error_loss_correlation(double rho_el, BaselineParams b = {});
    static ViolationSpec demand_mismatch(DemandFamily family, BaselineParams b = {});

    void validate() const;
};

struct DemandFit {
    double eta_hat = 0.0;
    double fit_r2 = 0.0;
    DemandFamily family = DemandFamily::PowerLaw;
};

struct DegradationPoint {
    double violation_parameter = 0.0;
    std::string label;  // kind plus parameter or family name
    double mape_mean = 0.0;  // mean over replications of |emp - pred| / emp * 100
    double ci_low = 0.0;
    double ci_high = 0.0;
    int n_reps = 0;
};

// Violated error draws with exact mean 0 and variance sigma2:
//   HeavyTail             t(df) scaled by sqrt(sigma2 (df-2)/df), df > 2
//   SkewNormal            skew-normal(alpha) standardized, alpha >= 0
//   ErrorLossCorrelation  eps = -rho_el sigma z_i + sqrt(1-rho_el^2) sigma z,
//                         z_i the standardized loss (lambda_i - 1)/cv, so high
//                         risks are systematically underpredicted and
//                         corr(eps, lambda) = -rho_el; rho_el in [0, 0.5)
// standardized_losses is consulted only by ErrorLossCorrelation.
std::vector<double> sample_violated_errors(const ViolationSpec& spec, double sigma2,
                                           std::span<const double> standardized_losses,
                                           std::uint64_t seed,
                                           kernels::Exec exec = kernels::Exec::Parallel);

// "True" demand curves for the mismatch experiments, all anchored so the
// lowest price converts with probability 1. Shapes are fixed relative to the
// portfolio's median price p_med:
//   exponential  c = exp(-k (p - p_min)),                k = 16 / p_med
//   logistic     c = g(p)/g(p_min), g = 1/(1+e^{s(p-p_med)}),  s = 2 / p_med
//   linear       c = max(1e-6, 1 - (p - p_min)/(80 p_med - p_min))
// PowerLaw returns the baseline curve at eta_reference (the null case).
std::vector<double> generate_alternative_demand(DemandFamily family,
                                                std::span<const double> prices,
                                                double eta_reference,
                                                kernels::Exec exec = kernels::Exec::Parallel);

// Power-law elasticity fit "as practitioners would": OLS of ln c on ln p
// weighted by conversion propensity, so the fit reflects prices where
// conversions are actually observed. eta_hat = -slope.
DemandFit fit_power_law_eta(std::span<const double> prices, std::span<const double> probs);

// SimulationModel implementing the requested violation on top of the baseline
// pipeline (used by run_violation_sweep and the CLI).
SimulationModel make_violation_model(const ViolationSpec& spec, kernels::Exec exec);

// One degradation point: `reps` simulations at the violated generator,
// mean APE and 95% t-interval.
DegradationPoint run_violation_point(const ViolationSpec& spec, int reps,
                                     std::size_t portfolio_size, std::uint64_t base_seed,
                                     kernels::Exec exec = kernels::Exec::Parallel);

// Sweep over violation parameters (df, alpha or rho_el grids).
std::vector<DegradationPoint> run_violation_sweep(ViolationKind kind,
                                                  std::span<const double> parameter_grid,
                                                  int reps, std::size_t portfolio_size,
                                                  std::uint64_t base_seed,
                                                  kernels::Exec exec = kernels::Exec::Parallel);

// Family sweep for DemandMismatch.
std::vector<DegradationPoint> run_demand_sweep(std::span<const DemandFamily> families, int reps,
                                               std::size_t portfolio_size,
                                               std::uint64_t base_seed,
                                               kernels::Exec exec = kernels::Exec::Parallel);

}  // namespace lrbridge
