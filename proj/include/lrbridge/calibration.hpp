#pragma once

#include <string>
#include <vector>

#include "lrbridge/formulas.hpp"

namespace lrbridge {

// Historical calibration: given observed loss ratios, model correlations and
// pricing margins from past deployments, invert the loss-ratio formula for the
// implied demand elasticity, aggregate across deployments, and forecast the
// impact of proposed model improvements.

struct DeploymentRecord {
    std::string label;
    double observed_lr;
    double margin;
    double rho;  // strictly < 1: sigma2 must be positive for the inversion
    double cv;

    void validate() const;
};

struct ElasticityEstimate {
    double eta_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n_deployments = 0;
    std::vector<double> per_deployment_etas;
    bool degenerate_ci = false;  // single record: bounds collapse to eta_hat
    double confidence = 0.95;
};

struct ImprovementForecast {
    LossRatioPrediction current;
    LossRatioPrediction target;
    double ratio;  // target LR / current LR at eta_hat
    double ratio_ci_low;
    double ratio_ci_high;
};

// Closed-form inversion: eta = 1/2 + ln(observed_lr * margin) / sigma2.
double implied_elasticity(const DeploymentRecord& record);

// Bisection fallback on the forward formula; agrees with the closed form to
// 1e-9 wherever both apply (kept for demand families without a closed form).
double implied_elasticity_bisect(const DeploymentRecord& record);

ElasticityEstimate aggregate_elasticity(const std::vector<DeploymentRecord>& records,
                                        double confidence = 0.95);

// Evaluates the forward formula at eta_hat for both correlations; the ratio
// interval comes from re-evaluating at the CI endpoints (the formula is
// monotone in eta, so endpoint evaluation brackets it).
ImprovementForecast forecast_improvement(const ElasticityEstimate& estimate,
                                         const PopulationMoments& pop, double margin,
                                         double rho_current, double rho_target);

}  // namespace lrbridge
