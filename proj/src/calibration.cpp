#include "lrbridge/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "lrbridge/errors.hpp"
#include "lrbridge/stats.hpp"

namespace lrbridge {

void DeploymentRecord::validate() const {
    if (!(observed_lr > 0.0)) {
        throw domain_error("record '" + label + "': observed_lr must be positive");
    }
    if (!(margin > 0.0)) throw domain_error("record '" + label + "': margin must be positive");
    if (!(cv > 0.0)) throw domain_error("record '" + label + "': cv must be positive");
    if (!(rho > 0.0)) throw domain_error("record '" + label + "': rho must be positive");
    if (rho >= 1.0) {
        throw domain_error("record '" + label +
                           "': rho must be strictly below 1 (sigma2 = 0 leaves eta "
                           "unidentifiable)");
    }
}

double implied_elasticity(const DeploymentRecord& record) {
    record.validate();
    const double sigma2 = sigma2_from_rho(record.rho, record.cv);
    return 0.5 + std::log(record.observed_lr * record.margin) / sigma2;
}

double implied_elasticity_bisect(const DeploymentRecord& record) {
    record.validate();
    // Forward map LR(eta) = exp(sigma2 (2 eta - 1) / 2) / M is strictly
    // increasing in eta for sigma2 > 0; bracket then bisect on it directly
    // (no positivity validation here: the inversion may land at eta <= 0 and
    // should report that value just like the closed form does).
    const double sigma2 = sigma2_from_rho(record.rho, record.cv);
    const auto lr_at = [&](double eta) {
        return std::exp(0.5 * sigma2 * (2.0 * eta - 1.0)) / record.margin;
    };
    double lo = 0.5, hi = 0.5;
    while (lr_at(hi) < record.observed_lr) {
        hi += std::max(1.0, std::abs(hi));
        if (hi > 1e9) throw domain_error("record '" + record.label + "': elasticity out of range");
    }
    while (lr_at(lo) > record.observed_lr) {
        lo -= std::max(1.0, std::abs(lo));
        if (lo < -1e9) throw domain_error("record '" + record.label + "': elasticity out of range");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (lr_at(mid) < record.observed_lr) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

ElasticityEstimate aggregate_elasticity(const std::vector<DeploymentRecord>& records,
                                        double confidence) {
    if (records.empty()) throw domain_error("aggregate_elasticity: no deployment records");
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw domain_error("confidence must be in (0,1)");
    }
    ElasticityEstimate est;
    est.confidence = confidence;
    est.n_deployments = records.size();
    est.per_deployment_etas.reserve(records.size());
    for (const auto& r : records) est.per_deployment_etas.push_back(implied_elasticity(r));

    if (records.size() == 1) {
        est.eta_hat = est.ci_low = est.ci_high = est.per_deployment_etas.front();
        est.degenerate_ci = true;
        return est;
    }
    const auto ci = stats::t_confidence_interval(est.per_deployment_etas, confidence);
    est.eta_hat = ci.mean;
    est.ci_low = ci.low;
    est.ci_high = ci.high;
    return est;
}

ImprovementForecast forecast_improvement(const ElasticityEstimate& estimate,
                                         const PopulationMoments& pop, double margin,
                                         double rho_current, double rho_target) {
    if (estimate.n_deployments == 0) throw domain_error("forecast needs a valid estimate");
    ImprovementForecast fc;
    fc.current = predict(rho_current, pop.cv, estimate.eta_hat, margin);
    fc.target = predict(rho_target, pop.cv, estimate.eta_hat, margin);
    fc.ratio = fc.target.loss_ratio / fc.current.loss_ratio;
    const double at_low = expected_loss_ratio(rho_target, pop.cv, estimate.ci_low, margin) /
                          expected_loss_ratio(rho_current, pop.cv, estimate.ci_low, margin);
    const double at_high = expected_loss_ratio(rho_target, pop.cv, estimate.ci_high, margin) /
                           expected_loss_ratio(rho_current, pop.cv, estimate.ci_high, margin);
    fc.ratio_ci_low = std::min(at_low, at_high);
    fc.ratio_ci_high = std::max(at_low, at_high);
    return fc;
}

}  // namespace lrbridge
