#include "lrbridge/formulas.hpp"

#include <cmath>
#include <string>

#include "lrbridge/errors.hpp"

namespace lrbridge {

namespace {

constexpr double kRhoClampBand = 1e-9;  // (1, 1+band] collapses to 1

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw domain_error(std::string(name) + " must be positive and finite, got " +
                           std::to_string(v));
    }
}

// Validates and normalizes a correlation to (0, 1].
double checked_rho(double rho) {
    if (!std::isfinite(rho) || rho <= 0.0) {
        throw domain_error("rho must lie in (0, 1], got " + std::to_string(rho));
    }
    if (rho > 1.0) {
        if (rho <= 1.0 + kRhoClampBand) return 1.0;
        throw domain_error("rho must lie in (0, 1], got " + std::to_string(rho));
    }
    return rho;
}

// log of e^{sigma2} expressed through (rho, cv), i.e. sigma2 itself:
//   sigma2 = ln((1 + rho^2 cv^-2) / (rho^2 (1 + cv^-2)))
double log_variance_ratio(double rho, double cv) {
    const double u = 1.0 / (cv * cv);
    return std::log((1.0 + rho * rho * u) / (rho * rho * (1.0 + u)));
}

}  // namespace

PopulationMoments::PopulationMoments(double mean_loss, double cv) : mean_loss(mean_loss), cv(cv) {
    require_positive(mean_loss, "mean_loss");
    require_positive(cv, "cv");
}

MarketSpec::MarketSpec(double eta, double margin) : eta(eta), margin(margin) {
    require_positive(eta, "eta");
    require_positive(margin, "margin");
}

ModelQuality ModelQuality::from_rho(double rho, double cv) {
    require_positive(cv, "cv");
    const double r = checked_rho(rho);
    return ModelQuality(r, sigma2_from_rho(r, cv), cv);
}

ModelQuality ModelQuality::from_sigma2(double sigma2, double cv) {
    require_positive(cv, "cv");
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
        throw domain_error("sigma2 must be non-negative and finite, got " +
                           std::to_string(sigma2));
    }
    return ModelQuality(rho_from_sigma2(sigma2, cv), sigma2, cv);
}

FreqSevQuality::FreqSevQuality(double rho_f, double cv_f, double rho_s, double cv_s)
    : rho_f(checked_rho(rho_f)), cv_f(cv_f), rho_s(checked_rho(rho_s)), cv_s(cv_s) {
    require_positive(cv_f, "cv_f");
    require_positive(cv_s, "cv_s");
}

double rho_from_sigma2(double sigma2, double cv) {
    require_positive(cv, "cv");
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
        throw domain_error("sigma2 must be non-negative and finite, got " +
                           std::to_string(sigma2));
    }
    const double u = 1.0 / (cv * cv);
    // sigma2 == 0 gives exactly 1: denominator reduces to (1 + u) - u.
    return std::exp(-0.5 * sigma2) / std::sqrt((1.0 + u) - u * std::exp(-sigma2));
}

double sigma2_from_rho(double rho, double cv) {
    require_positive(cv, "cv");
    const double r = checked_rho(rho);
    if (r == 1.0) return 0.0;
    return log_variance_ratio(r, cv);
}

double expected_loss_ratio(double rho, double cv, double eta, double margin) {
    MarketSpec market(eta, margin);
    const double r = checked_rho(rho);
    require_positive(cv, "cv");
    const double exponent = 0.5 * (2.0 * eta - 1.0) * log_variance_ratio(r, cv);
    if (exponent == 0.0) return 1.0 / margin;
    return std::exp(exponent - std::log(margin));
}

double expected_loss_ratio(const ModelQuality& quality, const PopulationMoments& pop,
                           const MarketSpec& market) {
    (void)pop;  // cv travels inside ModelQuality; pop kept for interface symmetry
    return expected_loss_ratio(quality.rho(), quality.cv(), market.eta, market.margin);
}

double expected_loss_ratio_from_sigma(double sigma2, double eta, double margin) {
    MarketSpec market(eta, margin);
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
        throw domain_error("sigma2 must be non-negative and finite, got " +
                           std::to_string(sigma2));
    }
    const double exponent = 0.5 * sigma2 * (2.0 * eta - 1.0);
    if (exponent == 0.0) return 1.0 / margin;
    return std::exp(exponent - std::log(margin));
}

double expected_loss_ratio_freq_sev(const FreqSevQuality& fs, const MarketSpec& market) {
    const double exponent =
        0.5 * (2.0 * market.eta - 1.0) *
        (log_variance_ratio(fs.rho_f, fs.cv_f) + log_variance_ratio(fs.rho_s, fs.cv_s));
    if (exponent == 0.0) return 1.0 / market.margin;
    return std::exp(exponent - std::log(market.margin));
}

double improvement_ratio(double rho_old, double rho_new, double cv, double eta) {
    const double ro = checked_rho(rho_old);
    const double rn = checked_rho(rho_new);
    require_positive(cv, "cv");
    require_positive(eta, "eta");
    const double u = 1.0 / (cv * cv);
    const double cross = rn * rn * ro * ro * u;
    const double exponent =
        0.5 * (2.0 * eta - 1.0) * (std::log(ro * ro + cross) - std::log(rn * rn + cross));
    return std::exp(exponent);
}

double loss_ratio_error(double rho, double cv, double eta) {
    const double r = checked_rho(rho);
    require_positive(cv, "cv");
    require_positive(eta, "eta");
    return std::expm1(0.5 * (2.0 * eta - 1.0) * log_variance_ratio(r, cv));
}

LossRatioPrediction predict(double rho, double cv, double eta, double margin) {
    MarketSpec market(eta, margin);
    const double r = checked_rho(rho);
    const double elr = loss_ratio_error(r, cv, eta);
    LossRatioPrediction out;
    out.loss_ratio = (1.0 / margin) * (1.0 + elr);
    out.elr = elr;
    out.sigma2_implied = sigma2_from_rho(r, cv);
    out.population = PopulationMoments(1.0, cv);
    out.rho = r;
    out.market = market;
    return out;
}

}  // namespace lrbridge
