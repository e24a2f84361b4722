#pragma once

#include <tuple>

namespace lrbridge {

// ---------------------------------------------------------------------------
// Closed-form loss-ratio analytics.
//
// The central quantities: a population of positive true expected losses with
// unit-free coefficient of variation cv; a predictive model producing
// lambda_hat = lambda * exp(eps) with eps ~ N(0, sigma2); a market pricing at
// p = margin * lambda_hat with power-law conversion c(p) ~ p^-eta.
//
// All exponentials are assembled in log space and exponentiated last so the
// extreme corners (large sigma2 * (2*eta - 1)) stay finite.
// ---------------------------------------------------------------------------

struct PopulationMoments {
    double mean_loss = 1.0;  // currency units; simulations fix this to 1
    double cv = 1.0;         // sd(lambda) / mean(lambda), dimensionless

    PopulationMoments() = default;
    PopulationMoments(double mean_loss, double cv);
};

struct MarketSpec {
    double eta = 1.0;     // price elasticity, > 0
    double margin = 1.0;  // price = margin * predicted loss, > 0

    MarketSpec() = default;
    MarketSpec(double eta, double margin);
};

// Model quality as a mutually consistent (rho, sigma2) pair for a given cv.
// Construct from whichever side you have; the other is derived via the
// correlation identity. rho = 1 <=> sigma2 = 0.
class ModelQuality {
public:
    static ModelQuality from_rho(double rho, double cv);
    static ModelQuality from_sigma2(double sigma2, double cv);

    double rho() const { return rho_; }
    double sigma2() const { return sigma2_; }
    double cv() const { return cv_; }

private:
    ModelQuality(double rho, double sigma2, double cv) : rho_(rho), sigma2_(sigma2), cv_(cv) {}
    double rho_;
    double sigma2_;
    double cv_;
};

// Separate frequency and severity models, each with its own (rho, cv).
struct FreqSevQuality {
    double rho_f;
    double cv_f;
    double rho_s;
    double cv_s;

    FreqSevQuality(double rho_f, double cv_f, double rho_s, double cv_s);
};

struct LossRatioPrediction {
    double loss_ratio;      // expected portfolio loss ratio
    double elr;             // Loss Ratio Error: fractional excess over 1/margin
    double sigma2_implied;  // log-space error variance implied by (rho, cv)
    PopulationMoments population;
    double rho;
    MarketSpec market;
};

// Correlation between predicted and true losses implied by log-space error
// variance sigma2 and population cv. Strictly decreasing in sigma2,
// increasing in cv; equals 1 iff sigma2 == 0.
double rho_from_sigma2(double sigma2, double cv);

// Exact inverse of rho_from_sigma2. Rejects rho <= 0 (sigma2 diverges).
// Correlations in (1, 1 + 1e-9] are clamped to 1 to absorb estimator noise.
double sigma2_from_rho(double rho, double cv);

// Expected loss ratio, correlation form:
//   LR = (1/M) * ((1 + rho^2 cv^-2) / (rho^2 (1 + cv^-2)))^((2 eta - 1)/2)
double expected_loss_ratio(double rho, double cv, double eta, double margin);
double expected_loss_ratio(const ModelQuality& quality, const PopulationMoments& pop,
                           const MarketSpec& market);

// Expected loss ratio, error-variance form: LR = (1/M) exp(sigma2 (2 eta - 1) / 2).
double expected_loss_ratio_from_sigma(double sigma2, double eta, double margin);

// Frequency/severity product form; equals the sigma2-additive route exactly.
double expected_loss_ratio_freq_sev(const FreqSevQuality& fs, const MarketSpec& market);

// LR_new / LR_old for a correlation change at fixed cv and eta. Margin cancels.
double improvement_ratio(double rho_old, double rho_new, double cv, double eta);

// Loss Ratio Error: fractional LR excess over the optimum 1/M. Satisfies
// LR = (1/M)(1 + E_LR); zero iff rho == 1.
double loss_ratio_error(double rho, double cv, double eta);

// Full prediction bundle; loss_ratio == (1/margin)*(1 + elr) holds exactly.
LossRatioPrediction predict(double rho, double cv, double eta, double margin);

}  // namespace lrbridge
