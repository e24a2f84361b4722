#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lrbridge/kernels.hpp"

namespace lrbridge {

// Monte Carlo portfolio oracle. One simulation: draw lognormal true losses,
// apply multiplicative log-space model error calibrated to the target
// correlation, price at margin * prediction, convert through the min-anchored
// power-law demand curve, then measure the realized loss ratio over converted
// customers. Resamples the whole portfolio under a derived sub-seed until
// min_converted is reached or attempts run out.

struct PortfolioConfig {
    std::size_t n_potential = 1'000'000;
    double cv = 2.0;
    double target_rho = 0.7;
    double eta = 1.2;
    double margin = 1.0;
    std::uint64_t seed = 0;
    long min_converted = 10'000;
    int max_resample_attempts = 20;

    void validate() const;
};

struct SimulationOutcome {
    double empirical_lr = 0.0;   // sum(lambda_i x_i) / sum(p_i x_i) over converted
    long n_converted = 0;
    double realized_rho = 0.0;   // Pearson corr(lambda_hat, lambda) over the potential pool
    int attempts_used = 0;
    double predicted_lr = 0.0;   // closed-form companion for the same parameters
};

// Swappable pipeline stages for assumption-violation experiments. Defaults
// reproduce the baseline pipeline exactly.
struct SimulationModel {
    // Fill eps (already sized n_potential) given the drawn losses; attempt_seed
    // identifies the resample attempt. Default: i.i.d. N(0, sigma2) with sigma2
    // implied by (target_rho, cv).
    std::function<void(std::span<const double> losses, std::uint64_t attempt_seed,
                       std::span<double> eps)>
        sample_errors;

    // Map prices to conversion probabilities. Default: min-anchored power law.
    std::function<void(std::span<const double> prices, std::span<double> probs)> demand;

    // Closed-form prediction recorded next to the empirical result; sees the
    // realized prices/probabilities so demand-mismatch experiments can fit
    // their elasticity first. Default: closed-form prediction at the
    // configured parameters.
    std::function<double(std::span<const double> prices, std::span<const double> probs)>
        predicted_lr;
};

SimulationOutcome run_simulation(const PortfolioConfig& config,
                                 kernels::Exec exec = kernels::Exec::Parallel);
SimulationOutcome run_simulation(const PortfolioConfig& config, const SimulationModel& model,
                                 kernels::Exec exec = kernels::Exec::Parallel);

// Convenience single-shot generators (the pipeline pieces as free functions).
std::vector<double> sample_true_losses(std::size_t n, double cv, std::uint64_t seed,
                                       kernels::Exec exec = kernels::Exec::Parallel);
std::vector<double> apply_model_error(std::span<const double> losses, double sigma2,
                                      std::uint64_t seed,
                                      kernels::Exec exec = kernels::Exec::Parallel);
std::vector<double> conversion_probabilities(std::span<const double> prices, double eta,
                                             kernels::Exec exec = kernels::Exec::Parallel);

}  // namespace lrbridge
