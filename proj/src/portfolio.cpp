#include "lrbridge/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lrbridge/errors.hpp"
#include "lrbridge/formulas.hpp"
#include "lrbridge/rng.hpp"

namespace lrbridge {

using kernels::Exec;

void PortfolioConfig::validate() const {
    if (n_potential == 0) throw domain_error("n_potential must be positive");
    if (!(cv > 0.0)) throw domain_error("cv must be positive");
    if (!(target_rho > 0.0 && target_rho <= 1.0)) {
        throw domain_error("target_rho must lie in (0, 1]");
    }
    if (!(eta > 0.0)) throw domain_error("eta must be positive");
    if (!(margin > 0.0)) throw domain_error("margin must be positive");
    if (min_converted < 1) throw domain_error("min_converted must be positive");
    if (static_cast<long>(n_potential) < min_converted) {
        throw domain_error("n_potential must be at least min_converted");
    }
    if (max_resample_attempts < 1) throw domain_error("max_resample_attempts must be positive");
}

SimulationOutcome run_simulation(const PortfolioConfig& config, const SimulationModel& model,
                                 Exec exec) {
    config.validate();
    const std::size_t n = config.n_potential;
    const double sigma2 = sigma2_from_rho(config.target_rho, config.cv);

    std::vector<double> losses(n), eps(n), prices(n), probs(n), converted(n);

    long best_converted = 0;
    for (int attempt = 1; attempt <= config.max_resample_attempts; ++attempt) {
        // Fresh sub-seed per attempt keeps attempts independent and reproducible.
        const std::uint64_t attempt_seed =
            RandomStream::derive(config.seed, static_cast<std::uint64_t>(attempt));

        kernels::fill_true_losses(losses, config.cv, attempt_seed, exec);

        if (model.sample_errors) {
            model.sample_errors(losses, attempt_seed, eps);
            // Clamp keeps freak heavy-tail draws from producing inf prices.
            kernels::for_each_index(n, exec, [&](std::size_t i) {
                prices[i] =
                    config.margin * losses[i] * std::exp(std::clamp(eps[i], -700.0, 700.0));
            });
        } else {
            kernels::fill_predictions_normal(losses, prices, sigma2, attempt_seed, exec);
            kernels::for_each_index(n, exec, [&](std::size_t i) { prices[i] *= config.margin; });
        }

        if (model.demand) {
            model.demand(prices, probs);
        } else {
            kernels::fill_conversion_probabilities(prices, probs, config.eta, exec);
        }

        const long n_conv = kernels::fill_conversions(probs, converted, attempt_seed, exec);
        best_converted = n_conv > best_converted ? n_conv : best_converted;
        if (n_conv < config.min_converted) continue;

        SimulationOutcome out;
        out.n_converted = n_conv;
        out.attempts_used = attempt;
        const double loss_sum = kernels::block_sum_fn(
            n, exec, [&](std::size_t i) { return losses[i] * converted[i]; });
        const double premium_sum = kernels::block_sum_fn(
            n, exec, [&](std::size_t i) { return prices[i] * converted[i]; });
        out.empirical_lr = loss_sum / premium_sum;
        // realized correlation over the full potential pool, price/margin = lambda_hat
        out.realized_rho = kernels::pearson_blocked(
            prices, losses, exec);  // scaling by 1/margin does not change Pearson
        out.predicted_lr = model.predicted_lr
                               ? model.predicted_lr(prices, probs)
                               : expected_loss_ratio(config.target_rho, config.cv, config.eta,
                                                     config.margin);
        return out;
    }
    throw insufficient_conversions(best_converted, config.max_resample_attempts);
}

SimulationOutcome run_simulation(const PortfolioConfig& config, Exec exec) {
    return run_simulation(config, SimulationModel{}, exec);
}

std::vector<double> sample_true_losses(std::size_t n, double cv, std::uint64_t seed, Exec exec) {
    if (n == 0) throw domain_error("n must be positive");
    std::vector<double> out(n);
    kernels::fill_true_losses(out, cv, seed, exec);
    return out;
}

std::vector<double> apply_model_error(std::span<const double> losses, double sigma2,
                                      std::uint64_t seed, Exec exec) {
    std::vector<double> out(losses.size());
    kernels::fill_predictions_normal(losses, out, sigma2, seed, exec);
    return out;
}

std::vector<double> conversion_probabilities(std::span<const double> prices, double eta,
                                             Exec exec) {
    std::vector<double> out(prices.size());
    kernels::fill_conversion_probabilities(prices, out, eta, exec);
    return out;
}

}  // namespace lrbridge
