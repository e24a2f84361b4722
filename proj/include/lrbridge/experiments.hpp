#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lrbridge/kernels.hpp"
#include "lrbridge/stats.hpp"

namespace lrbridge {

// Grid validation: every (rho, cv, eta) cell x replication runs one portfolio
// simulation and records the closed-form prediction next to the empirical
// loss ratio. Cell seeds are a hash of (base_seed, rho index, cv index,
// eta index, rep), so extending the grid never perturbs existing cells.

struct GridConfig {
    std::vector<double> rho_values = {0.2, 0.3, 0.5, 0.7, 0.8};
    std::vector<double> cv_values = {1.5, 2.0, 2.5, 3.0, 3.5};
    std::vector<double> eta_values = {0.8, 1.2, 1.6, 2.0, 2.5};
    int reps_per_cell = 5;
    std::size_t n_potential = 1'000'000;
    double margin = 1.0;
    std::uint64_t base_seed = 0;
    // With min-anchored power-law demand, realistic cells convert far fewer
    // than 10^4 customers, so grid runs keep every simulation by default.
    long min_converted = 1;
    int max_resample_attempts = 20;

    void validate() const;
    std::size_t total_runs() const {
        return rho_values.size() * cv_values.size() * eta_values.size() *
               static_cast<std::size_t>(reps_per_cell);
    }
};

struct GridCellResult {
    double rho = 0.0;
    double cv = 0.0;
    double eta = 0.0;
    int rep = 0;
    std::uint64_t seed = 0;
    double predicted_lr = 0.0;
    double empirical_lr = 0.0;
    double ape_percent = 0.0;  // |empirical - predicted| / empirical * 100
    long n_converted = 0;
    double realized_rho = 0.0;
    bool ok = false;
    std::string status;  // "ok" or "failed:<reason>"
};

struct GridSummary {
    double median_ape = 0.0;
    double mean_ape = 0.0;
    std::map<std::string, double> per_slice_medians;  // e.g. "rho=0.5" -> median APE
    std::size_t n_success = 0;
    std::size_t n_failed_cells = 0;
};

struct GridRun {
    std::vector<GridCellResult> results;
    GridSummary summary;
};

// `parallelism` caps the number of concurrent cells (0 = hardware default);
// each cell simulation runs serially inside. Output is independent of the
// parallelism degree.
GridRun run_grid(const GridConfig& config, int parallelism = 0);

GridSummary summarize(const std::vector<GridCellResult>& results);

// Student-t interval on the mean of `samples` (>= 2 samples required).
stats::Interval confidence_interval(std::span<const double> samples, double confidence = 0.95);

// Deterministic per-cell seed derivation (exposed for tests and reruns).
std::uint64_t grid_cell_seed(std::uint64_t base_seed, std::size_t rho_idx, std::size_t cv_idx,
                             std::size_t eta_idx, int rep);

}  // namespace lrbridge
