#include "lrbridge/experiments.hpp"

#include <cmath>
#include <sstream>

#include "lrbridge/errors.hpp"
#include "lrbridge/portfolio.hpp"
#include "lrbridge/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lrbridge {

namespace {

std::string format_value(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

void GridConfig::validate() const {
    if (rho_values.empty() || cv_values.empty() || eta_values.empty()) {
        throw domain_error("grid value vectors must be non-empty");
    }
    if (reps_per_cell < 1) throw domain_error("reps_per_cell must be positive");
    if (n_potential == 0) throw domain_error("n_potential must be positive");
    if (!(margin > 0.0)) throw domain_error("margin must be positive");
    if (min_converted < 1) throw domain_error("min_converted must be positive");
}

std::uint64_t grid_cell_seed(std::uint64_t base_seed, std::size_t rho_idx, std::size_t cv_idx,
                             std::size_t eta_idx, int rep) {
    std::uint64_t s = RandomStream::derive(base_seed, 0x67726964ULL);  // "grid"
    s = RandomStream::derive(s, rho_idx);
    s = RandomStream::derive(s, cv_idx);
    s = RandomStream::derive(s, eta_idx);
    s = RandomStream::derive(s, static_cast<std::uint64_t>(rep));
    return s;
}

GridRun run_grid(const GridConfig& config, int parallelism) {
    config.validate();

    struct Task {
        std::size_t ir, ic, ie;
        int rep;
    };
    std::vector<Task> tasks;
    tasks.reserve(config.total_runs());
    for (std::size_t ir = 0; ir < config.rho_values.size(); ++ir) {
        for (std::size_t ic = 0; ic < config.cv_values.size(); ++ic) {
            for (std::size_t ie = 0; ie < config.eta_values.size(); ++ie) {
                for (int rep = 0; rep < config.reps_per_cell; ++rep) {
                    tasks.push_back({ir, ic, ie, rep});
                }
            }
        }
    }

    std::vector<GridCellResult> results(tasks.size());
    const auto run_task = [&](std::size_t t) {
        const Task& task = tasks[t];
        GridCellResult& cell = results[t];
        cell.rho = config.rho_values[task.ir];
        cell.cv = config.cv_values[task.ic];
        cell.eta = config.eta_values[task.ie];
        cell.rep = task.rep;
        cell.seed = grid_cell_seed(config.base_seed, task.ir, task.ic, task.ie, task.rep);

        PortfolioConfig sim;
        sim.n_potential = config.n_potential;
        sim.cv = cell.cv;
        sim.target_rho = cell.rho;
        sim.eta = cell.eta;
        sim.margin = config.margin;
        sim.seed = cell.seed;
        sim.min_converted = config.min_converted;
        sim.max_resample_attempts = config.max_resample_attempts;
        try {
            // Cells are the parallel unit; the inner simulation runs serially.
            const SimulationOutcome out = run_simulation(sim, kernels::Exec::Serial);
            cell.predicted_lr = out.predicted_lr;
            cell.empirical_lr = out.empirical_lr;
            cell.ape_percent =
                std::abs(out.empirical_lr - out.predicted_lr) / out.empirical_lr * 100.0;
            cell.n_converted = out.n_converted;
            cell.realized_rho = out.realized_rho;
            cell.ok = true;
            cell.status = "ok";
        } catch (const insufficient_conversions& e) {
            cell.ok = false;
            cell.status = "failed:insufficient_conversions";
            cell.n_converted = e.best_converted;
            cell.predicted_lr = std::nan("");
            cell.empirical_lr = std::nan("");
            cell.ape_percent = std::nan("");
            cell.realized_rho = std::nan("");
        }
    };

#ifdef _OPENMP
    const std::int64_t n_tasks = static_cast<std::int64_t>(tasks.size());
    if (parallelism > 0) {
#pragma omp parallel for schedule(dynamic) num_threads(parallelism)
        for (std::int64_t t = 0; t < n_tasks; ++t) run_task(static_cast<std::size_t>(t));
    } else {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t t = 0; t < n_tasks; ++t) run_task(static_cast<std::size_t>(t));
    }
#else
    (void)parallelism;
    for (std::size_t t = 0; t < tasks.size(); ++t) run_task(t);
#endif

    GridRun run;
    run.results = std::move(results);
    bool any_ok = false;
    for (const auto& cell : run.results) any_ok = any_ok || cell.ok;
    if (any_ok) {
        run.summary = summarize(run.results);
    } else {
        run.summary.n_failed_cells = run.results.size();
        run.summary.median_ape = std::nan("");
        run.summary.mean_ape = std::nan("");
    }
    return run;
}

GridSummary summarize(const std::vector<GridCellResult>& results) {
    std::vector<double> apes;
    std::map<std::string, std::vector<double>> slices;
    GridSummary summary;
    for (const auto& cell : results) {
        if (!cell.ok) {
            ++summary.n_failed_cells;
            continue;
        }
        apes.push_back(cell.ape_percent);
        slices["rho=" + format_value(cell.rho)].push_back(cell.ape_percent);
        slices["cv=" + format_value(cell.cv)].push_back(cell.ape_percent);
        slices["eta=" + format_value(cell.eta)].push_back(cell.ape_percent);
    }
    if (apes.empty()) throw domain_error("summarize: no successful grid cells");
    summary.n_success = apes.size();
    summary.median_ape = stats::median(apes);
    summary.mean_ape = stats::mean(apes);
    for (auto& [key, values] : slices) {
        summary.per_slice_medians[key] = stats::median(values);
    }
    return summary;
}

stats::Interval confidence_interval(std::span<const double> samples, double confidence) {
    return stats::t_confidence_interval(samples, confidence);
}

}  // namespace lrbridge
