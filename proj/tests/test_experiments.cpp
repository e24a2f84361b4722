#include <doctest.h>

#include <cmath>
#include <vector>

#include "lrbridge/errors.hpp"
#include "lrbridge/experiments.hpp"

using namespace lrbridge;

namespace {

GridConfig tiny_grid() {
    GridConfig cfg;
    cfg.rho_values = {0.5, 0.7};
    cfg.cv_values = {2.0};
    cfg.eta_values = {0.8, 1.2};
    cfg.reps_per_cell = 2;
    cfg.n_potential = 40'000;
    cfg.base_seed = 505;
    return cfg;
}

}  // namespace

TEST_CASE("grid runner produces one row per cell and rep") {
    const auto run = run_grid(tiny_grid());
    CHECK(run.results.size() == 8);
    for (const auto& cell : run.results) {
        CHECK(cell.ok);
        CHECK(cell.status == "ok");
        CHECK(cell.ape_percent ==
              doctest::Approx(std::abs(cell.empirical_lr - cell.predicted_lr) /
                              cell.empirical_lr * 100.0));
        CHECK(cell.n_converted >= 1);
        CHECK(cell.seed == grid_cell_seed(505, cell.rho == 0.5 ? 0 : 1, 0,
                                          cell.eta == 0.8 ? 0 : 1, cell.rep));
    }
    CHECK(run.summary.n_success == 8);
    CHECK(run.summary.n_failed_cells == 0);
    CHECK(run.summary.per_slice_medians.count("rho=0.5") == 1);
    CHECK(run.summary.per_slice_medians.count("cv=2") == 1);
    CHECK(run.summary.per_slice_medians.count("eta=1.2") == 1);
}

TEST_CASE("grid runs are reproducible at any parallelism") {
    const auto a = run_grid(tiny_grid(), 1);
    const auto b = run_grid(tiny_grid(), 4);
    const auto c = run_grid(tiny_grid(), 0);
    REQUIRE(a.results.size() == b.results.size());
    for (std::size_t i = 0; i < a.results.size(); ++i) {
        CHECK(a.results[i].empirical_lr == b.results[i].empirical_lr);
        CHECK(a.results[i].empirical_lr == c.results[i].empirical_lr);
        CHECK(a.results[i].realized_rho == b.results[i].realized_rho);
        CHECK(a.results[i].n_converted == b.results[i].n_converted);
    }
    CHECK(a.summary.median_ape == b.summary.median_ape);
}

TEST_CASE("adding grid values does not perturb existing cells") {
    const auto base = run_grid(tiny_grid());
    GridConfig wider = tiny_grid();
    wider.eta_values.push_back(2.0);  // appended: earlier indices unchanged
    const auto more = run_grid(wider);
    // rows for the original eta values must be identical
    std::size_t matched = 0;
    for (const auto& cell : base.results) {
        for (const auto& other : more.results) {
            if (other.rho == cell.rho && other.eta == cell.eta && other.rep == cell.rep) {
                CHECK(other.empirical_lr == cell.empirical_lr);
                CHECK(other.seed == cell.seed);
                ++matched;
            }
        }
    }
    CHECK(matched == base.results.size());
}

TEST_CASE("failed cells are recorded, not dropped") {
    GridConfig cfg = tiny_grid();
    cfg.n_potential = 5'000;
    cfg.min_converted = 4'000;  // unattainable
    cfg.max_resample_attempts = 2;
    const auto run_res = run_grid(cfg);
    CHECK(run_res.results.size() == 8);
    std::size_t failed = 0;
    for (const auto& cell : run_res.results) {
        if (!cell.ok) {
            ++failed;
            CHECK(cell.status == "failed:insufficient_conversions");
            CHECK(std::isnan(cell.ape_percent));
        }
    }
    CHECK(failed == run_res.summary.n_failed_cells);
    CHECK(failed == 8);  // nothing converts 4/5 of a pool under this demand
    CHECK(std::isnan(run_res.summary.median_ape));
}

TEST_CASE("summarize: medians, means and consistency with returned summary") {
    std::vector<GridCellResult> cells(3);
    cells[0].ok = true;
    cells[0].ape_percent = 10.0;
    cells[1].ok = true;
    cells[1].ape_percent = 20.0;
    cells[2].ok = true;
    cells[2].ape_percent = 30.0;
    for (auto& c : cells) {
        c.rho = 0.5;
        c.cv = 2.0;
        c.eta = 1.2;
        c.status = "ok";
    }
    auto s = summarize(cells);
    CHECK(s.median_ape == 20.0);
    CHECK(s.mean_ape == 20.0);

    cells.pop_back();
    s = summarize(cells);
    CHECK(s.median_ape == 15.0);  // midpoint convention

    const auto run_res = run_grid(tiny_grid());
    const auto recomputed = summarize(run_res.results);
    CHECK(recomputed.median_ape == run_res.summary.median_ape);
    CHECK(recomputed.mean_ape == run_res.summary.mean_ape);
    CHECK(recomputed.per_slice_medians == run_res.summary.per_slice_medians);

    std::vector<GridCellResult> none;
    CHECK_THROWS_AS(summarize(none), domain_error);
}

TEST_CASE("confidence_interval forwards to the t interval") {
    std::vector<double> xs = {5.0, 5.0, 5.0, 5.0};
    const auto ci = confidence_interval(xs);
    CHECK(ci.low == 5.0);
    CHECK(ci.high == 5.0);
    std::vector<double> one = {5.0};
    CHECK_THROWS_AS(confidence_interval(one), domain_error);
}

TEST_CASE("grid config validation") {
    GridConfig cfg;
    cfg.rho_values.clear();
    CHECK_THROWS_AS(cfg.validate(), domain_error);
    cfg = GridConfig{};
    cfg.reps_per_cell = 0;
    CHECK_THROWS_AS(cfg.validate(), domain_error);
    cfg = GridConfig{};
    CHECK(cfg.total_runs() == 625);  // default grid: 125 cells x 5 reps
}
