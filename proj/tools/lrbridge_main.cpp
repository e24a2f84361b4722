// lrbridge: loss-ratio analytics from model correlation, demand elasticity and
// loss heterogeneity, with a Monte Carlo portfolio simulator to back every
// closed-form number.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lrbridge/calibration.hpp"
#include "lrbridge/errors.hpp"
#include "lrbridge/experiments.hpp"
#include "lrbridge/formulas.hpp"
#include "lrbridge/io.hpp"
#include "lrbridge/portfolio.hpp"
#include "lrbridge/violations.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "lrbridge 1.0.0";

std::optional<std::uint64_t> env_seed_override() {
    const char* env = std::getenv("LRBRIDGE_SEED");
    if (env == nullptr || *env == '\0') return std::nullopt;
    return std::strtoull(env, nullptr, 10);
}

// Removes everything this command managed to write before it failed.
class OutputTracker {
public:
    void add(const fs::path& p) { files_.push_back(p); }
    void commit() { files_.clear(); }
    ~OutputTracker() {
        for (const auto& p : files_) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }
    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& p : files_) out.push_back(p.filename().string());
        return out;
    }

private:
    std::vector<fs::path> files_;
};

void print_prediction(const lrbridge::LossRatioPrediction& pred) {
    json j;
    j["loss_ratio"] = pred.loss_ratio;
    j["elr"] = pred.elr;
    j["sigma2_implied"] = pred.sigma2_implied;
    j["inputs"] = {{"rho", pred.rho},
                   {"cv", pred.population.cv},
                   {"eta", pred.market.eta},
                   {"margin", pred.market.margin}};
    std::cout << j.dump(2) << '\n';
}

struct PredictArgs {
    double rho = 0.0, cv = 0.0, eta = 0.0, margin = 1.0;
    std::vector<double> freq;  // rho_f, cv_f
    std::vector<double> sev;   // rho_s, cv_s
};

int cmd_predict(const PredictArgs& a) {
    if (!a.freq.empty() || !a.sev.empty()) {
        if (a.freq.size() != 2 || a.sev.size() != 2) {
            std::cerr << "error: --freq and --sev each need rho,cv\n";
            return lrbridge::kExitUsage;
        }
        lrbridge::FreqSevQuality fs(a.freq[0], a.freq[1], a.sev[0], a.sev[1]);
        lrbridge::MarketSpec market(a.eta, a.margin);
        const double lr = lrbridge::expected_loss_ratio_freq_sev(fs, market);
        json j;
        j["loss_ratio"] = lr;
        j["elr"] = lr * a.margin - 1.0;
        j["sigma2_implied"] = lrbridge::sigma2_from_rho(fs.rho_f, fs.cv_f) +
                              lrbridge::sigma2_from_rho(fs.rho_s, fs.cv_s);
        j["inputs"] = {{"rho_f", fs.rho_f}, {"cv_f", fs.cv_f},    {"rho_s", fs.rho_s},
                       {"cv_s", fs.cv_s},   {"eta", market.eta},  {"margin", market.margin}};
        std::cout << j.dump(2) << '\n';
        return lrbridge::kExitOk;
    }
    print_prediction(lrbridge::predict(a.rho, a.cv, a.eta, a.margin));
    return lrbridge::kExitOk;
}

json estimate_to_json(const lrbridge::ElasticityEstimate& est) {
    json j;
    j["eta_hat"] = est.eta_hat;
    j["ci_low"] = est.ci_low;
    j["ci_high"] = est.ci_high;
    j["confidence"] = est.confidence;
    j["n_deployments"] = est.n_deployments;
    j["per_deployment_etas"] = est.per_deployment_etas;
    j["degenerate_ci"] = est.degenerate_ci;
    return j;
}

int cmd_grid(const std::string& config_path, const std::string& out_dir, int parallelism,
             bool full_scale, std::optional<std::uint64_t> seed_flag) {
    lrbridge::GridConfig config;
    if (!config_path.empty()) config = lrbridge::io::read_grid_config(config_path);
    if (full_scale) config.n_potential = 1'000'000;
    if (auto s = env_seed_override()) config.base_seed = *s;
    if (seed_flag) config.base_seed = *seed_flag;

    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw lrbridge::io_error("cannot create output directory '" + out_dir + "'");
    }

    lrbridge::io::RunManifest manifest;
    manifest.command = "grid";
    manifest.config_digest =
        lrbridge::io::digest_hex(lrbridge::io::canonical_grid_config(config));
    manifest.base_seed = config.base_seed;
    manifest.tool_version = kVersion;
    manifest.started_at = lrbridge::io::timestamp_utc_now();

    OutputTracker tracker;
    const auto run = lrbridge::run_grid(config, parallelism);
    tracker.add(dir / "grid.csv");
    lrbridge::io::write_grid_csv(dir / "grid.csv", run.results);
    tracker.add(dir / "summary.json");
    lrbridge::io::write_grid_summary_json(dir / "summary.json", run.summary);

    manifest.finished_at = lrbridge::io::timestamp_utc_now();
    manifest.output_files = tracker.names();
    // Manifest is written last: its presence marks a complete run.
    lrbridge::io::write_manifest(dir / "manifest.json", manifest);
    tracker.commit();

    std::cout << "grid: " << run.results.size() << " simulations, median APE "
              << run.summary.median_ape << "%, mean APE " << run.summary.mean_ape << "% ("
              << run.summary.n_failed_cells << " failed)\n";
    return lrbridge::kExitOk;
}

int cmd_violations(const std::string& kind_name, const std::vector<double>& dfs,
                   const std::vector<double>& alphas, const std::vector<double>& rho_els,
                   const std::vector<std::string>& families, const std::string& out_dir,
                   int reps, std::size_t n, std::uint64_t seed) {
    using lrbridge::DemandFamily;
    using lrbridge::ViolationKind;

    if (auto s = env_seed_override()) seed = *s;

    std::vector<lrbridge::DegradationPoint> points;
    json config_canon;
    config_canon["kind"] = kind_name;
    config_canon["reps"] = reps;
    config_canon["n"] = n;
    config_canon["seed"] = seed;

    if (kind_name == "heavy-tail") {
        const std::vector<double> grid = dfs.empty() ? std::vector<double>{3, 5, 10, 15, 30} : dfs;
        config_canon["grid"] = grid;
        points = lrbridge::run_violation_sweep(ViolationKind::HeavyTail, grid, reps, n, seed);
    } else if (kind_name == "skew") {
        const std::vector<double> grid =
            alphas.empty() ? std::vector<double>{0, 5, 10, 15} : alphas;
        config_canon["grid"] = grid;
        points = lrbridge::run_violation_sweep(ViolationKind::SkewNormal, grid, reps, n, seed);
    } else if (kind_name == "error-corr") {
        const std::vector<double> grid =
            rho_els.empty() ? std::vector<double>{0.0, 0.1, 0.2, 0.3, 0.4} : rho_els;
        config_canon["grid"] = grid;
        points = lrbridge::run_violation_sweep(ViolationKind::ErrorLossCorrelation, grid, reps, n,
                                               seed);
    } else if (kind_name == "demand") {
        std::vector<DemandFamily> fams;
        const std::vector<std::string> names =
            families.empty() ? std::vector<std::string>{"power-law", "linear", "logistic",
                                                        "exponential"}
                             : families;
        for (const auto& f : names) {
            if (f == "power-law") fams.push_back(DemandFamily::PowerLaw);
            else if (f == "linear") fams.push_back(DemandFamily::Linear);
            else if (f == "logistic") fams.push_back(DemandFamily::Logistic);
            else if (f == "exponential") fams.push_back(DemandFamily::Exponential);
            else throw lrbridge::domain_error("unknown demand family '" + f + "'");
        }
        config_canon["grid"] = names;
        points = lrbridge::run_demand_sweep(fams, reps, n, seed);
    } else {
        std::cerr << "error: unknown violation kind '" << kind_name << "'\n";
        return lrbridge::kExitUsage;
    }

    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw lrbridge::io_error("cannot create output directory '" + out_dir + "'");
    }

    lrbridge::io::RunManifest manifest;
    manifest.command = "violations";
    manifest.config_digest = lrbridge::io::digest_hex(config_canon.dump());
    manifest.base_seed = seed;
    manifest.tool_version = kVersion;
    manifest.started_at = lrbridge::io::timestamp_utc_now();

    OutputTracker tracker;
    tracker.add(dir / "degradation.csv");
    lrbridge::io::write_degradation_csv(dir / "degradation.csv", points);
    tracker.add(dir / "plot_series.json");
    lrbridge::io::write_plot_series_json(dir / "plot_series.json", kind_name, points);

    manifest.finished_at = lrbridge::io::timestamp_utc_now();
    manifest.output_files = tracker.names();
    lrbridge::io::write_manifest(dir / "manifest.json", manifest);
    tracker.commit();

    for (const auto& p : points) {
        std::cout << p.label << ": MAPE " << p.mape_mean << "% [" << p.ci_low << ", " << p.ci_high
                  << "]\n";
    }
    return lrbridge::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Loss-ratio analytics bridging model validation metrics to business outcomes"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // predict
    PredictArgs pa;
    auto* predict = app.add_subcommand("predict", "Closed-form expected loss ratio");
    predict->add_option("--rho", pa.rho, "Pearson correlation of predicted vs actual losses");
    predict->add_option("--cv", pa.cv, "Coefficient of variation of true losses");
    predict->add_option("--eta", pa.eta, "Price elasticity")->required();
    predict->add_option("--margin", pa.margin, "Margin factor M (price = M * prediction)");
    predict->add_option("--freq", pa.freq, "Frequency model rho,cv")->delimiter(',');
    predict->add_option("--sev", pa.sev, "Severity model rho,cv")->delimiter(',');

    // elr
    double e_rho = 0.0, e_cv = 0.0, e_eta = 0.0;
    auto* elr = app.add_subcommand("elr", "Loss Ratio Error metric");
    elr->add_option("--rho", e_rho)->required();
    elr->add_option("--cv", e_cv)->required();
    elr->add_option("--eta", e_eta)->required();

    // improve
    double i_old = 0.0, i_new = 0.0, i_cv = 0.0, i_eta = 0.0;
    auto* improve = app.add_subcommand("improve", "Loss ratio improvement ratio LR_new/LR_old");
    improve->add_option("--rho-old", i_old)->required();
    improve->add_option("--rho-new", i_new)->required();
    improve->add_option("--cv", i_cv)->required();
    improve->add_option("--eta", i_eta)->required();

    // calibrate
    std::string cal_file;
    double cal_conf = 0.95;
    auto* calibrate =
        app.add_subcommand("calibrate", "Implied elasticity from historical deployments");
    calibrate->add_option("--deployments", cal_file, "CSV or JSON deployments file")->required();
    calibrate->add_option("--confidence", cal_conf, "CI level (default 0.95)");

    // forecast
    std::string fc_file;
    double fc_conf = 0.95, fc_cv = 0.0, fc_margin = 0.0, fc_cur = 0.0, fc_tgt = 0.0;
    auto* forecast =
        app.add_subcommand("forecast", "Forecast LR impact of a model improvement");
    forecast->add_option("--deployments", fc_file)->required();
    forecast->add_option("--confidence", fc_conf);
    forecast->add_option("--cv", fc_cv)->required();
    forecast->add_option("--margin", fc_margin)->required();
    forecast->add_option("--rho-current", fc_cur)->required();
    forecast->add_option("--rho-target", fc_tgt)->required();

    // simulate
    lrbridge::PortfolioConfig sim_cfg;
    auto* simulate = app.add_subcommand("simulate", "One Monte Carlo portfolio simulation");
    simulate->add_option("--rho", sim_cfg.target_rho)->required();
    simulate->add_option("--cv", sim_cfg.cv)->required();
    simulate->add_option("--eta", sim_cfg.eta)->required();
    simulate->add_option("--margin", sim_cfg.margin);
    simulate->add_option("--n", sim_cfg.n_potential, "Potential customers (default 1e6)");
    simulate->add_option("--seed", sim_cfg.seed);
    simulate->add_option("--min-converted", sim_cfg.min_converted);
    simulate->add_option("--max-attempts", sim_cfg.max_resample_attempts);

    // grid
    std::string grid_config, grid_out = ".";
    int grid_par = 0;
    bool grid_full = false;
    std::optional<std::uint64_t> grid_seed;
    auto* grid = app.add_subcommand("grid", "Run the validation grid, emit CSV + summary");
    grid->add_option("--config", grid_config, "Grid config JSON (defaults if omitted)");
    grid->add_option("--out", grid_out, "Output directory")->required();
    grid->add_option("--parallelism", grid_par, "Max concurrent cells (0 = hardware)");
    grid->add_flag("--full-scale", grid_full, "Force n_potential = 1e6 per cell");
    grid->add_option("--seed", [&grid_seed](const std::vector<std::string>& vals) {
        grid_seed = std::strtoull(vals[0].c_str(), nullptr, 10);
        return true;
    }, "Base seed override");

    // violations
    std::string v_kind, v_out = ".";
    std::vector<double> v_dfs, v_alphas, v_rho_els;
    std::vector<std::string> v_families;
    int v_reps = 10;
    std::size_t v_n = 200'000;
    std::uint64_t v_seed = 0;
    auto* violations =
        app.add_subcommand("violations", "Assumption-violation sweeps, emit degradation series");
    violations->add_option("--kind", v_kind, "heavy-tail | skew | error-corr | demand")
        ->required();
    violations->add_option("--df", v_dfs, "Heavy-tail df grid")->delimiter(',');
    violations->add_option("--alpha", v_alphas, "Skew-normal shape grid")->delimiter(',');
    violations->add_option("--rho-el", v_rho_els, "Error-loss correlation grid")->delimiter(',');
    violations->add_option("--family", v_families, "Demand families")->delimiter(',');
    violations->add_option("--out", v_out, "Output directory")->required();
    violations->add_option("--reps", v_reps, "Replications per grid point (default 10)");
    violations->add_option("--n", v_n, "Portfolio size (default 200000)");
    violations->add_option("--seed", v_seed, "Base seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return lrbridge::kExitUsage;
    }

    try {
        if (*predict) return cmd_predict(pa);
        if (*elr) {
            json j;
            j["elr"] = lrbridge::loss_ratio_error(e_rho, e_cv, e_eta);
            std::cout << j.dump(2) << '\n';
            return lrbridge::kExitOk;
        }
        if (*improve) {
            json j;
            j["ratio"] = lrbridge::improvement_ratio(i_old, i_new, i_cv, i_eta);
            std::cout << j.dump(2) << '\n';
            return lrbridge::kExitOk;
        }
        if (*calibrate) {
            const auto records = lrbridge::io::read_deployments(cal_file);
            const auto est = lrbridge::aggregate_elasticity(records, cal_conf);
            std::cout << estimate_to_json(est).dump(2) << '\n';
            return lrbridge::kExitOk;
        }
        if (*forecast) {
            const auto records = lrbridge::io::read_deployments(fc_file);
            const auto est = lrbridge::aggregate_elasticity(records, fc_conf);
            const auto fc = lrbridge::forecast_improvement(
                est, lrbridge::PopulationMoments(1.0, fc_cv), fc_margin, fc_cur, fc_tgt);
            json j;
            j["estimate"] = estimate_to_json(est);
            j["current_lr"] = fc.current.loss_ratio;
            j["target_lr"] = fc.target.loss_ratio;
            j["ratio"] = fc.ratio;
            j["ratio_ci"] = {fc.ratio_ci_low, fc.ratio_ci_high};
            std::cout << j.dump(2) << '\n';
            return lrbridge::kExitOk;
        }
        if (*simulate) {
            if (auto s = env_seed_override()) sim_cfg.seed = *s;
            const auto out = lrbridge::run_simulation(sim_cfg);
            json j;
            j["empirical_lr"] = out.empirical_lr;
            j["predicted_lr"] = out.predicted_lr;
            j["n_converted"] = out.n_converted;
            j["realized_rho"] = out.realized_rho;
            j["attempts_used"] = out.attempts_used;
            std::cout << j.dump(2) << '\n';
            return lrbridge::kExitOk;
        }
        if (*grid) return cmd_grid(grid_config, grid_out, grid_par, grid_full, grid_seed);
        if (*violations) {
            return cmd_violations(v_kind, v_dfs, v_alphas, v_rho_els, v_families, v_out, v_reps,
                                  v_n, v_seed);
        }
    } catch (const lrbridge::insufficient_conversions& e) {
        std::cerr << "error: " << e.what() << '\n';
        return lrbridge::kExitDomain;
    } catch (const lrbridge::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return lrbridge::kExitDomain;
    } catch (const lrbridge::parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return lrbridge::kExitParse;
    } catch (const lrbridge::io_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return lrbridge::kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return lrbridge::kExitUsage;
}
