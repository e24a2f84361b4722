#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lrbridge/calibration.hpp"
#include "lrbridge/experiments.hpp"
#include "lrbridge/violations.hpp"

namespace lrbridge::io {

// Doubles in CSV output carry 17 significant digits so reruns are
// byte-comparable.
std::string format_double(double v);

// FNV-1a 64 over the canonical (sorted-key) JSON dump of a config.
std::string digest_hex(const std::string& canonical);

struct RunManifest {
    std::string command;
    std::string config_digest;
    std::uint64_t base_seed = 0;
    std::string tool_version;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> output_files;
};

std::string timestamp_utc_now();

// --- grid ---------------------------------------------------------------

// Columns: rho,cv,eta,rep,seed,predicted_lr,empirical_lr,ape_percent,
//          n_converted,realized_rho,status
void write_grid_csv(const std::filesystem::path& path,
                    const std::vector<GridCellResult>& results);
std::vector<GridCellResult> read_grid_csv(const std::filesystem::path& path);

void write_grid_summary_json(const std::filesystem::path& path, const GridSummary& summary);

// GridConfig from a JSON file with top-level {"schema": "lrbridge-grid-v1", ...};
// every other field optional with spec defaults.
GridConfig read_grid_config(const std::filesystem::path& path);
std::string canonical_grid_config(const GridConfig& config);

// --- violations -----------------------------------------------------------

// Columns: parameter,mape_mean,ci_low,ci_high,n_reps
void write_degradation_csv(const std::filesystem::path& path,
                           const std::vector<DegradationPoint>& points);
void write_plot_series_json(const std::filesystem::path& path, const std::string& kind,
                            const std::vector<DegradationPoint>& points);

// --- calibration ------------------------------------------------------------

// Deployment records from CSV (header label,observed_lr,margin,rho,cv) or a
// JSON array of objects with the same keys; format chosen by file extension.
std::vector<DeploymentRecord> read_deployments(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace lrbridge::io
