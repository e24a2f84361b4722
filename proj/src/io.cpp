#include "lrbridge/io.hpp"

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lrbridge/errors.hpp"

namespace lrbridge::io {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string digest_hex(const std::string& canonical) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string timestamp_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
    if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path.string() + "' for reading");
    return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& s, long line) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || errno == ERANGE) {
        throw parse_error("invalid numeric field '" + s + "'", line);
    }
    return v;
}

}  // namespace

void write_grid_csv(const std::filesystem::path& path,
                    const std::vector<GridCellResult>& results) {
    auto out = open_out(path);
    out << "rho,cv,eta,rep,seed,predicted_lr,empirical_lr,ape_percent,n_converted,"
           "realized_rho,status\n";
    for (const auto& c : results) {
        out << format_double(c.rho) << ',' << format_double(c.cv) << ',' << format_double(c.eta)
            << ',' << c.rep << ',' << c.seed << ',' << format_double(c.predicted_lr) << ','
            << format_double(c.empirical_lr) << ',' << format_double(c.ape_percent) << ','
            << c.n_converted << ',' << format_double(c.realized_rho) << ',' << c.status << '\n';
    }
    if (!out) throw io_error("failed writing '" + path.string() + "'");
}

std::vector<GridCellResult> read_grid_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw parse_error("empty grid CSV '" + path.string() + "'", 1);
    std::vector<GridCellResult> results;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 11) throw parse_error("expected 11 columns, got " +
                                              std::to_string(f.size()), lineno);
        GridCellResult c;
        c.rho = parse_double(f[0], lineno);
        c.cv = parse_double(f[1], lineno);
        c.eta = parse_double(f[2], lineno);
        c.rep = static_cast<int>(parse_double(f[3], lineno));
        c.seed = static_cast<std::uint64_t>(std::strtoull(f[4].c_str(), nullptr, 10));
        c.predicted_lr = parse_double(f[5], lineno);
        c.empirical_lr = parse_double(f[6], lineno);
        c.ape_percent = parse_double(f[7], lineno);
        c.n_converted = static_cast<long>(parse_double(f[8], lineno));
        c.realized_rho = parse_double(f[9], lineno);
        c.status = f[10];
        c.ok = c.status == "ok";
        results.push_back(std::move(c));
    }
    return results;
}

void write_grid_summary_json(const std::filesystem::path& path, const GridSummary& summary) {
    json j;
    j["median_ape"] = summary.median_ape;
    j["mean_ape"] = summary.mean_ape;
    j["n_success"] = summary.n_success;
    j["n_failed_cells"] = summary.n_failed_cells;
    j["per_slice_medians"] = summary.per_slice_medians;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    if (!out) throw io_error("failed writing '" + path.string() + "'");
}

GridConfig read_grid_config(const std::filesystem::path& path) {
    auto in = open_in(path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw parse_error("invalid JSON in '" + path.string() + "': " + e.what());
    }
    if (!j.is_object() || !j.contains("schema") || j["schema"] != "lrbridge-grid-v1") {
        throw parse_error("config '" + path.string() +
                          "' must be a JSON object with schema \"lrbridge-grid-v1\"");
    }
    GridConfig config;
    try {
        if (j.contains("rho_values")) config.rho_values = j["rho_values"].get<std::vector<double>>();
        if (j.contains("cv_values")) config.cv_values = j["cv_values"].get<std::vector<double>>();
        if (j.contains("eta_values")) config.eta_values = j["eta_values"].get<std::vector<double>>();
        if (j.contains("reps_per_cell")) config.reps_per_cell = j["reps_per_cell"].get<int>();
        if (j.contains("n_potential")) config.n_potential = j["n_potential"].get<std::size_t>();
        if (j.contains("margin")) config.margin = j["margin"].get<double>();
        if (j.contains("base_seed")) config.base_seed = j["base_seed"].get<std::uint64_t>();
        if (j.contains("min_converted")) config.min_converted = j["min_converted"].get<long>();
        if (j.contains("max_resample_attempts")) {
            config.max_resample_attempts = j["max_resample_attempts"].get<int>();
        }
    } catch (const json::exception& e) {
        throw parse_error("config '" + path.string() + "': " + e.what());
    }
    return config;
}

std::string canonical_grid_config(const GridConfig& config) {
    json j;
    j["schema"] = "lrbridge-grid-v1";
    j["rho_values"] = config.rho_values;
    j["cv_values"] = config.cv_values;
    j["eta_values"] = config.eta_values;
    j["reps_per_cell"] = config.reps_per_cell;
    j["n_potential"] = config.n_potential;
    j["margin"] = config.margin;
    j["base_seed"] = config.base_seed;
    j["min_converted"] = config.min_converted;
    j["max_resample_attempts"] = config.max_resample_attempts;
    return j.dump();  // nlohmann objects serialize with sorted keys
}

void write_degradation_csv(const std::filesystem::path& path,
                           const std::vector<DegradationPoint>& points) {
    auto out = open_out(path);
    out << "parameter,mape_mean,ci_low,ci_high,n_reps\n";
    for (const auto& p : points) {
        out << format_double(p.violation_parameter) << ',' << format_double(p.mape_mean) << ','
            << format_double(p.ci_low) << ',' << format_double(p.ci_high) << ',' << p.n_reps
            << '\n';
    }
    if (!out) throw io_error("failed writing '" + path.string() + "'");
}

void write_plot_series_json(const std::filesystem::path& path, const std::string& kind,
                            const std::vector<DegradationPoint>& points) {
    json series = json::array();
    for (const auto& p : points) {
        series.push_back({{"x", p.violation_parameter},
                          {"label", p.label},
                          {"y", p.mape_mean},
                          {"ci_low", p.ci_low},
                          {"ci_high", p.ci_high},
                          {"n_reps", p.n_reps}});
    }
    json j;
    j["kind"] = kind;
    j["series"] = series;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    if (!out) throw io_error("failed writing '" + path.string() + "'");
}

std::vector<DeploymentRecord> read_deployments(const std::filesystem::path& path) {
    std::vector<DeploymentRecord> records;
    if (path.extension() == ".json") {
        auto in = open_in(path);
        json j;
        try {
            in >> j;
        } catch (const json::parse_error& e) {
            throw parse_error("invalid JSON in '" + path.string() + "': " + e.what());
        }
        if (!j.is_array()) throw parse_error("'" + path.string() + "' must be a JSON array");
        for (const auto& item : j) {
            try {
                DeploymentRecord r;
                r.label = item.at("label").get<std::string>();
                r.observed_lr = item.at("observed_lr").get<double>();
                r.margin = item.at("margin").get<double>();
                r.rho = item.at("rho").get<double>();
                r.cv = item.at("cv").get<double>();
                records.push_back(std::move(r));
            } catch (const json::exception& e) {
                throw parse_error("deployment record: " + std::string(e.what()));
            }
        }
    } else {
        auto in = open_in(path);
        std::string line;
        if (!std::getline(in, line)) throw parse_error("empty deployments file", 1);
        // header row required: label,observed_lr,margin,rho,cv
        long lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            const auto f = split_csv_line(line);
            if (f.size() != 5) {
                throw parse_error("expected 5 columns (label,observed_lr,margin,rho,cv)", lineno);
            }
            DeploymentRecord r;
            r.label = f[0];
            r.observed_lr = parse_double(f[1], lineno);
            r.margin = parse_double(f[2], lineno);
            r.rho = parse_double(f[3], lineno);
            r.cv = parse_double(f[4], lineno);
            records.push_back(std::move(r));
        }
    }
    if (records.empty()) throw parse_error("no deployment records in '" + path.string() + "'");
    return records;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
    json j;
    j["command"] = manifest.command;
    j["config_digest"] = manifest.config_digest;
    j["base_seed"] = manifest.base_seed;
    j["tool_version"] = manifest.tool_version;
    j["started_at"] = manifest.started_at;
    j["finished_at"] = manifest.finished_at;
    j["output_files"] = manifest.output_files;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    if (!out) throw io_error("failed writing '" + path.string() + "'");
}

}  // namespace lrbridge::io
