#pragma once

#include "nvhedge/calibration.hpp"
#include "nvhedge/processes.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nvhedge::cli {

/// Flat key = value run configuration. Lines starting with '#' are comments; unknown keys,
/// duplicate keys and conflicting parameter sources are rejected.
class RunConfig {
public:
    RunConfig() = default;
    static RunConfig parse(std::istream& in, const std::filesystem::path& base_dir = {});
    static RunConfig load(const std::filesystem::path& file);

    /// Entry overrides from the command line (same key rules as the file).
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    const std::map<std::string, std::string>& entries() const { return entries_; }

    std::uint64_t seed() const;
    unsigned threads() const;
    double horizon() const;
    int steps() const;
    PathGrid grid() const;
    std::size_t n_outer() const;
    std::size_t n_inner() const;
    std::size_t n_terminal() const;
    std::size_t dominance_n() const;
    std::filesystem::path output_dir() const;
    std::optional<std::string> m_spec() const;
    DemandFitOptions demand_fit_options() const;
    /// Starting point for demand calibration, demand.init = A,B,b,c,sigma_tilde.
    DemandCoefficients demand_init() const;

    /// Asset parameters from the single configured source (literals, price CSV or JSON).
    EouParams asset() const;
    /// Demand parameters from the single configured source (literals, ops CSV or JSON).
    DemandParams demand() const;

    /// FNV-1a over the sorted entries plus any extra strings, as 16 hex digits.
    std::string hash(const std::vector<std::string>& extra = {}) const;

private:
    std::string get(const std::string& key) const;
    double number(const std::string& key) const;
    std::size_t count(const std::string& key, std::size_t fallback) const;
    std::filesystem::path path(const std::string& key) const;

    std::map<std::string, std::string> entries_;
    std::filesystem::path base_dir_;
};

/// Keys accepted in configuration files.
const std::vector<std::string>& known_keys();

PriceSeries read_prices(const std::filesystem::path& file);
OpsSeries read_ops(const std::filesystem::path& file);
EouParams read_asset_json(const std::filesystem::path& file);
DemandParams read_demand_json(const std::filesystem::path& file, double horizon);

/// CSV writer that prefixes a provenance comment and a header row.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::string& config_hash, std::uint64_t seed,
              const std::vector<std::string>& header);
    CsvWriter& cell(double v);
    CsvWriter& cell(const std::string& v);
    CsvWriter& empty();
    void end_row();

private:
    std::ostream& out_;
    bool first_ = true;
};

std::string format_number(double v);

/// Parses "nvmax", "<f>*nvmax" or an absolute amount.
double resolve_m(const std::string& spec, double nv_max);
/// Parses "a:b:n" with endpoints as in resolve_m.
std::vector<double> resolve_m_grid(const std::string& spec, double nv_max);

// Subcommands. Each writes its files under out_dir and a human-readable report to `report`.
void calibrate_asset(const std::filesystem::path& prices, double nu, double horizon,
                     const std::filesystem::path& out_dir, std::ostream& report);
void calibrate_demand_cmd(const RunConfig& cfg, const std::filesystem::path& ops,
                          const std::filesystem::path& asset_json, const std::filesystem::path& out_dir,
                          std::ostream& report);
void solve_nv(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& report);
void frontier(const RunConfig& cfg, const std::string& mode, const std::string& m_grid,
              const std::filesystem::path& out_dir, std::ostream& report);
void optimize(const RunConfig& cfg, const std::string& m_spec, const std::filesystem::path& out_dir,
              std::ostream& report);
void hedge_sim(const RunConfig& cfg, double p, double r, const std::string& m_spec, std::size_t paths,
               const std::filesystem::path& out_dir, std::ostream& report);
void dominance_test(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& report);

struct SimulateOptions {
    std::string what = "prices"; // prices | ops
    std::size_t n = 2600;        // observations (prices) or months (ops)
    double nu = 1.0 / 252.0;
    double price_noise = 0.0;
    double sales_noise = 0.0;
};
void simulate(const RunConfig& cfg, const SimulateOptions& opts, const std::filesystem::path& out_file,
              std::ostream& report);

std::uint64_t fnv1a(const std::string& text, std::uint64_t h = 14695981039346656037ull);

} // namespace nvhedge::cli
