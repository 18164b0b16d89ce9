#include "nvhedge/cli.hpp"

#include "nvhedge/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nvhedge::cli {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
        fail(ErrorKind::InvalidInput, what + ": not a number: '" + text + "'");
    require_finite(v, what.c_str());
    return v;
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
        fail(ErrorKind::InvalidInput, what + ": not a nonnegative integer: '" + text + "'");
    return v;
}

const std::vector<std::string> kAssetLiteral{"asset.kappa", "asset.alpha", "asset.sigma"};
const std::vector<std::string> kDemandLiteral{"demand.A", "demand.B", "demand.b", "demand.c", "demand.sigma_tilde"};

int count_present(const RunConfig& cfg, const std::vector<std::string>& keys) {
    return static_cast<int>(std::count_if(keys.begin(), keys.end(), [&](const auto& k) { return cfg.has(k); }));
}

} // namespace

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{
        "seed",         "threads",        "x0",           "horizon",       "steps",
        "n_outer",      "n_inner",        "n_terminal",   "dominance_n",   "output_dir",
        "m",            "asset.kappa",    "asset.alpha",  "asset.sigma",   "asset.prices",
        "asset.json",   "asset.nu",       "demand.A",     "demand.B",      "demand.b",
        "demand.c",     "demand.sigma_tilde", "demand.s", "demand.ops",    "demand.json",
        "demand.init",  "calib.samples",  "calib.restarts", "calib.max_iterations"};
    return keys;
}

RunConfig RunConfig::parse(std::istream& in, const std::filesystem::path& base_dir) {
    RunConfig cfg;
    cfg.base_dir_ = base_dir;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            fail(ErrorKind::InvalidInput, "config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
        if (cfg.has(key)) fail(ErrorKind::InvalidInput, "config: duplicate key '" + key + "'");
        cfg.set(key, value);
    }
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) fail(ErrorKind::InvalidInput, "cannot open config file " + file.string());
    return parse(in, file.parent_path());
}

void RunConfig::set(const std::string& key, const std::string& value) {
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
        fail(ErrorKind::InvalidInput, "config: unknown key '" + key + "'");
    if (value.empty()) fail(ErrorKind::InvalidInput, "config: empty value for '" + key + "'");
    entries_[key] = value;
}

std::string RunConfig::get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) fail(ErrorKind::InvalidInput, "config: missing required key '" + key + "'");
    return it->second;
}

double RunConfig::number(const std::string& key) const { return parse_double(get(key), key); }

std::size_t RunConfig::count(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    return static_cast<std::size_t>(parse_unsigned(get(key), key));
}

std::filesystem::path RunConfig::path(const std::string& key) const {
    std::filesystem::path p = get(key);
    return p.is_absolute() || base_dir_.empty() ? p : base_dir_ / p;
}

std::uint64_t RunConfig::seed() const { return parse_unsigned(get("seed"), "seed"); }

unsigned RunConfig::threads() const { return static_cast<unsigned>(count("threads", 0)); }

double RunConfig::horizon() const {
    if (!has("horizon")) return 1.0 / 12.0;
    double h = number("horizon");
    require(h > 0.0, "horizon must be > 0");
    return h;
}

int RunConfig::steps() const {
    auto n = count("steps", 21);
    require(n >= 1 && n <= 100000, "steps must be in [1, 100000]");
    return static_cast<int>(n);
}

PathGrid RunConfig::grid() const { return PathGrid::for_horizon(horizon(), steps()); }

std::size_t RunConfig::n_outer() const { return count("n_outer", 2000); }
std::size_t RunConfig::n_inner() const { return count("n_inner", 500); }
std::size_t RunConfig::n_terminal() const { return count("n_terminal", 100000); }
std::size_t RunConfig::dominance_n() const { return count("dominance_n", 100000); }

std::filesystem::path RunConfig::output_dir() const { return has("output_dir") ? path("output_dir") : "."; }

std::optional<std::string> RunConfig::m_spec() const {
    if (!has("m")) return std::nullopt;
    return get("m");
}

DemandFitOptions RunConfig::demand_fit_options() const {
    DemandFitOptions o;
    o.samples = count("calib.samples", o.samples);
    o.restarts = static_cast<int>(count("calib.restarts", static_cast<std::size_t>(o.restarts)));
    o.max_iterations = static_cast<int>(count("calib.max_iterations", static_cast<std::size_t>(o.max_iterations)));
    o.seed = seed();
    o.threads = threads();
    o.grid = grid();
    return o;
}

DemandCoefficients RunConfig::demand_init() const {
    std::vector<double> v;
    std::stringstream ss(get("demand.init"));
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(parse_double(item, "demand.init"));
    if (v.size() != 5) fail(ErrorKind::InvalidInput, "demand.init needs A,B,b,c,sigma_tilde");
    return {v[0], v[1], v[2], v[3], v[4]};
}

EouParams RunConfig::asset() const {
    const int literal = count_present(*this, kAssetLiteral);
    const int sources = (literal > 0) + has("asset.prices") + has("asset.json");
    if (sources != 1)
        fail(ErrorKind::InvalidInput,
             "config: give exactly one asset source (asset.kappa/alpha/sigma, asset.prices or asset.json)");
    EouParams p;
    if (literal > 0) {
        if (literal != 3) fail(ErrorKind::InvalidInput, "config: asset literals need kappa, alpha and sigma");
        p.kappa = number("asset.kappa");
        p.alpha = number("asset.alpha");
        p.sigma = number("asset.sigma");
        p.x0 = number("x0");
    } else if (has("asset.prices")) {
        double nu = has("asset.nu") ? number("asset.nu") : 1.0 / 252.0;
        p = fit_eou(read_prices(path("asset.prices")), nu, horizon()).params;
        if (has("x0")) p.x0 = number("x0");
    } else {
        p = read_asset_json(path("asset.json"));
        if (has("x0")) p.x0 = number("x0");
    }
    p.horizon = horizon();
    p.validate();
    return p;
}

DemandParams RunConfig::demand() const {
    const int literal = count_present(*this, kDemandLiteral);
    const int sources = (literal > 0) + has("demand.ops") + has("demand.json");
    if (sources != 1)
        fail(ErrorKind::InvalidInput, "config: give exactly one demand source (demand.A/B/b/c/sigma_tilde, "
                                      "demand.ops or demand.json)");
    DemandParams d;
    if (literal > 0) {
        if (literal != static_cast<int>(kDemandLiteral.size()))
            fail(ErrorKind::InvalidInput, "config: demand literals need A, B, b, c and sigma_tilde");
        DemandCoefficients k{number("demand.A"), number("demand.B"), number("demand.b"), number("demand.c"),
                             number("demand.sigma_tilde")};
        d = k.to_params(horizon());
    } else if (has("demand.ops")) {
        d = calibrate_demand(read_ops(path("demand.ops")), asset(), demand_init(), demand_fit_options()).params;
    } else {
        d = read_demand_json(path("demand.json"), horizon());
    }
    if (has("demand.s")) d.s = number("demand.s");
    d.validate();
    return d;
}

std::uint64_t fnv1a(const std::string& text, std::uint64_t h) {
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string RunConfig::hash(const std::vector<std::string>& extra) const {
    std::uint64_t h = fnv1a("");
    // worker count and output location do not change results
    for (const auto& [k, v] : entries_)
        if (k != "threads" && k != "output_dir") h = fnv1a(k + "=" + v + "\n", h);
    for (const auto& e : extra) h = fnv1a(e + "\n", h);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

double resolve_m(const std::string& spec, double nv_max) {
    std::string t = trim(spec);
    if (t == "nvmax") return nv_max;
    const std::string suffix = "*nvmax";
    double m = 0.0;
    if (t.size() > suffix.size() && t.compare(t.size() - suffix.size(), suffix.size(), suffix) == 0)
        m = parse_double(t.substr(0, t.size() - suffix.size()), "m fraction") * nv_max;
    else
        m = parse_double(t, "m");
    require(m > 0.0, "target return m must be > 0");
    return m;
}

std::vector<double> resolve_m_grid(const std::string& spec, double nv_max) {
    auto a = spec.find(':');
    auto b = a == std::string::npos ? a : spec.find(':', a + 1);
    if (b == std::string::npos) fail(ErrorKind::InvalidInput, "m grid must look like a:b:n");
    double lo = resolve_m(spec.substr(0, a), nv_max);
    double hi = resolve_m(spec.substr(a + 1, b - a - 1), nv_max);
    auto n = parse_unsigned(spec.substr(b + 1), "m grid size");
    require(n >= 1, "m grid needs at least one point");
    require(hi >= lo, "m grid must be ascending");
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (n - 1);
    if (n > 1) out.back() = hi;
    return out;
}

} // namespace nvhedge::cli
