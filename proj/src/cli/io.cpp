#include "nvhedge/cli.hpp"

#include "nvhedge/error.hpp"

#include "json.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nvhedge::cli {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        auto b = cell.find_first_not_of(" \t\r");
        auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double to_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        fail(ErrorKind::InvalidInput, where + ": not a number: '" + s + "'");
    return v;
}

// Rows of a CSV file with '#' comments skipped and the header checked.
std::vector<std::vector<std::string>> read_table(const std::filesystem::path& file,
                                                 const std::vector<std::string>& header) {
    std::ifstream in(file);
    if (!in) fail(ErrorKind::InvalidInput, "cannot open " + file.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool seen_header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto cells = split(line);
        if (!seen_header) {
            if (cells != header) {
                std::string expected;
                for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
                fail(ErrorKind::InvalidInput, file.string() + ": header must be '" + expected + "'");
            }
            seen_header = true;
            continue;
        }
        if (cells.size() != header.size())
            fail(ErrorKind::InvalidInput,
                 file.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                     " columns");
        rows.push_back(std::move(cells));
    }
    if (!seen_header) fail(ErrorKind::InvalidInput, file.string() + ": missing header row");
    return rows;
}

nlohmann::json read_json(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) fail(ErrorKind::InvalidInput, "cannot open " + file.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidInput, file.string() + ": " + e.what());
    }
}

double json_number(const nlohmann::json& j, const char* key, const std::filesystem::path& file) {
    if (!j.contains(key) || !j[key].is_number())
        fail(ErrorKind::InvalidInput, file.string() + ": missing numeric field '" + key + "'");
    return j[key].get<double>();
}

} // namespace

PriceSeries read_prices(const std::filesystem::path& file) {
    PriceSeries s;
    const std::string where = file.string();
    for (auto& row : read_table(file, {"date", "price"})) {
        s.dates.push_back(row[0]);
        s.prices.push_back(to_double(row[1], where));
    }
    s.validate();
    return s;
}

OpsSeries read_ops(const std::filesystem::path& file) {
    OpsSeries s;
    const std::string where = file.string();
    for (auto& row : read_table(file, {"month", "sales", "price", "x0", "xbar"})) {
        s.months.push_back(row[0]);
        s.sales.push_back(to_double(row[1], where));
        s.prices.push_back(to_double(row[2], where));
        s.x0.push_back(to_double(row[3], where));
        s.xbar.push_back(to_double(row[4], where));
    }
    s.validate();
    return s;
}

EouParams read_asset_json(const std::filesystem::path& file) {
    auto j = read_json(file);
    EouParams p;
    p.kappa = json_number(j, "kappa", file);
    p.alpha = json_number(j, "alpha", file);
    p.sigma = json_number(j, "sigma", file);
    p.x0 = json_number(j, "x0", file);
    p.horizon = j.contains("horizon") ? json_number(j, "horizon", file) : 1.0 / 12.0;
    return p;
}

DemandParams read_demand_json(const std::filesystem::path& file, double horizon) {
    auto j = read_json(file);
    DemandCoefficients k{json_number(j, "A", file), json_number(j, "B", file), json_number(j, "b", file),
                         json_number(j, "c", file), json_number(j, "sigma_tilde", file)};
    DemandParams d = k.to_params(horizon);
    if (j.contains("s")) d.s = json_number(j, "s", file);
    return d;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const std::string& config_hash, std::uint64_t seed,
                     const std::vector<std::string>& header)
    : out_(out) {
    out_ << "# config_hash=" << config_hash << " seed=" << seed << '\n';
    for (const auto& h : header) cell(h);
    end_row();
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_number(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
    if (!first_) out_ << ',';
    out_ << v;
    first_ = false;
    return *this;
}

CsvWriter& CsvWriter::empty() { return cell(std::string{}); }

void CsvWriter::end_row() {
    out_ << '\n';
    first_ = true;
}

} // namespace nvhedge::cli
