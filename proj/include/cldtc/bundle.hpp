#pragma once

#include "cldtc/config.hpp"
#include "cldtc/experiments.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cldtc {

inline constexpr int kBundleSchemaVersion = 1;
inline constexpr std::string_view kLibraryVersion = "0.1.0";

/// Filesystem failure while writing or reading a bundle.
class BundleIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::uint64_t fnv1a64(std::string_view data) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Hash over the canonical config text; identifies the bundle's inputs.
inline std::string spec_hash(const ScenarioSpec& spec) { return hex64(fnv1a64(emit_config(spec))); }

inline std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Writes to a sibling temporary file, then renames over the target.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw BundleIoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw BundleIoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw BundleIoError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw BundleIoError("cannot rename into " + path.string());
    }
}

/// Tab-separated text: one header line, then rows.
class TsvWriter {
public:
    explicit TsvWriter(std::vector<std::string> columns) : columns_(std::move(columns))
    {
        for (std::size_t c = 0; c < columns_.size(); ++c) {
            if (c) out_ << '\t';
            out_ << columns_[c];
        }
        out_ << '\n';
    }

    TsvWriter& cell(double v) { return text(format_number(v)); }
    TsvWriter& cell(std::size_t v) { return text(std::to_string(v)); }
    TsvWriter& integer(std::uint64_t v) { return text(std::to_string(v)); }
    TsvWriter& text(std::string_view s)
    {
        if (col_) out_ << '\t';
        out_ << s;
        if (++col_ == columns_.size()) {
            out_ << '\n';
            col_ = 0;
        }
        return *this;
    }

    std::string str() const { return out_.str(); }

private:
    std::vector<std::string> columns_;
    std::ostringstream out_;
    std::size_t col_ = 0;
};

inline std::string table_text(const Table& t)
{
    TsvWriter w(t.columns);
    for (const auto& row : t.rows) {
        for (double v : row) w.cell(v);
    }
    return w.str();
}

inline std::string series_text(const std::vector<ObservableSample>& samples)
{
    TsvWriter w({"period", "phase", "H_eff", "Mz", "d"});
    for (const auto& s : samples) {
        w.cell(s.period_index).text(to_string(s.phase)).cell(s.energy_density).cell(s.mz).cell(s.d);
    }
    return w.str();
}

/// Stroboscopic samples whose period index has the given parity.
inline std::string parity_series_text(const std::vector<ObservableSample>& samples, std::size_t parity)
{
    TsvWriter w({"period", "phase", "H_eff", "Mz", "d"});
    for (const auto& s : samples) {
        if (s.phase != Phase::after_x || s.period_index % 2 != parity) continue;
        w.cell(s.period_index).text(to_string(s.phase)).cell(s.energy_density).cell(s.mz).cell(s.d);
    }
    return w.str();
}

inline std::string spectrum_text(const Spectrum& s)
{
    TsvWriter w({"frequency", "real", "imag", "power"});
    for (std::size_t k = 0; k < s.size(); ++k) {
        w.cell(s.frequency[k]).cell(s.amplitude[k].real()).cell(s.amplitude[k].imag()).cell(s.power(k));
    }
    return w.str();
}

inline std::string optional_text(const std::optional<double>& v) { return v ? format_number(*v) : "censored"; }

inline std::string floquet_realizations_text(const FloquetRecord& rec)
{
    TsvWriter w({"realization", "seed_initial", "seed_perturbation", "ok", "tau_star", "crystalline_fraction",
                 "peak_frequency"});
    for (const auto& r : rec.realizations) {
        w.cell(r.index)
            .integer(r.seeds.initial)
            .integer(r.seeds.perturbation)
            .text(r.ok ? "1" : "0")
            .text(r.ok ? optional_text(r.tau_star) : "failed")
            .cell(r.crystalline_fraction)
            .cell(r.peak_frequency);
    }
    return w.str();
}

inline std::string aggregate_text(const FloquetRecord& rec)
{
    TsvWriter w({"quantity", "mean", "sd", "count", "censored"});
    w.text("tau_star").cell(rec.tau_star.mean).cell(rec.tau_star.sd).cell(rec.tau_star.count).cell(rec.tau_star.censored);
    w.text("crystalline_fraction")
        .cell(rec.fraction.mean)
        .cell(rec.fraction.sd)
        .cell(rec.fraction.count)
        .cell(rec.fraction.censored);
    return w.str();
}

inline std::string effective_series_text(const std::vector<EffectiveSample>& samples)
{
    TsvWriter w({"time", "H_eff", "Mz", "d"});
    for (const auto& s : samples) w.cell(s.time).cell(s.energy_density).cell(s.mz).cell(s.d);
    return w.str();
}

inline std::string effective_realizations_text(const EffectiveRecord& rec)
{
    TsvWriter w({"realization", "seed_initial", "seed_perturbation", "ok", "tau_c", "sign_changes_before_tau_c"});
    for (const auto& r : rec.realizations) {
        w.cell(r.index)
            .integer(r.seeds.initial)
            .integer(r.seeds.perturbation)
            .text(r.ok ? "1" : "0")
            .text(r.ok ? optional_text(r.tau_c) : "failed")
            .cell(r.sign_changes_before_tau_c);
    }
    return w.str();
}

inline std::string fit_text(const FitSummary& f)
{
    TsvWriter w({"slope", "intercept", "r_squared", "points", "excluded", "ok"});
    w.cell(f.fit.slope).cell(f.fit.intercept).cell(f.fit.r_squared).cell(f.fit.points).cell(f.excluded).text(f.ok ? "1" : "0");
    return w.str();
}

inline nlohmann::json coordinates_json(const Coordinates& c)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : c) j[k] = v;
    return j;
}

inline std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Writes every file of a result bundle under `dir`. All files except
/// manifest.json depend only on the spec; the manifest also carries the
/// creation time. Returns the relative paths written (manifest last).
inline std::vector<std::string> write_bundle(const ScenarioResult& result, const std::filesystem::path& dir)
{
    std::vector<std::string> files;
    auto put = [&](const std::string& rel, std::string_view content) {
        write_file_atomic(dir / rel, content);
        files.push_back(rel);
    };

    put("config.json", emit_config(result.spec));
    for (const auto& t : result.tables) put("tables/" + t.name + ".tsv", table_text(t));
    if (result.fit) put("fit.tsv", fit_text(*result.fit));

    nlohmann::json points = nlohmann::json::array();
    for (const auto& rec : result.floquet) {
        const std::string base = "floquet/" + rec.label + "/";
        put(base + "mean_series.tsv", series_text(rec.mean_series));
        put(base + "even_periods.tsv", parity_series_text(rec.mean_series, 0));
        put(base + "odd_periods.tsv", parity_series_text(rec.mean_series, 1));
        put(base + "realizations.tsv", floquet_realizations_text(rec));
        put(base + "aggregates.tsv", aggregate_text(rec));
        put(base + "spectrum.tsv", spectrum_text(rec.mean_spectrum));
        for (std::size_t r = 0; r < rec.realization_series.size(); ++r) {
            char name[48];
            std::snprintf(name, sizeof name, "series/realization_%04zu.tsv", r);
            put(base + name, series_text(rec.realization_series[r]));
        }
        points.push_back({{"label", rec.label},
                          {"type", "floquet"},
                          {"coordinates", coordinates_json(rec.coordinates)},
                          {"half_period", rec.drive.half_period},
                          {"horizon_periods", rec.horizon_periods},
                          {"cadence", std::string(to_string(rec.cadence))},
                          {"failures", rec.failures},
                          {"valid", rec.valid}});
    }
    for (const auto& rec : result.effective) {
        const std::string base = "effective/" + rec.label + "/";
        put(base + "mean_series.tsv", effective_series_text(rec.mean_series));
        put(base + "realizations.tsv", effective_realizations_text(rec));
        points.push_back({{"label", rec.label},
                          {"type", "effective"},
                          {"hamiltonian", std::string(to_string(rec.kind))},
                          {"coordinates", coordinates_json(rec.coordinates)},
                          {"total_time", rec.total_time},
                          {"failures", rec.failures},
                          {"valid", rec.valid}});
    }
    if (!result.notes.empty()) {
        std::string text;
        for (const auto& n : result.notes) text += n + "\n";
        put("notes.txt", text);
    }

    nlohmann::json manifest;
    manifest["schema_version"] = kBundleSchemaVersion;
    manifest["version"] = std::string(kLibraryVersion);
    manifest["spec_hash"] = spec_hash(result.spec);
    manifest["seed"] = result.spec.seed;
    manifest["spec"] = config_json(result.spec);
    manifest["valid"] = result.valid();
    manifest["points"] = points;
    manifest["files"] = files;
    manifest["created_utc"] = utc_timestamp();
    put("manifest.json", manifest.dump(2) + "\n");
    return files;
}

/// Whitespace-separated text table with a header line. Cells are kept as
/// text; numeric access goes through numbers().
struct TextTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> find(std::string_view name) const
    {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (columns[c] == name) return c;
        }
        return std::nullopt;
    }

    /// Values of one column. Non-numeric cells ("censored", "nan") become NaN.
    std::vector<double> numbers(std::size_t column) const
    {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& row : rows) {
            const std::string& cell = row.at(column);
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            out.push_back(end != cell.c_str() && *end == '\0' ? v : std::numeric_limits<double>::quiet_NaN());
        }
        return out;
    }
};

inline bool is_number(const std::string& s)
{
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return !s.empty() && end != s.c_str() && *end == '\0';
}

/// Parses a table. When the first line contains a non-numeric cell it is the
/// header; otherwise columns are named c0, c1, ... Lines starting with '#'
/// are skipped.
inline TextTable parse_text_table(std::string_view text, const std::string& origin = "table")
{
    TextTable t;
    std::istringstream in{std::string(text)};
    std::string line;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream cells(line);
        std::vector<std::string> row;
        for (std::string cell; cells >> cell;) row.push_back(cell);
        if (row.empty()) continue;
        if (first) {
            first = false;
            bool header = false;
            for (const auto& c : row) header = header || !is_number(c);
            if (header) {
                t.columns = std::move(row);
                continue;
            }
            for (std::size_t c = 0; c < row.size(); ++c) t.columns.push_back("c" + std::to_string(c));
        }
        if (row.size() != t.columns.size()) {
            throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": expected "
                                        + std::to_string(t.columns.size()) + " cells, found "
                                        + std::to_string(row.size()));
        }
        t.rows.push_back(std::move(row));
    }
    if (t.columns.empty()) throw std::invalid_argument(origin + ": empty table");
    return t;
}

inline std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BundleIoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw BundleIoError("cannot read " + path.string());
    return buf.str();
}

inline TextTable read_text_table(const std::filesystem::path& path)
{
    return parse_text_table(read_text_file(path), path.string());
}

}  // namespace cldtc
