#pragma once

#include "cldtc/bundle.hpp"
#include "cldtc/config.hpp"
#include "cldtc/experiments.hpp"
#include "cldtc/spectral.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cldtc {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_validation = 2,
    exit_io = 3,
    exit_runtime = 4,
};

namespace detail {

struct RunFlags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> realizations;
    std::optional<std::size_t> horizon;
    std::optional<std::size_t> threads;
    std::string preset;
    bool strict = false;
};

inline void add_run_flags(CLI::App& cmd, RunFlags& f)
{
    cmd.add_option("config", f.config, "Scenario config (JSON)");
    cmd.add_option("--out", f.out, "Bundle directory (default: output_dir from the config)");
    cmd.add_option("--seed", f.seed, "Master seed override");
    cmd.add_option("--realizations", f.realizations, "Realization count override");
    cmd.add_option("--horizon", f.horizon, "Horizon override, drive periods");
    cmd.add_option("--threads", f.threads, "Worker threads (0 = auto)");
    cmd.add_option("--preset", f.preset, "Start from a named preset; config keys override it");
    cmd.add_flag("--strict-config", f.strict, "Reject unknown config keys");
}

inline ScenarioSpec resolve_spec(const RunFlags& f, std::ostream& err)
{
    ScenarioSpec spec;
    if (f.config.empty()) {
        if (f.preset.empty()) throw CLI::ValidationError("config", "a config file or --preset is required");
        spec = cldtc::preset(f.preset);
    } else {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(read_text_file(f.config));
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(std::string("config: malformed JSON: ") + e.what());
        } catch (const BundleIoError& e) {
            throw ConfigIoError(e.what());
        }
        if (!f.preset.empty() && doc.is_object() && !doc.contains("preset")) doc["preset"] = f.preset;
        ParsedConfig parsed = spec_from_json(doc, {f.strict});
        for (const auto& w : parsed.warnings) err << "warning: " << w << "\n";
        spec = std::move(parsed.spec);
    }
    if (f.seed) spec.seed = *f.seed;
    if (f.realizations) spec.realizations = *f.realizations;
    if (f.horizon) spec.horizon_periods = *f.horizon;
    if (f.threads) spec.threads = *f.threads;
    spec.validate();
    return spec;
}

inline void print_table(const Table& t, std::ostream& out)
{
    out << "# " << t.name << "\n" << table_text(t);
}

inline int run_and_write(const ScenarioSpec& spec, const std::string& out_dir, std::ostream& out)
{
    const ScenarioResult result = run_scenario(spec);
    const std::filesystem::path dir = std::filesystem::path(out_dir.empty() ? spec.output_dir : out_dir);
    const auto files = write_bundle(result, dir);
    for (const auto& t : result.tables) print_table(t, out);
    if (result.fit) {
        const auto& f = *result.fit;
        out << "# fit log(tau*) = a + c*omega\n" << fit_text(f);
    }
    for (const auto& n : result.notes) out << "note: " << n << "\n";
    out << "wrote " << files.size() << " files to " << dir.string() << "\n";
    return result.valid() ? exit_ok : exit_runtime;
}

/// Picks the series column: the named one, else "Mz", else the only or last
/// numeric column. Rows with a phase column keep only stroboscopic samples.
inline std::vector<double> series_from_table(const TextTable& t, const std::string& column)
{
    std::optional<std::size_t> c;
    if (!column.empty()) {
        c = t.find(column);
        if (!c) throw std::invalid_argument("series file has no column \"" + column + "\"");
    } else {
        c = t.find("Mz");
        if (!c) c = t.columns.size() - 1;
    }
    const auto phase = t.find("phase");
    const auto values = t.numbers(*c);
    std::vector<double> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (phase && t.rows[r][*phase] != to_string(Phase::after_x)) continue;
        if (!std::isfinite(values[r])) {
            throw std::invalid_argument("series file: non-numeric value \"" + t.rows[r][*c] + "\" in row "
                                        + std::to_string(r + 1));
        }
        out.push_back(values[r]);
    }
    return out;
}

}  // namespace detail

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Classical Floquet spin-chain time-crystal simulator"};
    app.name("cldtc");
    app.require_subcommand(1);

    detail::RunFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "Run any scenario and write a result bundle");
    detail::add_run_flags(*simulate, sim_flags);

    detail::RunFlags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "Run a sweep scenario and write a result bundle");
    detail::add_run_flags(*sweep, sweep_flags);

    std::string series_file;
    std::string series_column;
    std::string spectrum_out;
    std::size_t window = 500;
    double grid_spacing = 1e-3;
    bool include_dc = false;
    std::size_t halfwidth = 0;
    auto* spectrum = app.add_subcommand("spectrum", "Spectrum, peak and crystalline fraction of a series");
    spectrum->add_option("series-file", series_file, "Whitespace-separated series")->required();
    spectrum->add_option("--column", series_column, "Column to analyse (default Mz, else the last)");
    spectrum->add_option("--window", window, "Leading samples used")->check(CLI::PositiveNumber);
    spectrum->add_option("--grid-spacing", grid_spacing, "Dense grid spacing, rad")->check(CLI::PositiveNumber);
    spectrum->add_flag("--include-dc", include_dc, "Let the peak search see the DC lobe");
    spectrum->add_option("--halfwidth", halfwidth, "Peak bins on each side counted in f");
    spectrum->add_option("--out", spectrum_out, "Write the dense spectrum here");

    std::string table_file;
    std::string fit_out;
    auto* fit_tau = app.add_subcommand("fit-tau", "Fit log(mean tau*) = a + c*omega");
    fit_tau->add_option("table-file", table_file, "Table with omega and mean_tau (or tau_mean) columns")->required();
    fit_tau->add_option("--out", fit_out, "Write the fit summary here");

    std::string preset_name;
    std::string preset_out;
    auto* preset_cmd = app.add_subcommand("preset", "Print the config of a named preset");
    preset_cmd->add_option("name", preset_name, "fig2 .. fig7")->required();
    preset_cmd->add_option("--out", preset_out, "Write the config here instead of stdout");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (simulate->parsed()) {
            return detail::run_and_write(detail::resolve_spec(sim_flags, err), sim_flags.out, out);
        }
        if (sweep->parsed()) {
            const ScenarioSpec spec = detail::resolve_spec(sweep_flags, err);
            if (!is_sweep(spec.kind)) {
                err << "error: kind: \"" << to_string(spec.kind) << "\" is not a sweep; use simulate\n";
                return exit_validation;
            }
            return detail::run_and_write(spec, sweep_flags.out, out);
        }
        if (spectrum->parsed()) {
            const auto series = detail::series_from_table(read_text_table(series_file), series_column);
            const SpectralConfig cfg{grid_spacing, window, {!include_dc, halfwidth}};
            const SubharmonicAnalysis a = analyze_subharmonic(series, cfg);
            out << "samples\t" << std::min(series.size(), window) << "\n";
            out << "peak_frequency\t" << format_number(a.peak_frequency) << "\n";
            out << "crystalline_fraction\t" << format_number(a.crystalline_fraction) << "\n";
            if (!spectrum_out.empty()) {
                write_file_atomic(spectrum_out, spectrum_text(dtft(leading_window(series, window), grid_spacing)));
            }
            return exit_ok;
        }
        if (fit_tau->parsed()) {
            const TextTable t = read_text_table(table_file);
            auto omega = t.find("omega");
            auto tau = t.find("mean_tau");
            if (!tau) tau = t.find("tau_mean");
            if (!omega || !tau) throw std::invalid_argument(table_file + ": need columns omega and mean_tau");
            const FitSummary f = fit_exponential(t.numbers(*omega), t.numbers(*tau));
            if (!f.ok) throw std::invalid_argument("fit-tau: " + f.note);
            const std::string text = fit_text(f);
            out << text;
            if (!fit_out.empty()) write_file_atomic(fit_out, text);
            return exit_ok;
        }
        if (preset_cmd->parsed()) {
            const std::string text = emit_config(preset(preset_name));
            if (preset_out.empty()) out << text;
            else write_file_atomic(preset_out, text);
            return exit_ok;
        }
    } catch (const ConfigIoError& e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const BundleIoError& e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_usage;
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(std::move(args), out, err);
}

}  // namespace cldtc
