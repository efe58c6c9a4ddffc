#pragma once

#include "cldtc/drive.hpp"
#include "cldtc/effective.hpp"
#include "cldtc/ensemble.hpp"
#include "cldtc/observables.hpp"
#include "cldtc/parallel.hpp"
#include "cldtc/spectral.hpp"
#include "cldtc/stats.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <algorithm>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cldtc {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class ScenarioKind {
    dtc_baseline,
    freq_sweep,
    flip_error_sweep,
    initial_state_sweep,
    effective_dynamics,
    saturation_sweep,
    alt_params,
};

inline constexpr std::pair<ScenarioKind, std::string_view> kScenarioKindNames[] = {
    {ScenarioKind::dtc_baseline, "dtc_baseline"},
    {ScenarioKind::freq_sweep, "freq_sweep"},
    {ScenarioKind::flip_error_sweep, "flip_error_sweep"},
    {ScenarioKind::initial_state_sweep, "initial_state_sweep"},
    {ScenarioKind::effective_dynamics, "effective_dynamics"},
    {ScenarioKind::saturation_sweep, "saturation_sweep"},
    {ScenarioKind::alt_params, "alt_params"},
};

inline std::string_view to_string(ScenarioKind k) noexcept
{
    for (const auto& [kind, name] : kScenarioKindNames) {
        if (kind == k) return name;
    }
    return "dtc_baseline";
}

inline ScenarioKind parse_scenario_kind(std::string_view s)
{
    for (const auto& [kind, name] : kScenarioKindNames) {
        if (name == s) return kind;
    }
    throw std::invalid_argument("kind: unknown scenario kind \"" + std::string(s) + "\"");
}

inline bool is_sweep(ScenarioKind k) noexcept
{
    return k == ScenarioKind::freq_sweep || k == ScenarioKind::flip_error_sweep
           || k == ScenarioKind::initial_state_sweep || k == ScenarioKind::saturation_sweep;
}

/// Whether a derived scalar is extracted per realization and then averaged,
/// or once from the ensemble-mean series.
enum class AggregationMode { per_realization, ensemble_mean };

inline std::string_view to_string(AggregationMode m) noexcept
{
    return m == AggregationMode::per_realization ? "per_realization" : "ensemble_mean";
}

inline AggregationMode parse_aggregation_mode(std::string_view s)
{
    if (s == "per_realization") return AggregationMode::per_realization;
    if (s == "ensemble_mean") return AggregationMode::ensemble_mean;
    throw std::invalid_argument("expected \"per_realization\" or \"ensemble_mean\", got \"" + std::string(s) + "\"");
}

/// Everything needed to reproduce one experiment. Output is a pure function
/// of this value.
struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::dtc_baseline;

    // Drive. When omega_over_pi is set it determines drive.half_period.
    DriveParams drive = DriveParams::reference();
    FrequencyConvention frequency_convention = FrequencyConvention::pi_over_T;
    std::optional<double> omega_over_pi = 1.0;

    // Ensemble.
    std::size_t n_sites = 100;
    double w = 0.1;
    double delta = 0.01;
    double theta_bar = std::numbers::pi;
    std::size_t realizations = 20;
    std::uint64_t seed = 20240601;

    // Floquet horizon and sampling.
    std::size_t horizon_periods = 10'000;
    bool adaptive_horizon = false;
    std::size_t max_horizon_periods = 200'000;
    Cadence cadence = Cadence::half_period;
    std::size_t threads = 0;

    // Thermalization time.
    double d_threshold = 0.9;
    AggregationMode tau_mode = AggregationMode::per_realization;

    // Spectrum and crystalline fraction.
    std::size_t fourier_window = 500;
    double grid_spacing = 1e-3;
    bool exclude_dc = true;
    std::size_t peak_halfwidth = 0;
    AggregationMode f_mode = AggregationMode::per_realization;
    bool trivial_control = true;
    double alternation_floor = 0.05;

    // Sweep grids.
    std::vector<double> omega_over_pi_grid;
    std::vector<double> delta_r_grid;
    std::vector<double> theta_bar_grid;
    std::vector<double> rescale_grid;
    double rescale_ratio = 1.0;

    // Effective-Hamiltonian dynamics.
    std::vector<EffectiveKind> effective_kinds{EffectiveKind::d0, EffectiveKind::dx};
    double dt = 0.02;
    double effective_time = 2000.0;
    double sample_interval = 1.0;
    double tau_c_threshold = 0.05;
    std::size_t tau_c_window = 0;
    AggregationMode tau_c_mode = AggregationMode::per_realization;

    bool save_realizations = false;
    std::string output_dir = "results";

    DriveParams resolved_drive() const
    {
        DriveParams p = drive;
        if (omega_over_pi) p.half_period = DriveParams::half_period_from_omega(*omega_over_pi * std::numbers::pi, frequency_convention);
        return p;
    }

    EnsembleSpec ensemble(double mean_polar_angle) const
    {
        EnsembleSpec e;
        e.initial = {mean_polar_angle, w};
        e.perturbation = {delta};
        e.n_sites = n_sites;
        e.realizations = realizations;
        e.seed = seed;
        return e;
    }

    SpectralConfig spectral() const { return {grid_spacing, fourier_window, {exclude_dc, peak_halfwidth}}; }

    /// Throws std::invalid_argument naming the offending key.
    void validate() const
    {
        auto fail = [](const std::string& key, const std::string& domain) {
            throw std::invalid_argument(key + ": expected " + domain);
        };
        if (!std::isfinite(w) || w < 0.0) fail("w", "a finite value >= 0");
        if (!std::isfinite(delta) || delta < 0.0) fail("delta", "a finite value >= 0");
        if (n_sites < 2) fail("n_sites", "an integer >= 2");
        if (realizations < 1) fail("realizations", "an integer >= 1");
        if (!std::isfinite(theta_bar)) fail("theta_bar", "a finite angle in radians");
        if (omega_over_pi && (!std::isfinite(*omega_over_pi) || *omega_over_pi <= 0.0)) {
            fail("omega_over_pi", "a finite value > 0");
        }
        if (!omega_over_pi && (!std::isfinite(drive.half_period) || drive.half_period <= 0.0)) {
            fail("half_period", "a finite value > 0");
        }
        const std::pair<const char*, double> params[] = {
            {"j_z", drive.j_z}, {"j_x", drive.j_x}, {"b_z", drive.b_z}, {"b_x", drive.b_x}, {"delta_r", drive.delta_r}};
        for (const auto& [key, v] : params) {
            if (!std::isfinite(v)) fail(key, "a finite real");
        }
        if (!(d_threshold > 0.0)) fail("d_threshold", "a value > 0");
        if (fourier_window < 2) fail("fourier_window", "an integer >= 2");
        if (!(grid_spacing > 0.0) || grid_spacing > 2.0 * std::numbers::pi) fail("grid_spacing", "a value in (0, 2pi]");
        if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt", "a finite value > 0");
        if (!(effective_time >= 0.0) || !std::isfinite(effective_time)) fail("effective_time", "a finite value >= 0");
        if (!(tau_c_threshold > 0.0)) fail("tau_c_threshold", "a value > 0");
        if (!(alternation_floor >= 0.0)) fail("alternation_floor", "a value >= 0");
        if (!(rescale_ratio > 0.0) || !std::isfinite(rescale_ratio)) fail("rescale_ratio", "a finite value > 0");
        try {
            IntegratorConfig{dt, SplittingScheme::strang2, sample_interval}.steps_per_sample();
        } catch (const std::invalid_argument&) {
            fail("sample_interval", "a positive multiple of dt");
        }
        for (double v : omega_over_pi_grid) {
            if (!(v > 0.0) || !std::isfinite(v)) fail("omega_over_pi_grid", "finite values > 0");
        }
        for (double v : rescale_grid) {
            if (!(v > 0.0) || !std::isfinite(v)) fail("rescale_grid", "finite values > 0");
        }
        for (double v : delta_r_grid) {
            if (!std::isfinite(v)) fail("delta_r_grid", "finite values");
        }
        for (double v : theta_bar_grid) {
            if (!std::isfinite(v)) fail("theta_bar_grid", "finite values");
        }
        switch (kind) {
        case ScenarioKind::freq_sweep:
            if (omega_over_pi_grid.empty()) fail("omega_over_pi_grid", "a non-empty list for freq_sweep");
            break;
        case ScenarioKind::flip_error_sweep:
            if (delta_r_grid.empty()) fail("delta_r_grid", "a non-empty list for flip_error_sweep");
            break;
        case ScenarioKind::initial_state_sweep:
            if (theta_bar_grid.empty()) fail("theta_bar_grid", "a non-empty list for initial_state_sweep");
            break;
        case ScenarioKind::saturation_sweep:
            if (omega_over_pi_grid.empty()) fail("omega_over_pi_grid", "a non-empty list for saturation_sweep");
            if (rescale_grid.empty()) fail("rescale_grid", "a non-empty list for saturation_sweep");
            break;
        case ScenarioKind::effective_dynamics:
            if (effective_kinds.empty()) fail("effective_kinds", "a non-empty list");
            break;
        default: break;
        }
    }

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Mean and sample SD over the uncensored values.
struct Aggregate {
    double mean = kNaN;
    double sd = kNaN;
    std::size_t count = 0;
    std::size_t censored = 0;
};

inline Aggregate aggregate(std::span<const std::optional<double>> values)
{
    Aggregate a;
    std::vector<double> finite;
    for (const auto& v : values) {
        if (v) finite.push_back(*v);
        else ++a.censored;
    }
    a.count = finite.size();
    if (!finite.empty()) {
        a.mean = stats::mean(finite);
        a.sd = stats::stddev(finite);
    }
    return a;
}

struct RealizationSummary {
    std::size_t index = 0;
    RealizationSeeds seeds;
    bool ok = true;
    std::string error;
    std::optional<double> tau_star;
    double crystalline_fraction = kNaN;
    double peak_frequency = kNaN;
};

using Coordinates = std::vector<std::pair<std::string, double>>;

/// One ensemble of twin trajectories under the stroboscopic drive.
struct FloquetRecord {
    std::string label;
    Coordinates coordinates;
    DriveParams drive;
    double theta_bar = 0.0;
    std::size_t horizon_periods = 0;
    Cadence cadence = Cadence::half_period;

    std::vector<RealizationSummary> realizations;
    std::vector<ObservableSample> mean_series;
    std::vector<std::vector<ObservableSample>> realization_series;

    Aggregate tau_star;  ///< drive periods
    Aggregate fraction;
    /// Spectrum of the ensemble-mean stroboscopic M^z (leading window).
    Spectrum mean_spectrum;
    SubharmonicAnalysis mean_analysis;
    std::vector<double> mean_spectrum_peaks;
    std::size_t alternating_window = 0;
    std::size_t failures = 0;
    bool valid = true;

    std::vector<double> mean_per_period(double ObservableSample::*field) const
    {
        std::vector<double> out;
        for (const auto& s : mean_series) {
            if (s.phase == Phase::after_x) out.push_back(s.*field);
        }
        return out;
    }
};

struct EffectiveRealizationSummary {
    std::size_t index = 0;
    RealizationSeeds seeds;
    bool ok = true;
    std::string error;
    std::optional<double> tau_c;
    /// Samples with sign opposite to M^z(0) before this realization's tau_c
    /// (whole series when censored).
    std::size_t sign_changes_before_tau_c = 0;
};

/// One ensemble evolved under D0 or D_x (no flips).
struct EffectiveRecord {
    std::string label;
    Coordinates coordinates;
    EffectiveKind kind = EffectiveKind::dx;
    double rescale_ratio = 1.0;
    double theta_bar = 0.0;
    double total_time = 0.0;
    double sample_interval = 1.0;

    std::vector<EffectiveRealizationSummary> realizations;
    std::vector<EffectiveSample> mean_series;
    Aggregate tau_c;
    /// Crossover of the ensemble-mean M^z series (same threshold/window).
    std::optional<double> mean_series_tau_c;
    /// Ensemble-mean samples with sign opposite to the initial one and
    /// |M^z| >= alternation floor (magnetization flip events).
    std::size_t flip_samples = 0;
    /// Realizations whose M^z changes sign before their own tau_c.
    std::size_t realizations_with_sign_change = 0;
    std::size_t failures = 0;
    bool valid = true;

    std::vector<double> mean_mz() const
    {
        std::vector<double> out;
        for (const auto& s : mean_series) out.push_back(s.mz);
        return out;
    }
};

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    double at(std::size_t row, std::string_view column) const
    {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (columns[c] == column) return rows.at(row).at(c);
        }
        throw std::out_of_range("Table " + name + ": no column " + std::string(column));
    }
};

/// Least-squares fit of log(mean tau*) against omega.
struct FitSummary {
    stats::LinearFit fit;
    std::vector<double> omega;
    std::vector<double> mean_tau;
    std::size_t excluded = 0;
    bool ok = false;
    std::string note;
};

inline FitSummary fit_exponential(std::span<const double> omega, std::span<const double> mean_tau)
{
    FitSummary out;
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < omega.size(); ++i) {
        if (std::isfinite(mean_tau[i]) && mean_tau[i] > 0.0) {
            out.omega.push_back(omega[i]);
            out.mean_tau.push_back(mean_tau[i]);
            x.push_back(omega[i]);
            y.push_back(std::log(mean_tau[i]));
        } else {
            ++out.excluded;
        }
    }
    if (x.size() < 2) {
        out.note = "fewer than two uncensored points";
        return out;
    }
    try {
        out.fit = stats::linear_fit(x, y);
        out.ok = true;
    } catch (const std::invalid_argument& e) {
        out.note = e.what();
    }
    return out;
}

struct ScenarioResult {
    ScenarioSpec spec;
    std::vector<FloquetRecord> floquet;
    std::vector<EffectiveRecord> effective;
    std::vector<Table> tables;
    std::optional<FitSummary> fit;
    std::vector<std::string> notes;

    bool valid() const
    {
        for (const auto& r : floquet) {
            if (!r.valid) return false;
        }
        for (const auto& r : effective) {
            if (!r.valid) return false;
        }
        return true;
    }

    const Table& table(std::string_view name) const
    {
        for (const auto& t : tables) {
            if (t.name == name) return t;
        }
        throw std::out_of_range("no table " + std::string(name));
    }
};

/// Options for one ensemble point of the stroboscopic drive.
struct PointOptions {
    std::size_t horizon_periods = 10'000;
    Cadence cadence = Cadence::half_period;
    double d_threshold = 0.9;
    AggregationMode tau_mode = AggregationMode::per_realization;
    AggregationMode f_mode = AggregationMode::per_realization;
    SpectralConfig spectral;
    double alternation_floor = 0.05;
    bool save_realizations = false;
    std::size_t threads = 0;

    static PointOptions from(const ScenarioSpec& spec, std::size_t horizon)
    {
        return {horizon, spec.cadence, spec.d_threshold, spec.tau_mode, spec.f_mode, spec.spectral(),
                spec.alternation_floor, spec.save_realizations, spec.threads};
    }
};

/// Minimum share of realizations that must succeed for a valid ensemble.
inline constexpr double kMinSuccessShare = 0.9;

inline std::string format_label(std::string_view prefix, double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return std::string(prefix) + "_" + buf;
}

inline FloquetRecord run_floquet_point(const DriveParams& drive, const EnsembleSpec& ensemble,
                                       const PointOptions& options, std::string label = "baseline",
                                       Coordinates coordinates = {})
{
    drive.validate();
    FloquetRecord rec;
    rec.label = std::move(label);
    rec.coordinates = std::move(coordinates);
    rec.drive = drive;
    rec.theta_bar = ensemble.initial.mean_polar_angle;
    rec.horizon_periods = options.horizon_periods;
    rec.cadence = options.cadence;

    const std::size_t n = ensemble.realizations;
    std::vector<std::optional<FloquetTrace>> traces(n);
    const FloquetRunOptions run_opts{options.horizon_periods, options.cadence, options.d_threshold};
    const auto errors = parallel_for(n, options.threads, [&](std::size_t r) {
        traces[r] = run_floquet_realization(drive, ensemble, r, run_opts);
    });

    rec.realizations.resize(n);
    std::vector<std::optional<double>> taus;
    std::vector<std::optional<double>> fractions;
    std::size_t ok = 0;
    for (std::size_t r = 0; r < n; ++r) {
        auto& summary = rec.realizations[r];
        summary.index = r;
        summary.seeds = realization_seeds(ensemble.seed, r);
        if (errors[r] || !traces[r]) {
            summary.ok = false;
            try {
                if (errors[r]) std::rethrow_exception(errors[r]);
            } catch (const std::exception& e) {
                summary.error = e.what();
            } catch (...) {
                summary.error = "unknown failure";
            }
            std::fprintf(stderr, "cldtc: %s realization %zu failed: %s\n", rec.label.c_str(), r,
                         summary.error.c_str());
            continue;
        }
        const FloquetTrace& t = *traces[r];
        summary.tau_star = t.tau_star;
        const auto mz = t.mz_per_period();
        const SubharmonicAnalysis a = analyze_subharmonic(mz, options.spectral);
        summary.crystalline_fraction = a.crystalline_fraction;
        summary.peak_frequency = a.peak_frequency;
        taus.push_back(t.tau_star);
        fractions.push_back(a.crystalline_fraction);
        if (ok == 0) {
            rec.mean_series = t.samples;
            for (auto& s : rec.mean_series) s.energy_density = s.mz = s.d = 0.0;
        }
        for (std::size_t k = 0; k < t.samples.size(); ++k) {
            rec.mean_series[k].energy_density += t.samples[k].energy_density;
            rec.mean_series[k].mz += t.samples[k].mz;
            rec.mean_series[k].d += t.samples[k].d;
        }
        if (options.save_realizations) rec.realization_series.push_back(t.samples);
        ++ok;
    }
    traces.clear();
    rec.failures = n - ok;
    rec.valid = n > 0 && static_cast<double>(ok) >= kMinSuccessShare * static_cast<double>(n);
    if (ok == 0) return rec;

    for (auto& s : rec.mean_series) {
        s.energy_density /= static_cast<double>(ok);
        s.mz /= static_cast<double>(ok);
        s.d /= static_cast<double>(ok);
    }
    const auto mean_mz = rec.mean_per_period(&ObservableSample::mz);
    const auto mean_d = rec.mean_per_period(&ObservableSample::d);

    if (options.tau_mode == AggregationMode::per_realization) {
        rec.tau_star = aggregate(taus);
    } else {
        const std::optional<double> tau = thermalization_time(mean_d, options.d_threshold, 1.0);
        rec.tau_star = aggregate(std::span(&tau, 1));
    }

    const auto window = leading_window(mean_mz, options.spectral.window);
    rec.mean_spectrum = dtft(window, options.spectral.grid_spacing);
    rec.mean_analysis = analyze_subharmonic(mean_mz, options.spectral);
    for (std::size_t k : local_maxima(rec.mean_spectrum, 2)) {
        rec.mean_spectrum_peaks.push_back(rec.mean_spectrum.frequency[k]);
    }
    if (options.f_mode == AggregationMode::per_realization) {
        rec.fraction = aggregate(fractions);
    } else {
        const std::optional<double> f = rec.mean_analysis.crystalline_fraction;
        rec.fraction = aggregate(std::span(&f, 1));
    }
    rec.alternating_window = longest_alternating_run(mean_mz, options.alternation_floor);
    return rec;
}

struct EffectivePointOptions {
    IntegratorConfig integrator;
    double total_time = 2000.0;
    double tau_c_threshold = 0.05;
    std::size_t tau_c_window = 0;
    AggregationMode tau_c_mode = AggregationMode::per_realization;
    double alternation_floor = 0.05;
    std::size_t threads = 0;

    static EffectivePointOptions from(const ScenarioSpec& spec)
    {
        return {{spec.dt, SplittingScheme::strang2, spec.sample_interval},
                spec.effective_time,
                spec.tau_c_threshold,
                spec.tau_c_window,
                spec.tau_c_mode,
                spec.alternation_floor,
                spec.threads};
    }
};

inline EffectiveRecord run_effective_point(const EffectiveHamiltonianSpec& h_spec, const EnsembleSpec& ensemble,
                                           const EffectivePointOptions& options, std::string label,
                                           Coordinates coordinates = {})
{
    EffectiveRecord rec;
    rec.label = std::move(label);
    rec.coordinates = std::move(coordinates);
    rec.kind = h_spec.kind;
    rec.rescale_ratio = h_spec.rescale_ratio;
    rec.theta_bar = ensemble.initial.mean_polar_angle;
    rec.total_time = options.total_time;
    rec.sample_interval = options.integrator.sample_interval;

    const std::size_t n = ensemble.realizations;
    std::vector<std::optional<EffectiveTrace>> traces(n);
    const EffectiveRunOptions run_opts{options.integrator, options.total_time, options.tau_c_threshold,
                                       options.tau_c_window};
    const auto errors = parallel_for(n, options.threads, [&](std::size_t r) {
        traces[r] = run_effective_realization(h_spec, ensemble, r, run_opts);
    });

    rec.realizations.resize(n);
    std::vector<std::optional<double>> taus;
    std::size_t ok = 0;
    for (std::size_t r = 0; r < n; ++r) {
        auto& summary = rec.realizations[r];
        summary.index = r;
        summary.seeds = realization_seeds(ensemble.seed, r);
        if (errors[r] || !traces[r]) {
            summary.ok = false;
            try {
                if (errors[r]) std::rethrow_exception(errors[r]);
            } catch (const std::exception& e) {
                summary.error = e.what();
            } catch (...) {
                summary.error = "unknown failure";
            }
            std::fprintf(stderr, "cldtc: %s realization %zu failed: %s\n", rec.label.c_str(), r,
                         summary.error.c_str());
            continue;
        }
        const EffectiveTrace& t = *traces[r];
        summary.tau_c = t.tau_c;
        taus.push_back(t.tau_c);
        {
            std::vector<double> own(t.samples.size());
            for (std::size_t k = 0; k < own.size(); ++k) own[k] = t.samples[k].mz;
            const std::size_t until =
                t.tau_c ? std::min(own.size(), static_cast<std::size_t>(std::llround(*t.tau_c / rec.sample_interval)))
                        : own.size();
            summary.sign_changes_before_tau_c = opposite_sign_samples(own, until, 0.0);
            if (summary.sign_changes_before_tau_c > 0) ++rec.realizations_with_sign_change;
        }
        if (ok == 0) {
            rec.mean_series = t.samples;
            for (auto& s : rec.mean_series) s.energy_density = s.mz = s.d = 0.0;
        }
        for (std::size_t k = 0; k < t.samples.size(); ++k) {
            rec.mean_series[k].energy_density += t.samples[k].energy_density;
            rec.mean_series[k].mz += t.samples[k].mz;
            rec.mean_series[k].d += t.samples[k].d;
        }
        ++ok;
    }
    rec.failures = n - ok;
    rec.valid = n > 0 && static_cast<double>(ok) >= kMinSuccessShare * static_cast<double>(n);
    if (ok == 0) return rec;
    for (auto& s : rec.mean_series) {
        s.energy_density /= static_cast<double>(ok);
        s.mz /= static_cast<double>(ok);
        s.d /= static_cast<double>(ok);
    }
    const auto mz = rec.mean_mz();
    rec.mean_series_tau_c = crossover_time_tau_c(mz, rec.sample_interval, options.tau_c_threshold,
                                                 options.tau_c_window);
    rec.tau_c = options.tau_c_mode == AggregationMode::per_realization
                    ? aggregate(taus)
                    : aggregate(std::span(&rec.mean_series_tau_c, 1));
    rec.flip_samples = opposite_sign_samples(mz, mz.size(), options.alternation_floor);
    return rec;
}

/// One row of a flip-error sweep.
struct FlipSweepRow {
    double delta_r = 0.0;
    Aggregate fraction;
    bool ok = true;
    std::string error;
};

/// Crystalline fraction versus flip error. A failing grid point is reported
/// in its row and does not stop the sweep.
inline std::vector<FlipSweepRow> flip_error_sweep(const DriveParams& params, const EnsembleSpec& ensemble,
                                                  std::span<const double> delta_r_grid, const PointOptions& options)
{
    if (delta_r_grid.empty()) throw std::invalid_argument("flip_error_sweep: empty grid");
    std::vector<FlipSweepRow> rows;
    for (double dr : delta_r_grid) {
        FlipSweepRow row;
        row.delta_r = dr;
        try {
            DriveParams p = params;
            p.delta_r = dr;
            const FloquetRecord rec = run_floquet_point(p, ensemble, options, format_label("delta_r", dr));
            row.fraction = rec.fraction;
            row.ok = rec.valid;
            if (!rec.valid) row.error = "too many failed realizations";
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace detail {

inline std::size_t horizon_for(const ScenarioSpec& spec, const std::vector<double>& omegas,
                               const std::vector<double>& taus, double omega)
{
    std::size_t horizon = spec.horizon_periods;
    if (!spec.adaptive_horizon) return horizon;
    const FitSummary fit = fit_exponential(omegas, taus);
    if (fit.ok && fit.fit.slope > 0.0) {
        const double predicted = std::exp(fit.fit.intercept + fit.fit.slope * omega);
        const double wanted = 20.0 * predicted;
        if (std::isfinite(wanted) && wanted > static_cast<double>(horizon)) {
            horizon = wanted >= static_cast<double>(spec.max_horizon_periods)
                          ? spec.max_horizon_periods
                          : static_cast<std::size_t>(std::ceil(wanted));
        }
    }
    return std::min(horizon, std::max(spec.max_horizon_periods, spec.horizon_periods));
}

inline double initial_energy(const FloquetRecord& rec)
{
    return rec.mean_series.empty() ? kNaN : rec.mean_series.front().energy_density;
}

}  // namespace detail

inline ScenarioResult run_dtc_baseline(const ScenarioSpec& spec)
{
    spec.validate();
    ScenarioResult out;
    out.spec = spec;
    const DriveParams drive = spec.resolved_drive();
    FloquetRecord rec = run_floquet_point(drive, spec.ensemble(spec.theta_bar), PointOptions::from(spec, spec.horizon_periods),
                                          "baseline", {{"omega_over_pi", spec.omega_over_pi.value_or(kNaN)}});
    Table t{"summary",
            {"omega", "half_period", "theta_bar", "tau_mean", "tau_sd", "tau_count", "tau_censored", "f_mean", "f_sd",
             "peak_frequency", "alternating_window", "failures"},
            {}};
    t.rows.push_back({drive.omega(spec.frequency_convention), drive.half_period, spec.theta_bar, rec.tau_star.mean,
                      rec.tau_star.sd, double(rec.tau_star.count), double(rec.tau_star.censored), rec.fraction.mean,
                      rec.fraction.sd, rec.mean_analysis.peak_frequency, double(rec.alternating_window),
                      double(rec.failures)});
    out.tables.push_back(std::move(t));
    out.floquet.push_back(std::move(rec));
    return out;
}

inline ScenarioResult run_freq_sweep(const ScenarioSpec& spec)
{
    spec.validate();
    ScenarioResult out;
    out.spec = spec;
    Table t{"tau_vs_omega",
            {"omega_over_pi", "omega", "half_period", "horizon_periods", "tau_mean", "tau_sd", "tau_count",
             "tau_censored", "f_mean"},
            {}};
    std::vector<double> fit_omega;
    std::vector<double> fit_tau;
    for (double w_over_pi : spec.omega_over_pi_grid) {
        const double omega = w_over_pi * std::numbers::pi;
        const DriveParams drive = spec.drive.with_omega(omega, spec.frequency_convention);
        const std::size_t horizon = detail::horizon_for(spec, fit_omega, fit_tau, omega);
        FloquetRecord rec = run_floquet_point(drive, spec.ensemble(spec.theta_bar), PointOptions::from(spec, horizon),
                                              format_label("omega_over_pi", w_over_pi), {{"omega_over_pi", w_over_pi}});
        if (rec.tau_star.count == 0) {
            out.notes.push_back(rec.label + ": all realizations censored at horizon " + std::to_string(horizon)
                                + " periods; excluded from fit");
        } else if (rec.tau_star.censored > 0) {
            out.notes.push_back(rec.label + ": " + std::to_string(rec.tau_star.censored)
                                + " censored realizations excluded from the mean");
        }
        t.rows.push_back({w_over_pi, omega, drive.half_period, double(horizon), rec.tau_star.mean, rec.tau_star.sd,
                          double(rec.tau_star.count), double(rec.tau_star.censored), rec.fraction.mean});
        fit_omega.push_back(omega);
        fit_tau.push_back(rec.tau_star.count > 0 ? rec.tau_star.mean : kNaN);
        out.floquet.push_back(std::move(rec));
    }
    out.fit = fit_exponential(fit_omega, fit_tau);
    out.tables.push_back(std::move(t));
    return out;
}

inline ScenarioResult run_flip_error_sweep(const ScenarioSpec& spec)
{
    spec.validate();
    ScenarioResult out;
    out.spec = spec;
    Table t{"fraction_vs_delta_r",
            {"delta_r", "delta_r_over_pi", "f_mean", "f_sd", "f_count", "mean_series_f", "peak_frequency",
             "control_f_mean", "control_peak_1", "control_peak_2", "failures"},
            {}};
    const DriveParams base = spec.resolved_drive();
    const EnsembleSpec ensemble = spec.ensemble(spec.theta_bar);
    const PointOptions options = PointOptions::from(spec, spec.horizon_periods);
    for (double dr : spec.delta_r_grid) {
        std::vector<double> row(t.columns.size(), kNaN);
        row[0] = dr;
        row[1] = dr / std::numbers::pi;
        DriveParams p = base;
        p.delta_r = dr;
        try {
            FloquetRecord rec = run_floquet_point(p, ensemble, options, format_label("delta_r", dr), {{"delta_r", dr}});
            row[2] = rec.fraction.mean;
            row[3] = rec.fraction.sd;
            row[4] = double(rec.fraction.count);
            row[5] = rec.mean_analysis.crystalline_fraction;
            row[6] = rec.mean_analysis.peak_frequency;
            row[10] = double(rec.failures);
            out.floquet.push_back(std::move(rec));
            if (spec.trivial_control) {
                DriveParams trivial{0.0, 0.0, 0.0, 0.0, p.half_period, dr};
                FloquetRecord ctl = run_floquet_point(trivial, ensemble, options, format_label("control_delta_r", dr),
                                                      {{"delta_r", dr}, {"control", 1.0}});
                row[7] = ctl.fraction.mean;
                if (!ctl.mean_spectrum_peaks.empty()) row[8] = ctl.mean_spectrum_peaks[0];
                if (ctl.mean_spectrum_peaks.size() > 1) row[9] = ctl.mean_spectrum_peaks[1];
                out.floquet.push_back(std::move(ctl));
            }
        } catch (const std::exception& e) {
            out.notes.push_back(format_label("delta_r", dr) + ": " + e.what());
        }
        t.rows.push_back(std::move(row));
    }
    out.tables.push_back(std::move(t));
    return out;
}

inline ScenarioResult run_initial_state_sweep(const ScenarioSpec& spec)
{
    spec.validate();
    ScenarioResult out;
    out.spec = spec;
    Table t{"tau_vs_theta_bar",
            {"theta_bar", "theta_bar_over_pi", "s0_z", "initial_energy_density", "tau_mean", "tau_sd", "tau_count",
             "tau_censored", "alternating_window", "f_mean"},
            {}};
    const DriveParams drive = spec.resolved_drive();
    const PointOptions options = PointOptions::from(spec, spec.horizon_periods);
    for (double theta : spec.theta_bar_grid) {
        FloquetRecord rec = run_floquet_point(drive, spec.ensemble(theta), options,
                                              format_label("theta_bar_over_pi", theta / std::numbers::pi),
                                              {{"theta_bar", theta}});
        t.rows.push_back({theta, theta / std::numbers::pi, std::cos(theta), detail::initial_energy(rec),
                          rec.tau_star.mean, rec.tau_star.sd, double(rec.tau_star.count), double(rec.tau_star.censored),
                          double(rec.alternating_window), rec.fraction.mean});
        out.floquet.push_back(std::move(rec));
    }
    out.tables.push_back(std::move(t));
    return out;
}

inline ScenarioResult run_effective_dynamics(const ScenarioSpec& spec)
{
    spec.validate();
    ScenarioResult out;
    out.spec = spec;
    Table t{"effective_dynamics",
            {"kind", "theta_bar", "theta_bar_over_pi", "rescale_ratio", "tau_c_mean", "tau_c_sd", "tau_c_count",
             "tau_c_censored", "mean_series_tau_c", "flip_samples", "realizations_with_sign_change"},
            {}};
    const DriveParams drive = spec.resolved_drive();
    const EffectivePointOptions options = EffectivePointOptions::from(spec);
    const std::vector<double> thetas = spec.theta_bar_grid.empty() ? std::vector<double>{spec.theta_bar}
                                                                    : spec.theta_bar_grid;
    for (double theta : thetas) {
        for (EffectiveKind kind : spec.effective_kinds) {
            const EffectiveHamiltonianSpec h{kind, drive, spec.rescale_ratio};
            EffectiveRecord rec = run_effective_point(
                h, spec.ensemble(theta), options,
                std::string(to_string(kind)) + "_" + format_label("theta_bar_over_pi", theta / std::numbers::pi),
                {{"theta_bar", theta}, {"kind", kind == EffectiveKind::d0 ? 0.0 : 1.0}});
            t.rows.push_back({kind == EffectiveKind::d0 ? 0.0 : 1.0, theta, theta / std::numbers::pi, spec.rescale_ratio,
                              rec.tau_c.mean, rec.tau_c.sd, double(rec.tau_c.count), double(rec.tau_c.censored),
                              rec.mean_series_tau_c.value_or(kNaN), double(rec.flip_samples),
                              double(rec.realizations_with_sign_change)});
            out.effective.push_back(std::move(rec));
        }
    }
    out.tables.push_back(std::move(t));
    return out;
}

inline ScenarioResult run_saturation_sweep(const ScenarioSpec& spec)
{
    spec.validate();
    ScenarioResult out;
    out.spec = spec;
    Table taus{"tau_vs_omega_rescaled",
               {"rescale_ratio", "omega_over_pi", "half_period", "tau_mean", "tau_sd", "tau_mean_time", "tau_sd_time",
                "tau_count", "tau_censored"},
               {}};
    Table crossovers{"tau_c_vs_rescale",
                     {"rescale_ratio", "tau_c_mean", "tau_c_sd", "tau_c_count", "tau_c_censored", "mean_series_tau_c"},
                     {}};
    const EnsembleSpec ensemble = spec.ensemble(spec.theta_bar);
    const PointOptions options = PointOptions::from(spec, spec.horizon_periods);
    std::size_t censored = 0;
    std::size_t total = 0;
    for (double r : spec.rescale_grid) {
        const DriveParams scaled = spec.drive.rescaled(r);
        for (double w_over_pi : spec.omega_over_pi_grid) {
            const DriveParams drive = scaled.with_omega(w_over_pi * std::numbers::pi, spec.frequency_convention);
            FloquetRecord rec = run_floquet_point(
                drive, ensemble, options, format_label("r", r) + "_" + format_label("omega_over_pi", w_over_pi),
                {{"rescale_ratio", r}, {"omega_over_pi", w_over_pi}});
            // One drive period corresponds to 2T of effective-Hamiltonian time.
            const double period_time = 2.0 * drive.half_period;
            taus.rows.push_back({r, w_over_pi, drive.half_period, rec.tau_star.mean, rec.tau_star.sd,
                                 rec.tau_star.mean * period_time, rec.tau_star.sd * period_time,
                                 double(rec.tau_star.count), double(rec.tau_star.censored)});
            censored += rec.tau_star.censored;
            total += rec.tau_star.count + rec.tau_star.censored;
            out.floquet.push_back(std::move(rec));
        }
        const EffectiveHamiltonianSpec h{EffectiveKind::dx, spec.drive, r};
        EffectiveRecord rec = run_effective_point(h, ensemble, EffectivePointOptions::from(spec),
                                                  "Dx_" + format_label("r", r), {{"rescale_ratio", r}});
        crossovers.rows.push_back({r, rec.tau_c.mean, rec.tau_c.sd, double(rec.tau_c.count), double(rec.tau_c.censored),
                                   rec.mean_series_tau_c.value_or(kNaN)});
        out.effective.push_back(std::move(rec));
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "censoring fraction of tau* runs: %zu/%zu at horizon %zu periods", censored, total,
                  spec.horizon_periods);
    out.notes.emplace_back(buf);
    out.tables.push_back(std::move(taus));
    out.tables.push_back(std::move(crossovers));
    return out;
}

inline ScenarioResult run_scenario(const ScenarioSpec& spec)
{
    switch (spec.kind) {
    case ScenarioKind::dtc_baseline:
    case ScenarioKind::alt_params: return run_dtc_baseline(spec);
    case ScenarioKind::freq_sweep: return run_freq_sweep(spec);
    case ScenarioKind::flip_error_sweep: return run_flip_error_sweep(spec);
    case ScenarioKind::initial_state_sweep: return run_initial_state_sweep(spec);
    case ScenarioKind::effective_dynamics: return run_effective_dynamics(spec);
    case ScenarioKind::saturation_sweep: return run_saturation_sweep(spec);
    }
    throw std::invalid_argument("run_scenario: unknown kind");
}

/// Named scenario presets.
inline const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};
    return names;
}

inline ScenarioSpec preset(std::string_view name)
{
    constexpr double pi = std::numbers::pi;
    ScenarioSpec s;
    if (name == "fig2") {
        // Observable dynamics and tau*(omega).
        s.kind = ScenarioKind::freq_sweep;
        s.omega_over_pi_grid = {0.8, 1.0, 1.2, 1.4};
    } else if (name == "fig3") {
        // Imperfect flips and crystalline fraction.
        s.kind = ScenarioKind::flip_error_sweep;
        s.realizations = 10;
        s.horizon_periods = 500;
        s.delta_r_grid = {-0.15 * pi, -0.05 * pi, 0.0, 0.03, 0.1 * pi, 0.2 * pi, 0.35 * pi};
    } else if (name == "fig4") {
        // Initial-state dependence.
        s.kind = ScenarioKind::initial_state_sweep;
        s.horizon_periods = 5'000;
        s.theta_bar_grid = {0.0, pi / 6.0, pi / 3.0, pi / 2.0, 2.0 * pi / 3.0, 5.0 * pi / 6.0, pi};
    } else if (name == "fig5") {
        // Saturation of tau* at high frequency against tau_c of D_x.
        s.kind = ScenarioKind::saturation_sweep;
        s.realizations = 10;
        s.theta_bar = 0.9 * pi;
        s.horizon_periods = 20'000;
        s.omega_over_pi_grid = {3.8, 4.6, 5.6};
        s.rescale_grid = {1.0 / 0.05, 1.0 / 0.07, 1.0 / 0.09};
        s.effective_time = 1'000.0;
    } else if (name == "fig6") {
        // D0 and D_x dynamics from several initial polar angles.
        s.kind = ScenarioKind::effective_dynamics;
        s.theta_bar_grid = {-pi / 2.0, -pi / 3.0, -pi / 6.0, 0.0, pi / 6.0, pi / 3.0, pi / 2.0};
        s.effective_time = 1'000.0;
    } else if (name == "fig7") {
        // Alternate couplings.
        s.kind = ScenarioKind::alt_params;
        s.drive = DriveParams::alternate();
        s.realizations = 30;
    } else {
        throw std::invalid_argument("unknown preset \"" + std::string(name) + "\"");
    }
    s.output_dir = "results/" + std::string(name);
    return s;
}

}  // namespace cldtc
