// Acceptance suite: one PASS/FAIL line per primary criterion.
//
//   cldtc_acceptance            run everything
//   cldtc_acceptance norm dtc   run the criteria whose key contains a word
//
// Exit status is 0 only when every selected criterion passes.

#include "cldtc/cldtc.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace cldtc;

namespace {

constexpr double kPi = std::numbers::pi;

// Pinned tolerances and thresholds.
constexpr double kNormTolerance = 1e-10;
constexpr std::size_t kNormPeriods = 100'000;
constexpr double kOracleTolerance = 1e-8;
constexpr double kOrderLow = 3.2;
constexpr double kOrderHigh = 4.8;
constexpr double kAlternationShare = 0.95;
constexpr double kPeakTolerance = 1e-3;
constexpr double kMinRSquared = 0.9;
constexpr double kMinFraction = 0.8;
constexpr double kSplitTolerance = 5e-3;
constexpr double kMinTauHighEnergy = 100.0;
constexpr std::size_t kMaxLowEnergyWindow = 10;
constexpr double kDecorrelatorTolerance = 0.02;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string key;
    std::string title;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string show(const std::optional<double>& v) { return v ? fmt("%.1f", *v) : std::string("censored"); }

SpinChain random_chain(std::size_t n, std::uint64_t seed)
{
    RandomStream rng(seed);
    std::vector<SpinVector> s;
    for (std::size_t i = 0; i < n; ++i) {
        s.push_back(SpinVector::from_angles(std::acos(rng.uniform(-1, 1)), rng.uniform(0, 2 * kPi)));
    }
    return SpinChain(std::move(s));
}

double max_component_gap(const SpinChain& a, const SpinChain& b)
{
    double g = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        g = std::max({g, std::abs(a[i].x - b[i].x), std::abs(a[i].y - b[i].y), std::abs(a[i].z - b[i].z)});
    }
    return g;
}

ScenarioSpec fig2_at_pi()
{
    ScenarioSpec s = preset("fig2");
    s.kind = ScenarioKind::dtc_baseline;
    s.omega_over_pi = 1.0;
    s.realizations = 20;
    return s;
}

Outcome norm_conservation()
{
    const SpinChain start = sample_initial_chain({}, 100, derive_seed(1, 0));
    FloquetPropagator prop(start, DriveParams::reference());
    double worst = 0;
    for (std::size_t m = 0; m < kNormPeriods; ++m) {
        prop.advance_period();
        if (m % 1000 == 999) {
            for (const auto& s : prop.view()) worst = std::max(worst, std::abs(s.norm() - 1.0));
        }
    }
    for (const auto& s : prop.view()) worst = std::max(worst, std::abs(s.norm() - 1.0));
    return {worst <= kNormTolerance, fmt("max ||S_i|-1| = %.2e over %zu periods (limit %.0e)", worst, kNormPeriods,
                                         kNormTolerance)};
}

Outcome oracle_equivalence()
{
    DriveParams p = DriveParams::reference();
    double worst = 0;
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
        SpinChain exact = random_chain(4, 100 + trial);
        SpinChain ref = exact;
        for (int m = 0; m < 10; ++m) {
            exact = one_period(exact, p);
            std::vector<SpinVector> flipped;
            for (const auto& s : ref) {
                // Flip as an explicit x-rotation matrix.
                const double c = std::cos(kPi + p.delta_r), sn = std::sin(kPi + p.delta_r);
                flipped.push_back({s.x, c * s.y - sn * s.z, sn * s.y + c * s.z});
            }
            ref = ode_oracle(SpinChain(flipped), OracleHamiltonian::hz, p, p.half_period).chain;
            ref = ode_oracle(ref, OracleHamiltonian::hx, p, p.half_period).chain;
        }
        worst = std::max(worst, max_component_gap(exact, ref));
    }
    return {worst <= kOracleTolerance,
            fmt("max component gap %.2e over 5 random N=4 chains x 10 periods (limit %.0e)", worst, kOracleTolerance)};
}

Outcome integrator_order()
{
    const SpinHamiltonian h = SpinHamiltonian::d0(DriveParams::reference());
    const SpinChain c = random_chain(6, 77);
    const SpinChain ref = ode_oracle(c, h, 10.0).chain;
    auto err = [&](double dt) {
        return max_component_gap(evolve_effective(c, h, {dt, SplittingScheme::strang2, dt}, 10.0,
                                                  [](const EffectivePoint&) {}),
                                 ref);
    };
    const double e1 = err(0.04);
    const double e2 = err(0.02);
    const double ratio = e1 / e2;
    return {ratio >= kOrderLow && ratio <= kOrderHigh,
            fmt("error(dt=0.04)=%.3e error(dt=0.02)=%.3e ratio %.3f (want [%.1f, %.1f])", e1, e2, ratio, kOrderLow,
                kOrderHigh)};
}

Outcome dtc_subharmonic()
{
    ScenarioSpec s = fig2_at_pi();
    s.horizon_periods = 500;
    s.fourier_window = 500;
    const ScenarioResult r = run_scenario(s);
    const FloquetRecord& rec = r.floquet.at(0);
    const auto mz = rec.mean_per_period(&ObservableSample::mz);
    const double share = alternation_fraction(mz, 10, 500);
    const double peak = rec.mean_analysis.peak_frequency;
    const bool ok = rec.valid && share >= kAlternationShare && std::abs(peak - kPi) <= kPeakTolerance;
    return {ok, fmt("sign alternation in periods [10,500]: %.3f (want >= %.2f); mean-Mz FT peak %.6f rad, |peak-pi| = "
                    "%.1e (limit %.0e); mean f = %.3f",
                    share, kAlternationShare, peak, std::abs(peak - kPi), kPeakTolerance,
                    rec.mean_analysis.crystalline_fraction)};
}

Outcome exponential_growth()
{
    ScenarioSpec s = preset("fig2");
    s.realizations = 20;
    s.omega_over_pi_grid = {0.8, 0.9, 1.0, 1.1, 1.2};
    const ScenarioResult r = run_scenario(s);
    const Table& t = r.table("tau_vs_omega");
    std::string detail;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        detail += fmt("w/pi=%.1f tau*=%.1f+-%.1f (censored %g); ", t.at(i, "omega_over_pi"), t.at(i, "tau_mean"),
                      t.at(i, "tau_sd"), t.at(i, "tau_censored"));
    }
    if (!r.fit || !r.fit->ok) return {false, detail + "fit unavailable"};
    const auto& f = r.fit->fit;
    const bool ok = f.slope > 0 && f.r_squared > kMinRSquared && r.fit->excluded == 0;
    return {ok, detail + fmt("slope c = %.3f, R^2 = %.4f (want c > 0, R^2 > %.1f)", f.slope, f.r_squared, kMinRSquared)};
}

Outcome flip_error()
{
    ScenarioSpec s = preset("fig3");
    const ScenarioResult r = run_scenario(s);
    const Table& t = r.table("fraction_vs_delta_r");
    bool ok = true;
    std::string detail;
    double f_02 = NAN, f_035 = NAN, f_003 = NAN, ctl = NAN, p1 = NAN, p2 = NAN;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double dr = t.at(i, "delta_r");
        const double f = t.at(i, "f_mean");
        const double x = dr / kPi;
        const bool in_window = x >= -0.1 - 1e-12 && x <= 0.27 + 1e-12;
        if (in_window && !(f >= kMinFraction)) ok = false;
        detail += fmt("dr=%.4f(%.3fpi) f=%.3f%s; ", dr, x, f, in_window ? (f >= kMinFraction ? "" : " [<0.8]") : "");
        if (std::abs(x - 0.2) < 1e-9) f_02 = f;
        if (std::abs(x - 0.35) < 1e-9) f_035 = f;
        if (std::abs(dr - 0.03) < 1e-12) {
            f_003 = f;
            ctl = t.at(i, "control_f_mean");
            p1 = t.at(i, "control_peak_1");
            p2 = t.at(i, "control_peak_2");
        }
    }
    const bool drop = f_035 < f_02;
    // Free rotation by pi + 0.03 per period: peaks at +-(pi - 0.03), one on
    // each side of the folded pi line.
    const bool split = std::abs(std::abs(p1) - (kPi - 0.03)) <= kSplitTolerance
                       && std::abs(std::abs(p2) - (kPi - 0.03)) <= kSplitTolerance && p1 * p2 < 0;
    const bool control_lower = ctl < f_003;
    ok = ok && drop && split && control_lower;
    detail += fmt("f(0.35pi)<f(0.2pi): %s; control peaks %.4f, %.4f split: %s; control f=%.3f < %.3f: %s",
                  drop ? "yes" : "no", p1, p2, split ? "yes" : "no", ctl, f_003, control_lower ? "yes" : "no");
    return {ok, detail};
}

Outcome initial_state()
{
    ScenarioSpec s = fig2_at_pi();
    s.kind = ScenarioKind::initial_state_sweep;
    s.horizon_periods = 2000;
    s.theta_bar_grid = {kPi, 0.0, kPi / 2};
    const ScenarioResult r = run_scenario(s);
    const FloquetRecord& high = r.floquet.at(0);
    const FloquetRecord& low = r.floquet.at(1);
    const FloquetRecord& mid = r.floquet.at(2);
    const bool high_ok = high.tau_star.count > 0 && high.tau_star.mean > kMinTauHighEnergy && high.alternating_window > 10;
    const bool low_ok = low.alternating_window <= kMaxLowEnergyWindow;
    return {high_ok && low_ok,
            fmt("theta=pi: e0=%.4f tau*=%.1f (censored %zu) alternating window %zu periods; theta=0: e0=%.4f "
                "alternating window %zu periods, tau*=%.1f (want <= %zu); [info] theta=pi/2: e0=%.4f window %zu",
                high.mean_series.front().energy_density, high.tau_star.mean, high.tau_star.censored,
                high.alternating_window, low.mean_series.front().energy_density, low.alternating_window,
                low.tau_star.mean, kMaxLowEnergyWindow, mid.mean_series.front().energy_density,
                mid.alternating_window)};
}

Outcome dx_behaviour()
{
    EnsembleSpec e;
    e.initial = {0.9 * kPi, 0.1};
    e.perturbation = {0.01};
    e.n_sites = 100;
    e.seed = ScenarioSpec{}.seed;

    EffectivePointOptions o;
    o.tau_c_window = 0;

    // (a) reference couplings: the ensemble mean decays without changing sign
    // before its crossover (threshold 0.05, 50-sample persistence), and no
    // single realization changes sign before its own tau_c.
    e.realizations = 20;
    o.total_time = 5000;
    const EffectiveRecord base = run_effective_point({EffectiveKind::dx, DriveParams::reference(), 1.0}, e, o, "Dx_r1");
    const auto mz = base.mean_mz();
    const auto tc = crossover_time_tau_c(mz, 1.0, 0.05, 50);
    bool decay_ok = false;
    std::size_t flips = 0;
    int trend = 0;
    if (tc) {
        const auto until = static_cast<std::size_t>(*tc);
        flips = opposite_sign_samples(mz, until + 1, 0.0);
        std::vector<double> mag;
        for (std::size_t k = 0; k <= until; ++k) mag.push_back(std::abs(mz[k]));
        trend = mag.size() >= 3 ? stats::mann_kendall(mag).direction : 0;
        decay_ok = flips == 0 && trend == -1 && base.realizations_with_sign_change == 0;
    }
    std::string detail = fmt("r=1: mean-series tau_c=%s, opposite-sign samples before it %zu, |Mz| trend %s, "
                             "realizations changing sign before own tau_c %zu/%zu; ",
                             show(tc).c_str(), flips, trend < 0 ? "decreasing" : "not decreasing",
                             base.realizations_with_sign_change, base.realizations.size());

    // (b) mean tau_c over 50 realizations against the rescaling ratio.
    e.realizations = 50;
    o.total_time = 2000;
    std::vector<double> means;
    bool finite = true;
    for (double r : {1 / 0.09, 1 / 0.07, 1 / 0.05}) {
        const EffectiveRecord rec = run_effective_point({EffectiveKind::dx, DriveParams::reference(), r}, e, o, "Dx");
        means.push_back(rec.tau_c.count ? rec.tau_c.mean : NAN);
        finite = finite && rec.tau_c.censored == 0;
        // Sign changes here are informational: at large r the crossing is
        // faster than the unit sample interval.
        detail += fmt("r=%.2f: mean tau_c=%.1f+-%.1f (censored %zu) [info: sign changes %zu, mean-series tau_c %s]; ",
                      r, rec.tau_c.mean, rec.tau_c.sd, rec.tau_c.censored, rec.realizations_with_sign_change,
                      show(rec.mean_series_tau_c).c_str());
    }
    const bool monotone = means[0] > means[1] && means[1] > means[2];
    detail += fmt("mean tau_c decreasing in r: %s", monotone ? "yes" : "no");
    return {decay_ok && finite && monotone, detail};
}

Outcome saturation()
{
    ScenarioSpec s = preset("fig5");
    s.rescale_grid = {1 / 0.05};
    s.realizations = 10;
    const ScenarioResult r = run_scenario(s);
    const Table& t = r.table("tau_vs_omega_rescaled");
    double m[3], sd[3], cens = 0, total = 0;
    std::string detail;
    for (std::size_t i = 0; i < 3; ++i) {
        m[i] = t.at(i, "tau_mean");
        sd[i] = t.at(i, "tau_sd");
        cens += t.at(i, "tau_censored");
        total += t.at(i, "tau_censored") + t.at(i, "tau_count");
        detail += fmt("w/pi=%.1f tau*=%.1f+-%.1f periods (%.1f time units); ", t.at(i, "omega_over_pi"), m[i], sd[i],
                      t.at(i, "tau_mean_time"));
    }
    const Table& c = r.table("tau_c_vs_rescale");
    detail += fmt("D_x tau_c=%.1f+-%.1f; censored %g/%g at horizon %zu; ", c.at(0, "tau_c_mean"), c.at(0, "tau_c_sd"),
                  cens, total, s.horizon_periods);
    const bool flat = std::abs(m[1] - m[2]) < sd[1] + sd[2];
    const bool rising = m[0] + sd[0] < m[1] - sd[1];
    detail += fmt("top two within error bars: %s; lowest significantly smaller: %s", flat ? "yes" : "no",
                  rising ? "yes" : "no");
    return {cens == 0 && flat && rising, detail};
}

Outcome decorrelator_norm()
{
    const SpinChain a = random_chain(10'000, derive_seed(99, 0));
    const SpinChain b = random_chain(10'000, derive_seed(99, 1));
    const double d = decorrelator(a, b);
    return {std::abs(d - 1.0) <= kDecorrelatorTolerance,
            fmt("d = %.4f for independent uniform chains, N = 10^4 (want 1 +- %.2f)", d, kDecorrelatorTolerance)};
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> criteria{
        {"norm", "Norm conservation", norm_conservation},
        {"oracle", "Oracle equivalence", oracle_equivalence},
        {"order", "Integrator order", integrator_order},
        {"dtc", "DTC subharmonic", dtc_subharmonic},
        {"growth", "Exponential tau* growth", exponential_growth},
        {"flip", "Flip-error robustness", flip_error},
        {"initial", "Initial-state dependence", initial_state},
        {"dx", "D_x behaviour", dx_behaviour},
        {"saturation", "Saturation", saturation},
        {"decorrelator", "Decorrelator normalization", decorrelator_norm},
    };
    std::vector<std::string> filters(argv + 1, argv + argc);
    int failed = 0;
    int ran = 0;
    for (const auto& c : criteria) {
        if (!filters.empty()) {
            bool hit = false;
            for (const auto& f : filters) hit = hit || c.key.find(f) != std::string::npos;
            if (!hit) continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s  %-28s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.title.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
        ++ran;
        failed += !o.pass;
    }
    std::printf("%d/%d criteria passed\n", ran - failed, ran);
    return failed == 0 ? 0 : 1;
}
