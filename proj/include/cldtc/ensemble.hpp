#pragma once

#include "cldtc/effective.hpp"
#include "cldtc/floquet.hpp"
#include "cldtc/observables.hpp"
#include "cldtc/rng.hpp"
#include "cldtc/sampling.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace cldtc {

/// Initial-state distribution plus the bookkeeping needed to draw a
/// reproducible ensemble of twin trajectories.
struct EnsembleSpec {
    InitialStateSpec initial;
    PerturbationSpec perturbation;
    std::size_t n_sites = 100;
    std::size_t realizations = 20;
    std::uint64_t seed = 1;
};

struct RealizationSeeds {
    std::uint64_t initial = 0;
    std::uint64_t perturbation = 0;
};

/// Realization r draws its chain from sub-stream 2r and its shadow
/// perturbation from sub-stream 2r + 1 of the master seed. The seeds do
/// not depend on any grid coordinate, so sweeps reuse the same draws at
/// every grid point.
inline RealizationSeeds realization_seeds(std::uint64_t master, std::size_t r) noexcept
{
    return {derive_seed(master, 2 * static_cast<std::uint64_t>(r)),
            derive_seed(master, 2 * static_cast<std::uint64_t>(r) + 1)};
}

struct TwinStart {
    SpinChain primary;
    SpinChain shadow;
    RealizationSeeds seeds;
};

inline TwinStart draw_twin(const EnsembleSpec& ensemble, std::size_t r)
{
    const RealizationSeeds seeds = realization_seeds(ensemble.seed, r);
    SpinChain primary = sample_initial_chain(ensemble.initial, ensemble.n_sites, seeds.initial);
    SpinChain shadow = perturb_chain(primary, ensemble.perturbation, seeds.perturbation);
    return {std::move(primary), std::move(shadow), seeds};
}

struct FloquetRunOptions {
    std::size_t horizon_periods = 10'000;
    Cadence cadence = Cadence::half_period;
    double d_threshold = 0.9;
};

/// Observables of one twin trajectory sampled at the requested cadence.
struct FloquetTrace {
    RealizationSeeds seeds;
    std::vector<ObservableSample> samples;
    std::optional<double> tau_star;  ///< drive periods

    /// Stroboscopic (after_x) values, one per completed period from 0.
    template <class Field>
    std::vector<double> per_period(Field field) const
    {
        std::vector<double> out;
        for (const auto& s : samples) {
            if (s.phase == Phase::after_x) out.push_back(field(s));
        }
        return out;
    }
    std::vector<double> mz_per_period() const { return per_period([](const auto& s) { return s.mz; }); }
    std::vector<double> d_per_period() const { return per_period([](const auto& s) { return s.d; }); }
};

inline FloquetTrace run_floquet_realization(const DriveParams& drive, const EnsembleSpec& ensemble,
                                            std::size_t r, const FloquetRunOptions& options)
{
    TwinStart start = draw_twin(ensemble, r);
    TwinTrajectory twin(start.primary, start.shadow, drive);
    FloquetTrace trace;
    trace.seeds = start.seeds;
    trace.samples.reserve((options.horizon_periods + 1) * (options.cadence == Cadence::period ? 1 : 2));
    auto record = [&](Phase phase) {
        if (cadence_includes(options.cadence, phase)) trace.samples.push_back(twin.sample(phase));
    };
    record(Phase::after_x);
    for (std::size_t m = 0; m < options.horizon_periods; ++m) {
        twin.apply_flip();
        record(Phase::after_flip);
        twin.apply_z_half();
        record(Phase::after_z);
        twin.apply_x_half();
        record(Phase::after_x);
    }
    trace.tau_star = thermalization_time(trace.d_per_period(), options.d_threshold, 1.0);
    return trace;
}

struct EffectiveRunOptions {
    IntegratorConfig integrator;
    double total_time = 2000.0;
    double tau_c_threshold = 0.05;
    std::size_t tau_c_window = 50;
};

struct EffectiveSample {
    double time = 0.0;
    double energy_density = 0.0;  ///< of the generating Hamiltonian
    double mz = 0.0;
    double d = 0.0;
};

struct EffectiveTrace {
    RealizationSeeds seeds;
    std::vector<EffectiveSample> samples;
    std::optional<double> tau_c;

    std::vector<double> mz() const
    {
        std::vector<double> out;
        out.reserve(samples.size());
        for (const auto& s : samples) out.push_back(s.mz);
        return out;
    }
};

/// Twin trajectory under a static effective Hamiltonian (no flips).
inline EffectiveTrace run_effective_realization(const EffectiveHamiltonianSpec& spec, const EnsembleSpec& ensemble,
                                                std::size_t r, const EffectiveRunOptions& options)
{
    TwinStart start = draw_twin(ensemble, r);
    const SpinHamiltonian h = spec.hamiltonian();
    const std::size_t per_sample = options.integrator.steps_per_sample();
    const auto total_steps =
        static_cast<std::size_t>(std::floor(options.total_time / options.integrator.dt + 1e-9));
    const double n = static_cast<double>(ensemble.n_sites);

    StrangIntegrator primary(start.primary, h, options.integrator.dt);
    StrangIntegrator shadow(start.shadow, h, options.integrator.dt);
    EffectiveTrace trace;
    trace.seeds = start.seeds;
    auto record = [&] {
        trace.samples.push_back({primary.time(), h.energy(primary.view()) / n, magnetization_z(primary.view()),
                                 decorrelator(primary.view(), shadow.view())});
    };
    record();
    for (std::size_t done = 0; done + per_sample <= total_steps; done += per_sample) {
        primary.advance(per_sample);
        shadow.advance(per_sample);
        record();
    }
    const auto mz = trace.mz();
    trace.tau_c = crossover_time_tau_c(mz, options.integrator.sample_interval, options.tau_c_threshold,
                                       options.tau_c_window);
    return trace;
}

}  // namespace cldtc
