#pragma once

#include "cldtc/drive.hpp"
#include "cldtc/hamiltonian.hpp"
#include "cldtc/spin.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <type_traits>
#include <vector>

namespace cldtc {

enum class EffectiveKind { d0, dx };

inline std::string_view to_string(EffectiveKind k) noexcept { return k == EffectiveKind::d0 ? "D0" : "Dx"; }

struct EffectiveHamiltonianSpec {
    EffectiveKind kind = EffectiveKind::dx;
    DriveParams drive;
    /// Multiplies j_x and b_z before the Hamiltonian is built.
    double rescale_ratio = 1.0;

    SpinHamiltonian hamiltonian() const noexcept
    {
        const DriveParams p = drive.rescaled(rescale_ratio);
        return kind == EffectiveKind::d0 ? SpinHamiltonian::d0(p) : SpinHamiltonian::dx(p);
    }
};

enum class SplittingScheme { strang2 };

struct IntegratorConfig {
    double dt = 0.02;
    SplittingScheme scheme = SplittingScheme::strang2;
    /// Time between observer calls; must be a whole number of steps.
    double sample_interval = 1.0;

    /// Steps per observation; throws if dt is invalid or does not divide
    /// the sample interval.
    std::size_t steps_per_sample() const
    {
        if (!std::isfinite(dt) || !(dt > 0.0)) throw std::invalid_argument("IntegratorConfig: dt must be finite and > 0");
        if (!std::isfinite(sample_interval) || !(sample_interval > 0.0)) {
            throw std::invalid_argument("IntegratorConfig: sample_interval must be finite and > 0");
        }
        const double ratio = sample_interval / dt;
        const double steps = std::round(ratio);
        if (steps < 1.0 || std::abs(ratio - steps) > 1e-9 * ratio) {
            throw std::invalid_argument("IntegratorConfig: dt must divide sample_interval");
        }
        return static_cast<std::size_t>(steps);
    }
};

struct EffectivePoint {
    double time;
    ChainView chain;
};

/// Second-order Strang splitting of a SpinHamiltonian: half z-flow, full
/// x-flow, half z-flow per step. Each sub-flow is an exact rotation, so
/// spin norms are preserved. Consecutive z half-steps between two
/// observations are fused into one z-flow of length dt.
class StrangIntegrator {
public:
    StrangIntegrator(const SpinChain& initial, const SpinHamiltonian& h, double dt)
        : spins_(initial.spins()), h_(h), dt_(dt)
    {
        if (!std::isfinite(dt) || !(dt > 0.0)) throw std::invalid_argument("StrangIntegrator: dt must be finite and > 0");
    }

    /// Advances `steps` full steps of size dt.
    void advance(std::size_t steps)
    {
        if (steps == 0) return;
        detail::precess_in_place(spins_, snapshot_, Axis::z, h_.z, 0.5 * dt_);
        for (std::size_t k = 0; k < steps; ++k) {
            detail::precess_in_place(spins_, snapshot_, Axis::x, h_.x, dt_);
            const double z_span = k + 1 == steps ? 0.5 * dt_ : dt_;
            detail::precess_in_place(spins_, snapshot_, Axis::z, h_.z, z_span);
        }
        time_ += static_cast<double>(steps) * dt_;
    }

    /// One Strang step of arbitrary size (used for a trailing partial step).
    void advance_by(double h)
    {
        detail::precess_in_place(spins_, snapshot_, Axis::z, h_.z, 0.5 * h);
        detail::precess_in_place(spins_, snapshot_, Axis::x, h_.x, h);
        detail::precess_in_place(spins_, snapshot_, Axis::z, h_.z, 0.5 * h);
        time_ += h;
    }

    ChainView view() const noexcept { return spins_; }
    SpinChain chain() const { return SpinChain(spins_); }
    double time() const noexcept { return time_; }

private:
    std::vector<SpinVector> spins_;
    std::vector<double> snapshot_;
    SpinHamiltonian h_;
    double dt_;
    double time_ = 0.0;
};

/// Evolves `chain` under the effective Hamiltonian for `total_time`. The
/// observer sees t = 0 and every cfg.sample_interval; it may return false
/// to stop. A remainder shorter than dt is taken as one final partial step.
template <class Observer>
SpinChain evolve_effective(const SpinChain& chain, const SpinHamiltonian& h, const IntegratorConfig& cfg,
                           double total_time, Observer&& observer)
{
    const std::size_t per_sample = cfg.steps_per_sample();
    if (!std::isfinite(total_time) || total_time < 0.0) {
        throw std::invalid_argument("evolve_effective: total_time must be finite and >= 0");
    }
    auto notify = [&](const StrangIntegrator& integ) {
        const EffectivePoint point{integ.time(), integ.view()};
        if constexpr (std::is_void_v<std::invoke_result_t<Observer&, const EffectivePoint&>>) {
            observer(point);
            return true;
        } else {
            return static_cast<bool>(observer(point));
        }
    };

    StrangIntegrator integ(chain, h, cfg.dt);
    if (!notify(integ)) return integ.chain();
    const double exact_steps = total_time / cfg.dt;
    auto total_steps = static_cast<std::size_t>(std::floor(exact_steps + 1e-9));
    std::size_t done = 0;
    while (done < total_steps) {
        const std::size_t chunk = std::min(per_sample, total_steps - done);
        integ.advance(chunk);
        done += chunk;
        if (chunk == per_sample && !notify(integ)) return integ.chain();
    }
    const double remainder = total_time - static_cast<double>(total_steps) * cfg.dt;
    if (remainder > 1e-12 * std::max(1.0, total_time)) integ.advance_by(remainder);
    return integ.chain();
}

inline SpinChain evolve_effective(const SpinChain& chain, const EffectiveHamiltonianSpec& spec,
                                  const IntegratorConfig& cfg, double total_time)
{
    return evolve_effective(chain, spec.hamiltonian(), cfg, total_time, [](const EffectivePoint&) {});
}

template <class Observer>
SpinChain evolve_effective(const SpinChain& chain, const EffectiveHamiltonianSpec& spec,
                           const IntegratorConfig& cfg, double total_time, Observer&& observer)
{
    return evolve_effective(chain, spec.hamiltonian(), cfg, total_time, std::forward<Observer>(observer));
}

/// First time from which |M^z| stays below `threshold` for `window`
/// further sample intervals (window + 1 consecutive samples). Empty
/// optional means the crossing was not reached inside the series
/// (censored at the horizon).
inline std::optional<double> crossover_time_tau_c(std::span<const double> mz, double sample_interval,
                                                  double threshold = 0.05, std::size_t window = 50)
{
    if (mz.empty()) throw std::invalid_argument("crossover_time_tau_c: empty series");
    if (!(threshold > 0.0)) throw std::invalid_argument("crossover_time_tau_c: threshold must be > 0");
    std::size_t run = 0;
    for (std::size_t k = 0; k < mz.size(); ++k) {
        run = std::abs(mz[k]) < threshold ? run + 1 : 0;
        if (run == window + 1) return static_cast<double>(k - window) * sample_interval;
    }
    return std::nullopt;
}

}  // namespace cldtc
