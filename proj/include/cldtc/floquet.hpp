#pragma once

#include "cldtc/drive.hpp"
#include "cldtc/hamiltonian.hpp"
#include "cldtc/spin.hpp"

#include <cstddef>
#include <numbers>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace cldtc {

/// Where inside a drive period a sample is taken.
///
/// Period m (0-based) starts at t = 2mT with the flip, runs H_z on
/// [2mT, 2mT + T] and H_x on [2mT + T, 2mT + 2T]. `after_flip` and `after_z`
/// carry the index m of the period in progress. `after_x` carries the number
/// of completed periods, so the state at t = 2mT is (m, after_x); the initial
/// state is (0, after_x).
enum class Phase { after_flip, after_z, after_x };

inline std::string_view to_string(Phase p) noexcept
{
    switch (p) {
    case Phase::after_flip: return "after_flip";
    case Phase::after_z: return "after_z";
    case Phase::after_x: return "after_x";
    }
    return "after_x";
}

/// Time in units of the half-period T.
inline double time_over_half_period(std::size_t period_index, Phase phase) noexcept
{
    const double base = 2.0 * static_cast<double>(period_index);
    return phase == Phase::after_z ? base + 1.0 : base;
}

/// Which phases the observer sees.
enum class Cadence {
    every_phase,  ///< after_flip, after_z and after_x
    half_period,  ///< after_z and after_x (t = mT)
    period,       ///< after_x only (t = 2mT)
};

inline bool cadence_includes(Cadence c, Phase p) noexcept
{
    switch (c) {
    case Cadence::every_phase: return true;
    case Cadence::half_period: return p != Phase::after_flip;
    case Cadence::period: return p == Phase::after_x;
    }
    return true;
}

struct StroboscopicPoint {
    std::size_t period_index;
    Phase phase;
    ChainView chain;
};

struct FloquetState {
    SpinChain chain;
    std::size_t period_index = 0;
    bool aborted = false;
};

/// Rotation of every spin about x by (pi + delta_r).
inline SpinChain global_flip(const SpinChain& chain, double delta_r)
{
    return rotate_chain(chain, Axis::x, std::numbers::pi + delta_r);
}

/// Exact H_z flow for `duration`: spin i precesses about z by
/// (4 J_z (S_{i-1}^z + S_{i+1}^z) + 2 b_z) * duration.
inline SpinChain half_period_z(const SpinChain& chain, const DriveParams& params, double duration)
{
    std::vector<SpinVector> spins = chain.spins();
    std::vector<double> snapshot;
    detail::precess_in_place(spins, snapshot, Axis::z, SpinHamiltonian::h_z(params).z, duration);
    return SpinChain(std::move(spins));
}

/// Exact H_x flow for `duration` (z replaced by x above).
inline SpinChain half_period_x(const SpinChain& chain, const DriveParams& params, double duration)
{
    std::vector<SpinVector> spins = chain.spins();
    std::vector<double> snapshot;
    detail::precess_in_place(spins, snapshot, Axis::x, SpinHamiltonian::h_x(params).x, duration);
    return SpinChain(std::move(spins));
}

/// One full drive period: flip, H_z for T, H_x for T.
inline SpinChain one_period(const SpinChain& chain, const DriveParams& params)
{
    return half_period_x(half_period_z(global_flip(chain, params.delta_r), params, params.half_period),
                         params, params.half_period);
}

/// In-place stepper over a private buffer; used for long runs where
/// rebuilding a SpinChain per step would dominate.
class FloquetPropagator {
public:
    FloquetPropagator(const SpinChain& initial, const DriveParams& params)
        : spins_(initial.spins()),
          hz_(SpinHamiltonian::h_z(params).z),
          hx_(SpinHamiltonian::h_x(params).x),
          half_period_(params.half_period),
          flip_cos_(std::cos(std::numbers::pi + params.delta_r)),
          flip_sin_(std::sin(std::numbers::pi + params.delta_r))
    {
        params.validate();
    }

    void apply_flip() noexcept
    {
        for (auto& s : spins_) s = rotate_about_axis(s, Axis::x, flip_cos_, flip_sin_);
    }
    void apply_z_half() { detail::precess_in_place(spins_, snapshot_, Axis::z, hz_, half_period_); }
    void apply_x_half()
    {
        detail::precess_in_place(spins_, snapshot_, Axis::x, hx_, half_period_);
        ++completed_;
    }
    void advance_period()
    {
        apply_flip();
        apply_z_half();
        apply_x_half();
    }

    ChainView view() const noexcept { return spins_; }
    SpinChain chain() const { return SpinChain(spins_); }
    std::size_t completed_periods() const noexcept { return completed_; }

private:
    std::vector<SpinVector> spins_;
    std::vector<double> snapshot_;
    AxisTerms hz_;
    AxisTerms hx_;
    double half_period_;
    double flip_cos_;
    double flip_sin_;
    std::size_t completed_ = 0;
};

namespace detail {

template <class Observer>
bool notify(Observer& observer, const StroboscopicPoint& point)
{
    if constexpr (std::is_void_v<std::invoke_result_t<Observer&, const StroboscopicPoint&>>) {
        observer(point);
        return true;
    } else {
        return static_cast<bool>(observer(point));
    }
}

}  // namespace detail

/// Applies `n_periods` drive periods. The observer receives a
/// StroboscopicPoint for every phase selected by `cadence` (starting with
/// the initial state) and may return false to stop early. Exceptions thrown
/// by the observer propagate.
template <class Observer>
FloquetState evolve_periods(const SpinChain& initial, const DriveParams& params, std::size_t n_periods,
                            Observer&& observer, Cadence cadence = Cadence::half_period)
{
    FloquetPropagator prop(initial, params);
    auto emit = [&](std::size_t m, Phase phase) {
        if (!cadence_includes(cadence, phase)) return true;
        return detail::notify(observer, StroboscopicPoint{m, phase, prop.view()});
    };
    if (!emit(0, Phase::after_x)) return {prop.chain(), 0, true};
    for (std::size_t m = 0; m < n_periods; ++m) {
        prop.apply_flip();
        if (!emit(m, Phase::after_flip)) return {prop.chain(), m, true};
        prop.apply_z_half();
        if (!emit(m, Phase::after_z)) return {prop.chain(), m, true};
        prop.apply_x_half();
        if (!emit(m + 1, Phase::after_x)) return {prop.chain(), m + 1, true};
    }
    return {prop.chain(), n_periods, false};
}

inline FloquetState evolve_periods(const SpinChain& initial, const DriveParams& params, std::size_t n_periods)
{
    return evolve_periods(initial, params, n_periods, [](const StroboscopicPoint&) {}, Cadence::period);
}

}  // namespace cldtc
