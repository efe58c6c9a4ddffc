#pragma once

#include "cldtc/drive.hpp"
#include "cldtc/floquet.hpp"
#include "cldtc/hamiltonian.hpp"
#include "cldtc/spin.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>

namespace cldtc {

/// Zeroth-order effective energy per site:
/// (1/N) sum_i (2 J_z S_i^z S_{i+1}^z + 2 J_x S_i^x S_{i+1}^x + b_z S_i^z + b_x S_i^x).
inline double effective_energy_density(ChainView chain, const DriveParams& params) noexcept
{
    return SpinHamiltonian::d0(params).energy(chain) / static_cast<double>(chain.size());
}

inline double magnetization_z(ChainView chain) noexcept
{
    double sum = 0.0;
    for (const auto& s : chain) sum += s.z;
    return sum / static_cast<double>(chain.size());
}

/// Infinite-temperature value of the unnormalized decorrelator.
inline constexpr double kDecorrelatorNorm = std::numbers::sqrt2;

/// sqrt((1/N) sum_i |S_i - S'_i|^2) / sqrt(2).
inline double decorrelator(ChainView primary, ChainView shadow)
{
    if (primary.size() != shadow.size()) {
        throw std::invalid_argument("decorrelator: chains differ in length");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < primary.size(); ++i) sum += distance_squared(primary[i], shadow[i]);
    return std::sqrt(sum / static_cast<double>(primary.size())) / kDecorrelatorNorm;
}

/// First time the series reaches `threshold`, linearly interpolated between
/// the bracketing samples, in units of `sample_interval`. Empty optional
/// means the horizon was reached first (censored).
inline std::optional<double> thermalization_time(std::span<const double> d_series, double threshold = 0.9,
                                                 double sample_interval = 1.0)
{
    if (d_series.empty()) throw std::invalid_argument("thermalization_time: empty series");
    if (d_series[0] >= threshold) return 0.0;
    for (std::size_t k = 1; k < d_series.size(); ++k) {
        if (d_series[k] >= threshold) {
            const double lo = d_series[k - 1];
            const double frac = (threshold - lo) / (d_series[k] - lo);
            return (static_cast<double>(k - 1) + frac) * sample_interval;
        }
    }
    return std::nullopt;
}

struct ObservableSample {
    std::size_t period_index = 0;
    Phase phase = Phase::after_x;
    double energy_density = 0.0;
    double mz = 0.0;
    double d = 0.0;
};

/// A chain and its perturbed shadow co-evolved under one drive.
class TwinTrajectory {
public:
    TwinTrajectory(const SpinChain& primary, const SpinChain& shadow, const DriveParams& params)
        : primary_(primary, params), shadow_(shadow, params), params_(params)
    {
        if (primary.size() != shadow.size()) throw std::invalid_argument("TwinTrajectory: size mismatch");
    }

    void apply_flip()
    {
        primary_.apply_flip();
        shadow_.apply_flip();
    }
    void apply_z_half()
    {
        primary_.apply_z_half();
        shadow_.apply_z_half();
    }
    void apply_x_half()
    {
        primary_.apply_x_half();
        shadow_.apply_x_half();
    }

    ObservableSample sample(Phase phase) const
    {
        // Mid-period phases carry the index of the period in progress, which
        // equals the completed count until the x half finishes.
        return {primary_.completed_periods(), phase, effective_energy_density(primary_.view(), params_), magnetization_z(primary_.view()),
                decorrelator(primary_.view(), shadow_.view())};
    }

    ChainView primary() const noexcept { return primary_.view(); }
    ChainView shadow() const noexcept { return shadow_.view(); }
    std::size_t completed_periods() const noexcept { return primary_.completed_periods(); }

private:
    FloquetPropagator primary_;
    FloquetPropagator shadow_;
    DriveParams params_;
};

/// Fraction of consecutive pairs (m, m+1) with first <= m < last whose
/// signs are strictly opposite.
inline double alternation_fraction(std::span<const double> series, std::size_t first, std::size_t last)
{
    if (series.size() < 2) throw std::invalid_argument("alternation_fraction: need at least 2 samples");
    last = std::min(last, series.size() - 1);
    if (first >= last) throw std::invalid_argument("alternation_fraction: empty range");
    std::size_t flips = 0;
    for (std::size_t m = first; m < last; ++m) flips += series[m] * series[m + 1] < 0.0;
    return static_cast<double>(flips) / static_cast<double>(last - first);
}

/// Longest run of consecutive pairs with opposite signs where both samples
/// have magnitude >= floor, in periods.
inline std::size_t longest_alternating_run(std::span<const double> series, double floor)
{
    std::size_t best = 0;
    std::size_t run = 0;
    for (std::size_t m = 0; m + 1 < series.size(); ++m) {
        const bool alternates = series[m] * series[m + 1] < 0.0 && std::abs(series[m]) >= floor
                                && std::abs(series[m + 1]) >= floor;
        run = alternates ? run + 1 : 0;
        best = std::max(best, run);
    }
    return best;
}

/// Number of samples before index `until` whose sign is opposite to the
/// first sample's and whose magnitude is >= floor.
inline std::size_t opposite_sign_samples(std::span<const double> series, std::size_t until, double floor = 0.0)
{
    if (series.empty()) return 0;
    const double ref = series[0];
    std::size_t count = 0;
    for (std::size_t k = 1; k < std::min(until, series.size()); ++k) {
        count += series[k] * ref < 0.0 && std::abs(series[k]) >= floor;
    }
    return count;
}

}  // namespace cldtc
