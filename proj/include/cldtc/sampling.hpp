#pragma once

#include "cldtc/rng.hpp"
#include "cldtc/spin.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace cldtc {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Gaussian-in-polar-angle ensemble of initial states.
struct InitialStateSpec {
    double mean_polar_angle = std::numbers::pi;
    /// Polar-angle standard deviation is 2*pi*width.
    double width = 0.1;

    void validate() const
    {
        if (!(width >= 0.0) || !std::isfinite(width)) {
            throw std::invalid_argument("InitialStateSpec: width must be finite and >= 0");
        }
        if (!std::isfinite(mean_polar_angle)) {
            throw std::invalid_argument("InitialStateSpec: mean polar angle must be finite");
        }
    }
};

/// Shadow-copy perturbation: polar and azimuth each shifted by 2*pi*scale*delta_i.
struct PerturbationSpec {
    double scale = 0.01;
};

/// Reflects an angle into [0, pi] (mirror images at 0 and pi).
inline double fold_polar_angle(double polar) noexcept
{
    double p = std::fmod(polar, kTwoPi);
    if (p < 0.0) p += kTwoPi;
    return p > std::numbers::pi ? kTwoPi - p : p;
}

/// Draws an N-site chain. Per site the stream yields one normal (polar)
/// followed by one uniform (azimuth).
inline SpinChain sample_initial_chain(const InitialStateSpec& spec, std::size_t n_sites,
                                      std::uint64_t seed)
{
    if (n_sites < 2) throw std::invalid_argument("sample_initial_chain: n_sites must be >= 2");
    spec.validate();
    RandomStream rng(seed);
    const double sd = kTwoPi * spec.width;
    std::vector<SpinVector> spins;
    spins.reserve(n_sites);
    for (std::size_t i = 0; i < n_sites; ++i) {
        const double polar = fold_polar_angle(spec.mean_polar_angle + sd * rng.normal());
        const double azimuth = kTwoPi * rng.uniform();
        spins.push_back(SpinVector::from_angles(polar, azimuth));
    }
    return SpinChain(std::move(spins));
}

/// Perturbed copy of `chain`. Per site the stream yields the polar deviate
/// then the azimuth deviate, both standard normal.
inline SpinChain perturb_chain(const SpinChain& chain, const PerturbationSpec& spec,
                               std::uint64_t seed)
{
    if (spec.scale == 0.0) return chain;
    RandomStream rng(seed);
    const double amplitude = kTwoPi * spec.scale;
    std::vector<SpinVector> spins;
    spins.reserve(chain.size());
    for (const auto& s : chain) {
        const double d_polar = amplitude * rng.normal();
        const double d_azimuth = amplitude * rng.normal();
        spins.push_back(SpinVector::from_angles(fold_polar_angle(s.polar() + d_polar),
                                                s.azimuth() + d_azimuth));
    }
    return SpinChain(std::move(spins));
}

}  // namespace cldtc
