#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cldtc {

enum class Axis { x, y, z };

/// One classical spin: a unit 3-vector.
struct SpinVector {
    double x = 0.0;
    double y = 0.0;
    double z = 1.0;

    /// Builds the unit vector with the given polar angle (from +z) and
    /// azimuth (from +x in the xy-plane).
    static SpinVector from_angles(double polar, double azimuth) noexcept
    {
        const double sp = std::sin(polar);
        return {sp * std::cos(azimuth), sp * std::sin(azimuth), std::cos(polar)};
    }

    double component(Axis a) const noexcept
    {
        switch (a) {
        case Axis::x: return x;
        case Axis::y: return y;
        case Axis::z: return z;
        }
        return z;
    }

    double norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }
    double polar() const noexcept { return std::atan2(std::hypot(x, y), z); }
    double azimuth() const noexcept { return std::atan2(y, x); }

    friend bool operator==(const SpinVector&, const SpinVector&) = default;
};

inline double dot(const SpinVector& a, const SpinVector& b) noexcept
{
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline double distance_squared(const SpinVector& a, const SpinVector& b) noexcept
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

/// Right-handed rotation about a coordinate axis with a precomputed
/// (cos, sin) pair. This is the hot path of every propagator.
inline SpinVector rotate_about_axis(const SpinVector& s, Axis axis, double c, double sn) noexcept
{
    switch (axis) {
    case Axis::x: return {s.x, c * s.y - sn * s.z, sn * s.y + c * s.z};
    case Axis::y: return {c * s.x + sn * s.z, s.y, -sn * s.x + c * s.z};
    case Axis::z: return {c * s.x - sn * s.y, sn * s.x + c * s.y, s.z};
    }
    return s;
}

inline SpinVector rotate_about_axis(const SpinVector& s, Axis axis, double angle) noexcept
{
    return rotate_about_axis(s, axis, std::cos(angle), std::sin(angle));
}

using ChainView = std::span<const SpinVector>;

/// Tolerance on |S| - 1 accepted when a chain is built from external data.
inline constexpr double kUnitNormTolerance = 1e-9;

/// A ring of N >= 2 classical spins (periodic boundary conditions).
class SpinChain {
public:
    explicit SpinChain(std::vector<SpinVector> spins) : spins_(std::move(spins))
    {
        if (spins_.size() < 2) {
            throw std::invalid_argument("SpinChain: need at least 2 sites, got "
                                        + std::to_string(spins_.size()));
        }
        for (std::size_t i = 0; i < spins_.size(); ++i) {
            const double n = spins_[i].norm();
            if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitNormTolerance) {
                throw std::invalid_argument("SpinChain: site " + std::to_string(i)
                                            + " is not a unit vector");
            }
        }
    }

    static SpinChain uniform(std::size_t n_sites, SpinVector s)
    {
        return SpinChain(std::vector<SpinVector>(n_sites, s));
    }

    std::size_t size() const noexcept { return spins_.size(); }
    const SpinVector& operator[](std::size_t i) const noexcept { return spins_[i]; }
    const SpinVector& at(std::size_t i) const { return spins_.at(i); }

    std::size_t left(std::size_t i) const noexcept { return i == 0 ? spins_.size() - 1 : i - 1; }
    std::size_t right(std::size_t i) const noexcept { return i + 1 == spins_.size() ? 0 : i + 1; }

    ChainView view() const noexcept { return spins_; }
    operator ChainView() const noexcept { return spins_; }
    const std::vector<SpinVector>& spins() const noexcept { return spins_; }

    auto begin() const noexcept { return spins_.begin(); }
    auto end() const noexcept { return spins_.end(); }

    /// Largest |(|S_i| - 1)| over the chain.
    double max_norm_deviation() const noexcept
    {
        double worst = 0.0;
        for (const auto& s : spins_) worst = std::max(worst, std::abs(s.norm() - 1.0));
        return worst;
    }

    friend bool operator==(const SpinChain&, const SpinChain&) = default;

private:
    std::vector<SpinVector> spins_;
};

/// Applies the same axis rotation to every spin.
inline SpinChain rotate_chain(const SpinChain& chain, Axis axis, double angle)
{
    const double c = std::cos(angle);
    const double sn = std::sin(angle);
    std::vector<SpinVector> out;
    out.reserve(chain.size());
    for (const auto& s : chain) out.push_back(rotate_about_axis(s, axis, c, sn));
    return SpinChain(std::move(out));
}

}  // namespace cldtc
