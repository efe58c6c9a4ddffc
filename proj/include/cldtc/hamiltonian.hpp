#pragma once

#include "cldtc/drive.hpp"
#include "cldtc/spin.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace cldtc {

/// Coefficients of the terms along one axis a:
///   sum_i ( pair * S_i^a S_{i+1}^a + field * S_i^a ).
struct AxisTerms {
    double pair = 0.0;
    double field = 0.0;

    bool vanishes() const noexcept { return pair == 0.0 && field == 0.0; }
    friend bool operator==(const AxisTerms&, const AxisTerms&) = default;
};

/// Nearest-neighbour ring Hamiltonian with zz and xx couplings and z/x
/// fields. Every Hamiltonian of the model (H_z, H_x, D0, D_x) has this form.
///
/// Equation of motion: dS_i/dt = h_i x S_i with h_i = dH/dS_i, so each
/// single-axis part precesses S_i about that axis at rate
/// pair * (S_{i-1}^a + S_{i+1}^a) + field.
struct SpinHamiltonian {
    AxisTerms z;
    AxisTerms x;

    static SpinHamiltonian h_z(const DriveParams& p) noexcept
    {
        return {{4.0 * p.j_z, 2.0 * p.b_z}, {}};
    }
    static SpinHamiltonian h_x(const DriveParams& p) noexcept
    {
        return {{}, {4.0 * p.j_x, 2.0 * p.b_x}};
    }
    /// Zeroth-order effective Hamiltonian, (H_z + H_x) / 2.
    static SpinHamiltonian d0(const DriveParams& p) noexcept
    {
        return {{2.0 * p.j_z, p.b_z}, {2.0 * p.j_x, p.b_x}};
    }
    /// Flip-symmetric part of D0: the b_z term removed.
    static SpinHamiltonian dx(const DriveParams& p) noexcept
    {
        return {{2.0 * p.j_z, 0.0}, {2.0 * p.j_x, p.b_x}};
    }

    double energy(ChainView spins) const noexcept
    {
        const std::size_t n = spins.size();
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const SpinVector& s = spins[i];
            const SpinVector& r = spins[i + 1 == n ? 0 : i + 1];
            e += z.pair * s.z * r.z + x.pair * s.x * r.x + z.field * s.z + x.field * s.x;
        }
        return e;
    }

    /// h_i = dH/dS_i (no y component in this model).
    SpinVector local_field(ChainView spins, std::size_t i) const noexcept
    {
        const std::size_t n = spins.size();
        const SpinVector& l = spins[i == 0 ? n - 1 : i - 1];
        const SpinVector& r = spins[i + 1 == n ? 0 : i + 1];
        return {x.pair * (l.x + r.x) + x.field, 0.0, z.pair * (l.z + r.z) + z.field};
    }

    friend bool operator==(const SpinHamiltonian&, const SpinHamiltonian&) = default;
};

namespace detail {

/// Exact flow of a single-axis Hamiltonian part for time `duration`, in
/// place. The axis components are conserved by this flow, so the
/// precession angles are read from a snapshot before any site is written.
inline void precess_in_place(std::span<SpinVector> spins, std::vector<double>& snapshot,
                             Axis axis, const AxisTerms& terms, double duration)
{
    const std::size_t n = spins.size();
    if (duration == 0.0 || terms.vanishes()) return;
    if (terms.pair == 0.0) {
        const double angle = terms.field * duration;
        const double c = std::cos(angle);
        const double sn = std::sin(angle);
        for (auto& s : spins) s = rotate_about_axis(s, axis, c, sn);
        return;
    }
    snapshot.resize(n);
    for (std::size_t i = 0; i < n; ++i) snapshot[i] = spins[i].component(axis);
    for (std::size_t i = 0; i < n; ++i) {
        const double neighbours = snapshot[i == 0 ? n - 1 : i - 1] + snapshot[i + 1 == n ? 0 : i + 1];
        const double angle = (terms.pair * neighbours + terms.field) * duration;
        spins[i] = rotate_about_axis(spins[i], axis, std::cos(angle), std::sin(angle));
    }
}

inline void rotate_all_in_place(std::span<SpinVector> spins, Axis axis, double angle)
{
    const double c = std::cos(angle);
    const double sn = std::sin(angle);
    for (auto& s : spins) s = rotate_about_axis(s, axis, c, sn);
}

}  // namespace detail
}  // namespace cldtc
