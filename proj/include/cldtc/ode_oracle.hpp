#pragma once

// Brute-force reference for the rotation maps and the splitting integrator:
// integrates dS_i/dt = h_i x S_i for all components with a generic adaptive
// Runge-Kutta-Fehlberg 7(8) stepper. It shares no code with the exact maps
// besides SpinHamiltonian::local_field.

#include "cldtc/drive.hpp"
#include "cldtc/hamiltonian.hpp"
#include "cldtc/spin.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cldtc {

enum class OracleHamiltonian { hz, hx, d0, dx };

inline SpinHamiltonian make_hamiltonian(OracleHamiltonian which, const DriveParams& p) noexcept
{
    switch (which) {
    case OracleHamiltonian::hz: return SpinHamiltonian::h_z(p);
    case OracleHamiltonian::hx: return SpinHamiltonian::h_x(p);
    case OracleHamiltonian::d0: return SpinHamiltonian::d0(p);
    case OracleHamiltonian::dx: return SpinHamiltonian::dx(p);
    }
    return {};
}

struct OracleOptions {
    double tolerance = 1e-12;
    std::size_t max_sites = 8;
    std::size_t max_steps = 10'000'000;
};

struct OracleResult {
    SpinChain chain;
    /// max_i | |S_i| - 1 | at the end; spins are never renormalized.
    double norm_drift = 0.0;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
};

class OracleFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

struct SpinFlow {
    SpinHamiltonian h;
    std::size_t n;

    void operator()(const std::vector<double>& y, std::vector<double>& dydt, double /*t*/) const
    {
        std::vector<SpinVector> s(n);
        for (std::size_t i = 0; i < n; ++i) s[i] = {y[3 * i], y[3 * i + 1], y[3 * i + 2]};
        for (std::size_t i = 0; i < n; ++i) {
            const SpinVector f = h.local_field(s, i);
            // dS/dt = f x S
            dydt[3 * i] = f.y * s[i].z - f.z * s[i].y;
            dydt[3 * i + 1] = f.z * s[i].x - f.x * s[i].z;
            dydt[3 * i + 2] = f.x * s[i].y - f.y * s[i].x;
        }
    }
};

}  // namespace detail

inline OracleResult ode_oracle(const SpinChain& chain, const SpinHamiltonian& h, double total_time,
                               const OracleOptions& options = {})
{
    namespace odeint = boost::numeric::odeint;
    if (chain.size() > options.max_sites) {
        throw std::invalid_argument("ode_oracle: chain has " + std::to_string(chain.size())
                                    + " sites, limit is " + std::to_string(options.max_sites));
    }
    if (!(options.tolerance > 0.0)) throw std::invalid_argument("ode_oracle: tolerance must be > 0");
    if (!(total_time >= 0.0) || !std::isfinite(total_time)) {
        throw std::invalid_argument("ode_oracle: total_time must be finite and >= 0");
    }

    const std::size_t n = chain.size();
    std::vector<double> y(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
        y[3 * i] = chain[i].x;
        y[3 * i + 1] = chain[i].y;
        y[3 * i + 2] = chain[i].z;
    }

    using Stepper = odeint::runge_kutta_fehlberg78<std::vector<double>>;
    auto stepper = odeint::make_controlled<Stepper>(options.tolerance, options.tolerance);
    const detail::SpinFlow flow{h, n};

    OracleResult result{chain};
    double t = 0.0;
    double dt = std::min(0.01, total_time);
    const double min_dt = 1e-15 * std::max(1.0, total_time);
    while (t < total_time) {
        if (result.accepted_steps + result.rejected_steps >= options.max_steps) {
            throw OracleFailure("ode_oracle: step budget exhausted at t=" + std::to_string(t));
        }
        dt = std::min(dt, total_time - t);
        const auto outcome = stepper.try_step(flow, y, t, dt);
        if (outcome == odeint::success) {
            ++result.accepted_steps;
        } else {
            ++result.rejected_steps;
            if (dt < min_dt) {
                throw OracleFailure("ode_oracle: step size underflow (dt=" + std::to_string(dt)
                                    + ") at t=" + std::to_string(t));
            }
        }
    }

    std::vector<SpinVector> spins(n);
    for (std::size_t i = 0; i < n; ++i) {
        spins[i] = {y[3 * i], y[3 * i + 1], y[3 * i + 2]};
        result.norm_drift = std::max(result.norm_drift, std::abs(spins[i].norm() - 1.0));
    }
    result.chain = SpinChain(std::move(spins));
    return result;
}

inline OracleResult ode_oracle(const SpinChain& chain, OracleHamiltonian which, const DriveParams& params,
                               double total_time, const OracleOptions& options = {})
{
    return ode_oracle(chain, make_hamiltonian(which, params), total_time, options);
}

}  // namespace cldtc
