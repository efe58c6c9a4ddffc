#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cldtc {

/// How a drive frequency maps onto the half-period T. The full drive
/// period is 2T.
enum class FrequencyConvention {
    pi_over_T,      ///< omega = 2*pi / (2T) = pi / T
    two_pi_over_T,  ///< omega = 2*pi / T
};

inline std::string_view to_string(FrequencyConvention c) noexcept
{
    return c == FrequencyConvention::pi_over_T ? "pi_over_T" : "two_pi_over_T";
}

inline FrequencyConvention parse_frequency_convention(std::string_view s)
{
    if (s == "pi_over_T") return FrequencyConvention::pi_over_T;
    if (s == "two_pi_over_T") return FrequencyConvention::two_pi_over_T;
    throw std::invalid_argument("frequency_convention: expected \"pi_over_T\" or "
                                "\"two_pi_over_T\", got \"" + std::string(s) + "\"");
}

/// Couplings, fields, half-period and flip error of the two-step drive.
struct DriveParams {
    double j_z = 0.399;
    double j_x = 0.011;
    double b_z = -0.016;
    double b_x = -0.3;
    double half_period = 1.0;
    /// Error added to the pi rotation of the global x-flip (radians).
    double delta_r = 0.0;

    /// The reference parameter set (N = 100 chain studies).
    static DriveParams reference() noexcept { return {}; }

    /// The alternate parameter set used to check robustness.
    static DriveParams alternate() noexcept { return {0.36, 0.01, -0.014, -0.33, 1.0, 0.0}; }

    /// Multiplies j_x and b_z by `ratio`, leaving j_z and b_x unchanged.
    DriveParams rescaled(double ratio) const noexcept
    {
        DriveParams p = *this;
        p.j_x *= ratio;
        p.b_z *= ratio;
        return p;
    }

    double omega(FrequencyConvention c) const noexcept
    {
        const double scale = c == FrequencyConvention::pi_over_T ? 1.0 : 2.0;
        return scale * std::numbers::pi / half_period;
    }

    static double half_period_from_omega(double omega, FrequencyConvention c)
    {
        if (!(omega > 0.0) || !std::isfinite(omega)) {
            throw std::invalid_argument("omega must be finite and > 0");
        }
        const double scale = c == FrequencyConvention::pi_over_T ? 1.0 : 2.0;
        return scale * std::numbers::pi / omega;
    }

    DriveParams with_omega(double omega, FrequencyConvention c) const
    {
        DriveParams p = *this;
        p.half_period = half_period_from_omega(omega, c);
        return p;
    }

    void validate() const
    {
        if (!(half_period > 0.0) || !std::isfinite(half_period)) {
            throw std::invalid_argument("DriveParams: half_period must be finite and > 0");
        }
        for (double v : {j_z, j_x, b_z, b_x, delta_r}) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("DriveParams: couplings, fields and delta_r must be finite");
            }
        }
    }

    friend bool operator==(const DriveParams&, const DriveParams&) = default;
};

}  // namespace cldtc
