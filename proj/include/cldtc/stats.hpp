#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace cldtc::stats {

inline double mean(std::span<const double> v)
{
    if (v.empty()) throw std::invalid_argument("mean: empty input");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Sample standard deviation (n - 1 denominator); 0 for a single value.
inline double stddev(std::span<const double> v)
{
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

/// Ordinary least squares y = slope * x + intercept.
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw std::invalid_argument("linear_fit: size mismatch");
    if (x.size() < 2) throw std::invalid_argument("linear_fit: need at least 2 points");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: all x values equal");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    fit.points = x.size();
    return fit;
}

struct TrendTest {
    double s = 0.0;
    double z = 0.0;
    /// +1 increasing, -1 decreasing, 0 no significant trend.
    int direction = 0;
};

/// Mann-Kendall trend test, normal approximation with tie correction.
/// `z_critical` = 1.96 gives a two-sided 95% test.
inline TrendTest mann_kendall(std::span<const double> v, double z_critical = 1.96)
{
    const std::size_t n = v.size();
    if (n < 3) throw std::invalid_argument("mann_kendall: need at least 3 points");
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            s += (v[j] > v[i]) - (v[j] < v[i]);
        }
    }
    // Tie correction over groups of equal values.
    double tie_term = 0.0;
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (seen[i]) continue;
        double t = 0.0;
        for (std::size_t j = i; j < n; ++j) {
            if (v[j] == v[i]) {
                seen[j] = true;
                t += 1.0;
            }
        }
        tie_term += t * (t - 1.0) * (2.0 * t + 5.0);
    }
    const double nn = static_cast<double>(n);
    const double var = (nn * (nn - 1.0) * (2.0 * nn + 5.0) - tie_term) / 18.0;
    TrendTest out;
    out.s = s;
    if (var > 0.0) {
        if (s > 0.0) out.z = (s - 1.0) / std::sqrt(var);
        else if (s < 0.0) out.z = (s + 1.0) / std::sqrt(var);
    }
    out.direction = out.z > z_critical ? 1 : (out.z < -z_critical ? -1 : 0);
    return out;
}

}  // namespace cldtc::stats
