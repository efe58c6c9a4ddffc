#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace cldtc {

/// Samples of S(w) = sum_m x_m exp(-i w m) on the uniform grid
/// w_k = -pi + (k + 1) * 2pi / K, k = 0..K-1, which covers (-pi, pi] and
/// always contains w = pi. Frequencies are in radians per sample (per drive
/// period for stroboscopic series).
struct Spectrum {
    std::vector<double> frequency;
    std::vector<std::complex<double>> amplitude;
    /// Length of the transformed series.
    std::size_t series_length = 0;

    std::size_t size() const noexcept { return frequency.size(); }
    double power(std::size_t k) const noexcept { return std::norm(amplitude[k]); }
    double spacing() const noexcept { return 2.0 * std::numbers::pi / static_cast<double>(frequency.size()); }

    double total_power() const noexcept
    {
        double s = 0.0;
        for (const auto& a : amplitude) s += std::norm(a);
        return s;
    }
};

inline double grid_frequency(std::size_t k, std::size_t bins) noexcept
{
    return -std::numbers::pi + static_cast<double>(k + 1) * 2.0 * std::numbers::pi / static_cast<double>(bins);
}

/// DTFT on a K-point grid. Real or complex input.
template <class T>
Spectrum dtft_on_bins(std::span<const T> series, std::size_t bins)
{
    if (series.empty()) throw std::invalid_argument("dtft: empty series");
    if (bins < 1) throw std::invalid_argument("dtft: need at least one bin");
    Spectrum out;
    out.series_length = series.size();
    out.frequency.resize(bins);
    out.amplitude.resize(bins);
    constexpr std::size_t kReanchor = 128;
    for (std::size_t k = 0; k < bins; ++k) {
        const double w = grid_frequency(k, bins);
        const std::complex<double> step = std::polar(1.0, -w);
        std::complex<double> phasor = 1.0;
        std::complex<double> acc = 0.0;
        for (std::size_t m = 0; m < series.size(); ++m) {
            if (m % kReanchor == 0) phasor = std::polar(1.0, -w * static_cast<double>(m));
            acc += std::complex<double>(series[m]) * phasor;
            phasor *= step;
        }
        out.frequency[k] = w;
        out.amplitude[k] = acc;
    }
    return out;
}

/// Number of bins giving a grid spacing no coarser than `grid_spacing`.
inline std::size_t bins_for_spacing(double grid_spacing)
{
    if (!(grid_spacing > 0.0) || !std::isfinite(grid_spacing)) {
        throw std::invalid_argument("dtft: grid spacing must be finite and > 0");
    }
    return static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi / grid_spacing - 1e-9));
}

template <class T>
Spectrum dtft(std::span<const T> series, double grid_spacing = 1e-3)
{
    return dtft_on_bins(series, bins_for_spacing(grid_spacing));
}

/// Fourier-resolution spectrum: one bin per sample (spacing 2pi/L).
template <class T>
Spectrum fourier_bins(std::span<const T> series)
{
    return dtft_on_bins(series, series.size());
}

/// Half-width of the DC main lobe, 2pi / L. With exclude_dc, bins with
/// |w| below it are ignored by the peak search.
inline bool in_dc_lobe(const Spectrum& s, std::size_t k) noexcept
{
    return std::abs(s.frequency[k]) < 2.0 * std::numbers::pi / static_cast<double>(s.series_length) - 1e-12;
}

/// Index of the largest-power bin (first one on ties).
inline std::size_t find_peak(const Spectrum& s, bool exclude_dc)
{
    std::size_t best = s.size();
    double best_power = -1.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (exclude_dc && in_dc_lobe(s, k)) continue;
        const double p = s.power(k);
        if (p > best_power) {
            best_power = p;
            best = k;
        }
    }
    if (best == s.size()) throw std::invalid_argument("find_peak: no admissible bins");
    return best;
}

struct PeakOptions {
    bool exclude_dc = true;
    /// Bins on each side of the peak added to the numerator (0 = single bin).
    std::size_t halfwidth = 0;
};

/// Share of the total power carried by the peak bin(s).
inline double crystalline_fraction(const Spectrum& s, const PeakOptions& opts = {})
{
    const double total = s.total_power();
    if (!(total > 0.0)) throw std::invalid_argument("crystalline_fraction: all-zero spectrum");
    const std::size_t peak = find_peak(s, opts.exclude_dc);
    const std::size_t n = s.size();
    const std::size_t h = std::min(opts.halfwidth, (n - 1) / 2);
    double num = 0.0;
    for (std::size_t j = 0; j <= 2 * h; ++j) num += s.power((peak + n - h + j) % n);
    return std::min(1.0, num / total);
}

/// Up to `count` circular local maxima of the power, strongest first.
inline std::vector<std::size_t> local_maxima(const Spectrum& s, std::size_t count)
{
    const std::size_t n = s.size();
    std::vector<std::size_t> peaks;
    for (std::size_t k = 0; k < n; ++k) {
        const double p = s.power(k);
        if (p > s.power((k + n - 1) % n) && p >= s.power((k + 1) % n)) peaks.push_back(k);
    }
    std::stable_sort(peaks.begin(), peaks.end(),
                     [&](std::size_t a, std::size_t b) { return s.power(a) > s.power(b); });
    if (peaks.size() > count) peaks.resize(count);
    return peaks;
}

struct SpectralConfig {
    double grid_spacing = 1e-3;
    /// Leading samples used (the rest of the series is ignored).
    std::size_t window = 500;
    PeakOptions peak;
};

struct SubharmonicAnalysis {
    /// Peak of the dense spectrum (radians per sample).
    double peak_frequency = 0.0;
    /// Peak of the Fourier-resolution spectrum used for the fraction.
    double fraction_peak_frequency = 0.0;
    double crystalline_fraction = 0.0;
};

inline std::span<const double> leading_window(std::span<const double> series, std::size_t window)
{
    return series.first(std::min(series.size(), window));
}

inline SubharmonicAnalysis analyze_subharmonic(std::span<const double> series, const SpectralConfig& cfg = {})
{
    const auto raw = leading_window(series, cfg.window);
    if (raw.size() < 2) throw std::invalid_argument("analyze_subharmonic: need at least 2 samples");
    // A constant offset leaks into sidelobes well beyond the main lobe, so
    // excluding DC also removes the window mean.
    std::vector<double> x(raw.begin(), raw.end());
    if (cfg.peak.exclude_dc) {
        const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
        for (auto& v : x) v -= m;
    }
    const Spectrum dense = dtft(std::span<const double>(x), cfg.grid_spacing);
    const Spectrum coarse = fourier_bins(std::span<const double>(x));
    SubharmonicAnalysis out;
    out.peak_frequency = dense.frequency[find_peak(dense, cfg.peak.exclude_dc)];
    out.fraction_peak_frequency = coarse.frequency[find_peak(coarse, cfg.peak.exclude_dc)];
    // A constant window has nothing left after the mean is removed.
    out.crystalline_fraction = coarse.total_power() > 0.0 ? crystalline_fraction(coarse, cfg.peak) : 0.0;
    return out;
}

}  // namespace cldtc
