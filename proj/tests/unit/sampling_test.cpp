#include "cldtc/observables.hpp"
#include "cldtc/rng.hpp"
#include "cldtc/sampling.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace cldtc;

TEST(Rng, DerivedSeedsAreDistinctAndStable)
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(derive_seed(42, s));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_EQ(derive_seed(42, 3), derive_seed(42, 3));
    EXPECT_NE(derive_seed(42, 3), derive_seed(43, 3));
}

TEST(Rng, EngineSequenceIsTheStandardOne)
{
    // 10000th output of a default-seeded mt19937_64 is fixed by the standard.
    std::mt19937_64 e;
    e.discard(9999);
    EXPECT_EQ(e(), 9981545732273789042ULL);
}

TEST(Rng, UniformAndNormalMoments)
{
    RandomStream rng(123);
    const int n = 200000;
    double su = 0, sn = 0, sn2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        su += u;
        const double g = rng.normal();
        sn += g;
        sn2 += g * g;
    }
    EXPECT_NEAR(su / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
    EXPECT_NEAR(sn / n, 0.0, 4 / std::sqrt(double(n)));
    EXPECT_NEAR(sn2 / n, 1.0, 4 * std::sqrt(2.0 / n));
}

TEST(Sampling, ZeroWidthAtPiGivesAllDown)
{
    const SpinChain c = sample_initial_chain({std::numbers::pi, 0.0}, 50, 9);
    for (const auto& s : c) {
        EXPECT_EQ(s.z, -1.0);
        EXPECT_NEAR(s.x, 0.0, 1e-15);
        EXPECT_NEAR(s.y, 0.0, 1e-15);
    }
    EXPECT_EQ(magnetization_z(c), -1.0);
}

TEST(Sampling, ZeroWidthOnEquator)
{
    const SpinChain c = sample_initial_chain({std::numbers::pi / 2, 0.0}, 50, 9);
    for (const auto& s : c) EXPECT_NEAR(s.polar(), std::numbers::pi / 2, 1e-15);
    EXPECT_NEAR(magnetization_z(c), 0.0, 1e-15);
}

TEST(Sampling, DeterministicPerSeed)
{
    const InitialStateSpec spec{2.0, 0.1};
    EXPECT_EQ(sample_initial_chain(spec, 30, 5), sample_initial_chain(spec, 30, 5));
    EXPECT_FALSE(sample_initial_chain(spec, 30, 5) == sample_initial_chain(spec, 30, 6));
}

TEST(Sampling, RejectsBadInput)
{
    EXPECT_THROW(sample_initial_chain({}, 1, 0), std::invalid_argument);
    EXPECT_THROW(sample_initial_chain({1.0, -0.1}, 10, 0), std::invalid_argument);
}

TEST(Sampling, PolarStatisticsAwayFromPoles)
{
    // sd = 2 pi W = 0.314; the equator is 5 sd from either pole.
    const double w = 0.05;
    const double sd = 2 * std::numbers::pi * w;
    const std::size_t n = 20000;
    const SpinChain c = sample_initial_chain({std::numbers::pi / 2, w}, n, 77);
    double m = 0, m2 = 0, az = 0;
    for (const auto& s : c) {
        const double p = s.polar();
        m += p;
        m2 += p * p;
        double a = s.azimuth();
        if (a < 0) a += 2 * std::numbers::pi;
        az += a;
    }
    m /= n;
    const double var = m2 / n - m * m;
    EXPECT_NEAR(m, std::numbers::pi / 2, 4 * sd / std::sqrt(double(n)));
    EXPECT_NEAR(std::sqrt(var), sd, 0.03 * sd);
    EXPECT_NEAR(az / n, std::numbers::pi, 4 * (2 * std::numbers::pi / std::sqrt(12.0)) / std::sqrt(double(n)));
}

TEST(Sampling, FoldingAtThePoleGivesHalfNormal)
{
    // pi - polar is |N(0, sd^2)|, whose mean is sd * sqrt(2 / pi).
    const double w = 0.1;
    const double sd = 2 * std::numbers::pi * w;
    const std::size_t n = 20000;
    const SpinChain c = sample_initial_chain({std::numbers::pi, w}, n, 78);
    double m = 0;
    for (const auto& s : c) {
        EXPECT_GE(s.polar(), 0.0);
        EXPECT_LE(s.polar(), std::numbers::pi);
        m += std::numbers::pi - s.polar();
    }
    m /= n;
    const double expected = sd * std::sqrt(2 / std::numbers::pi);
    const double se = sd * std::sqrt(1 - 2 / std::numbers::pi) / std::sqrt(double(n));
    EXPECT_NEAR(m, expected, 4 * se);
}

TEST(Sampling, FoldPolarAngle)
{
    EXPECT_NEAR(fold_polar_angle(-0.2), 0.2, 1e-15);
    EXPECT_NEAR(fold_polar_angle(std::numbers::pi + 0.2), std::numbers::pi - 0.2, 1e-15);
    EXPECT_NEAR(fold_polar_angle(2 * std::numbers::pi + 0.3), 0.3, 1e-15);
    EXPECT_DOUBLE_EQ(fold_polar_angle(1.0), 1.0);
}

TEST(Perturbation, ZeroScaleIsIdentity)
{
    const SpinChain c = sample_initial_chain({}, 20, 1);
    EXPECT_EQ(perturb_chain(c, {0.0}, 2), c);
}

TEST(Perturbation, MeanSquaredShiftMatchesScale)
{
    // On the equator a small (d_polar, d_azimuth) shift moves the spin by
    // |dS|^2 ~ d_polar^2 + d_azimuth^2, so E|dS|^2 = 2 (2 pi Delta)^2.
    const double delta = 0.01;
    const std::size_t n = 40000;
    const SpinChain c = sample_initial_chain({std::numbers::pi / 2, 0.0}, n, 3);
    const SpinChain p = perturb_chain(c, {delta}, 4);
    EXPECT_LE(p.max_norm_deviation(), 1e-12);
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += distance_squared(c[i], p[i]);
    const double expected = 2 * std::pow(2 * std::numbers::pi * delta, 2);
    EXPECT_NEAR(sum / n, expected, 0.03 * expected);
}
