#include "cldtc/observables.hpp"
#include "cldtc/rng.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace cldtc;

namespace {

SpinChain uniform_random_chain(std::size_t n, std::uint64_t seed)
{
    RandomStream rng(seed);
    std::vector<SpinVector> s;
    for (std::size_t i = 0; i < n; ++i) {
        s.push_back(SpinVector::from_angles(std::acos(rng.uniform(-1, 1)), rng.uniform(0, 2 * std::numbers::pi)));
    }
    return SpinChain(std::move(s));
}

}  // namespace

TEST(EnergyDensity, MatchesBondSumPerSite)
{
    const DriveParams p;
    const SpinChain c = uniform_random_chain(11, 4);
    std::vector<oracle::Vec3> v;
    for (const auto& s : c) v.push_back({s.x, s.y, s.z});
    EXPECT_NEAR(effective_energy_density(c, p), oracle::ring_energy(v, 2 * p.j_z, 2 * p.j_x, p.b_z, p.b_x) / 11, 1e-15);
}

TEST(EnergyDensity, FullyPolarizedStates)
{
    const DriveParams p;
    EXPECT_NEAR(effective_energy_density(SpinChain::uniform(10, {0, 0, 1}), p), 2 * p.j_z + p.b_z, 1e-15);
    EXPECT_NEAR(effective_energy_density(SpinChain::uniform(10, {0, 0, -1}), p), 2 * p.j_z - p.b_z, 1e-15);
}

TEST(Magnetization, Mean)
{
    EXPECT_DOUBLE_EQ(magnetization_z(SpinChain({SpinVector{0, 0, 1}, SpinVector{1, 0, 0}})), 0.5);
}

TEST(Decorrelator, Limits)
{
    const SpinChain c = uniform_random_chain(20, 1);
    EXPECT_EQ(decorrelator(c, c), 0.0);
    std::vector<SpinVector> opposite;
    for (const auto& s : c) opposite.push_back({-s.x, -s.y, -s.z});
    EXPECT_NEAR(decorrelator(c, SpinChain(opposite)), std::sqrt(2.0), 1e-15);
    EXPECT_THROW(decorrelator(c, uniform_random_chain(21, 1)), std::invalid_argument);
}

TEST(Decorrelator, IndependentChainsGiveOne)
{
    const SpinChain a = uniform_random_chain(10000, 100);
    const SpinChain b = uniform_random_chain(10000, 200);
    EXPECT_NEAR(decorrelator(a, b), 1.0, 0.02);
}

TEST(ThermalizationTime, InterpolatesStep)
{
    std::vector<double> d(200, 0.0);
    for (std::size_t k = 100; k < d.size(); ++k) d[k] = 1.0;
    const auto tau = thermalization_time(d);
    ASSERT_TRUE(tau);
    EXPECT_GT(*tau, 99.0);
    EXPECT_LE(*tau, 100.0);
    EXPECT_DOUBLE_EQ(*tau, 99.9);
}

TEST(ThermalizationTime, CensoredAndImmediate)
{
    EXPECT_FALSE(thermalization_time(std::vector<double>{0.1, 0.5, 0.89}).has_value());
    EXPECT_EQ(*thermalization_time(std::vector<double>{0.95, 0.1}), 0.0);
    EXPECT_DOUBLE_EQ(*thermalization_time(std::vector<double>{0.0, 0.45, 0.95}, 0.9, 2.0), 2.0 * (1 + 0.45 / 0.5));
    EXPECT_THROW(thermalization_time({}), std::invalid_argument);
}

TEST(TwinTrajectory, ZeroPerturbationKeepsDecorrelatorAtZero)
{
    const SpinChain c = uniform_random_chain(8, 3);
    TwinTrajectory twin(c, c, DriveParams{});
    for (int m = 0; m < 20; ++m) {
        twin.apply_flip();
        twin.apply_z_half();
        twin.apply_x_half();
        EXPECT_EQ(twin.sample(Phase::after_x).d, 0.0);
    }
    EXPECT_EQ(twin.completed_periods(), 20u);
}

TEST(Alternation, Helpers)
{
    const std::vector<double> s{0.5, -0.5, 0.4, -0.4, 0.01, -0.3, 0.3, 0.2};
    EXPECT_DOUBLE_EQ(alternation_fraction(s, 0, 4), 1.0);
    EXPECT_DOUBLE_EQ(alternation_fraction(s, 0, 100), 6.0 / 7.0);
    EXPECT_EQ(longest_alternating_run(s, 0.05), 3u);
    EXPECT_EQ(longest_alternating_run(s, 0.0), 6u);
    EXPECT_EQ(opposite_sign_samples(s, s.size()), 3u);
    EXPECT_EQ(opposite_sign_samples(s, 3), 1u);
    EXPECT_THROW(alternation_fraction(std::vector<double>{1.0}, 0, 1), std::invalid_argument);
}
