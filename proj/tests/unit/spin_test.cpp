#include "cldtc/spin.hpp"
#include "cldtc/rng.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace cldtc;

namespace {

oracle::Vec3 unit_axis(Axis a)
{
    switch (a) {
    case Axis::x: return {1, 0, 0};
    case Axis::y: return {0, 1, 0};
    case Axis::z: return {0, 0, 1};
    }
    return {0, 0, 1};
}

}  // namespace

TEST(Rotation, FlipTakesUpToDown)
{
    const SpinVector r = rotate_about_axis({0, 0, 1}, Axis::x, std::numbers::pi);
    EXPECT_NEAR(r.x, 0.0, 1e-15);
    EXPECT_NEAR(r.y, 0.0, 1e-15);
    EXPECT_NEAR(r.z, -1.0, 1e-15);
}

TEST(Rotation, PlanarAboutZ)
{
    for (double theta : {0.0, 0.3, 1.0, 2.5, -4.0}) {
        const SpinVector r = rotate_about_axis({1, 0, 0}, Axis::z, theta);
        EXPECT_NEAR(r.x, std::cos(theta), 1e-15);
        EXPECT_NEAR(r.y, std::sin(theta), 1e-15);
        EXPECT_NEAR(r.z, 0.0, 1e-15);
    }
}

TEST(Rotation, MatchesRotationMatrix)
{
    const auto expected = oracle::apply(oracle::rotation_matrix({1, 0, 0}, 0.3), {0.6, 0.0, 0.8});
    const SpinVector r = rotate_about_axis({0.6, 0.0, 0.8}, Axis::x, 0.3);
    EXPECT_NEAR(r.x, expected[0], 1e-15);
    EXPECT_NEAR(r.y, expected[1], 1e-15);
    EXPECT_NEAR(r.z, expected[2], 1e-15);
    // (0.6, -0.8 sin 0.3, 0.8 cos 0.3)
    EXPECT_NEAR(r.y, -0.23641616533, 1e-11);
    EXPECT_NEAR(r.z, 0.76426919130, 1e-11);
}

TEST(Rotation, AllAxesAgreeWithMatrixAndKeepNorm)
{
    RandomStream rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
        const SpinVector s = SpinVector::from_angles(std::acos(rng.uniform(-1, 1)), rng.uniform(0, 2 * std::numbers::pi));
        const Axis axis = static_cast<Axis>(trial % 3);
        const double angle = rng.uniform(-10, 10);
        const SpinVector r = rotate_about_axis(s, axis, angle);
        const auto e = oracle::apply(oracle::rotation_matrix(unit_axis(axis), angle), {s.x, s.y, s.z});
        EXPECT_NEAR(r.x, e[0], 1e-14);
        EXPECT_NEAR(r.y, e[1], 1e-14);
        EXPECT_NEAR(r.z, e[2], 1e-14);
        EXPECT_NEAR(r.norm(), 1.0, 1e-12);
    }
}

TEST(SpinVector, AnglesRoundTrip)
{
    const SpinVector s = SpinVector::from_angles(1.1, -2.0);
    EXPECT_NEAR(s.polar(), 1.1, 1e-14);
    EXPECT_NEAR(s.azimuth(), -2.0, 1e-14);
    EXPECT_NEAR(s.norm(), 1.0, 1e-15);
}

TEST(SpinChain, RejectsShortOrNonUnitInput)
{
    EXPECT_THROW(SpinChain({SpinVector{}}), std::invalid_argument);
    EXPECT_THROW(SpinChain({SpinVector{}, SpinVector{0, 0, 1.1}}), std::invalid_argument);
    EXPECT_THROW(SpinChain({SpinVector{}, SpinVector{0, 0, NAN}}), std::invalid_argument);
    EXPECT_NO_THROW(SpinChain({SpinVector{}, SpinVector{1, 0, 0}}));
}

TEST(SpinChain, PeriodicNeighbours)
{
    const SpinChain c = SpinChain::uniform(5, {});
    EXPECT_EQ(c.left(0), 4u);
    EXPECT_EQ(c.right(4), 0u);
    EXPECT_EQ(c.left(3), 2u);
    EXPECT_EQ(c.right(3), 4u);
}

TEST(SpinChain, RotateChainRotatesEverySite)
{
    const SpinChain c({SpinVector{1, 0, 0}, SpinVector{0, 1, 0}, SpinVector{0, 0, 1}});
    const SpinChain r = rotate_chain(c, Axis::z, std::numbers::pi / 2);
    EXPECT_NEAR(r[0].y, 1.0, 1e-15);
    EXPECT_NEAR(r[1].x, -1.0, 1e-15);
    EXPECT_EQ(r[2].z, 1.0);
    EXPECT_LE(r.max_norm_deviation(), 1e-15);
}
