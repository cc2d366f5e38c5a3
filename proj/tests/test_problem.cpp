#include "stdwr/problem.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace stdwr;

namespace {

constexpr double pi = std::numbers::pi;

struct Sample {
    Point x;
    double t;
};

std::vector<Sample> samples(std::uint64_t seed, double t_max, bool avoid_half)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    std::uniform_real_distribution<double> ut(0.02, t_max - 0.02);
    std::vector<Sample> out;
    while (out.size() < 20) {
        const double t = ut(rng);
        // keep clear of the amplitude kinks so the central difference sees one branch
        if (avoid_half && std::abs(t - 0.5 * std::round(2.0 * t)) < 1e-3) {
            continue;
        }
        out.push_back({{u(rng), u(rng)}, t});
    }
    return out;
}

void check_derivatives(const ManufacturedSolution& ms, double t_max, bool avoid_half)
{
    constexpr double h = 1e-5;
    for (const auto& [x, t] : samples(7, t_max, avoid_half)) {
        const double dt = (ms.value(x, t + h) - ms.value(x, t - h)) / (2 * h);
        const double dx = (ms.value({x.x + h, x.y}, t) - ms.value({x.x - h, x.y}, t)) / (2 * h);
        const double dy = (ms.value({x.x, x.y + h}, t) - ms.value({x.x, x.y - h}, t)) / (2 * h);
        const double c = ms.value(x, t);
        const double lap = (ms.value({x.x + h, x.y}, t) + ms.value({x.x - h, x.y}, t) + ms.value({x.x, x.y + h}, t)
                            + ms.value({x.x, x.y - h}, t) - 4 * c)
                         / (h * h);
        const auto g = ms.gradient(x, t);
        const auto rel = [](double got, double want, double scale) {
            return std::abs(got - want) / std::max(1.0, std::abs(scale));
        };
        EXPECT_LT(rel(ms.time_derivative(x, t), dt, dt), 1e-6) << x.x << ' ' << x.y << ' ' << t;
        EXPECT_LT(rel(g[0], dx, dx), 1e-6);
        EXPECT_LT(rel(g[1], dy, dy), 1e-6);
        // second differences lose about half the digits
        EXPECT_LT(rel(ms.laplacian(x, t), lap, lap), 5e-3);
    }
}

}  // namespace

TEST(RotatingHill, ValueAtOrbitCentreAtTimeZero)
{
    // centre (m1, m2)(0) = (0.75, 0.5), so only the amplitude survives
    const double want = std::atan(5.0 * pi) / 3.0;
    EXPECT_NEAR(exact_u_ex1({0.75, 0.5}, 0.0), want, 1e-14);
    EXPECT_NEAR(exact_u_ex1({0.75, 0.5}, 0.0), 0.50246, 1e-3);
}

TEST(RotatingHill, CentreIsPeriodicWithPeriodOne)
{
    for (const double t : {0.0, 0.13, 0.5, 0.77}) {
        EXPECT_NEAR(RotatingHill::m1(t + 1.0), RotatingHill::m1(t), 1e-14);
        EXPECT_NEAR(RotatingHill::m2(t + 1.0), RotatingHill::m2(t), 1e-14);
    }
    EXPECT_NEAR(RotatingHill::m1(0.25), 0.5, 1e-15);
    EXPECT_NEAR(RotatingHill::m2(0.25), 0.75, 1e-15);
}

TEST(RotatingHill, AmplitudeIsContinuousAcrossHalfPeriod)
{
    const double below = RotatingHill::amplitude(0.5 - 1e-12);
    const double above = RotatingHill::amplitude(0.5 + 1e-12);
    EXPECT_NEAR(below, above, 1e-9);
    EXPECT_NEAR(below, -std::atan(5.0 * pi) / 3.0, 1e-9);
}

TEST(RotatingHill, DerivativesMatchCentralDifferences)
{
    check_derivatives(RotatingHill{}, 1.0, true);
}

TEST(RotatingHill, KinksAtHalfIntegers)
{
    EXPECT_EQ(RotatingHill{}.kinks(1.0), (std::vector<double>{0.5}));
    EXPECT_EQ(RotatingHill{}.kinks(1.6), (std::vector<double>{0.5, 1.0, 1.5}));
}

TEST(MovingHump, VanishesInitiallyAndOnTheBoundary)
{
    const MovingHump ms(1e-3);
    EXPECT_EQ(ms.value({0.3, 0.6}, 0.0), 0.0);
    for (const double s : {0.0, 0.25, 0.9}) {
        EXPECT_NEAR(ms.value({s, 0.0}, 0.3), 0.0, 1e-16);
        EXPECT_NEAR(ms.value({1.0, s}, 0.3), 0.0, 1e-16);
    }
}

TEST(MovingHump, ValueAtCentre)
{
    const double want = (0.5 + std::atan(200.0 * 0.0625)) / pi;
    EXPECT_NEAR(exact_u_ex2({0.5, 0.5}, 0.5, 1e-4), want, 1e-14);
    EXPECT_NEAR(exact_u_ex2({0.5, 0.5}, 0.5, 1e-4), 0.63376, 1e-4);  // reference value is rounded up
}

TEST(MovingHump, DerivativesMatchCentralDifferences)
{
    check_derivatives(MovingHump(1.0), 0.5, false);
    check_derivatives(MovingHump(1e-2), 0.5, false);
}

TEST(MovingHump, RejectsNonpositiveEpsilon)
{
    EXPECT_THROW(MovingHump(0.0), std::invalid_argument);
}

TEST(Forcing, MakesTheExactSolutionSatisfyTheEquation)
{
    const auto data = make_problem(Preset::MovingHump, 0.1);
    const Point x{0.3, 0.4};
    const double t = 0.2;
    const auto& ms = *data.exact;
    const auto g = ms.gradient(x, t);
    const double residual = ms.time_derivative(x, t) - 0.1 * ms.laplacian(x, t) + 2.0 * g[0] + 3.0 * g[1]
                          + ms.value(x, t) - data.f(x, t);
    EXPECT_NEAR(residual, 0.0, 1e-12);
    EXPECT_NEAR(manufactured_forcing(ms, data, x, t), data.f(x, t), 1e-14);
}

TEST(Presets, ParametersAndNames)
{
    for (const auto preset : {Preset::RotatingHill, Preset::MovingHump}) {
        const auto d = make_problem(preset, 1e-3);
        EXPECT_EQ(d.b[0], 2.0);
        EXPECT_EQ(d.b[1], 3.0);
        EXPECT_EQ(d.alpha, 1.0);
        EXPECT_EQ(d.epsilon, 1e-3);
        EXPECT_EQ(parse_preset(preset_name(preset)), preset);
    }
    EXPECT_EQ(make_problem(Preset::RotatingHill, 1.0).final_time, 1.0);
    EXPECT_EQ(make_problem(Preset::MovingHump, 1.0).final_time, 0.5);
    EXPECT_EQ(preset_name(Preset::RotatingHill), "ex1-rotating-hill");
    EXPECT_EQ(preset_name(Preset::MovingHump), "ex2-moving-hump");
    EXPECT_THROW((void)parse_preset("ex3"), std::invalid_argument);
    EXPECT_EQ(default_delta0(Preset::RotatingHill), 0.0);
    EXPECT_EQ(default_delta0(Preset::MovingHump), 1.0);
}

TEST(Dirichlet, BoundaryValues)
{
    EXPECT_EQ(dirichlet_value(Preset::MovingHump, {0.0, 0.4}, 0.2, 1e-3), 0.0);
    EXPECT_NEAR(dirichlet_value(Preset::RotatingHill, {1.0, 0.4}, 0.2), exact_u_ex1({1.0, 0.4}, 0.2), 1e-15);
    // periodic in time through the orbit and amplitude
    EXPECT_NEAR(dirichlet_value(Preset::RotatingHill, {0.0, 0.3}, 0.1),
                dirichlet_value(Preset::RotatingHill, {0.0, 0.3}, 1.1), 1e-12);
    EXPECT_THROW((void)dirichlet_value(Preset::MovingHump, {0.5, 0.5}, 0.1), std::invalid_argument);
}
