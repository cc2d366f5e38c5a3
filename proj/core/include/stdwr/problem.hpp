#pragma once

#include "stdwr/mesh.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace stdwr {

/// Closed-form solution with the derivatives needed to manufacture f.
class ManufacturedSolution {
public:
    virtual ~ManufacturedSolution() = default;

    [[nodiscard]] virtual double value(Point x, double t) const = 0;
    [[nodiscard]] virtual double time_derivative(Point x, double t) const = 0;
    [[nodiscard]] virtual std::array<double, 2> gradient(Point x, double t) const = 0;
    [[nodiscard]] virtual double laplacian(Point x, double t) const = 0;
    /// Times where the solution is only C^0 in t (quadrature must not straddle them).
    [[nodiscard]] virtual std::vector<double> kinks(double T) const { (void)T; return {}; }
};

/// Identically zero; used by consistency tests.
class ZeroSolution final : public ManufacturedSolution {
public:
    double value(Point, double) const override { return 0.0; }
    double time_derivative(Point, double) const override { return 0.0; }
    std::array<double, 2> gradient(Point, double) const override { return {0.0, 0.0}; }
    double laplacian(Point, double) const override { return 0.0; }
};

/// Counterclockwise rotating hill whose height and orientation change over
/// each unit period:
///   u = nu1(t) s arctan(nu2(t)) / (1 + a |x - m(t)|^2)
class RotatingHill final : public ManufacturedSolution {
public:
    static constexpr double a = 50.0;
    static constexpr double s = 1.0 / 3.0;

    [[nodiscard]] static double m1(double t);
    [[nodiscard]] static double m2(double t);
    /// Time factor nu1(t) s arctan(nu2(t)) and its derivative.
    [[nodiscard]] static double amplitude(double t);
    [[nodiscard]] static double amplitude_derivative(double t);

    double value(Point x, double t) const override;
    double time_derivative(Point x, double t) const override;
    std::array<double, 2> gradient(Point x, double t) const override;
    double laplacian(Point x, double t) const override;
    std::vector<double> kinks(double T) const override;
};

/// Hump changing its height in time with a circular internal layer of width
/// O(sqrt(eps)).
class MovingHump final : public ManufacturedSolution {
public:
    static constexpr double r0 = 0.25;
    static constexpr double xc = 0.5;
    static constexpr double yc = 0.5;

    explicit MovingHump(double epsilon);

    double value(Point x, double t) const override;
    double time_derivative(Point x, double t) const override;
    std::array<double, 2> gradient(Point x, double t) const override;
    double laplacian(Point x, double t) const override;

private:
    double epsilon_;
    double kappa_;
};

enum class Preset { RotatingHill, MovingHump };

[[nodiscard]] std::string preset_name(Preset p);
/// Accepts "ex1-rotating-hill" / "ex1" and "ex2-moving-hump" / "ex2".
[[nodiscard]] Preset parse_preset(const std::string& name);

/// Coefficients and data of  d_t u - div(eps grad u) + b.grad u + alpha u = f
/// on a rectangle with Dirichlet trace g and initial value u0.
struct ProblemData {
    double epsilon = 1.0;
    std::array<double, 2> b{0.0, 0.0};
    double alpha = 0.0;
    double final_time = 1.0;
    Rectangle domain{};
    std::shared_ptr<const ManufacturedSolution> exact;
    std::function<double(Point, double)> f;
    std::function<double(Point)> u0;
    std::function<double(Point, double)> dirichlet;
    std::vector<double> kinks;

    /// Build f, u0, g and kinks from a manufactured solution.
    static ProblemData manufactured(std::shared_ptr<const ManufacturedSolution> ms, double epsilon,
                                    std::array<double, 2> b, double alpha, double T);
};

/// Problem data for a preset (epsilon only used by the moving hump).
[[nodiscard]] ProblemData make_problem(Preset preset, double epsilon);

/// Default SUPG scale delta_0 of a preset (0 for the rotating hill, 1 for the hump).
[[nodiscard]] double default_delta0(Preset preset);

[[nodiscard]] double exact_u_ex1(Point x, double t);
[[nodiscard]] double exact_u_ex2(Point x, double t, double epsilon);

/// f = d_t u - eps lap u + b.grad u + alpha u
[[nodiscard]] double manufactured_forcing(const ManufacturedSolution& ms, const ProblemData& data, Point x, double t);

/// Dirichlet trace of a preset; throws if x is not on the boundary of the unit square.
[[nodiscard]] double dirichlet_value(Preset preset, Point x, double t, double epsilon = 1.0);

}  // namespace stdwr
