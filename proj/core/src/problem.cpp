#include "stdwr/problem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stdwr {

namespace {

constexpr double pi = std::numbers::pi;

struct HillPhase {
    double nu1;
    double nu2;
};

HillPhase hill_phase(double t)
{
    const double th = t - std::floor(t);
    if (th < 0.5) {
        return {-1.0, 5.0 * pi * (4.0 * th - 1.0)};
    }
    return {1.0, 5.0 * pi * (4.0 * (th - 0.5) - 1.0)};
}

}  // namespace

double RotatingHill::m1(double t)
{
    return 0.5 + 0.25 * std::cos(2.0 * pi * t);
}

double RotatingHill::m2(double t)
{
    return 0.5 + 0.25 * std::sin(2.0 * pi * t);
}

double RotatingHill::amplitude(double t)
{
    const auto [nu1, nu2] = hill_phase(t);
    return nu1 * s * std::atan(nu2);
}

double RotatingHill::amplitude_derivative(double t)
{
    const auto [nu1, nu2] = hill_phase(t);
    return nu1 * s * 20.0 * pi / (1.0 + nu2 * nu2);
}

double RotatingHill::value(Point x, double t) const
{
    const double dx = x.x - m1(t);
    const double dy = x.y - m2(t);
    return amplitude(t) / (1.0 + a * (dx * dx + dy * dy));
}

double RotatingHill::time_derivative(Point x, double t) const
{
    const double dx = x.x - m1(t);
    const double dy = x.y - m2(t);
    const double D = 1.0 + a * (dx * dx + dy * dy);
    const double m1p = -0.5 * pi * std::sin(2.0 * pi * t);
    const double m2p = 0.5 * pi * std::cos(2.0 * pi * t);
    const double dD = a * (-2.0 * dx * m1p - 2.0 * dy * m2p);
    return amplitude_derivative(t) / D - amplitude(t) * dD / (D * D);
}

std::array<double, 2> RotatingHill::gradient(Point x, double t) const
{
    const double dx = x.x - m1(t);
    const double dy = x.y - m2(t);
    const double D = 1.0 + a * (dx * dx + dy * dy);
    const double c = -amplitude(t) * 2.0 * a / (D * D);
    return {c * dx, c * dy};
}

double RotatingHill::laplacian(Point x, double t) const
{
    const double dx = x.x - m1(t);
    const double dy = x.y - m2(t);
    const double r2 = dx * dx + dy * dy;
    const double D = 1.0 + a * r2;
    // lap(1/D) = -lap D / D^2 + 2 |grad D|^2 / D^3
    return amplitude(t) * (-4.0 * a / (D * D) + 8.0 * a * a * r2 / (D * D * D));
}

std::vector<double> RotatingHill::kinks(double T) const
{
    std::vector<double> k;
    for (int i = 1; 0.5 * i < T; ++i) {
        k.push_back(0.5 * i);
    }
    return k;
}

MovingHump::MovingHump(double epsilon)
    : epsilon_(epsilon), kappa_(2.0 / std::sqrt(epsilon))
{
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("MovingHump: epsilon must be positive");
    }
}

double MovingHump::value(Point x, double t) const
{
    const double q = x.x * (1.0 - x.x) * x.y * (1.0 - x.y);
    const double w = r0 * r0 - (x.x - xc) * (x.x - xc) - (x.y - yc) * (x.y - yc);
    return 16.0 / pi * std::sin(pi * t) * q * (0.5 + std::atan(kappa_ * w));
}

double MovingHump::time_derivative(Point x, double t) const
{
    const double q = x.x * (1.0 - x.x) * x.y * (1.0 - x.y);
    const double w = r0 * r0 - (x.x - xc) * (x.x - xc) - (x.y - yc) * (x.y - yc);
    return 16.0 * std::cos(pi * t) * q * (0.5 + std::atan(kappa_ * w));
}

std::array<double, 2> MovingHump::gradient(Point x, double t) const
{
    const double c = 16.0 / pi * std::sin(pi * t);
    const double q = x.x * (1.0 - x.x) * x.y * (1.0 - x.y);
    const double qx = (1.0 - 2.0 * x.x) * x.y * (1.0 - x.y);
    const double qy = x.x * (1.0 - x.x) * (1.0 - 2.0 * x.y);
    const double w = r0 * r0 - (x.x - xc) * (x.x - xc) - (x.y - yc) * (x.y - yc);
    const double A = 0.5 + std::atan(kappa_ * w);
    const double S = kappa_ / (1.0 + kappa_ * kappa_ * w * w);
    const double Ax = S * (-2.0 * (x.x - xc));
    const double Ay = S * (-2.0 * (x.y - yc));
    return {c * (qx * A + q * Ax), c * (qy * A + q * Ay)};
}

double MovingHump::laplacian(Point x, double t) const
{
    const double c = 16.0 / pi * std::sin(pi * t);
    const double q = x.x * (1.0 - x.x) * x.y * (1.0 - x.y);
    const double qx = (1.0 - 2.0 * x.x) * x.y * (1.0 - x.y);
    const double qy = x.x * (1.0 - x.x) * (1.0 - 2.0 * x.y);
    const double lap_q = -2.0 * x.y * (1.0 - x.y) - 2.0 * x.x * (1.0 - x.x);
    const double ex = x.x - xc;
    const double ey = x.y - yc;
    const double w = r0 * r0 - ex * ex - ey * ey;
    const double A = 0.5 + std::atan(kappa_ * w);
    const double den = 1.0 + kappa_ * kappa_ * w * w;
    const double S = kappa_ / den;
    const double Ax = S * (-2.0 * ex);
    const double Ay = S * (-2.0 * ey);
    const double grad_w2 = 4.0 * (ex * ex + ey * ey);
    const double lap_A = -4.0 * S - 2.0 * kappa_ * kappa_ * kappa_ * w * grad_w2 / (den * den);
    return c * (A * lap_q + 2.0 * (qx * Ax + qy * Ay) + q * lap_A);
}

std::string preset_name(Preset p)
{
    return p == Preset::RotatingHill ? "ex1-rotating-hill" : "ex2-moving-hump";
}

Preset parse_preset(const std::string& name)
{
    if (name == "ex1-rotating-hill" || name == "ex1") {
        return Preset::RotatingHill;
    }
    if (name == "ex2-moving-hump" || name == "ex2") {
        return Preset::MovingHump;
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

double manufactured_forcing(const ManufacturedSolution& ms, const ProblemData& data, Point x, double t)
{
    const auto g = ms.gradient(x, t);
    return ms.time_derivative(x, t) - data.epsilon * ms.laplacian(x, t) + data.b[0] * g[0] + data.b[1] * g[1]
         + data.alpha * ms.value(x, t);
}

ProblemData ProblemData::manufactured(std::shared_ptr<const ManufacturedSolution> ms, double epsilon,
                                      std::array<double, 2> b, double alpha, double T)
{
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("ProblemData: epsilon must be positive");
    }
    ProblemData d;
    d.epsilon = epsilon;
    d.b = b;
    d.alpha = alpha;
    d.final_time = T;
    d.exact = ms;
    d.kinks = ms->kinks(T);
    const ManufacturedSolution* raw = ms.get();
    const double eps = epsilon;
    d.f = [raw, eps, b, alpha](Point x, double t) {
        const auto g = raw->gradient(x, t);
        return raw->time_derivative(x, t) - eps * raw->laplacian(x, t) + b[0] * g[0] + b[1] * g[1]
             + alpha * raw->value(x, t);
    };
    d.u0 = [raw](Point x) { return raw->value(x, 0.0); };
    d.dirichlet = [raw](Point x, double t) { return raw->value(x, t); };
    return d;
}

ProblemData make_problem(Preset preset, double epsilon)
{
    switch (preset) {
    case Preset::RotatingHill:
        return ProblemData::manufactured(std::make_shared<RotatingHill>(), epsilon, {2.0, 3.0}, 1.0, 1.0);
    case Preset::MovingHump: {
        auto d = ProblemData::manufactured(std::make_shared<MovingHump>(epsilon), epsilon, {2.0, 3.0}, 1.0, 0.5);
        d.dirichlet = [](Point, double) { return 0.0; };
        return d;
    }
    }
    throw std::invalid_argument("make_problem: unknown preset");
}

double default_delta0(Preset preset)
{
    return preset == Preset::RotatingHill ? 0.0 : 1.0;
}

double exact_u_ex1(Point x, double t)
{
    return RotatingHill{}.value(x, t);
}

double exact_u_ex2(Point x, double t, double epsilon)
{
    return MovingHump(epsilon).value(x, t);
}

double dirichlet_value(Preset preset, Point x, double t, double epsilon)
{
    constexpr double tol = 1e-12;
    const bool on_boundary = std::abs(x.x) < tol || std::abs(x.y) < tol || std::abs(x.x - 1.0) < tol
                          || std::abs(x.y - 1.0) < tol;
    if (!on_boundary) {
        throw std::invalid_argument("dirichlet_value: point is not on the boundary");
    }
    if (preset == Preset::RotatingHill) {
        return exact_u_ex1(x, t);
    }
    (void)epsilon;
    return 0.0;
}

}  // namespace stdwr
