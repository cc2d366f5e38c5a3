#include "stdwr/polynomials.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace stdwr {

QuadratureRule1D gauss_legendre(int n)
{
    if (n < 1) {
        throw std::invalid_argument("gauss_legendre: need at least one point");
    }
    QuadratureRule1D rule;
    rule.points.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n starting from the Chebyshev-like guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Ascending order on [0, 1].
        const auto idx = static_cast<std::size_t>(n - 1 - i);
        rule.points[idx] = 0.5 * (x + 1.0);
        rule.weights[idx] = 0.5 * w;
    }
    return rule;
}

std::vector<double> equispaced_nodes(int degree)
{
    if (degree < 0) {
        throw std::invalid_argument("equispaced_nodes: negative degree");
    }
    if (degree == 0) {
        return {0.5};
    }
    std::vector<double> nodes(static_cast<std::size_t>(degree + 1));
    for (int i = 0; i <= degree; ++i) {
        nodes[static_cast<std::size_t>(i)] = static_cast<double>(i) / degree;
    }
    return nodes;
}

LagrangeBasis1D::LagrangeBasis1D(std::vector<double> nodes)
    : nodes_(std::move(nodes))
{
    if (nodes_.empty()) {
        throw std::invalid_argument("LagrangeBasis1D: empty node set");
    }
    denominators_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        double d = 1.0;
        for (std::size_t m = 0; m < nodes_.size(); ++m) {
            if (m != i) {
                d *= nodes_[i] - nodes_[m];
            }
        }
        if (d == 0.0) {
            throw std::invalid_argument("LagrangeBasis1D: repeated nodes");
        }
        denominators_[i] = d;
    }
}

double LagrangeBasis1D::value(std::size_t i, double x) const
{
    double v = 1.0;
    for (std::size_t m = 0; m < nodes_.size(); ++m) {
        if (m != i) {
            v *= x - nodes_[m];
        }
    }
    return v / denominators_[i];
}

double LagrangeBasis1D::derivative(std::size_t i, double x) const
{
    double sum = 0.0;
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        if (j == i) {
            continue;
        }
        double prod = 1.0;
        for (std::size_t m = 0; m < nodes_.size(); ++m) {
            if (m != i && m != j) {
                prod *= x - nodes_[m];
            }
        }
        sum += prod;
    }
    return sum / denominators_[i];
}

double LagrangeBasis1D::second_derivative(std::size_t i, double x) const
{
    double sum = 0.0;
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        if (j == i) {
            continue;
        }
        for (std::size_t k = 0; k < nodes_.size(); ++k) {
            if (k == i || k == j) {
                continue;
            }
            double prod = 1.0;
            for (std::size_t m = 0; m < nodes_.size(); ++m) {
                if (m != i && m != j && m != k) {
                    prod *= x - nodes_[m];
                }
            }
            sum += prod;
        }
    }
    return sum / denominators_[i];
}

double LagrangeBasis1D::interpolate(std::span<const double> coeffs, double x) const
{
    double v = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        v += coeffs[i] * value(i, x);
    }
    return v;
}

ReferenceTable ReferenceTable::build(int degree, int points_per_direction)
{
    ReferenceTable t;
    t.degree = degree;
    t.points_per_direction = points_per_direction;
    const auto rule = gauss_legendre(points_per_direction);
    const LagrangeBasis1D basis(equispaced_nodes(degree));
    const auto nq1 = rule.size();
    const auto nb1 = basis.size();

    std::vector<double> v(nq1 * nb1), d(nq1 * nb1), dd(nq1 * nb1);
    for (std::size_t g = 0; g < nq1; ++g) {
        for (std::size_t a = 0; a < nb1; ++a) {
            v[g * nb1 + a] = basis.value(a, rule.points[g]);
            d[g * nb1 + a] = basis.derivative(a, rule.points[g]);
            dd[g * nb1 + a] = basis.second_derivative(a, rule.points[g]);
        }
    }

    const std::size_t nq = nq1 * nq1;
    const std::size_t nb = nb1 * nb1;
    t.weights.resize(nq);
    t.qx.resize(nq);
    t.qy.resize(nq);
    t.val.resize(nq * nb);
    t.dx.resize(nq * nb);
    t.dy.resize(nq * nb);
    t.dxx.resize(nq * nb);
    t.dyy.resize(nq * nb);
    for (std::size_t gy = 0; gy < nq1; ++gy) {
        for (std::size_t gx = 0; gx < nq1; ++gx) {
            const std::size_t q = gx + nq1 * gy;
            t.weights[q] = rule.weights[gx] * rule.weights[gy];
            t.qx[q] = rule.points[gx];
            t.qy[q] = rule.points[gy];
            for (std::size_t b = 0; b < nb1; ++b) {
                for (std::size_t a = 0; a < nb1; ++a) {
                    const std::size_t i = a + nb1 * b;
                    const std::size_t k = q * nb + i;
                    t.val[k] = v[gx * nb1 + a] * v[gy * nb1 + b];
                    t.dx[k] = d[gx * nb1 + a] * v[gy * nb1 + b];
                    t.dy[k] = v[gx * nb1 + a] * d[gy * nb1 + b];
                    t.dxx[k] = dd[gx * nb1 + a] * v[gy * nb1 + b];
                    t.dyy[k] = v[gx * nb1 + a] * dd[gy * nb1 + b];
                }
            }
        }
    }
    return t;
}

void evaluate_q_basis(int degree, double xi, double eta, std::span<double> out)
{
    const LagrangeBasis1D basis(equispaced_nodes(degree));
    const std::size_t nb1 = basis.size();
    for (std::size_t b = 0; b < nb1; ++b) {
        const double vy = basis.value(b, eta);
        for (std::size_t a = 0; a < nb1; ++a) {
            out[a + nb1 * b] = basis.value(a, xi) * vy;
        }
    }
}

}  // namespace stdwr
