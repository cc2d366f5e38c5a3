#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stdwr {

/// Quadrature rule on the unit interval [0, 1].
struct QuadratureRule1D {
    std::vector<double> points;
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const { return points.size(); }
};

/// n-point Gauss-Legendre rule mapped to [0, 1]; exact for degree 2n-1.
[[nodiscard]] QuadratureRule1D gauss_legendre(int n);

/// Equispaced points 0, 1/d, ..., 1 (d = 0 gives the single point 1/2).
[[nodiscard]] std::vector<double> equispaced_nodes(int degree);

/// Lagrange polynomials through an arbitrary set of distinct nodes.
class LagrangeBasis1D {
public:
    explicit LagrangeBasis1D(std::vector<double> nodes);

    [[nodiscard]] int degree() const { return static_cast<int>(nodes_.size()) - 1; }
    [[nodiscard]] std::size_t size() const { return nodes_.size(); }
    [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }

    [[nodiscard]] double value(std::size_t i, double x) const;
    [[nodiscard]] double derivative(std::size_t i, double x) const;
    [[nodiscard]] double second_derivative(std::size_t i, double x) const;

    /// Value of the interpolant sum_i coeffs[i] * L_i(x).
    [[nodiscard]] double interpolate(std::span<const double> coeffs, double x) const;

private:
    std::vector<double> nodes_;
    std::vector<double> denominators_;
};

/// Tensor-product Q_d Lagrange basis (equispaced nodes) tabulated at a tensor
/// Gauss rule on the reference square. Basis index is a + (d+1)*b where a runs
/// along x; quadrature index is gx + n*gy.
struct ReferenceTable {
    int degree = 0;
    int points_per_direction = 0;
    std::vector<double> weights;  // per quadrature point, sums to 1
    std::vector<double> qx, qy;   // reference coordinates of quadrature points
    std::vector<double> val, dx, dy, dxx, dyy;  // [q * n_basis + i]

    [[nodiscard]] std::size_t n_basis() const { return static_cast<std::size_t>((degree + 1) * (degree + 1)); }
    [[nodiscard]] std::size_t n_points() const { return weights.size(); }

    static ReferenceTable build(int degree, int points_per_direction);
};

/// Evaluate every Q_d basis function at a reference point (xi, eta).
void evaluate_q_basis(int degree, double xi, double eta, std::span<double> out);

}  // namespace stdwr
