#pragma once

#include "stdwr/polynomials.hpp"

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

namespace stdwr {

/// Time points 0 = t_0 < t_1 < ... < t_N = T; slab n (0-based) is (t_n, t_{n+1}].
class TimePartition {
public:
    TimePartition() = default;
    explicit TimePartition(std::vector<double> points);

    static TimePartition uniform(double T, int N);

    [[nodiscard]] TimePartition refine(std::span<const std::size_t> marks) const;

    [[nodiscard]] std::size_t n_slabs() const { return points_.empty() ? 0 : points_.size() - 1; }
    [[nodiscard]] double start(std::size_t n) const { return points_.at(n); }
    [[nodiscard]] double end(std::size_t n) const { return points_.at(n + 1); }
    [[nodiscard]] double length(std::size_t n) const { return end(n) - start(n); }
    [[nodiscard]] double final_time() const { return points_.back(); }
    [[nodiscard]] const std::vector<double>& points() const { return points_; }

    /// One line per slab: "n t_start t_end" (n 1-based).
    [[nodiscard]] std::string dump() const;

    friend bool operator==(const TimePartition&, const TimePartition&) = default;

private:
    std::vector<double> points_;
};

/// dG(r) nodal basis: Lagrange polynomials through the r+1 Gauss-Legendre
/// points of the reference slab [0, 1], plus the reference matrices used by the
/// slab assembly.
class TemporalBasis {
public:
    explicit TemporalBasis(int degree);

    /// Shared instance per degree.
    static const TemporalBasis& get(int degree);

    [[nodiscard]] int degree() const { return degree_; }
    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(degree_ + 1); }
    [[nodiscard]] const std::vector<double>& nodes() const { return lagrange_.nodes(); }
    [[nodiscard]] const LagrangeBasis1D& lagrange() const { return lagrange_; }

    [[nodiscard]] double value(std::size_t k, double s) const { return lagrange_.value(k, s); }
    /// d/ds on the reference slab.
    [[nodiscard]] double derivative(std::size_t k, double s) const { return lagrange_.derivative(k, s); }

    /// mass(l, k) = int_0^1 L_k L_l ds
    [[nodiscard]] const Eigen::MatrixXd& mass() const { return mass_; }
    /// derivative(l, k) = int_0^1 L_k' L_l ds
    [[nodiscard]] const Eigen::MatrixXd& derivative_matrix() const { return derivative_; }
    [[nodiscard]] const Eigen::VectorXd& left_values() const { return left_; }
    [[nodiscard]] const Eigen::VectorXd& right_values() const { return right_; }

private:
    int degree_;
    LagrangeBasis1D lagrange_;
    Eigen::MatrixXd mass_;
    Eigen::MatrixXd derivative_;
    Eigen::VectorXd left_;
    Eigen::VectorXd right_;
};

/// Polynomial in time on one slab (t0, t1] with vector-valued coefficients at
/// the Gauss nodes of its degree.
struct SlabPolynomial {
    double t0 = 0.0;
    double t1 = 1.0;
    int degree = 0;
    std::vector<Eigen::VectorXd> nodal;

    static SlabPolynomial from_function(double t0, double t1, int degree, const auto& fn)
    {
        SlabPolynomial p{t0, t1, degree, {}};
        for (const double s : TemporalBasis::get(degree).nodes()) {
            p.nodal.push_back(fn(t0 + s * (t1 - t0)));
        }
        return p;
    }

    [[nodiscard]] double length() const { return t1 - t0; }
    [[nodiscard]] Eigen::Index block_size() const { return nodal.empty() ? 0 : nodal.front().size(); }
    [[nodiscard]] std::vector<double> node_times() const;
    [[nodiscard]] Eigen::VectorXd evaluate(double t) const;
    [[nodiscard]] Eigen::VectorXd time_derivative(double t) const;
    /// Value at t0^+.
    [[nodiscard]] Eigen::VectorXd left_limit() const;
    /// Value at t1^-.
    [[nodiscard]] Eigen::VectorXd right_limit() const;
};

/// (value at t_{n-1}^+, value at t_n^-)
[[nodiscard]] std::pair<Eigen::VectorXd, Eigen::VectorXd> slab_limits(const SlabPolynomial& poly);

/// Degree r+1 polynomial interpolating `left_state` at t0 and `values` at its
/// r+1 Gauss nodes.
[[nodiscard]] SlabPolynomial reconstruct_time(const SlabPolynomial& values, const Eigen::VectorXd& left_state);

/// Interpolant of `values` (degree s) at the r+1 Gauss nodes of the slab; r < s.
[[nodiscard]] SlabPolynomial restrict_time(const SlabPolynomial& values, int r);

/// Re-express a slab polynomial on the Gauss nodes of a higher degree.
[[nodiscard]] SlabPolynomial elevate_time(const SlabPolynomial& values, int degree);

/// Monomial coefficients c_0..c_d of a scalar slab polynomial in t (physical time).
[[nodiscard]] std::vector<double> monomial_coefficients(const SlabPolynomial& scalar_poly);

/// Gauss rule on (t0, t1] in physical time, split at any kink strictly inside
/// the interval so that no sub-rule straddles a kink.
[[nodiscard]] QuadratureRule1D slab_time_quadrature(double t0, double t1, int points, std::span<const double> kinks);

}  // namespace stdwr
