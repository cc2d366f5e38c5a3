#include "stdwr/time_grid.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>

namespace stdwr {

TimePartition::TimePartition(std::vector<double> points)
    : points_(std::move(points))
{
    if (points_.size() < 2) {
        throw std::invalid_argument("TimePartition: need at least one slab");
    }
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (!(points_[i] > points_[i - 1])) {
            throw std::invalid_argument("TimePartition: time points must be strictly increasing");
        }
    }
}

TimePartition TimePartition::uniform(double T, int N)
{
    if (!(T > 0.0) || N < 1) {
        throw std::invalid_argument("TimePartition::uniform: T and N must be positive");
    }
    std::vector<double> pts(static_cast<std::size_t>(N) + 1);
    for (int n = 0; n <= N; ++n) {
        pts[static_cast<std::size_t>(n)] = T * static_cast<double>(n) / N;
    }
    pts.back() = T;
    return TimePartition(std::move(pts));
}

TimePartition TimePartition::refine(std::span<const std::size_t> marks) const
{
    std::set<std::size_t> marked;
    for (const auto m : marks) {
        if (m >= n_slabs()) {
            throw std::out_of_range("TimePartition::refine: unknown slab index " + std::to_string(m));
        }
        marked.insert(m);
    }
    std::vector<double> pts;
    pts.reserve(points_.size() + marked.size());
    for (std::size_t n = 0; n < n_slabs(); ++n) {
        pts.push_back(points_[n]);
        if (marked.contains(n)) {
            pts.push_back(0.5 * (points_[n] + points_[n + 1]));
        }
    }
    pts.push_back(points_.back());
    return TimePartition(std::move(pts));
}

std::string TimePartition::dump() const
{
    std::string out;
    char line[96];
    for (std::size_t n = 0; n < n_slabs(); ++n) {
        std::snprintf(line, sizeof line, "%zu %.17g %.17g\n", n + 1, start(n), end(n));
        out += line;
    }
    return out;
}

TemporalBasis::TemporalBasis(int degree)
    : degree_(degree), lagrange_(gauss_legendre(degree + 1).points)
{
    if (degree < 0) {
        throw std::invalid_argument("TemporalBasis: negative degree");
    }
    const auto n = static_cast<Eigen::Index>(size());
    const auto rule = gauss_legendre(degree + 2);
    mass_ = Eigen::MatrixXd::Zero(n, n);
    derivative_ = Eigen::MatrixXd::Zero(n, n);
    left_.resize(n);
    right_.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        left_[k] = lagrange_.value(uk, 0.0);
        right_[k] = lagrange_.value(uk, 1.0);
        for (Eigen::Index l = 0; l < n; ++l) {
            const auto ul = static_cast<std::size_t>(l);
            for (std::size_t g = 0; g < rule.size(); ++g) {
                const double s = rule.points[g];
                mass_(l, k) += rule.weights[g] * lagrange_.value(uk, s) * lagrange_.value(ul, s);
                derivative_(l, k) += rule.weights[g] * lagrange_.derivative(uk, s) * lagrange_.value(ul, s);
            }
        }
    }
}

const TemporalBasis& TemporalBasis::get(int degree)
{
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<TemporalBasis>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[degree];
    if (!slot) {
        slot = std::make_unique<TemporalBasis>(degree);
    }
    return *slot;
}

std::vector<double> SlabPolynomial::node_times() const
{
    std::vector<double> t;
    for (const double s : TemporalBasis::get(degree).nodes()) {
        t.push_back(t0 + s * (t1 - t0));
    }
    return t;
}

Eigen::VectorXd SlabPolynomial::evaluate(double t) const
{
    const auto& basis = TemporalBasis::get(degree);
    const double s = (t - t0) / (t1 - t0);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(block_size());
    for (std::size_t k = 0; k < nodal.size(); ++k) {
        v += basis.value(k, s) * nodal[k];
    }
    return v;
}

Eigen::VectorXd SlabPolynomial::time_derivative(double t) const
{
    const auto& basis = TemporalBasis::get(degree);
    const double s = (t - t0) / (t1 - t0);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(block_size());
    for (std::size_t k = 0; k < nodal.size(); ++k) {
        v += basis.derivative(k, s) * nodal[k];
    }
    return v / (t1 - t0);
}

Eigen::VectorXd SlabPolynomial::left_limit() const
{
    return evaluate(t0);
}

Eigen::VectorXd SlabPolynomial::right_limit() const
{
    return evaluate(t1);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> slab_limits(const SlabPolynomial& poly)
{
    return {poly.left_limit(), poly.right_limit()};
}

SlabPolynomial reconstruct_time(const SlabPolynomial& values, const Eigen::VectorXd& left_state)
{
    if (left_state.size() != values.block_size()) {
        throw std::invalid_argument("reconstruct_time: left state size mismatch");
    }
    const auto& in_basis = TemporalBasis::get(values.degree);
    std::vector<double> nodes{0.0};
    nodes.insert(nodes.end(), in_basis.nodes().begin(), in_basis.nodes().end());
    const LagrangeBasis1D lifted(nodes);

    SlabPolynomial out{values.t0, values.t1, values.degree + 1, {}};
    for (const double s : TemporalBasis::get(out.degree).nodes()) {
        Eigen::VectorXd v = lifted.value(0, s) * left_state;
        for (std::size_t k = 0; k < values.nodal.size(); ++k) {
            v += lifted.value(k + 1, s) * values.nodal[k];
        }
        out.nodal.push_back(std::move(v));
    }
    return out;
}

SlabPolynomial restrict_time(const SlabPolynomial& values, int r)
{
    if (r >= values.degree) {
        throw std::invalid_argument("restrict_time: target degree must be below the source degree");
    }
    if (r < 0) {
        throw std::invalid_argument("restrict_time: negative target degree");
    }
    SlabPolynomial out{values.t0, values.t1, r, {}};
    for (const double s : TemporalBasis::get(r).nodes()) {
        out.nodal.push_back(values.evaluate(values.t0 + s * values.length()));
    }
    return out;
}

SlabPolynomial elevate_time(const SlabPolynomial& values, int degree)
{
    if (degree < values.degree) {
        throw std::invalid_argument("elevate_time: target degree below source degree");
    }
    SlabPolynomial out{values.t0, values.t1, degree, {}};
    for (const double s : TemporalBasis::get(degree).nodes()) {
        out.nodal.push_back(values.evaluate(values.t0 + s * values.length()));
    }
    return out;
}

std::vector<double> monomial_coefficients(const SlabPolynomial& scalar_poly)
{
    const int d = scalar_poly.degree;
    const auto n = static_cast<Eigen::Index>(d + 1);
    Eigen::MatrixXd V(n, n);
    Eigen::VectorXd y(n);
    const auto times = scalar_poly.node_times();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = times[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < n; ++j) {
            V(i, j) = std::pow(t, static_cast<double>(j));
        }
        y[i] = scalar_poly.nodal[static_cast<std::size_t>(i)][0];
    }
    const Eigen::VectorXd c = V.fullPivLu().solve(y);
    return {c.data(), c.data() + c.size()};
}

QuadratureRule1D slab_time_quadrature(double t0, double t1, int points, std::span<const double> kinks)
{
    std::vector<double> cuts{t0};
    for (const double k : kinks) {
        if (k > t0 && k < t1) {
            cuts.push_back(k);
        }
    }
    cuts.push_back(t1);
    std::sort(cuts.begin(), cuts.end());
    const auto ref = gauss_legendre(points);
    QuadratureRule1D rule;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s];
        const double len = cuts[s + 1] - a;
        for (std::size_t g = 0; g < ref.size(); ++g) {
            rule.points.push_back(a + ref.points[g] * len);
            rule.weights.push_back(ref.weights[g] * len);
        }
    }
    return rule;
}

}  // namespace stdwr
