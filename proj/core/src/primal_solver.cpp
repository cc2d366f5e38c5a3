#include "stdwr/primal_solver.hpp"

#include "stdwr/spatial_operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace stdwr {

namespace {

void add_kron(std::vector<Eigen::Triplet<double>>& trip, const Eigen::MatrixXd& A, const SparseMatrix& X)
{
    for (Eigen::Index l = 0; l < A.rows(); ++l) {
        for (Eigen::Index k = 0; k < A.cols(); ++k) {
            const double a = A(l, k);
            if (a == 0.0) {
                continue;
            }
            for (Eigen::Index i = 0; i < X.outerSize(); ++i) {
                for (SparseMatrix::InnerIterator it(X, i); it; ++it) {
                    trip.emplace_back(static_cast<int>(l * X.rows() + it.row()),
                                      static_cast<int>(k * X.cols() + it.col()), a * it.value());
                }
            }
        }
    }
}

// Slab lengths of a uniform partition differ in the last bits; drop them so equal slabs share one factorization.
double tau_key(double tau)
{
    int e = 0;
    const double m = std::frexp(tau, &e);
    return std::ldexp(std::round(std::ldexp(m, 40)), e - 40);
}

std::string slab_error(std::size_t slab, const std::string& what)
{
    return "slab " + std::to_string(slab + 1) + ": " + what;
}

}  // namespace

SparseMatrix kron_sum(const Eigen::MatrixXd& A, const SparseMatrix& X, const Eigen::MatrixXd& B, const SparseMatrix& Y)
{
    if (X.rows() != Y.rows() || X.cols() != Y.cols() || A.rows() != B.rows() || A.cols() != B.cols()) {
        throw std::invalid_argument("kron_sum: shape mismatch");
    }
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(A.size() * (X.nonZeros() + Y.nonZeros())));
    add_kron(trip, A, X);
    add_kron(trip, B, Y);
    SparseMatrix out(A.rows() * X.rows(), A.cols() * X.cols());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

SparseMatrix primal_slab_matrix(const SpatialOperators& ops, double tau, int r)
{
    const auto& tb = TemporalBasis::get(r);
    const Eigen::MatrixXd T1 = tb.derivative_matrix() + tb.left_values() * tb.left_values().transpose();
    const Eigen::MatrixXd T2 = tau * tb.mass();
    return kron_sum(T1, ops.r1, T2, ops.r2);
}

SparseMatrix primal_coupling_matrix(AssemblyContext& ctx, const std::shared_ptr<const DofHandler>& prev,
                                    const std::shared_ptr<const DofHandler>& cur, int r)
{
    const auto& tb = TemporalBasis::get(r);
    const Eigen::MatrixXd T = -tb.left_values() * tb.right_values().transpose();
    const auto& ops = ctx.operators(cur);
    const SparseMatrix X = ops.ct_s1 * transfer_matrix(*prev, *cur) * prev->free_to_nodal();
    const SparseMatrix zero(X.rows(), X.cols());
    return kron_sum(T, X, Eigen::MatrixXd::Zero(T.rows(), T.cols()), zero);
}

SlabSystem assemble_slab(AssemblyContext& ctx, const TimePartition& partition, std::size_t slab,
                         const std::shared_ptr<const DofHandler>& dofs, int r, const Vector& u_prev_end)
{
    if (slab >= partition.n_slabs()) {
        throw std::out_of_range(slab_error(slab, "index outside the partition"));
    }
    const bool exact_initial = u_prev_end.size() == 0;
    if (exact_initial && slab != 0) {
        throw std::invalid_argument(slab_error(slab, "missing previous state"));
    }
    if (!exact_initial && u_prev_end.size() != static_cast<Eigen::Index>(dofs->n_nodes())) {
        throw std::invalid_argument(slab_error(slab, "previous state does not match the slab mesh"));
    }
    const auto& data = ctx.data();
    const auto& ops = ctx.operators(dofs);
    const auto& tb = TemporalBasis::get(r);
    const double t0 = partition.start(slab);
    const double tau = partition.length(slab);
    const auto nr = static_cast<Eigen::Index>(r + 1);
    const auto nf = static_cast<Eigen::Index>(dofs->n_free());

    SlabSystem sys;
    sys.slab = slab;
    sys.space_degree = dofs->degree();
    sys.time_degree = r;
    sys.tau = tau;
    sys.dofs = dofs;
    sys.operator_key = &ops;
    sys.matrix = primal_slab_matrix(ops, tau, r);
    sys.rhs = Vector::Zero(nr * nf);

    const SparseMatrix& C = dofs->free_to_nodal();
    const auto& table = ctx.table(dofs->degree());
    const Vector ct_s1_prev = exact_initial
                                ? Vector(C.transpose() * assemble_tested(*dofs, data, ctx.delta0(), table, data.u0))
                                : Vector(ops.ct_s1 * u_prev_end);

    // Load: C^T int L_l(t) F(t) dt with F(t) = (f(t), psi + delta b.grad psi).
    const auto rule = slab_time_quadrature(t0, partition.end(slab), ctx.quadrature().time_points, data.kinks);
    for (std::size_t g = 0; g < rule.size(); ++g) {
        const Vector F = C.transpose() * assemble_load(*dofs, data, ctx.delta0(), table, rule.points[g]);
        const double s = (rule.points[g] - t0) / tau;
        for (Eigen::Index l = 0; l < nr; ++l) {
            sys.rhs.segment(l * nf, nf) += rule.weights[g] * tb.value(static_cast<std::size_t>(l), s) * F;
        }
    }
    for (Eigen::Index l = 0; l < nr; ++l) {
        sys.rhs.segment(l * nf, nf) += tb.left_values()[l] * ct_s1_prev;
    }

    // Dirichlet lifting.
    const Eigen::MatrixXd T1 = tb.derivative_matrix() + tb.left_values() * tb.left_values().transpose();
    const Eigen::MatrixXd T2 = tau * tb.mass();
    const auto times = tb.nodes();
    for (Eigen::Index k = 0; k < nr; ++k) {
        const double tk = t0 + times[static_cast<std::size_t>(k)] * tau;
        sys.boundary.push_back(dofs->boundary_values([&](Point x) { return data.dirichlet(x, tk); }));
    }
    if (dofs->n_boundary() > 0) {
        for (Eigen::Index k = 0; k < nr; ++k) {
            const Vector l1g = ops.l1 * sys.boundary[static_cast<std::size_t>(k)];
            const Vector l2g = ops.l2 * sys.boundary[static_cast<std::size_t>(k)];
            for (Eigen::Index l = 0; l < nr; ++l) {
                sys.rhs.segment(l * nf, nf) -= T1(l, k) * l1g + T2(l, k) * l2g;
            }
        }
    }
    return sys;
}

const SlabSolverCache::Solver& SlabSolverCache::factor(const void* operators, double tau, int r,
                                                       const SparseMatrix& matrix, std::size_t slab)
{
    const Key key{operators, tau_key(tau), r};
    if (auto it = cache_.find(key); it != cache_.end()) {
        it->second.last_use = ++clock_;
        return *it->second.solver;
    }
    auto solver = std::make_unique<Solver>();
    const Eigen::SparseMatrix<double> A = matrix;
    solver->compute(A);
    if (solver->info() != Eigen::Success) {
        throw std::runtime_error(slab_error(slab, "singular slab system"));
    }
    const auto nonzeros = static_cast<std::size_t>(solver->nnzL() + solver->nnzU());
    while (!cache_.empty() && (cache_.size() >= capacity_ || nonzeros_ + nonzeros > max_nonzeros_)) {
        evict_oldest();
    }
    auto& entry = cache_[key];
    entry.solver = std::move(solver);
    entry.last_use = ++clock_;
    entry.nonzeros = nonzeros;
    nonzeros_ += nonzeros;
    return *entry.solver;
}

void SlabSolverCache::evict_oldest()
{
    const auto oldest = std::min_element(cache_.begin(), cache_.end(), [](const auto& a, const auto& b) {
        return a.second.last_use < b.second.last_use;
    });
    nonzeros_ -= oldest->second.nonzeros;
    cache_.erase(oldest);
}

std::vector<Vector> solve_slab(const SlabSystem& system, SlabSolverCache* cache)
{
    const auto& dofs = *system.dofs;
    const auto nf = static_cast<Eigen::Index>(dofs.n_free());
    Vector x;
    if (nf > 0) {
        SlabSolverCache local;
        SlabSolverCache& c = cache ? *cache : local;
        const void* key = system.operator_key ? system.operator_key : &system.matrix;
        const auto& lu = c.factor(key, system.tau, system.time_degree, system.matrix, system.slab);
        x = lu.solve(system.rhs);
        const double res = (system.matrix * x - system.rhs).norm();
        if (res > 1e-10 * system.rhs.norm() && res > 1e-300) {
            throw std::runtime_error(slab_error(system.slab, "linear solve did not converge"));
        }
    }
    std::vector<Vector> out;
    for (int k = 0; k <= system.time_degree; ++k) {
        Vector u = dofs.boundary_to_nodal() * system.boundary[static_cast<std::size_t>(k)];
        if (nf > 0) {
            u += dofs.free_to_nodal() * x.segment(k * nf, nf);
        }
        out.push_back(std::move(u));
    }
    return out;
}

Trajectory solve_primal(AssemblyContext& ctx, const SpaceTimeMesh& mesh, int p, int r)
{
    mesh.validate();
    if (p < 1 || r < 0) {
        throw std::invalid_argument("solve_primal: need p >= 1 and r >= 0");
    }
    Trajectory traj;
    traj.partition = mesh.partition;
    traj.space_degree = p;
    traj.time_degree = r;
    SlabSolverCache cache;
    Vector prev;
    for (std::size_t n = 0; n < mesh.n_slabs(); ++n) {
        auto dofs = ctx.dofs(mesh.meshes[n], p);
        if (n == 0) {
            traj.initial = dofs->interpolate(ctx.data().u0);
            prev = Vector();
        } else {
            prev = transfer(*traj.dofs.back(), *dofs, traj.slabs.back().right_limit());
        }
        const auto sys = assemble_slab(ctx, mesh.partition, n, dofs, r, prev);
        auto values = solve_slab(sys, &cache);
        traj.dofs.push_back(dofs);
        traj.slabs.push_back(SlabPolynomial{mesh.partition.start(n), mesh.partition.end(n), r, std::move(values)});
    }
    return traj;
}

}  // namespace stdwr
