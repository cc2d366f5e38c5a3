#include "stdwr/dual_solver.hpp"

#include <cmath>
#include <stdexcept>

namespace stdwr {

std::string goal_name(GoalKind kind)
{
    return kind == GoalKind::L2L2 ? "L2L2" : "FinalTime";
}

GoalKind parse_goal(const std::string& name)
{
    if (name == "L2L2" || name == "JQ") {
        return GoalKind::L2L2;
    }
    if (name == "FinalTime" || name == "JT") {
        return GoalKind::FinalTime;
    }
    throw std::invalid_argument("unknown goal '" + name + "'");
}

namespace {

// sum over cells of int_K e^2 for cell-major point values on the goal rule
double squared_norm(const SpatialMesh& mesh, const ReferenceTable& table, const std::vector<double>& e)
{
    const std::size_t nq = table.n_points();
    double sum = 0.0;
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const double jac = mesh.cell(c).area();
        for (std::size_t g = 0; g < nq; ++g) {
            const double v = e[c * nq + g];
            sum += table.weights[g] * jac * v * v;
        }
    }
    return sum;
}

// nodal vector (e(t), psi_i) / norm over the cells of dofs' mesh
Vector tested_error(const DofHandler& dofs, const ReferenceTable& table, const std::vector<double>& e, double scale)
{
    const auto& mesh = dofs.mesh();
    const std::size_t nb = table.n_basis();
    const std::size_t nq = table.n_points();
    Vector out = Vector::Zero(static_cast<Eigen::Index>(dofs.n_nodes()));
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const double jac = mesh.cell(c).area();
        const auto nodes = dofs.cell_nodes(c);
        for (std::size_t g = 0; g < nq; ++g) {
            const double w = table.weights[g] * jac * e[c * nq + g] * scale;
            for (std::size_t i = 0; i < nb; ++i) {
                out[static_cast<Eigen::Index>(nodes[i])] += w * table.val[g * nb + i];
            }
        }
    }
    return out;
}

}  // namespace

GoalFunctional::GoalFunctional(GoalKind kind, AssemblyContext& ctx, const Trajectory& primal)
    : kind_(kind), ctx_(&ctx), primal_(&primal)
{
    if (!ctx.data().exact) {
        throw std::invalid_argument("GoalFunctional: problem has no exact solution");
    }
    if (primal.n_slabs() == 0) {
        throw std::invalid_argument("GoalFunctional: empty trajectory");
    }
    const int ppd = ctx.quadrature().goal_space_points;
    const auto& table = ctx.table(primal.space_degree, ppd);
    double sq = 0.0;
    if (kind == GoalKind::L2L2) {
        for (std::size_t n = 0; n < primal.n_slabs(); ++n) {
            const auto rule = time_rule(n);
            for (std::size_t g = 0; g < rule.size(); ++g) {
                sq += rule.weights[g] * squared_norm(primal.dofs[n]->mesh(), table, error_at(n, rule.points[g]));
            }
        }
    } else {
        const std::size_t last = primal.n_slabs() - 1;
        sq = squared_norm(primal.dofs[last]->mesh(), table, error_at(last, primal.partition.final_time()));
    }
    norm_ = std::sqrt(sq);
}

QuadratureRule1D GoalFunctional::time_rule(std::size_t n) const
{
    const auto& part = primal_->partition;
    return slab_time_quadrature(part.start(n), part.end(n), ctx_->quadrature().time_points + 2, ctx_->data().kinks);
}

std::vector<double> GoalFunctional::error_at(std::size_t n, double t) const
{
    const auto& dofs = *primal_->dofs.at(n);
    const auto& mesh = dofs.mesh();
    const auto& table = ctx_->table(dofs.degree(), ctx_->quadrature().goal_space_points);
    const auto& exact = *ctx_->data().exact;
    const std::size_t nb = table.n_basis();
    const std::size_t nq = table.n_points();
    const Vector local = dofs.gather(primal_->slabs.at(n).evaluate(t));
    std::vector<double> e(mesh.n_cells() * nq);
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const auto& cell = mesh.cell(c);
        const double* u = local.data() + c * nb;
        for (std::size_t g = 0; g < nq; ++g) {
            double uh = 0.0;
            for (std::size_t i = 0; i < nb; ++i) {
                uh += u[i] * table.val[g * nb + i];
            }
            const Point x{cell.x0 + table.qx[g] * cell.hx(), cell.y0 + table.qy[g] * cell.hy()};
            e[c * nq + g] = exact.value(x, t) - uh;
        }
    }
    return e;
}

double goal_error(GoalKind kind, AssemblyContext& ctx, const Trajectory& primal)
{
    return GoalFunctional(kind, ctx, primal).normalization();
}

Vector assemble_dual_rhs(const GoalFunctional& goal, AssemblyContext& ctx, std::size_t n,
                         const std::shared_ptr<const DofHandler>& dofs, int s)
{
    if (goal.exact()) {
        throw std::domain_error("assemble_dual_rhs: goal already exact (zero error norm)");
    }
    const auto& primal = goal.primal();
    if (dofs->mesh_ptr() != primal.dofs.at(n)->mesh_ptr()) {
        throw std::invalid_argument("assemble_dual_rhs: dual and primal slab meshes differ");
    }
    const auto& tb = TemporalBasis::get(s);
    const auto nr = static_cast<Eigen::Index>(s + 1);
    const auto nf = static_cast<Eigen::Index>(dofs->n_free());
    Vector rhs = Vector::Zero(nr * nf);
    const auto& table = ctx.table(dofs->degree(), ctx.quadrature().goal_space_points);
    const SparseMatrix Ct = dofs->free_to_nodal().transpose();
    const double scale = 1.0 / goal.normalization();

    if (goal.kind() == GoalKind::L2L2) {
        const auto rule = goal.time_rule(n);
        const double t0 = primal.partition.start(n);
        const double tau = primal.partition.length(n);
        for (std::size_t g = 0; g < rule.size(); ++g) {
            const Vector v = Ct * tested_error(*dofs, table, goal.error_at(n, rule.points[g]), scale);
            const double sref = (rule.points[g] - t0) / tau;
            for (Eigen::Index k = 0; k < nr; ++k) {
                rhs.segment(k * nf, nf) += rule.weights[g] * tb.value(static_cast<std::size_t>(k), sref) * v;
            }
        }
    } else if (n + 1 == primal.n_slabs()) {
        const Vector v
            = Ct * tested_error(*dofs, table, goal.error_at(n, primal.partition.final_time()), scale);
        for (Eigen::Index k = 0; k < nr; ++k) {
            rhs.segment(k * nf, nf) = tb.right_values()[k] * v;
        }
    }
    return rhs;
}

SparseMatrix dual_slab_matrix(const SpatialOperators& adjoint_ops, double tau, int s)
{
    const auto& tb = TemporalBasis::get(s);
    // T(k, l) = -int L_k L_l' + L_k(1) L_l(1)
    const Eigen::MatrixXd T1 = tb.right_values() * tb.right_values().transpose() - tb.derivative_matrix();
    const Eigen::MatrixXd T2 = tau * tb.mass();
    return kron_sum(T1, adjoint_ops.r1, T2, adjoint_ops.r2);
}

SparseMatrix dual_coupling_matrix(AssemblyContext& ctx, const std::shared_ptr<const DofHandler>& cur,
                                  const std::shared_ptr<const DofHandler>& next, int s)
{
    const auto& tb = TemporalBasis::get(s);
    const Eigen::MatrixXd T = -tb.right_values() * tb.left_values().transpose();
    const auto& ops = ctx.adjoint_operators(next);
    const SparseMatrix P = transfer_matrix(*cur, *next);
    const SparseMatrix X = SparseMatrix(cur->free_to_nodal().transpose()) * SparseMatrix(P.transpose())
                         * ops.s1 * next->free_to_nodal();
    const SparseMatrix zero(X.rows(), X.cols());
    return kron_sum(T, X, Eigen::MatrixXd::Zero(T.rows(), T.cols()), zero);
}

Trajectory solve_dual(AssemblyContext& ctx, const SpaceTimeMesh& mesh, int q, int s, const GoalFunctional& goal)
{
    mesh.validate();
    if (q < 1 || s < 0) {
        throw std::invalid_argument("solve_dual: need q >= 1 and s >= 0");
    }
    const std::size_t N = mesh.n_slabs();
    Trajectory traj;
    traj.partition = mesh.partition;
    traj.space_degree = q;
    traj.time_degree = s;
    traj.dofs.resize(N);
    traj.slabs.resize(N);
    const auto& tb = TemporalBasis::get(s);
    const auto nr = static_cast<Eigen::Index>(s + 1);
    SlabSolverCache cache;

    for (std::size_t m = N; m-- > 0;) {
        auto dofs = ctx.dofs(mesh.meshes[m], q);
        const auto& aops = ctx.adjoint_operators(dofs);
        const double tau = mesh.partition.length(m);
        const auto nf = static_cast<Eigen::Index>(dofs->n_free());

        SlabSystem sys;
        sys.slab = m;
        sys.space_degree = q;
        sys.time_degree = s;
        sys.tau = tau;
        sys.dofs = dofs;
        sys.operator_key = &aops;
        sys.matrix = dual_slab_matrix(aops, tau, s);
        sys.rhs = assemble_dual_rhs(goal, ctx, m, dofs, s);
        sys.boundary.assign(static_cast<std::size_t>(nr), Vector::Zero(static_cast<Eigen::Index>(dofs->n_boundary())));

        if (m + 1 < N) {
            const auto& next = traj.dofs[m + 1];
            Vector v = ctx.adjoint_operators(next).s1 * traj.slabs[m + 1].left_limit();
            if (next != dofs) {
                v = transfer_matrix(*dofs, *next).transpose() * v;
            }
            const Vector cv = dofs->free_to_nodal().transpose() * v;
            for (Eigen::Index k = 0; k < nr; ++k) {
                sys.rhs.segment(k * nf, nf) += tb.right_values()[k] * cv;
            }
        }

        traj.slabs[m] = SlabPolynomial{mesh.partition.start(m), mesh.partition.end(m), s, solve_slab(sys, &cache)};
        traj.dofs[m] = dofs;
    }
    return traj;
}

}  // namespace stdwr
