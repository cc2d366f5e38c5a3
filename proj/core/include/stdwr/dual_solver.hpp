#pragma once

#include "stdwr/primal_solver.hpp"

#include <string>

namespace stdwr {

enum class GoalKind {
    L2L2,       // J(phi) = int_0^T (phi, e) dt / ||e||_{L2(Q)}
    FinalTime,  // J(phi) = (phi(T-), e(T-)) / ||e(T-)||
};

[[nodiscard]] std::string goal_name(GoalKind kind);
[[nodiscard]] GoalKind parse_goal(const std::string& name);

/// Error e = u - u_h of one primal trajectory; the goal functional is linear in
/// its argument with e frozen, so J(u) - J(u_h) equals the norm of e.
class GoalFunctional {
public:
    GoalFunctional(GoalKind kind, AssemblyContext& ctx, const Trajectory& primal);

    [[nodiscard]] GoalKind kind() const { return kind_; }
    [[nodiscard]] const Trajectory& primal() const { return *primal_; }
    /// ||e|| over the space-time cylinder (L2L2) or at the final time (FinalTime).
    [[nodiscard]] double normalization() const { return norm_; }
    /// True when e vanishes up to round-off; the goal derivative is then undefined.
    [[nodiscard]] bool exact() const { return !(norm_ > 0.0); }

    /// Time quadrature rule of the goal integrals on slab n.
    [[nodiscard]] QuadratureRule1D time_rule(std::size_t n) const;
    /// e at time t on the goal quadrature points of every cell of slab n's mesh
    /// (cell-major, goal_space_points^2 values per cell).
    [[nodiscard]] std::vector<double> error_at(std::size_t n, double t) const;

private:
    GoalKind kind_;
    AssemblyContext* ctx_;
    const Trajectory* primal_;
    double norm_ = 0.0;
};

/// J(u) - J(u_h): ||u - u_h||_{L2(Q)} or ||u(T) - u_h(T-)||_{L2(Omega)}.
[[nodiscard]] double goal_error(GoalKind kind, AssemblyContext& ctx, const Trajectory& primal);

/// Goal derivative tested with L_k(t) psi_i of the dual space on slab n, in free
/// coefficients ((s+1) * n_free values). Throws when the goal is exact.
[[nodiscard]] Vector assemble_dual_rhs(const GoalFunctional& goal, AssemblyContext& ctx, std::size_t n,
                                       const std::shared_ptr<const DofHandler>& dofs, int s);

/// Dual slab operator from the adjoint spatial forms and the temporal matrix
/// obtained by integrating the time derivative by parts onto the test side.
[[nodiscard]] SparseMatrix dual_slab_matrix(const SpatialOperators& adjoint_ops, double tau, int s);

/// Coupling of slab n to the free coefficients of slab n+1:
/// block (k, l) = -l_k(1) l_l(0) C_n^T P^T S1'_{n+1} C_{n+1}.
[[nodiscard]] SparseMatrix dual_coupling_matrix(AssemblyContext& ctx, const std::shared_ptr<const DofHandler>& cur,
                                                const std::shared_ptr<const DofHandler>& next, int s);

/// Backward sweep; homogeneous Dirichlet data on the dual variable.
[[nodiscard]] Trajectory solve_dual(AssemblyContext& ctx, const SpaceTimeMesh& mesh, int q, int s,
                                    const GoalFunctional& goal);

}  // namespace stdwr
