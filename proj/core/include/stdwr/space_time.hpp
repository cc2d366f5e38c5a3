#pragma once

#include "stdwr/dof_handler.hpp"
#include "stdwr/polynomials.hpp"
#include "stdwr/problem.hpp"
#include "stdwr/time_grid.hpp"

#include <map>
#include <memory>
#include <utility>
#include <vector>

namespace stdwr {

/// Quadrature used by every space-time integral of one run. Sharing a single
/// rule between assembly and estimation keeps the discrete Galerkin identities
/// exact up to round-off.
struct QuadratureConfig {
    int space_points = 4;       // Gauss points per direction
    int time_points = 2;        // Gauss points per slab (per kink-free piece)
    int goal_space_points = 6;  // for goal functionals and error norms

    /// space: max(p,q)+2, time: max(r,s)+2, goal: space+2
    static QuadratureConfig for_degrees(int p, int r, int q, int s);
};

/// Tensor-product slabs: one spatial mesh per slab. Slabs may share a mesh object.
struct SpaceTimeMesh {
    TimePartition partition;
    std::vector<std::shared_ptr<const SpatialMesh>> meshes;

    static SpaceTimeMesh uniform(const Rectangle& domain, int nx, int ny, double T, int N);

    [[nodiscard]] std::size_t n_slabs() const { return partition.n_slabs(); }
    /// N_K^max: cell count of the finest slab mesh.
    [[nodiscard]] std::size_t max_cells() const;
    /// Sum over slabs of (r+1) times the number of Q_p nodes of the slab mesh.
    [[nodiscard]] std::size_t total_dofs(int p, int r) const;
    void validate() const;
};

/// Full-nodal spatial matrices of the stabilized slab operator on one mesh.
///   mass(i,j)       = (psi_j, psi_i)
///   form(i,j)       = a(psi_j)(psi_i) = eps(grad psi_j, grad psi_i) + (b.grad psi_j, psi_i) + alpha(psi_j, psi_i)
///   supg_mass(i,j)  = sum_K delta_K (psi_j, b.grad psi_i)_K
///   supg_form(i,j)  = sum_K delta_K (b.grad psi_j - eps lap psi_j + alpha psi_j, b.grad psi_i)_K
/// plus the constrained blocks used by slab assembly, with S1 = mass + supg_mass
/// (time-derivative and jump part) and S2 = form + supg_form.
struct SpatialOperators {
    SparseMatrix mass, form, supg_mass, supg_form;
    SparseMatrix s1, s2;            // nodal x nodal
    SparseMatrix r1, r2;            // free x free:      C^T S C
    SparseMatrix l1, l2;            // free x boundary:  C^T S D
    SparseMatrix ct_s1;             // free x nodal:     C^T S1
    std::vector<double> delta;      // delta_K per cell
};

/// Per-run assembly state: problem data, stabilization, quadrature and caches
/// of DoF handlers and operators keyed by mesh object.
class AssemblyContext {
public:
    AssemblyContext(const ProblemData& data, double delta0, QuadratureConfig quad);

    [[nodiscard]] const ProblemData& data() const { return *data_; }
    [[nodiscard]] double delta0() const { return delta0_; }
    [[nodiscard]] const QuadratureConfig& quadrature() const { return quad_; }

    [[nodiscard]] std::shared_ptr<const DofHandler> dofs(const std::shared_ptr<const SpatialMesh>& mesh, int degree);
    [[nodiscard]] const SpatialOperators& operators(const std::shared_ptr<const DofHandler>& dofs);
    /// Operators assembled with trial and test roles swapped (the adjoint forms).
    [[nodiscard]] const SpatialOperators& adjoint_operators(const std::shared_ptr<const DofHandler>& dofs);
    [[nodiscard]] const ReferenceTable& table(int degree, int points_per_direction);
    [[nodiscard]] const ReferenceTable& table(int degree) { return table(degree, quad_.space_points); }

    /// Drop cached entries whose mesh is not in `keep`.
    void prune(const std::vector<std::shared_ptr<const SpatialMesh>>& keep);

private:
    const ProblemData* data_;
    double delta0_;
    QuadratureConfig quad_;
    std::map<std::pair<const SpatialMesh*, int>, std::shared_ptr<const DofHandler>> dofs_;
    std::map<const DofHandler*, std::pair<std::shared_ptr<const DofHandler>, SpatialOperators>> ops_;
    std::map<const DofHandler*, std::pair<std::shared_ptr<const DofHandler>, SpatialOperators>> adjoint_ops_;
    std::map<std::pair<int, int>, ReferenceTable> tables_;
};

/// Space-time field in cG(p)-dG(r) form: per slab a SlabPolynomial whose blocks
/// are consistent nodal vectors of that slab's DofHandler.
struct Trajectory {
    TimePartition partition;
    int space_degree = 1;
    int time_degree = 0;
    std::vector<std::shared_ptr<const DofHandler>> dofs;
    std::vector<SlabPolynomial> slabs;
    /// Nodal interpolant of u_0 on slab 0's DofHandler (empty for dual fields).
    /// Primal schemes and residuals use u_0 itself in the first jump.
    Vector initial;

    [[nodiscard]] std::size_t n_slabs() const { return slabs.size(); }
    /// Left state u^-_{n-1} carried over to slab n's DofHandler (n = 0: `initial`).
    [[nodiscard]] Vector previous_end(std::size_t n) const;
    /// Field value at time t in slab n (nodal vector).
    [[nodiscard]] Vector value(std::size_t n, double t) const { return slabs.at(n).evaluate(t); }
};

}  // namespace stdwr
