#pragma once

#include "stdwr/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace stdwr {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Hanging-node constraints: node -> weighted combination of unconstrained
/// master nodes (chains already resolved).
struct ConstraintSet {
    int degree = 1;
    std::map<std::size_t, std::vector<std::pair<std::size_t, double>>> lines;

    [[nodiscard]] bool empty() const { return lines.empty(); }
    [[nodiscard]] std::size_t size() const { return lines.size(); }
    [[nodiscard]] bool is_constrained(std::size_t node) const { return lines.contains(node); }
};

/// Continuous Q_p Lagrange space on a SpatialMesh. Degrees of freedom are the
/// Lagrange nodes; hanging nodes are constrained so the space is conforming.
///
/// A nodal vector has one entry per node and is "consistent" when constrained
/// entries equal their master combination. Conforming fields are written as
/// U = C x + D g, with x the free (interior, unconstrained) coefficients and g
/// the values at the boundary nodes.
class DofHandler {
public:
    DofHandler(std::shared_ptr<const SpatialMesh> mesh, int degree);

    [[nodiscard]] const SpatialMesh& mesh() const { return *mesh_; }
    [[nodiscard]] const std::shared_ptr<const SpatialMesh>& mesh_ptr() const { return mesh_; }
    [[nodiscard]] int degree() const { return degree_; }
    [[nodiscard]] std::size_t n_nodes() const { return positions_.size(); }
    [[nodiscard]] std::size_t n_free() const { return n_free_; }
    [[nodiscard]] std::size_t n_boundary() const { return boundary_nodes_.size(); }
    [[nodiscard]] std::size_t nodes_per_cell() const { return static_cast<std::size_t>((degree_ + 1) * (degree_ + 1)); }

    [[nodiscard]] Point position(std::size_t node) const { return positions_[node]; }
    [[nodiscard]] std::span<const std::size_t> cell_nodes(std::size_t cell) const;
    [[nodiscard]] bool is_boundary(std::size_t node) const { return boundary_index_[node] >= 0; }
    [[nodiscard]] const std::vector<std::size_t>& boundary_nodes() const { return boundary_nodes_; }
    /// Free index of a node, or -1 when it is a boundary or constrained node.
    [[nodiscard]] long free_index(std::size_t node) const { return free_index_[node]; }
    [[nodiscard]] const ConstraintSet& constraints() const { return constraints_; }

    /// n_nodes x n_free
    [[nodiscard]] const SparseMatrix& free_to_nodal() const { return free_to_nodal_; }
    /// n_nodes x n_boundary
    [[nodiscard]] const SparseMatrix& boundary_to_nodal() const { return boundary_to_nodal_; }

    /// Overwrite constrained entries with their master combination.
    void distribute(Vector& nodal) const;
    /// Nodal interpolant of a continuous function (made consistent).
    [[nodiscard]] Vector interpolate(const std::function<double(Point)>& fn) const;
    /// Values of fn at the boundary nodes, in boundary_nodes() order.
    [[nodiscard]] Vector boundary_values(const std::function<double(Point)>& fn) const;
    /// Free coefficients of a consistent nodal vector.
    [[nodiscard]] Vector restrict_to_free(const Vector& nodal) const;

    /// Evaluate a consistent nodal field at an arbitrary point.
    [[nodiscard]] double evaluate(const Vector& nodal, Point p) const;

    /// Cell-local coefficients (cell-major, nodes_per_cell() values per cell).
    [[nodiscard]] Vector gather(const Vector& nodal) const;

private:
    std::shared_ptr<const SpatialMesh> mesh_;
    int degree_;
    std::vector<Point> positions_;
    std::vector<std::size_t> cell_nodes_;
    std::vector<long> boundary_index_;
    std::vector<std::size_t> boundary_nodes_;
    std::vector<long> free_index_;
    std::size_t n_free_ = 0;
    ConstraintSet constraints_;
    SparseMatrix free_to_nodal_;
    SparseMatrix boundary_to_nodal_;
};

/// Hanging-node constraints of the degree-p space on `mesh`.
[[nodiscard]] ConstraintSet hanging_constraints(const std::shared_ptr<const SpatialMesh>& mesh, int p);

/// Interpolation matrix (to.n_nodes x from.n_nodes) evaluating a field of `from`
/// at the nodes of `to`; rows of constrained target nodes follow their masters.
[[nodiscard]] SparseMatrix transfer_matrix(const DofHandler& from, const DofHandler& to);
[[nodiscard]] Vector transfer(const DofHandler& from, const DofHandler& to, const Vector& nodal);

/// Cellwise restriction of Q_q coefficients to Q_p: interpolation at the Q_p
/// nodes of the reference cell. `values` holds one block of (q+1)^2 per cell.
[[nodiscard]] Vector restrict_space(const Vector& values, int q, int p);
/// Cellwise re-expression of Q_p coefficients in the Q_q nodal basis (q >= p).
[[nodiscard]] Vector prolong_space(const Vector& values, int p, int q);

}  // namespace stdwr
