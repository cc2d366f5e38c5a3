#pragma once

#include "stdwr/dof_handler.hpp"
#include "stdwr/polynomials.hpp"
#include "stdwr/problem.hpp"
#include "stdwr/space_time.hpp"

#include <functional>

namespace stdwr {

/// delta_K = delta0 * h_K
[[nodiscard]] double supg_parameter(const Cell& cell, double delta0);

[[nodiscard]] SpatialOperators assemble_spatial_operators(const DofHandler& dofs, const ProblemData& data,
                                                          double delta0, const ReferenceTable& table);

/// Same operators assembled from the adjoint forms a'(z)(phi) := a(phi)(z), so
/// every matrix is the transpose of its primal counterpart.
[[nodiscard]] SpatialOperators assemble_adjoint_operators(const DofHandler& dofs, const ProblemData& data,
                                                          double delta0, const ReferenceTable& table);

/// Nodal vector (fn, psi_i + delta_K b.grad psi_i).
[[nodiscard]] Vector assemble_tested(const DofHandler& dofs, const ProblemData& data, double delta0,
                                     const ReferenceTable& table, const std::function<double(Point)>& fn);

/// Nodal load (f(t), psi_i + delta_K b.grad psi_i).
[[nodiscard]] Vector assemble_load(const DofHandler& dofs, const ProblemData& data, double delta0,
                                   const ReferenceTable& table, double t);

}  // namespace stdwr
