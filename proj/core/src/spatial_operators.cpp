#include "stdwr/spatial_operators.hpp"

#include <vector>

namespace stdwr {

namespace {

struct LocalTerms {
    std::vector<double> mass, form, supg_mass, supg_form;
};

enum class Roles { Primal, Adjoint };

SpatialOperators assemble(const DofHandler& dofs, const ProblemData& data, double delta0, const ReferenceTable& table,
                          Roles roles)
{
    const auto& mesh = dofs.mesh();
    const std::size_t nb = table.n_basis();
    const std::size_t nq = table.n_points();
    const double eps = data.epsilon;
    const double bx = data.b[0];
    const double by = data.b[1];
    const double alpha = data.alpha;

    std::vector<Eigen::Triplet<double>> tm, ta, tsm, tsa;
    const std::size_t reserve = mesh.n_cells() * nb * nb;
    tm.reserve(reserve);
    ta.reserve(reserve);
    tsm.reserve(reserve);
    tsa.reserve(reserve);

    SpatialOperators ops;
    ops.delta.resize(mesh.n_cells());

    std::vector<double> gx(nb), gy(nb), lap(nb), bgrad(nb);
    LocalTerms loc{std::vector<double>(nb * nb), std::vector<double>(nb * nb), std::vector<double>(nb * nb),
                   std::vector<double>(nb * nb)};

    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const auto& cell = mesh.cell(c);
        const double hx = cell.hx();
        const double hy = cell.hy();
        const double jac = hx * hy;
        const double delta = supg_parameter(cell, delta0);
        ops.delta[c] = delta;
        std::fill(loc.mass.begin(), loc.mass.end(), 0.0);
        std::fill(loc.form.begin(), loc.form.end(), 0.0);
        std::fill(loc.supg_mass.begin(), loc.supg_mass.end(), 0.0);
        std::fill(loc.supg_form.begin(), loc.supg_form.end(), 0.0);

        for (std::size_t q = 0; q < nq; ++q) {
            const double w = table.weights[q] * jac;
            const double* v = &table.val[q * nb];
            for (std::size_t i = 0; i < nb; ++i) {
                gx[i] = table.dx[q * nb + i] / hx;
                gy[i] = table.dy[q * nb + i] / hy;
                lap[i] = table.dxx[q * nb + i] / (hx * hx) + table.dyy[q * nb + i] / (hy * hy);
                bgrad[i] = bx * gx[i] + by * gy[i];
            }
            for (std::size_t a = 0; a < nb; ++a) {
                for (std::size_t t = 0; t < nb; ++t) {
                    const std::size_t k = a * nb + t;
                    // Row a, column t.
                    loc.mass[k] += w * v[t] * v[a];
                    const double diff = eps * (gx[t] * gx[a] + gy[t] * gy[a]);
                    if (roles == Roles::Primal) {
                        // test psi_a, trial psi_t
                        loc.form[k] += w * (diff + bgrad[t] * v[a] + alpha * v[t] * v[a]);
                        loc.supg_mass[k] += w * delta * v[t] * bgrad[a];
                        loc.supg_form[k] += w * delta * (bgrad[t] - eps * lap[t] + alpha * v[t]) * bgrad[a];
                    } else {
                        // adjoint form a'(z)(phi) with phi = psi_a, z = psi_t
                        loc.form[k] += w * (diff + v[t] * bgrad[a] + alpha * v[t] * v[a]);
                        loc.supg_mass[k] += w * delta * v[a] * bgrad[t];
                        loc.supg_form[k] += w * delta * (bgrad[a] - eps * lap[a] + alpha * v[a]) * bgrad[t];
                    }
                }
            }
        }

        const auto nodes = dofs.cell_nodes(c);
        for (std::size_t a = 0; a < nb; ++a) {
            for (std::size_t t = 0; t < nb; ++t) {
                const std::size_t k = a * nb + t;
                const int row = static_cast<int>(nodes[a]);
                const int col = static_cast<int>(nodes[t]);
                tm.emplace_back(row, col, loc.mass[k]);
                ta.emplace_back(row, col, loc.form[k]);
                if (delta != 0.0) {
                    tsm.emplace_back(row, col, loc.supg_mass[k]);
                    tsa.emplace_back(row, col, loc.supg_form[k]);
                }
            }
        }
    }

    const auto n = static_cast<Eigen::Index>(dofs.n_nodes());
    auto build = [n](SparseMatrix& m, const std::vector<Eigen::Triplet<double>>& trip) {
        m.resize(n, n);
        m.setFromTriplets(trip.begin(), trip.end());
    };
    build(ops.mass, tm);
    build(ops.form, ta);
    build(ops.supg_mass, tsm);
    build(ops.supg_form, tsa);

    ops.s1 = ops.mass + ops.supg_mass;
    ops.s2 = ops.form + ops.supg_form;
    const SparseMatrix& C = dofs.free_to_nodal();
    const SparseMatrix& D = dofs.boundary_to_nodal();
    const SparseMatrix Ct = C.transpose();
    ops.ct_s1 = Ct * ops.s1;
    const SparseMatrix ct_s2 = Ct * ops.s2;
    ops.r1 = ops.ct_s1 * C;
    ops.r2 = ct_s2 * C;
    ops.l1 = ops.ct_s1 * D;
    ops.l2 = ct_s2 * D;
    return ops;
}

}  // namespace

double supg_parameter(const Cell& cell, double delta0)
{
    return delta0 * cell.diameter();
}

SpatialOperators assemble_spatial_operators(const DofHandler& dofs, const ProblemData& data, double delta0,
                                            const ReferenceTable& table)
{
    return assemble(dofs, data, delta0, table, Roles::Primal);
}

SpatialOperators assemble_adjoint_operators(const DofHandler& dofs, const ProblemData& data, double delta0,
                                            const ReferenceTable& table)
{
    return assemble(dofs, data, delta0, table, Roles::Adjoint);
}

Vector assemble_tested(const DofHandler& dofs, const ProblemData& data, double delta0, const ReferenceTable& table,
                       const std::function<double(Point)>& fn)
{
    const auto& mesh = dofs.mesh();
    const std::size_t nb = table.n_basis();
    const std::size_t nq = table.n_points();
    Vector F = Vector::Zero(static_cast<Eigen::Index>(dofs.n_nodes()));
    std::vector<double> loc(nb);
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const auto& cell = mesh.cell(c);
        const double hx = cell.hx();
        const double hy = cell.hy();
        const double jac = hx * hy;
        const double delta = supg_parameter(cell, delta0);
        std::fill(loc.begin(), loc.end(), 0.0);
        for (std::size_t q = 0; q < nq; ++q) {
            const Point x{cell.x0 + table.qx[q] * hx, cell.y0 + table.qy[q] * hy};
            const double fw = table.weights[q] * jac * fn(x);
            for (std::size_t i = 0; i < nb; ++i) {
                const double bgrad = data.b[0] * table.dx[q * nb + i] / hx + data.b[1] * table.dy[q * nb + i] / hy;
                loc[i] += fw * (table.val[q * nb + i] + delta * bgrad);
            }
        }
        const auto nodes = dofs.cell_nodes(c);
        for (std::size_t i = 0; i < nb; ++i) {
            F[static_cast<Eigen::Index>(nodes[i])] += loc[i];
        }
    }
    return F;
}

Vector assemble_load(const DofHandler& dofs, const ProblemData& data, double delta0, const ReferenceTable& table,
                     double t)
{
    return assemble_tested(dofs, data, delta0, table, [&](Point x) { return data.f(x, t); });
}

}  // namespace stdwr
