#include "stdwr/dof_handler.hpp"

#include "stdwr/polynomials.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace stdwr {

namespace {

using Key = std::uint64_t;

Key node_key(std::int64_t X, std::int64_t Y)
{
    return (static_cast<std::uint64_t>(X) << 32) | static_cast<std::uint64_t>(Y);
}

using Combination = std::vector<std::pair<std::size_t, double>>;

}  // namespace

DofHandler::DofHandler(std::shared_ptr<const SpatialMesh> mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree)
{
    if (!mesh_) {
        throw std::invalid_argument("DofHandler: null mesh");
    }
    if (degree_ < 1) {
        throw std::invalid_argument("DofHandler: polynomial degree must be >= 1");
    }
    const auto& m = *mesh_;
    const int L = m.max_level();
    const int d = degree_;
    const std::int64_t x_max = (static_cast<std::int64_t>(m.nx()) << L) * d;
    const std::int64_t y_max = (static_cast<std::int64_t>(m.ny()) << L) * d;
    const double ux = m.domain().width() / static_cast<double>(x_max);
    const double uy = m.domain().height() / static_cast<double>(y_max);
    const std::size_t npc = nodes_per_cell();

    std::unordered_map<Key, std::size_t> nodes;
    nodes.reserve(m.n_cells() * npc / 2);
    std::vector<std::int64_t> lattice_x, lattice_y;
    cell_nodes_.resize(m.n_cells() * npc);
    for (std::size_t c = 0; c < m.n_cells(); ++c) {
        const auto& cell = m.cell(c);
        const std::int64_t step = std::int64_t{1} << (L - cell.level);
        for (int b = 0; b <= d; ++b) {
            for (int a = 0; a <= d; ++a) {
                const std::int64_t X = cell.i * step * d + a * step;
                const std::int64_t Y = cell.j * step * d + b * step;
                auto [it, inserted] = nodes.try_emplace(node_key(X, Y), positions_.size());
                if (inserted) {
                    const double px = (X == x_max) ? m.domain().x1 : m.domain().x0 + static_cast<double>(X) * ux;
                    const double py = (Y == y_max) ? m.domain().y1 : m.domain().y0 + static_cast<double>(Y) * uy;
                    positions_.push_back({px, py});
                    lattice_x.push_back(X);
                    lattice_y.push_back(Y);
                }
                cell_nodes_[c * npc + static_cast<std::size_t>(a + (d + 1) * b)] = it->second;
            }
        }
    }

    const std::size_t n = positions_.size();
    boundary_index_.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (lattice_x[i] == 0 || lattice_y[i] == 0 || lattice_x[i] == x_max || lattice_y[i] == y_max) {
            boundary_index_[i] = static_cast<long>(boundary_nodes_.size());
            boundary_nodes_.push_back(i);
        }
    }

    // Hanging nodes: for every edge whose same-level neighbour is refined, the
    // fine-side nodes not shared with the coarse edge are constrained to the
    // trace of the coarse cell's polynomial.
    const LagrangeBasis1D edge_basis(equispaced_nodes(d));
    std::map<std::size_t, Combination> raw;
    for (std::size_t c = 0; c < m.n_cells(); ++c) {
        const auto& cell = m.cell(c);
        if (cell.level >= L) {
            continue;
        }
        const std::int64_t step = std::int64_t{1} << (L - cell.level);
        const std::int64_t half = step / 2;
        for (int e = 0; e < 4; ++e) {
            const std::int64_t di = (e == 0) ? -1 : (e == 1) ? 1 : 0;
            const std::int64_t dj = (e == 2) ? -1 : (e == 3) ? 1 : 0;
            const std::int64_t ni = cell.i + di;
            const std::int64_t nj = cell.j + dj;
            const std::int64_t ncols = static_cast<std::int64_t>(m.nx()) << cell.level;
            const std::int64_t nrows = static_cast<std::int64_t>(m.ny()) << cell.level;
            if (ni < 0 || nj < 0 || ni >= ncols || nj >= nrows) {
                continue;
            }
            if (m.covering_leaf(cell.level, ni, nj)) {
                continue;  // conforming or we are the fine side
            }
            // Coarse edge nodes, ordered along the edge.
            std::vector<std::size_t> masters(static_cast<std::size_t>(d + 1));
            std::int64_t X0 = 0, Y0 = 0, dX = 0, dY = 0;
            for (int k = 0; k <= d; ++k) {
                int a = 0, b = 0;
                switch (e) {
                case 0: a = 0; b = k; break;
                case 1: a = d; b = k; break;
                case 2: a = k; b = 0; break;
                default: a = k; b = d; break;
                }
                masters[static_cast<std::size_t>(k)] = cell_nodes_[c * npc + static_cast<std::size_t>(a + (d + 1) * b)];
            }
            X0 = lattice_x[masters[0]];
            Y0 = lattice_y[masters[0]];
            dX = (e >= 2) ? half : 0;
            dY = (e < 2) ? half : 0;
            for (int t = 1; t < 2 * d; t += 2) {
                const auto it = nodes.find(node_key(X0 + t * dX, Y0 + t * dY));
                if (it == nodes.end()) {
                    throw std::logic_error("DofHandler: missing fine-side node on a hanging edge");
                }
                const double s = static_cast<double>(t) / (2.0 * d);
                Combination comb;
                for (int k = 0; k <= d; ++k) {
                    const double w = edge_basis.value(static_cast<std::size_t>(k), s);
                    if (std::abs(w) > 1e-15) {
                        comb.emplace_back(masters[static_cast<std::size_t>(k)], w);
                    }
                }
                raw[it->second] = std::move(comb);
            }
        }
    }

    // Resolve chains (a master may itself hang on a coarser edge).
    std::map<std::size_t, Combination> resolved;
    std::function<const Combination&(std::size_t, int)> resolve = [&](std::size_t node, int depth) -> const Combination& {
        if (auto it = resolved.find(node); it != resolved.end()) {
            return it->second;
        }
        if (depth > 64) {
            throw std::logic_error("DofHandler: cyclic hanging-node constraints");
        }
        std::map<std::size_t, double> acc;
        for (const auto& [master, w] : raw.at(node)) {
            if (raw.contains(master)) {
                for (const auto& [mm, ww] : resolve(master, depth + 1)) {
                    acc[mm] += w * ww;
                }
            } else {
                acc[master] += w;
            }
        }
        Combination out;
        for (const auto& [mm, w] : acc) {
            if (std::abs(w) > 1e-15) {
                out.emplace_back(mm, w);
            }
        }
        return resolved.emplace(node, std::move(out)).first->second;
    };
    for (const auto& entry : raw) {
        resolve(entry.first, 0);
    }
    constraints_.degree = d;
    constraints_.lines = std::move(resolved);

    free_index_.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_boundary(i) && !constraints_.is_constrained(i)) {
            free_index_[i] = static_cast<long>(n_free_++);
        }
    }

    std::vector<Eigen::Triplet<double>> cf, cb;
    for (std::size_t i = 0; i < n; ++i) {
        if (free_index_[i] >= 0) {
            cf.emplace_back(static_cast<int>(i), static_cast<int>(free_index_[i]), 1.0);
        } else if (is_boundary(i)) {
            cb.emplace_back(static_cast<int>(i), static_cast<int>(boundary_index_[i]), 1.0);
        } else {
            for (const auto& [master, w] : constraints_.lines.at(i)) {
                if (free_index_[master] >= 0) {
                    cf.emplace_back(static_cast<int>(i), static_cast<int>(free_index_[master]), w);
                } else {
                    cb.emplace_back(static_cast<int>(i), static_cast<int>(boundary_index_[master]), w);
                }
            }
        }
    }
    free_to_nodal_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_free_));
    free_to_nodal_.setFromTriplets(cf.begin(), cf.end());
    boundary_to_nodal_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(boundary_nodes_.size()));
    boundary_to_nodal_.setFromTriplets(cb.begin(), cb.end());
}

std::span<const std::size_t> DofHandler::cell_nodes(std::size_t cell) const
{
    const std::size_t npc = nodes_per_cell();
    return {cell_nodes_.data() + cell * npc, npc};
}

void DofHandler::distribute(Vector& nodal) const
{
    for (const auto& [node, comb] : constraints_.lines) {
        double v = 0.0;
        for (const auto& [master, w] : comb) {
            v += w * nodal[static_cast<Eigen::Index>(master)];
        }
        nodal[static_cast<Eigen::Index>(node)] = v;
    }
}

Vector DofHandler::interpolate(const std::function<double(Point)>& fn) const
{
    Vector v(static_cast<Eigen::Index>(n_nodes()));
    for (std::size_t i = 0; i < n_nodes(); ++i) {
        v[static_cast<Eigen::Index>(i)] = constraints_.is_constrained(i) ? 0.0 : fn(positions_[i]);
    }
    distribute(v);
    return v;
}

Vector DofHandler::boundary_values(const std::function<double(Point)>& fn) const
{
    Vector g(static_cast<Eigen::Index>(boundary_nodes_.size()));
    for (std::size_t k = 0; k < boundary_nodes_.size(); ++k) {
        g[static_cast<Eigen::Index>(k)] = fn(positions_[boundary_nodes_[k]]);
    }
    return g;
}

Vector DofHandler::restrict_to_free(const Vector& nodal) const
{
    Vector x(static_cast<Eigen::Index>(n_free_));
    for (std::size_t i = 0; i < n_nodes(); ++i) {
        if (free_index_[i] >= 0) {
            x[free_index_[i]] = nodal[static_cast<Eigen::Index>(i)];
        }
    }
    return x;
}

double DofHandler::evaluate(const Vector& nodal, Point p) const
{
    const std::size_t c = mesh_->locate(p);
    const auto& cell = mesh_->cell(c);
    const double xi = std::clamp((p.x - cell.x0) / cell.hx(), 0.0, 1.0);
    const double eta = std::clamp((p.y - cell.y0) / cell.hy(), 0.0, 1.0);
    std::vector<double> phi(nodes_per_cell());
    evaluate_q_basis(degree_, xi, eta, phi);
    double v = 0.0;
    const auto nodes = cell_nodes(c);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        v += phi[k] * nodal[static_cast<Eigen::Index>(nodes[k])];
    }
    return v;
}

Vector DofHandler::gather(const Vector& nodal) const
{
    const std::size_t npc = nodes_per_cell();
    Vector out(static_cast<Eigen::Index>(mesh_->n_cells() * npc));
    for (std::size_t k = 0; k < cell_nodes_.size(); ++k) {
        out[static_cast<Eigen::Index>(k)] = nodal[static_cast<Eigen::Index>(cell_nodes_[k])];
    }
    return out;
}

ConstraintSet hanging_constraints(const std::shared_ptr<const SpatialMesh>& mesh, int p)
{
    return DofHandler(mesh, p).constraints();
}

SparseMatrix transfer_matrix(const DofHandler& from, const DofHandler& to)
{
    const auto n_to = static_cast<Eigen::Index>(to.n_nodes());
    const auto n_from = static_cast<Eigen::Index>(from.n_nodes());
    SparseMatrix P(n_to, n_from);
    if (from.mesh_ptr() == to.mesh_ptr() && from.degree() == to.degree()) {
        P.setIdentity();
        return P;
    }
    const LagrangeBasis1D basis(equispaced_nodes(from.degree()));
    const std::size_t nb1 = basis.size();
    std::vector<std::vector<std::pair<std::size_t, double>>> rows(to.n_nodes());
    std::vector<double> vx(nb1), vy(nb1);
    for (std::size_t i = 0; i < to.n_nodes(); ++i) {
        if (to.constraints().is_constrained(i)) {
            continue;
        }
        const Point p = to.position(i);
        const std::size_t c = from.mesh().locate(p);
        const auto& cell = from.mesh().cell(c);
        const double xi = std::clamp((p.x - cell.x0) / cell.hx(), 0.0, 1.0);
        const double eta = std::clamp((p.y - cell.y0) / cell.hy(), 0.0, 1.0);
        for (std::size_t a = 0; a < nb1; ++a) {
            vx[a] = basis.value(a, xi);
            vy[a] = basis.value(a, eta);
        }
        const auto nodes = from.cell_nodes(c);
        for (std::size_t b = 0; b < nb1; ++b) {
            for (std::size_t a = 0; a < nb1; ++a) {
                const double w = vx[a] * vy[b];
                if (std::abs(w) > 1e-14) {
                    rows[i].emplace_back(nodes[a + nb1 * b], w);
                }
            }
        }
    }
    for (const auto& [node, comb] : to.constraints().lines) {
        std::map<std::size_t, double> acc;
        for (const auto& [master, w] : comb) {
            for (const auto& [col, v] : rows[master]) {
                acc[col] += w * v;
            }
        }
        rows[node].assign(acc.begin(), acc.end());
    }
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (const auto& [col, v] : rows[i]) {
            trip.emplace_back(static_cast<int>(i), static_cast<int>(col), v);
        }
    }
    P.setFromTriplets(trip.begin(), trip.end());
    return P;
}

Vector transfer(const DofHandler& from, const DofHandler& to, const Vector& nodal)
{
    if (from.mesh_ptr() == to.mesh_ptr() && from.degree() == to.degree()) {
        return nodal;
    }
    return transfer_matrix(from, to) * nodal;
}

Vector restrict_space(const Vector& values, int q, int p)
{
    if (p >= q) {
        throw std::invalid_argument("restrict_space: target degree must be below the source degree");
    }
    if (p < 1) {
        throw std::invalid_argument("restrict_space: target degree must be >= 1");
    }
    const auto nq = static_cast<std::size_t>((q + 1) * (q + 1));
    const auto np = static_cast<std::size_t>((p + 1) * (p + 1));
    if (values.size() % static_cast<Eigen::Index>(nq) != 0) {
        throw std::invalid_argument("restrict_space: coefficient block size mismatch");
    }
    const std::size_t n_cells = static_cast<std::size_t>(values.size()) / nq;
    // Matrix evaluating the Q_q basis at the Q_p nodes.
    const auto target = equispaced_nodes(p);
    std::vector<double> E(np * nq);
    for (int b = 0; b <= p; ++b) {
        for (int a = 0; a <= p; ++a) {
            evaluate_q_basis(q, target[static_cast<std::size_t>(a)], target[static_cast<std::size_t>(b)],
                             std::span<double>(E.data() + static_cast<std::size_t>(a + (p + 1) * b) * nq, nq));
        }
    }
    Vector out(static_cast<Eigen::Index>(n_cells * np));
    for (std::size_t c = 0; c < n_cells; ++c) {
        for (std::size_t i = 0; i < np; ++i) {
            double v = 0.0;
            for (std::size_t k = 0; k < nq; ++k) {
                v += E[i * nq + k] * values[static_cast<Eigen::Index>(c * nq + k)];
            }
            out[static_cast<Eigen::Index>(c * np + i)] = v;
        }
    }
    return out;
}

Vector prolong_space(const Vector& values, int p, int q)
{
    if (q < p) {
        throw std::invalid_argument("prolong_space: target degree must not be below the source degree");
    }
    const auto nq = static_cast<std::size_t>((q + 1) * (q + 1));
    const auto np = static_cast<std::size_t>((p + 1) * (p + 1));
    const std::size_t n_cells = static_cast<std::size_t>(values.size()) / np;
    const auto target = equispaced_nodes(q);
    std::vector<double> E(nq * np);
    for (int b = 0; b <= q; ++b) {
        for (int a = 0; a <= q; ++a) {
            evaluate_q_basis(p, target[static_cast<std::size_t>(a)], target[static_cast<std::size_t>(b)],
                             std::span<double>(E.data() + static_cast<std::size_t>(a + (q + 1) * b) * np, np));
        }
    }
    Vector out(static_cast<Eigen::Index>(n_cells * nq));
    for (std::size_t c = 0; c < n_cells; ++c) {
        for (std::size_t i = 0; i < nq; ++i) {
            double v = 0.0;
            for (std::size_t k = 0; k < np; ++k) {
                v += E[i * np + k] * values[static_cast<Eigen::Index>(c * np + k)];
            }
            out[static_cast<Eigen::Index>(c * nq + i)] = v;
        }
    }
    return out;
}

}  // namespace stdwr
