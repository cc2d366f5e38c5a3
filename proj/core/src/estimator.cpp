#include "stdwr/estimator.hpp"

#include <cmath>
#include <span>
#include <stdexcept>

namespace stdwr {

std::string mode_name(TemporalMode mode)
{
    return mode == TemporalMode::hoRe ? "hoRe" : "hoFE";
}

TemporalMode parse_mode(const std::string& name)
{
    if (name == "hoRe") {
        return TemporalMode::hoRe;
    }
    if (name == "hoFE") {
        return TemporalMode::hoFE;
    }
    throw std::invalid_argument("unknown mode '" + name + "' (expected hoRe or hoFE)");
}

namespace {

SlabPolynomial gathered(const DofHandler& dofs, const SlabPolynomial& nodal)
{
    SlabPolynomial out{nodal.t0, nodal.t1, nodal.degree, {}};
    for (const auto& v : nodal.nodal) {
        out.nodal.push_back(dofs.gather(v));
    }
    return out;
}

SlabPolynomial combine(const SlabPolynomial& a, double ca, const SlabPolynomial& b, double cb)
{
    SlabPolynomial out{a.t0, a.t1, a.degree, {}};
    for (std::size_t k = 0; k < a.nodal.size(); ++k) {
        out.nodal.push_back(ca * a.nodal[k] + cb * b.nodal[k]);
    }
    return out;
}

SlabPolynomial map_blocks(const SlabPolynomial& a, const auto& fn)
{
    SlabPolynomial out{a.t0, a.t1, a.degree, {}};
    for (const auto& v : a.nodal) {
        out.nodal.push_back(fn(v));
    }
    return out;
}

struct SlabWeight {
    const SlabPolynomial* poly;
    int degree;
    bool supg;  // evaluate the SUPG terms instead of the residual
};

// Shared evaluation of several pairings on slab n; u and f are evaluated once per point.
std::vector<PairingResult> pair_slab(AssemblyContext& ctx, const Trajectory& u, std::size_t n,
                                     std::span<const SlabWeight> ws)
{
    const auto& data = ctx.data();
    const auto& dofs = *u.dofs.at(n);
    const auto& mesh = dofs.mesh();
    const int ppd = ctx.quadrature().space_points;
    const auto& tu = ctx.table(dofs.degree(), ppd);
    const std::size_t nbu = tu.n_basis();
    const std::size_t nq = tu.n_points();
    const std::size_t nc = mesh.n_cells();
    const double eps = data.epsilon;
    const double bx = data.b[0];
    const double by = data.b[1];
    const double alpha = data.alpha;

    std::vector<const ReferenceTable*> tw;
    for (const auto& w : ws) {
        tw.push_back(&ctx.table(w.degree, ppd));
        if (w.poly->block_size() != static_cast<Eigen::Index>(nc * tw.back()->n_basis())) {
            throw std::invalid_argument("residual pairing: weight does not match slab " + std::to_string(n + 1));
        }
    }

    std::vector<PairingResult> out(ws.size());
    for (auto& r : out) {
        r.per_cell.assign(nc, 0.0);
    }

    const SlabPolynomial gu = gathered(dofs, u.slabs.at(n));
    const double t0 = gu.t0;
    const auto rule = slab_time_quadrature(t0, gu.t1, ctx.quadrature().time_points, data.kinks);
    std::vector<double> delta(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        delta[c] = ctx.delta0() * mesh.cell(c).diameter();
    }

    std::vector<Vector> wt(ws.size());
    for (std::size_t g = 0; g < rule.size(); ++g) {
        const double t = rule.points[g];
        const Vector U = gu.evaluate(t);
        const Vector Ut = gu.time_derivative(t);
        for (std::size_t j = 0; j < ws.size(); ++j) {
            wt[j] = ws[j].poly->evaluate(t);
        }
        for (std::size_t c = 0; c < nc; ++c) {
            const auto& cell = mesh.cell(c);
            const double hx = cell.hx();
            const double hy = cell.hy();
            const double jac = hx * hy * rule.weights[g];
            const double* uc = U.data() + c * nbu;
            const double* utc = Ut.data() + c * nbu;
            for (std::size_t q = 0; q < nq; ++q) {
                double uv = 0.0, ux = 0.0, uy = 0.0, ut = 0.0, lap = 0.0;
                for (std::size_t i = 0; i < nbu; ++i) {
                    const std::size_t k = q * nbu + i;
                    uv += uc[i] * tu.val[k];
                    ux += uc[i] * tu.dx[k];
                    uy += uc[i] * tu.dy[k];
                    ut += utc[i] * tu.val[k];
                    lap += uc[i] * (tu.dxx[k] / (hx * hx) + tu.dyy[k] / (hy * hy));
                }
                ux /= hx;
                uy /= hy;
                const Point x{cell.x0 + tu.qx[q] * hx, cell.y0 + tu.qy[q] * hy};
                const double f = data.f(x, t);
                const double wq = tu.weights[q] * jac;
                const double bgu = bx * ux + by * uy;
                const double strong = ut - eps * lap + bgu + alpha * uv - f;
                for (std::size_t j = 0; j < ws.size(); ++j) {
                    const auto& T = *tw[j];
                    const std::size_t nbw = T.n_basis();
                    const double* wc = wt[j].data() + c * nbw;
                    double wv = 0.0, wx = 0.0, wy = 0.0;
                    for (std::size_t i = 0; i < nbw; ++i) {
                        const std::size_t k = q * nbw + i;
                        wv += wc[i] * T.val[k];
                        wx += wc[i] * T.dx[k];
                        wy += wc[i] * T.dy[k];
                    }
                    wx /= hx;
                    wy /= hy;
                    double v;
                    if (ws[j].supg) {
                        v = delta[c] * strong * (bx * wx + by * wy);
                    } else {
                        v = (f - ut - bgu - alpha * uv) * wv - eps * (ux * wx + uy * wy);
                    }
                    out[j].per_cell[c] += wq * v;
                }
            }
        }
    }

    // Jump at t_{n-1}; on the first slab against u_0 itself.
    const bool first = n == 0;
    const Vector jump = dofs.gather(first ? u.slabs[n].left_limit() : Vector(u.slabs[n].left_limit() - u.previous_end(n)));
    std::vector<double> u0(first ? nc * nq : 0);
    for (std::size_t c = 0; c < nc && first; ++c) {
        const auto& cell = mesh.cell(c);
        for (std::size_t q = 0; q < nq; ++q) {
            u0[c * nq + q] = data.u0(Point{cell.x0 + tu.qx[q] * cell.hx(), cell.y0 + tu.qy[q] * cell.hy()});
        }
    }
    for (std::size_t j = 0; j < ws.size(); ++j) {
        const auto& T = *tw[j];
        const std::size_t nbw = T.n_basis();
        const Vector wp = ws[j].poly->left_limit();
        for (std::size_t c = 0; c < nc; ++c) {
            const auto& cell = mesh.cell(c);
            const double hx = cell.hx();
            const double hy = cell.hy();
            const double* jc = jump.data() + c * nbu;
            const double* wc = wp.data() + c * nbw;
            double sum = 0.0;
            for (std::size_t q = 0; q < nq; ++q) {
                double du = first ? -u0[c * nq + q] : 0.0;
                for (std::size_t i = 0; i < nbu; ++i) {
                    du += jc[i] * tu.val[q * nbu + i];
                }
                double wv = 0.0, wx = 0.0, wy = 0.0;
                for (std::size_t i = 0; i < nbw; ++i) {
                    const std::size_t k = q * nbw + i;
                    wv += wc[i] * T.val[k];
                    wx += wc[i] * T.dx[k];
                    wy += wc[i] * T.dy[k];
                }
                const double v = ws[j].supg ? delta[c] * du * (bx * wx / hx + by * wy / hy) : -du * wv;
                sum += T.weights[q] * v;
            }
            out[j].per_cell[c] += sum * hx * hy;
        }
    }

    for (auto& r : out) {
        r.total = 0.0;
        for (const double v : r.per_cell) {
            r.total += v;
        }
    }
    return out;
}

void check_weight(const Trajectory& u, const WeightField& w, std::size_t slab)
{
    if (slab >= u.n_slabs() || slab >= w.slabs.size()) {
        throw std::out_of_range("pairing: slab index outside the partition");
    }
    if (w.meshes.size() != w.slabs.size() || w.meshes[slab] != u.dofs[slab]->mesh_ptr()) {
        throw std::invalid_argument("pairing: weight and trajectory meshes differ on slab " + std::to_string(slab + 1));
    }
    const auto& a = w.slabs[slab];
    const auto& b = u.slabs[slab];
    if (a.t0 != b.t0 || a.t1 != b.t1) {
        throw std::invalid_argument("pairing: partition mismatch on slab " + std::to_string(slab + 1));
    }
}

WeightField weight_from(const Trajectory& z, WeightField::Tag tag, int degree)
{
    WeightField w;
    w.tag = tag;
    w.space_degree = degree;
    for (const auto& d : z.dofs) {
        w.meshes.push_back(d->mesh_ptr());
    }
    return w;
}

SlabPolynomial temporal_weight_slab(const Trajectory& z, TemporalMode mode, int r, std::size_t n)
{
    const auto& dofs = *z.dofs[n];
    const SlabPolynomial gz = gathered(dofs, z.slabs[n]);
    if (mode == TemporalMode::hoRe) {
        if (z.time_degree != r) {
            throw std::invalid_argument("hoRe weight: dual temporal degree must equal r");
        }
        const Vector anchor = n == 0 ? gz.left_limit()
                                     : dofs.gather(transfer(*z.dofs[n - 1], dofs, z.slabs[n - 1].right_limit()));
        const SlabPolynomial rec = reconstruct_time(gz, anchor);
        return combine(rec, 1.0, elevate_time(gz, r + 1), -1.0);
    }
    if (z.time_degree <= r) {
        throw std::invalid_argument("hoFE weight: dual temporal degree must exceed r");
    }
    return combine(gz, 1.0, elevate_time(restrict_time(gz, r), z.time_degree), -1.0);
}

void check_spatial_degrees(const Trajectory& z, int p)
{
    if (z.space_degree <= p) {
        throw std::invalid_argument("spatial weight: dual degree q must exceed p");
    }
}

}  // namespace

WeightField discrete_weight(const Trajectory& field)
{
    WeightField w = weight_from(field, WeightField::Tag::Discrete, field.space_degree);
    for (std::size_t n = 0; n < field.n_slabs(); ++n) {
        w.slabs.push_back(gathered(*field.dofs[n], field.slabs[n]));
    }
    return w;
}

WeightField temporal_weight(const Trajectory& z, TemporalMode mode, int r)
{
    WeightField w = weight_from(z,
                                mode == TemporalMode::hoRe ? WeightField::Tag::TemporalReconstruction
                                                           : WeightField::Tag::TemporalRestriction,
                                z.space_degree);
    for (std::size_t n = 0; n < z.n_slabs(); ++n) {
        w.slabs.push_back(temporal_weight_slab(z, mode, r, n));
    }
    return w;
}

WeightField spatial_weight(const Trajectory& z, int p)
{
    check_spatial_degrees(z, p);
    const int q = z.space_degree;
    WeightField w = weight_from(z, WeightField::Tag::Spatial, q);
    for (std::size_t n = 0; n < z.n_slabs(); ++n) {
        const SlabPolynomial gz = gathered(*z.dofs[n], z.slabs[n]);
        w.slabs.push_back(map_blocks(gz, [&](const Vector& v) -> Vector {
            return v - prolong_space(restrict_space(v, q, p), p, q);
        }));
    }
    return w;
}

WeightField spatial_interpolant(const Trajectory& z, int p)
{
    check_spatial_degrees(z, p);
    const int q = z.space_degree;
    WeightField w = weight_from(z, WeightField::Tag::Discrete, p);
    for (std::size_t n = 0; n < z.n_slabs(); ++n) {
        const SlabPolynomial gz = gathered(*z.dofs[n], z.slabs[n]);
        w.slabs.push_back(map_blocks(gz, [&](const Vector& v) -> Vector { return restrict_space(v, q, p); }));
    }
    return w;
}

PairingResult residual_pairing(AssemblyContext& ctx, const Trajectory& u, const WeightField& w, std::size_t slab)
{
    check_weight(u, w, slab);
    const SlabWeight sw{&w.slabs[slab], w.space_degree, false};
    return pair_slab(ctx, u, slab, std::span(&sw, 1)).front();
}

PairingResult stabilization_pairing(AssemblyContext& ctx, const Trajectory& u, const WeightField& w,
                                    std::size_t slab)
{
    check_weight(u, w, slab);
    if (ctx.delta0() == 0.0) {
        return {0.0, std::vector<double>(u.dofs[slab]->mesh().n_cells(), 0.0)};
    }
    const SlabWeight sw{&w.slabs[slab], w.space_degree, true};
    return pair_slab(ctx, u, slab, std::span(&sw, 1)).front();
}

double stabilization_term(AssemblyContext& ctx, const Trajectory& u, const WeightField& w)
{
    double sum = 0.0;
    for (std::size_t n = 0; n < u.n_slabs(); ++n) {
        sum += stabilization_pairing(ctx, u, w, n).total;
    }
    return sum;
}

std::vector<double> eta_tau(AssemblyContext& ctx, const Trajectory& u, const Trajectory& z, TemporalMode mode)
{
    const WeightField w = temporal_weight(z, mode, u.time_degree);
    std::vector<double> out;
    for (std::size_t n = 0; n < u.n_slabs(); ++n) {
        out.push_back(residual_pairing(ctx, u, w, n).total);
    }
    return out;
}

IndicatorSet eta_h(AssemblyContext& ctx, const Trajectory& u, const Trajectory& z)
{
    const WeightField w = spatial_weight(z, u.space_degree);
    const WeightField v = spatial_interpolant(z, u.space_degree);
    IndicatorSet set;
    for (std::size_t n = 0; n < u.n_slabs(); ++n) {
        auto rho = residual_pairing(ctx, u, w, n);
        const auto sa = stabilization_pairing(ctx, u, v, n);
        for (std::size_t c = 0; c < rho.per_cell.size(); ++c) {
            rho.per_cell[c] += sa.per_cell[c];
        }
        set.eta_h.push_back(rho.total + sa.total);
        set.eta_h_cells.push_back(std::move(rho.per_cell));
        set.eta_h_total += set.eta_h.back();
    }
    return set;
}

IndicatorSet estimate(AssemblyContext& ctx, const Trajectory& u, const Trajectory& z, TemporalMode mode)
{
    if (u.n_slabs() != z.n_slabs() || !(u.partition == z.partition)) {
        throw std::invalid_argument("estimate: primal and dual partitions differ");
    }
    check_spatial_degrees(z, u.space_degree);
    const int p = u.space_degree;
    const int q = z.space_degree;
    const bool supg = ctx.delta0() != 0.0;
    IndicatorSet set;
    for (std::size_t n = 0; n < u.n_slabs(); ++n) {
        if (z.dofs[n]->mesh_ptr() != u.dofs[n]->mesh_ptr()) {
            throw std::invalid_argument("estimate: primal and dual meshes differ on slab " + std::to_string(n + 1));
        }
        const SlabPolynomial wt = temporal_weight_slab(z, mode, u.time_degree, n);
        const SlabPolynomial gz = gathered(*z.dofs[n], z.slabs[n]);
        const SlabPolynomial rz = map_blocks(gz, [&](const Vector& v) -> Vector { return restrict_space(v, q, p); });
        const SlabPolynomial wh = combine(gz, 1.0, map_blocks(rz, [&](const Vector& v) -> Vector {
                                              return prolong_space(v, p, q);
                                          }),
                                          -1.0);
        std::vector<SlabWeight> ws{{&wt, q, false}, {&wh, q, false}};
        if (supg) {
            ws.push_back({&rz, p, true});
        }
        auto res = pair_slab(ctx, u, n, ws);
        set.eta_tau.push_back(res[0].total);
        auto cells = std::move(res[1].per_cell);
        double h = res[1].total;
        if (supg) {
            for (std::size_t c = 0; c < cells.size(); ++c) {
                cells[c] += res[2].per_cell[c];
            }
            h += res[2].total;
        }
        set.eta_h.push_back(h);
        set.eta_h_cells.push_back(std::move(cells));
        set.eta_tau_total += set.eta_tau.back();
        set.eta_h_total += h;
    }
    return set;
}

std::optional<double> effectivity_index(double eta_tau_total, double eta_h_total, double goal_err)
{
    if (goal_err == 0.0) {
        return std::nullopt;
    }
    return std::abs(eta_tau_total + eta_h_total) / std::abs(goal_err);
}

}  // namespace stdwr
