#include "support.hpp"

#include "stdwr/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace stdwr::oracles {

double cell_value(const DofHandler& dofs, const Vector& gathered, std::size_t c, Point x)
{
    const Cell& cell = dofs.mesh().cell(c);
    const std::size_t nb = dofs.nodes_per_cell();
    std::vector<double> phi(nb);
    evaluate_q_basis(dofs.degree(), (x.x - cell.x0) / cell.hx(), (x.y - cell.y0) / cell.hy(), phi);
    double v = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
        v += gathered[static_cast<Eigen::Index>(c * nb + i)] * phi[i];
    }
    return v;
}

Vector random_consistent(const DofHandler& dofs, std::mt19937_64& rng, bool zero_boundary)
{
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Vector x(static_cast<Eigen::Index>(dofs.n_free()));
    for (auto& v : x) {
        v = U(rng);
    }
    Vector g = Vector::Zero(static_cast<Eigen::Index>(dofs.n_boundary()));
    if (!zero_boundary) {
        for (auto& v : g) {
            v = U(rng);
        }
    }
    return dofs.free_to_nodal() * x + dofs.boundary_to_nodal() * g;
}

Trajectory random_trajectory(AssemblyContext& ctx, const SpaceTimeMesh& stm, int space_degree, int time_degree,
                             std::mt19937_64& rng)
{
    Trajectory t;
    t.partition = stm.partition;
    t.space_degree = space_degree;
    t.time_degree = time_degree;
    for (std::size_t n = 0; n < stm.n_slabs(); ++n) {
        const auto dofs = ctx.dofs(stm.meshes[n], space_degree);
        t.dofs.push_back(dofs);
        t.slabs.push_back(SlabPolynomial::from_function(stm.partition.start(n), stm.partition.end(n), time_degree,
                                                        [&](double) { return random_consistent(*dofs, rng, true); }));
    }
    return t;
}

std::shared_ptr<const SpatialMesh> hanging_mesh()
{
    const auto base = SpatialMesh::uniform(Rectangle::unit_square(), 4, 4);
    const std::size_t marks[] = {*base.leaf(0, 1, 1), *base.leaf(0, 2, 0)};
    return std::make_shared<const SpatialMesh>(base.refine(marks));
}

double continuity_defect(const std::shared_ptr<const SpatialMesh>& mesh, int p, std::uint64_t seed,
                         std::size_t* hanging_edges)
{
    const DofHandler dofs(mesh, p);
    std::mt19937_64 rng(seed);
    const Vector g = dofs.gather(random_consistent(dofs, rng, false));
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const Rectangle& dom = mesh->domain();
    double worst = 0.0;
    std::size_t hanging = 0;
    for (std::size_t c = 0; c < mesh->n_cells(); ++c) {
        const Cell& k = mesh->cell(c);
        const double off = 1e-9 * std::min(k.hx(), k.hy());
        // (edge start, edge direction, outward offset)
        const struct {
            Point a;
            Point d;
            Point out;
        } edges[] = {
            {{k.x0, k.y0}, {k.hx(), 0.0}, {0.0, -off}},
            {{k.x0, k.y1}, {k.hx(), 0.0}, {0.0, off}},
            {{k.x0, k.y0}, {0.0, k.hy()}, {-off, 0.0}},
            {{k.x1, k.y0}, {0.0, k.hy()}, {off, 0.0}},
        };
        for (const auto& e : edges) {
            const Point probe{e.a.x + 0.5 * e.d.x + e.out.x, e.a.y + 0.5 * e.d.y + e.out.y};
            if (probe.x < dom.x0 || probe.x > dom.x1 || probe.y < dom.y0 || probe.y > dom.y1) {
                continue;
            }
            for (int s = 0; s < 5; ++s) {
                const double u = U(rng);
                const Point x{e.a.x + u * e.d.x, e.a.y + u * e.d.y};
                const std::size_t nb = mesh->locate({x.x + e.out.x, x.y + e.out.y});
                worst = std::max(worst, std::abs(cell_value(dofs, g, c, x) - cell_value(dofs, g, nb, x)));
                if (s == 0 && mesh->cell(nb).level < k.level) {
                    ++hanging;
                }
            }
        }
    }
    if (hanging_edges) {
        *hanging_edges = hanging;
    }
    return worst;
}

double orthogonality_residue(Preset preset, double delta0, std::uint64_t seed)
{
    const auto data = make_problem(preset, preset == Preset::MovingHump ? 1e-3 : 1.0);
    const auto uniform = std::make_shared<const SpatialMesh>(SpatialMesh::uniform(data.domain, 4, 4));
    const auto hanging = hanging_mesh();
    const auto fine = std::make_shared<const SpatialMesh>(hanging->refine(std::vector<std::size_t>{0, 5}));
    SpaceTimeMesh stm;
    stm.partition = TimePartition::uniform(data.final_time, 4);
    stm.meshes = {uniform, hanging, fine, hanging};

    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (const int r : {0, 1}) {
        AssemblyContext ctx(data, delta0, QuadratureConfig::for_degrees(1, r, 2, r + 1));
        const Trajectory u = solve_primal(ctx, stm, 1, r);
        for (int trial = 0; trial < 10; ++trial) {
            const WeightField w = discrete_weight(random_trajectory(ctx, stm, 1, r, rng));
            double rho = 0.0;
            double sa = 0.0;
            double scale = 0.0;
            for (std::size_t n = 0; n < stm.n_slabs(); ++n) {
                const auto a = residual_pairing(ctx, u, w, n);
                const auto b = stabilization_pairing(ctx, u, w, n);
                rho += a.total;
                sa += b.total;
                for (const double v : a.per_cell) {
                    scale = std::max(scale, std::abs(v));
                }
                for (const double v : b.per_cell) {
                    scale = std::max(scale, std::abs(v));
                }
            }
            worst = std::max(worst, std::abs(rho - sa) / std::max(scale, 1e-300));
        }
    }
    return worst;
}

namespace {

double max_abs_diff(const SparseMatrix& a, const SparseMatrix& b)
{
    const Eigen::MatrixXd d = Eigen::MatrixXd(a) - Eigen::MatrixXd(b);
    return d.size() == 0 ? 0.0 : d.cwiseAbs().maxCoeff();
}

}  // namespace

double transposition_defect(double delta0, int degree, int time_degree, std::shared_ptr<const SpatialMesh> mesh)
{
    const auto data = make_problem(Preset::MovingHump, 1e-3);
    if (!mesh) {
        mesh = std::make_shared<const SpatialMesh>(SpatialMesh::uniform(data.domain, 4, 4));
    }
    AssemblyContext ctx(data, delta0, QuadratureConfig::for_degrees(degree, time_degree, degree, time_degree));
    const auto dofs = ctx.dofs(mesh, degree);
    const auto part = TimePartition::uniform(data.final_time, 2);

    double worst = 0.0;
    for (std::size_t n = 0; n < 2; ++n) {
        const SparseMatrix a = primal_slab_matrix(ctx.operators(dofs), part.length(n), time_degree);
        const SparseMatrix b = dual_slab_matrix(ctx.adjoint_operators(dofs), part.length(n), time_degree);
        worst = std::max(worst, max_abs_diff(b, SparseMatrix(a.transpose())));
    }
    // Primal block (1, 0) couples slab 2 to slab 1; the dual block (0, 1) must be its transpose.
    const SparseMatrix c = primal_coupling_matrix(ctx, dofs, dofs, time_degree);
    const SparseMatrix k = dual_coupling_matrix(ctx, dofs, dofs, time_degree);
    worst = std::max(worst, max_abs_diff(k, SparseMatrix(c.transpose())));
    return worst;
}

std::vector<double> mms_errors(int levels, double delta0)
{
    const auto data = make_problem(Preset::MovingHump, 1.0);
    std::vector<double> out;
    for (int l = 0; l < levels; ++l) {
        const int n = 4 << l;
        const int N = 4 << (2 * l);
        AssemblyContext ctx(data, delta0, QuadratureConfig::for_degrees(1, 0, 2, 0));
        const auto stm = SpaceTimeMesh::uniform(data.domain, n, n, data.final_time, N);
        out.push_back(goal_error(GoalKind::L2L2, ctx, solve_primal(ctx, stm, 1, 0)));
    }
    return out;
}

RunOutput run_config(const RunConfig& config)
{
    RunOutput out;
    out.csv = csv_header() + "\n";
    const auto data = config.problem();
    out.run = adaptive_loop(config.adapt_config(), data, config.delta0, config.initial_mesh(),
                            [&](const LoopSnapshot& s) { out.csv += format_record(s.record) + "\n"; });
    return out;
}

namespace {

PropertyResult check(std::string name, bool pass, const char* fmt, double value)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, fmt, value);
    return {std::move(name), pass, buf};
}

SpatialMesh random_refinement(std::uint64_t seed, int rounds)
{
    std::mt19937_64 rng(seed);
    SpatialMesh m = SpatialMesh::uniform(Rectangle::unit_square(), 3, 2);
    for (int k = 0; k < rounds; ++k) {
        std::vector<std::size_t> marks;
        std::uniform_int_distribution<std::size_t> pick(0, m.n_cells() - 1);
        for (int i = 0; i < 3; ++i) {
            marks.push_back(pick(rng));
        }
        m = m.refine(marks);
    }
    return m;
}

}  // namespace

std::vector<PropertyResult> property_suite()
{
    std::vector<PropertyResult> out;

    {
        double area_err = 0.0;
        bool irregular_ok = true;
        bool monotone = true;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            SpatialMesh prev = random_refinement(seed, 2);
            const SpatialMesh next = random_refinement(seed, 3);
            double area = 0.0;
            for (const auto& c : next.cells()) {
                area += c.area();
                // every new leaf lies inside a single old leaf
                const auto& host = prev.cell(prev.locate({0.5 * (c.x0 + c.x1), 0.5 * (c.y0 + c.y1)}));
                monotone = monotone && c.x0 >= host.x0 - 1e-15 && c.x1 <= host.x1 + 1e-15 && c.y0 >= host.y0 - 1e-15
                        && c.y1 <= host.y1 + 1e-15;
            }
            area_err = std::max(area_err, std::abs(area - 1.0));
            irregular_ok = irregular_ok && next.is_one_irregular();
        }
        out.push_back(check("mesh tiles the domain", area_err < 1e-12, "area defect %.2e", area_err));
        out.push_back(check("mesh stays one-irregular", irregular_ok, "%.0f", irregular_ok ? 1.0 : 0.0));
        out.push_back(check("refinement is monotone", monotone, "%.0f", monotone ? 1.0 : 0.0));
    }

    {
        double worst = 0.0;
        std::size_t hanging_total = 0;
        const auto random_mesh = std::make_shared<const SpatialMesh>(random_refinement(11, 3));
        for (const auto& mesh : {hanging_mesh(), random_mesh}) {
            for (const int p : {1, 2, 3}) {
                std::size_t h = 0;
                worst = std::max(worst, continuity_defect(mesh, p, 7 + static_cast<std::uint64_t>(p), &h));
                hanging_total += h;
            }
        }
        out.push_back(check("continuity across hanging edges", worst < 1e-12 && hanging_total > 0,
                            "max jump %.2e", worst));
    }

    {
        double worst = 0.0;
        const auto mesh = std::make_shared<const SpatialMesh>(random_refinement(5, 3));
        for (const int p : {1, 2, 3}) {
            const auto cs = hanging_constraints(mesh, p);
            for (const auto& [node, line] : cs.lines) {
                double sum = 0.0;
                for (const auto& [m, w] : line) {
                    sum += w;
                }
                worst = std::max(worst, std::abs(sum - 1.0));
            }
            const DofHandler dofs(mesh, p);
            // total degree <= p polynomial: interpolant already satisfies the constraints
            const auto poly = [p](Point x) { return std::pow(1.0 + x.x - 0.5 * x.y, p) + 0.25; };
            Vector v(static_cast<Eigen::Index>(dofs.n_nodes()));
            for (std::size_t i = 0; i < dofs.n_nodes(); ++i) {
                v[static_cast<Eigen::Index>(i)] = poly(dofs.position(i));
            }
            Vector w = v;
            dofs.distribute(w);
            worst = std::max(worst, (w - v).cwiseAbs().maxCoeff());
        }
        out.push_back(check("constraints reproduce degree-p polynomials", worst < 1e-12, "defect %.2e", worst));
    }

    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        double worst = 0.0;
        for (const auto& [q, p] : {std::pair{2, 1}, std::pair{3, 1}, std::pair{3, 2}}) {
            Vector v(5 * (q + 1) * (q + 1));
            for (auto& x : v) {
                x = U(rng);
            }
            const Vector once = restrict_space(v, q, p);
            const Vector twice = restrict_space(prolong_space(once, p, q), q, p);
            worst = std::max(worst, (once - twice).cwiseAbs().maxCoeff());
        }
        out.push_back(check("spatial restriction is idempotent", worst < 1e-13, "defect %.2e", worst));
    }

    {
        const auto m = SpatialMesh::uniform(Rectangle::unit_square(), 3, 5);
        const double ratio = m.refine_all().h() / m.h();
        out.push_back(check("uniform refinement halves h", std::abs(ratio - 0.5) < 1e-15, "ratio %.17g", ratio));
    }

    {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> U(-2.0, 2.0);
        double recon = 0.0;
        double proj = 0.0;
        for (int r = 0; r <= 3; ++r) {
            for (int trial = 0; trial < 5; ++trial) {
                std::vector<double> c(static_cast<std::size_t>(r) + 2);
                for (auto& x : c) {
                    x = U(rng);
                }
                const auto P = [&](double t) {
                    double v = 0.0;
                    for (std::size_t i = c.size(); i-- > 0;) {
                        v = v * t + c[i];
                    }
                    return v;
                };
                const double t0 = U(rng);
                const double t1 = t0 + 0.5 + std::abs(U(rng));
                const auto values = SlabPolynomial::from_function(t0, t1, r, [&](double t) {
                    return Eigen::VectorXd::Constant(2, P(t));
                });
                const auto rec = reconstruct_time(values, Eigen::VectorXd::Constant(2, P(t0)));
                for (int k = 0; k <= 6; ++k) {
                    const double t = t0 + (t1 - t0) * k / 6.0;
                    recon = std::max(recon, std::abs(rec.evaluate(t)[1] - P(t)));
                }
                const auto hi = SlabPolynomial::from_function(t0, t1, r + 1, [&](double t) {
                    return Eigen::VectorXd::Constant(1, P(t));
                });
                const auto once = restrict_time(hi, r);
                const auto twice = restrict_time(elevate_time(once, r + 1), r);
                for (std::size_t k = 0; k < once.nodal.size(); ++k) {
                    proj = std::max(proj, std::abs(once.nodal[k][0] - twice.nodal[k][0]));
                    proj = std::max(proj, std::abs(once.nodal[k][0] - P(once.node_times()[k])));
                }
            }
        }
        out.push_back(check("temporal reconstruction is exact for degree r+1", recon < 1e-12, "defect %.2e", recon));
        out.push_back(check("temporal restriction is a Gauss-node projection", proj < 1e-12, "defect %.2e", proj));
    }

    {
        std::mt19937_64 rng(23);
        std::uniform_int_distribution<int> level(-3, 3);
        bool same = true;
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> v(37);
            for (auto& x : v) {
                x = 0.5 * level(rng);  // many exact ties
            }
            const auto a = mark(v, 0.3);
            const auto b = mark(v, 0.3);
            same = same && a == b && std::is_sorted(a.begin(), a.end());
        }
        out.push_back(check("marking is deterministic", same, "%.0f", same ? 1.0 : 0.0));
    }

    {
        RunConfig c = parse_config("preset = ex1\nmax_loops = 3\n");
        const auto a = run_config(c);
        const auto b = run_config(c);
        const bool identical = a.csv == b.csv && a.run.error.empty();
        out.push_back({"adaptive reruns are byte-identical", identical, identical ? "identical" : "differ"});
        double worst = 0.0;
        for (const auto& r : a.run.records) {
            worst = std::max(worst, std::abs(std::abs(r.eta_tau + r.eta_h) / r.Je - r.Ieff.value_or(0.0)));
        }
        out.push_back(check("Ieff recomputable from each record", worst < 1e-12, "defect %.2e", worst));
    }
    return out;
}

}  // namespace stdwr::oracles
