#include "stdwr/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace stdwr {

void AdaptConfig::validate() const
{
    auto fail = [](const std::string& key, const std::string& what) {
        throw std::invalid_argument(key + ": " + what);
    };
    if (!(omega >= 1.5 && omega <= 3.5)) {
        fail("omega", "must lie in [1.5, 3.5]");
    }
    if (!(theta_tau > 0.0 && theta_tau <= 1.0)) {
        fail("theta_tau", "must lie in (0, 1]");
    }
    if (!(theta_h > 0.0 && theta_h <= 1.0)) {
        fail("theta_h", "must lie in (0, 1]");
    }
    if (max_loops < 0) {
        fail("max_loops", "must be non-negative");
    }
    if (p < 1) {
        fail("p", "must be at least 1");
    }
    if (r < 0) {
        fail("r", "must be non-negative");
    }
    if (q <= p) {
        fail("q", "must exceed p");
    }
    if (mode == TemporalMode::hoRe && s != r) {
        fail("s", "hoRe requires s = r");
    }
    if (mode == TemporalMode::hoFE && s <= r) {
        fail("s", "hoFE requires s > r");
    }
}

std::string decision_name(RefinementDecision d)
{
    switch (d) {
    case RefinementDecision::TemporalOnly:
        return "temporal";
    case RefinementDecision::SpatialOnly:
        return "spatial";
    case RefinementDecision::Both:
        return "both";
    }
    return "both";
}

RefinementDecision decide(double eta_tau_total, double eta_h_total, double omega)
{
    if (!(omega >= 1.0)) {
        throw std::invalid_argument("decide: omega must be at least 1");
    }
    const double et = std::abs(eta_tau_total);
    const double eh = std::abs(eta_h_total);
    if (et > omega * eh) {
        return RefinementDecision::TemporalOnly;
    }
    if (eh > omega * et) {
        return RefinementDecision::SpatialOnly;
    }
    return RefinementDecision::Both;
}

std::vector<std::size_t> mark(std::span<const double> indicators, double theta)
{
    if (indicators.empty()) {
        throw std::invalid_argument("mark: empty indicator list");
    }
    if (!(theta > 0.0 && theta <= 1.0)) {
        throw std::invalid_argument("mark: theta must lie in (0, 1]");
    }
    const auto count = std::min(indicators.size(),
                                static_cast<std::size_t>(std::ceil(theta * static_cast<double>(indicators.size()))));
    std::vector<std::size_t> order(indicators.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(indicators[a]) > std::abs(indicators[b]);
    });
    order.resize(count);
    std::sort(order.begin(), order.end());
    return order;
}

SpaceTimeMesh refine_space_time(const SpaceTimeMesh& mesh, RefinementDecision decision,
                                std::span<const std::size_t> slab_marks,
                                const std::vector<std::vector<std::size_t>>& cell_marks)
{
    mesh.validate();
    std::vector<std::shared_ptr<const SpatialMesh>> meshes = mesh.meshes;

    if (decision != RefinementDecision::TemporalOnly) {
        if (cell_marks.size() != mesh.n_slabs()) {
            throw std::invalid_argument("refine_space_time: one cell mark list per slab required");
        }
        // Identical (source mesh, marks) pairs and identical results share one object.
        std::map<std::pair<const SpatialMesh*, std::vector<std::size_t>>, std::shared_ptr<const SpatialMesh>> done;
        std::map<std::vector<std::int64_t>, std::shared_ptr<const SpatialMesh>> interned;
        for (std::size_t n = 0; n < meshes.size(); ++n) {
            if (cell_marks[n].empty()) {
                continue;
            }
            auto& slot = done[{meshes[n].get(), cell_marks[n]}];
            if (!slot) {
                auto refined = std::make_shared<const SpatialMesh>(meshes[n]->refine(cell_marks[n]));
                std::vector<std::int64_t> key;
                key.reserve(refined->n_cells() * 3);
                for (const auto& c : refined->cells()) {
                    key.insert(key.end(), {c.level, c.i, c.j});
                }
                auto& shared = interned[key];
                if (!shared) {
                    shared = std::move(refined);
                }
                slot = shared;
            }
            meshes[n] = slot;
        }
    }

    SpaceTimeMesh out;
    if (decision != RefinementDecision::SpatialOnly) {
        out.partition = mesh.partition.refine(slab_marks);
        std::vector<bool> bisect(mesh.n_slabs(), false);
        for (const auto m : slab_marks) {
            bisect.at(m) = true;
        }
        for (std::size_t n = 0; n < meshes.size(); ++n) {
            out.meshes.push_back(meshes[n]);
            if (bisect[n]) {
                out.meshes.push_back(meshes[n]);
            }
        }
    } else {
        out.partition = mesh.partition;
        out.meshes = std::move(meshes);
    }
    out.validate();
    return out;
}

AdaptiveRun adaptive_loop(const AdaptConfig& config, const ProblemData& data, double delta0, SpaceTimeMesh initial,
                          const LoopObserver& observer)
{
    config.validate();
    initial.validate();
    AdaptiveRun run;
    run.final_mesh = std::move(initial);
    AssemblyContext ctx(data, delta0, QuadratureConfig::for_degrees(config.p, config.r, config.q, config.s));

    std::string stage;
    try {
        for (int loop = 1; loop <= config.max_loops; ++loop) {
            SpaceTimeMesh& stm = run.final_mesh;
            ConvergenceRecord rec;
            rec.loop = loop;
            rec.N = stm.n_slabs();
            rec.NKmax = stm.max_cells();
            rec.NDoFtot = stm.total_dofs(config.p, config.r);

            stage = "primal solve";
            const Trajectory u = solve_primal(ctx, stm, config.p, config.r);
            stage = "goal evaluation";
            const GoalFunctional goal(config.goal, ctx, u);
            rec.Je = goal.normalization();

            IndicatorSet ind;
            std::optional<Trajectory> z;
            if (!goal.exact()) {
                stage = "dual solve";
                z = solve_dual(ctx, stm, config.q, config.s, goal);
                stage = "estimation";
                ind = estimate(ctx, u, *z, config.mode);
            } else {
                ind.eta_tau.assign(stm.n_slabs(), 0.0);
                ind.eta_h.assign(stm.n_slabs(), 0.0);
                for (const auto& m : stm.meshes) {
                    ind.eta_h_cells.emplace_back(m->n_cells(), 0.0);
                }
            }
            rec.eta_h = ind.eta_h_total;
            rec.eta_tau = ind.eta_tau_total;
            rec.Ieff = effectivity_index(rec.eta_tau, rec.eta_h, rec.Je);
            run.records.push_back(rec);

            const bool last = loop == config.max_loops;
            std::optional<RefinementDecision> decision;
            if (!last) {
                decision = decide(rec.eta_tau, rec.eta_h, config.omega);
            }
            if (observer) {
                stage = "output";
                observer(LoopSnapshot{run.records.back(), stm, u, z ? &*z : nullptr, ind, decision});
            }
            if (last) {
                break;
            }

            stage = "refinement";
            std::vector<std::size_t> slab_marks;
            std::vector<std::vector<std::size_t>> cell_marks(stm.n_slabs());
            if (*decision != RefinementDecision::SpatialOnly) {
                slab_marks = mark(ind.eta_tau, config.theta_tau);
            }
            if (*decision != RefinementDecision::TemporalOnly) {
                std::vector<double> pooled;
                std::vector<std::pair<std::size_t, std::size_t>> where;
                for (std::size_t n = 0; n < ind.eta_h_cells.size(); ++n) {
                    for (std::size_t c = 0; c < ind.eta_h_cells[n].size(); ++c) {
                        pooled.push_back(ind.eta_h_cells[n][c]);
                        where.emplace_back(n, c);
                    }
                }
                for (const auto i : mark(pooled, config.theta_h)) {
                    cell_marks[where[i].first].push_back(where[i].second);
                }
            }
            SpaceTimeMesh next = refine_space_time(stm, *decision, slab_marks, cell_marks);
            if (config.max_dofs > 0 && next.total_dofs(config.p, config.r) > config.max_dofs) {
                break;
            }
            run.final_mesh = std::move(next);
            ctx.prune(run.final_mesh.meshes);
        }
    } catch (const std::exception& e) {
        run.error = stage + ": " + e.what();
    }
    return run;
}

}  // namespace stdwr
