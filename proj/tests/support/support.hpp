#pragma once

// Shared oracles and property checks for the unit suites and the acceptance
// driver. Every oracle here is computed without going through the code path it
// is used to check.

#include "stdwr/adaptivity.hpp"
#include "stdwr/config.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace stdwr::oracles {

/// Value of a cell-local coefficient block (DofHandler::gather layout) at a
/// physical point of cell `c`, evaluated straight from the reference basis.
[[nodiscard]] double cell_value(const DofHandler& dofs, const Vector& gathered, std::size_t c, Point x);

/// Consistent nodal vector with uniform random free and constrained-master values.
[[nodiscard]] Vector random_consistent(const DofHandler& dofs, std::mt19937_64& rng, bool zero_boundary);

/// Trajectory on `stm` with random consistent nodal blocks, zero on the boundary.
[[nodiscard]] Trajectory random_trajectory(AssemblyContext& ctx, const SpaceTimeMesh& stm, int space_degree,
                                           int time_degree, std::mt19937_64& rng);

/// Same layout as `like`, every slab block from fn(slab, temporal node time, dofs).
template <class Fn>
[[nodiscard]] Trajectory trajectory_like(const Trajectory& like, int time_degree, Fn fn)
{
    Trajectory t;
    t.partition = like.partition;
    t.space_degree = like.space_degree;
    t.time_degree = time_degree;
    t.dofs = like.dofs;
    for (std::size_t n = 0; n < like.n_slabs(); ++n) {
        const double t0 = like.partition.start(n);
        const double t1 = like.partition.end(n);
        t.slabs.push_back(SlabPolynomial::from_function(t0, t1, time_degree,
                                                        [&](double time) { return fn(n, time, *like.dofs[n]); }));
    }
    return t;
}

/// 4x4 unit-square mesh with one interior and one boundary cell quadrisected.
[[nodiscard]] std::shared_ptr<const SpatialMesh> hanging_mesh();

/// Largest mismatch between the two one-sided values of a random conforming Q_p
/// field along every interior edge (5 random points per edge). `hanging_edges`
/// receives the number of edges whose neighbours differ in level.
[[nodiscard]] double continuity_defect(const std::shared_ptr<const SpatialMesh>& mesh, int p, std::uint64_t seed,
                                       std::size_t* hanging_edges = nullptr);

/// max over 10 random discrete test fields of |rho(u)(phi) - S_A(u)(phi)| / scale,
/// with scale the largest absolute per-cell contribution of either side.
[[nodiscard]] double orthogonality_residue(Preset preset, double delta0, std::uint64_t seed);

/// Entrywise distance between the 2-slab dual block operator and the transpose
/// of the 2-slab primal block operator (same spaces, 4x4 uniform mesh unless a
/// mesh is given).
[[nodiscard]] double transposition_defect(double delta0, int degree, int time_degree,
                                          std::shared_ptr<const SpatialMesh> mesh = {});

/// L2(L2) errors of the diffusive moving hump on (4*2^l)^2 cells and 4*4^l slabs.
[[nodiscard]] std::vector<double> mms_errors(int levels, double delta0);

/// Property results for the acceptance summary: name and pass flag with detail.
struct PropertyResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// The fast module property checks (mesh, time grid, marking, reruns).
[[nodiscard]] std::vector<PropertyResult> property_suite();

/// Whole adaptive run collected into records and the CSV text it would write.
struct RunOutput {
    AdaptiveRun run;
    std::string csv;
};
[[nodiscard]] RunOutput run_config(const RunConfig& config);

}  // namespace stdwr::oracles
