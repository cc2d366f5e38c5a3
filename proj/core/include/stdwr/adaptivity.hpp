#pragma once

#include "stdwr/estimator.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>

namespace stdwr {

struct AdaptConfig {
    double omega = 1.5;
    double theta_tau = 0.3;
    double theta_h = 0.3;
    int max_loops = 8;
    int p = 1;
    int r = 0;
    int q = 2;
    int s = 0;
    TemporalMode mode = TemporalMode::hoRe;
    GoalKind goal = GoalKind::L2L2;
    /// Stop before a loop whose space-time DoF count would exceed this (0: no cap).
    std::size_t max_dofs = 0;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

enum class RefinementDecision { TemporalOnly, SpatialOnly, Both };

[[nodiscard]] std::string decision_name(RefinementDecision d);

/// TemporalOnly if |eta_tau| > omega |eta_h|, SpatialOnly if |eta_h| > omega |eta_tau|, else Both.
[[nodiscard]] RefinementDecision decide(double eta_tau_total, double eta_h_total, double omega);

/// Indices of the ceil(theta * size) largest |indicator| values, ties to the lower
/// index, returned in increasing order.
[[nodiscard]] std::vector<std::size_t> mark(std::span<const double> indicators, double theta);

struct ConvergenceRecord {
    int loop = 0;
    std::size_t N = 0;
    std::size_t NKmax = 0;
    std::size_t NDoFtot = 0;
    double Je = 0.0;
    double eta_h = 0.0;
    double eta_tau = 0.0;
    /// Empty when J(e) = 0.
    std::optional<double> Ieff;
};

/// Refine slabs (bisection) and per-slab meshes (marked cells, pooled marking
/// over all slab-cell pairs). Unmarked slabs keep their mesh object; identical
/// refined meshes are shared.
[[nodiscard]] SpaceTimeMesh refine_space_time(const SpaceTimeMesh& mesh, RefinementDecision decision,
                                              std::span<const std::size_t> slab_marks,
                                              const std::vector<std::vector<std::size_t>>& cell_marks);

/// Everything computed in one loop, passed to the observer before refinement.
struct LoopSnapshot {
    const ConvergenceRecord& record;
    const SpaceTimeMesh& mesh;
    const Trajectory& primal;
    const Trajectory* dual;            // null when the goal is exact
    const IndicatorSet& indicators;
    std::optional<RefinementDecision> decision;  // empty on the final loop
};

using LoopObserver = std::function<void(const LoopSnapshot&)>;

struct AdaptiveRun {
    std::vector<ConvergenceRecord> records;
    SpaceTimeMesh final_mesh;
    /// Non-empty when a stage failed; records hold every completed loop.
    std::string error;
};

[[nodiscard]] AdaptiveRun adaptive_loop(const AdaptConfig& config, const ProblemData& data, double delta0,
                                        SpaceTimeMesh initial, const LoopObserver& observer = {});

}  // namespace stdwr
