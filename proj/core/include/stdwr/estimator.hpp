#pragma once

#include "stdwr/dual_solver.hpp"

#include <optional>
#include <string>

namespace stdwr {

enum class TemporalMode {
    hoRe,  // weight E^{r+1} z - z, dual in dG(r)
    hoFE,  // weight z - R^r z, dual in dG(s), s > r
};

[[nodiscard]] std::string mode_name(TemporalMode mode);
[[nodiscard]] TemporalMode parse_mode(const std::string& name);

/// Space-time weight in broken form: per slab a polynomial in time whose blocks
/// are cell-local Q_degree coefficients (DofHandler::gather layout) on that
/// slab's mesh.
struct WeightField {
    enum class Tag { TemporalReconstruction, TemporalRestriction, Spatial, Discrete };

    Tag tag = Tag::Discrete;
    int space_degree = 1;
    std::vector<std::shared_ptr<const SpatialMesh>> meshes;
    std::vector<SlabPolynomial> slabs;
};

/// Value and cellwise split of one pairing on one slab.
struct PairingResult {
    double total = 0.0;
    std::vector<double> per_cell;
};

/// Gathered view of a nodal trajectory, as a weight.
[[nodiscard]] WeightField discrete_weight(const Trajectory& field);
/// E^{r+1} z - z (hoRe, anchored at z(t_{n-1}^-) carried to slab n's mesh, and at
/// z(t_0^+) on the first slab) or z - R^r z (hoFE).
[[nodiscard]] WeightField temporal_weight(const Trajectory& z, TemporalMode mode, int r);
/// z - R_h^p z with R_h^p the cellwise Q_p interpolant.
[[nodiscard]] WeightField spatial_weight(const Trajectory& z, int p);
/// R_h^p z itself.
[[nodiscard]] WeightField spatial_interpolant(const Trajectory& z, int p);

/// int_{I_n} (f, w) - (d_t u, w) - a(u)(w) dt - (u^+_{n-1} - u^-_{n-1}, w^+_{n-1});
/// on the first slab u^-_0 is u_0 itself.
[[nodiscard]] PairingResult residual_pairing(AssemblyContext& ctx, const Trajectory& u, const WeightField& w,
                                             std::size_t slab);

/// SUPG terms on one slab: sum_K delta_K [int (r(u), b.grad w)_K dt + (u^+ - u^-, b.grad w^+)_K]
/// with r(u) = d_t u - eps lap u + b.grad u + alpha u - f.
[[nodiscard]] PairingResult stabilization_pairing(AssemblyContext& ctx, const Trajectory& u, const WeightField& w,
                                                  std::size_t slab);

/// Sum of stabilization_pairing over all slabs.
[[nodiscard]] double stabilization_term(AssemblyContext& ctx, const Trajectory& u, const WeightField& w);

struct IndicatorSet {
    std::vector<double> eta_tau;                  // per slab, signed
    std::vector<double> eta_h;                    // per slab, signed
    std::vector<std::vector<double>> eta_h_cells;  // per slab, per cell
    double eta_tau_total = 0.0;
    double eta_h_total = 0.0;
};

/// Per-slab temporal indicators rho(u)(temporal weight).
[[nodiscard]] std::vector<double> eta_tau(AssemblyContext& ctx, const Trajectory& u, const Trajectory& z,
                                          TemporalMode mode);

/// Per-slab and per-cell spatial indicators rho(u)(z - R_h^p z) + S_A(u)(R_h^p z).
[[nodiscard]] IndicatorSet eta_h(AssemblyContext& ctx, const Trajectory& u, const Trajectory& z);

/// Both indicator families in one pass over the slabs.
[[nodiscard]] IndicatorSet estimate(AssemblyContext& ctx, const Trajectory& u, const Trajectory& z,
                                    TemporalMode mode);

/// |eta_tau + eta_h| / |J(e)|; empty when J(e) = 0 (solution exact).
[[nodiscard]] std::optional<double> effectivity_index(double eta_tau_total, double eta_h_total, double goal_err);

}  // namespace stdwr
