#pragma once

#include "stdwr/space_time.hpp"

#include <Eigen/SparseLU>

#include <cstdint>
#include <map>
#include <memory>
#include <tuple>

namespace stdwr {

/// Monolithic (r+1)-block system of one slab in the free coefficients.
/// Block row l pairs with test function L_l(t) psi_i; block column k holds the
/// free coefficients of the trial value at temporal node k.
struct SlabSystem {
    std::size_t slab = 0;
    int space_degree = 1;
    int time_degree = 0;
    double tau = 0.0;
    std::shared_ptr<const DofHandler> dofs;
    /// Identifies the spatial operators; systems with equal key, tau and r share a factorization.
    const void* operator_key = nullptr;
    SparseMatrix matrix;
    Vector rhs;
    /// Dirichlet values at the boundary nodes, one vector per temporal node.
    std::vector<Vector> boundary;
};

/// kron(A, X) + kron(B, Y); X and Y must have equal shape, zero coefficients skipped.
[[nodiscard]] SparseMatrix kron_sum(const Eigen::MatrixXd& A, const SparseMatrix& X, const Eigen::MatrixXd& B,
                                    const SparseMatrix& Y);

/// Slab operator kron(D + l l^T, C^T S1 C) + kron(tau M, C^T S2 C), with D, M, l
/// the reference derivative and mass matrices and left endpoint values.
[[nodiscard]] SparseMatrix primal_slab_matrix(const SpatialOperators& ops, double tau, int r);

/// Coupling of slab n to the free coefficients of slab n-1 through the jump
/// term: block (l, k) = -l_l(0) l_k(1) C_n^T S1_n P C_{n-1}.
[[nodiscard]] SparseMatrix primal_coupling_matrix(AssemblyContext& ctx, const std::shared_ptr<const DofHandler>& prev,
                                                  const std::shared_ptr<const DofHandler>& cur, int r);

/// `u_prev_end` is u^-_{n-1} on slab n's mesh. On the first slab an empty vector
/// makes the jump term use the exact initial value: (u^+_0 - u_0, phi + delta b.grad phi).
[[nodiscard]] SlabSystem assemble_slab(AssemblyContext& ctx, const TimePartition& partition, std::size_t slab,
                                       const std::shared_ptr<const DofHandler>& dofs, int r,
                                       const Vector& u_prev_end);

/// LU factorizations shared by slabs with equal operator, tau and degree.
class SlabSolverCache {
public:
    using Solver = Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>;

    /// Holds at most `capacity` factorizations whose L and U nonzeros together stay
    /// within `max_factor_nonzeros`; least recently used entries are evicted first.
    /// The newest factorization is always kept, whatever its size.
    explicit SlabSolverCache(std::size_t capacity = 4, std::size_t max_factor_nonzeros = 30'000'000)
        : capacity_(capacity < 1 ? 1 : capacity), max_nonzeros_(max_factor_nonzeros)
    {
    }

    /// Factorization of `matrix`, computed on first use for the key.
    const Solver& factor(const void* key, double tau, int r, const SparseMatrix& matrix, std::size_t slab);
    void clear()
    {
        cache_.clear();
        nonzeros_ = 0;
    }
    [[nodiscard]] std::size_t size() const { return cache_.size(); }
    /// Sum of L and U nonzeros over the cached factorizations.
    [[nodiscard]] std::size_t factor_nonzeros() const { return nonzeros_; }

private:
    using Key = std::tuple<const void*, double, int>;
    struct Entry {
        std::unique_ptr<Solver> solver;
        std::uint64_t last_use = 0;
        std::size_t nonzeros = 0;
    };
    void evict_oldest();

    std::size_t capacity_;
    std::size_t max_nonzeros_;
    std::size_t nonzeros_ = 0;
    std::uint64_t clock_ = 0;
    std::map<Key, Entry> cache_;
};

/// Solve one slab system; returns consistent nodal values per temporal node.
[[nodiscard]] std::vector<Vector> solve_slab(const SlabSystem& system, SlabSolverCache* cache = nullptr);

/// Forward sweep over all slabs; the first slab starts from the exact u_0.
[[nodiscard]] Trajectory solve_primal(AssemblyContext& ctx, const SpaceTimeMesh& mesh, int p, int r);

}  // namespace stdwr
