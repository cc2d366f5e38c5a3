#include "stdwr/space_time.hpp"

#include "stdwr/spatial_operators.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace stdwr {

QuadratureConfig QuadratureConfig::for_degrees(int p, int r, int q, int s)
{
    QuadratureConfig c;
    c.space_points = std::max(p, q) + 2;
    c.time_points = std::max(r, s) + 2;
    c.goal_space_points = c.space_points + 2;
    return c;
}

SpaceTimeMesh SpaceTimeMesh::uniform(const Rectangle& domain, int nx, int ny, double T, int N)
{
    SpaceTimeMesh stm;
    stm.partition = TimePartition::uniform(T, N);
    auto mesh = std::make_shared<const SpatialMesh>(SpatialMesh::uniform(domain, nx, ny));
    stm.meshes.assign(stm.partition.n_slabs(), mesh);
    return stm;
}

std::size_t SpaceTimeMesh::max_cells() const
{
    std::size_t m = 0;
    for (const auto& mesh : meshes) {
        m = std::max(m, mesh->n_cells());
    }
    return m;
}

std::size_t SpaceTimeMesh::total_dofs(int p, int r) const
{
    // Node counts depend only on the mesh; count each distinct mesh once.
    std::map<const SpatialMesh*, std::size_t> counts;
    std::size_t total = 0;
    for (const auto& mesh : meshes) {
        auto it = counts.find(mesh.get());
        if (it == counts.end()) {
            it = counts.emplace(mesh.get(), DofHandler(mesh, p).n_nodes()).first;
        }
        total += static_cast<std::size_t>(r + 1) * it->second;
    }
    return total;
}

void SpaceTimeMesh::validate() const
{
    if (meshes.size() != partition.n_slabs()) {
        throw std::invalid_argument("SpaceTimeMesh: one spatial mesh per slab required");
    }
    for (const auto& m : meshes) {
        if (!m) {
            throw std::invalid_argument("SpaceTimeMesh: null slab mesh");
        }
    }
}

AssemblyContext::AssemblyContext(const ProblemData& data, double delta0, QuadratureConfig quad)
    : data_(&data), delta0_(delta0), quad_(quad)
{
    if (delta0 < 0.0) {
        throw std::invalid_argument("AssemblyContext: delta0 must be non-negative");
    }
}

std::shared_ptr<const DofHandler> AssemblyContext::dofs(const std::shared_ptr<const SpatialMesh>& mesh, int degree)
{
    auto& slot = dofs_[{mesh.get(), degree}];
    if (!slot) {
        slot = std::make_shared<const DofHandler>(mesh, degree);
    }
    return slot;
}

const SpatialOperators& AssemblyContext::operators(const std::shared_ptr<const DofHandler>& dofs)
{
    auto it = ops_.find(dofs.get());
    if (it == ops_.end()) {
        auto ops = assemble_spatial_operators(*dofs, *data_, delta0_, table(dofs->degree()));
        it = ops_.emplace(dofs.get(), std::make_pair(dofs, std::move(ops))).first;
    }
    return it->second.second;
}

const SpatialOperators& AssemblyContext::adjoint_operators(const std::shared_ptr<const DofHandler>& dofs)
{
    auto it = adjoint_ops_.find(dofs.get());
    if (it == adjoint_ops_.end()) {
        auto ops = assemble_adjoint_operators(*dofs, *data_, delta0_, table(dofs->degree()));
        it = adjoint_ops_.emplace(dofs.get(), std::make_pair(dofs, std::move(ops))).first;
    }
    return it->second.second;
}

const ReferenceTable& AssemblyContext::table(int degree, int points_per_direction)
{
    auto it = tables_.find({degree, points_per_direction});
    if (it == tables_.end()) {
        it = tables_.emplace(std::make_pair(degree, points_per_direction),
                             ReferenceTable::build(degree, points_per_direction))
                 .first;
    }
    return it->second;
}

void AssemblyContext::prune(const std::vector<std::shared_ptr<const SpatialMesh>>& keep)
{
    std::set<const SpatialMesh*> live;
    for (const auto& m : keep) {
        live.insert(m.get());
    }
    for (auto* cache : {&ops_, &adjoint_ops_}) {
        std::erase_if(*cache, [&](const auto& kv) { return !live.contains(&kv.second.first->mesh()); });
    }
    std::erase_if(dofs_, [&](const auto& kv) { return !live.contains(kv.first.first); });
}

Vector Trajectory::previous_end(std::size_t n) const
{
    if (n == 0) {
        if (initial.size() == 0) {
            throw std::logic_error("Trajectory::previous_end: no initial value stored");
        }
        return initial;
    }
    return transfer(*dofs.at(n - 1), *dofs.at(n), slabs.at(n - 1).right_limit());
}

}  // namespace stdwr
