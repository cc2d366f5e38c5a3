#include "stdwr/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace stdwr {

namespace {

std::uint64_t pack(int level, std::int64_t i, std::int64_t j)
{
    return (static_cast<std::uint64_t>(level) << 58) | (static_cast<std::uint64_t>(i) << 29)
         | static_cast<std::uint64_t>(j);
}

constexpr int max_supported_level = 24;

constexpr std::int64_t neighbour_offsets[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};

}  // namespace

double Cell::diameter() const
{
    return std::hypot(hx(), hy());
}

Point Cell::corner(int k) const
{
    return {(k & 1) ? x1 : x0, (k & 2) ? y1 : y0};
}

SpatialMesh::SpatialMesh(const Rectangle& domain, int nx, int ny, std::vector<Cell> cells)
    : domain_(domain), nx_(nx), ny_(ny), cells_(std::move(cells))
{
    index_.reserve(cells_.size());
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        const auto& cell = cells_[c];
        index_.emplace(pack(cell.level, cell.i, cell.j), c);
        max_level_ = std::max(max_level_, cell.level);
    }
}

Cell SpatialMesh::make_cell(int level, std::int64_t i, std::int64_t j) const
{
    const double scale = std::ldexp(1.0, -level);
    const double w = domain_.width() / nx_ * scale;
    const double h = domain_.height() / ny_ * scale;
    Cell c;
    c.level = level;
    c.i = i;
    c.j = j;
    c.x0 = domain_.x0 + static_cast<double>(i) * w;
    c.x1 = domain_.x0 + static_cast<double>(i + 1) * w;
    c.y0 = domain_.y0 + static_cast<double>(j) * h;
    c.y1 = domain_.y0 + static_cast<double>(j + 1) * h;
    return c;
}

SpatialMesh SpatialMesh::uniform(const Rectangle& domain, int nx, int ny)
{
    if (nx < 1 || ny < 1) {
        throw std::invalid_argument("SpatialMesh::uniform: nx and ny must be positive");
    }
    if (!(domain.width() > 0.0) || !(domain.height() > 0.0)) {
        throw std::invalid_argument("SpatialMesh::uniform: degenerate domain");
    }
    SpatialMesh proto(domain, nx, ny, {});
    std::vector<Cell> cells;
    cells.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            cells.push_back(proto.make_cell(0, i, j));
        }
    }
    return SpatialMesh(domain, nx, ny, std::move(cells));
}

std::optional<std::size_t> SpatialMesh::leaf(int level, std::int64_t i, std::int64_t j) const
{
    if (level < 0 || i < 0 || j < 0) {
        return std::nullopt;
    }
    const auto it = index_.find(pack(level, i, j));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::optional<std::size_t> SpatialMesh::covering_leaf(int level, std::int64_t i, std::int64_t j) const
{
    const std::int64_t ni = static_cast<std::int64_t>(nx_) << level;
    const std::int64_t nj = static_cast<std::int64_t>(ny_) << level;
    if (i < 0 || j < 0 || i >= ni || j >= nj) {
        return std::nullopt;
    }
    for (int k = 0; k <= level; ++k) {
        if (auto c = leaf(level - k, i >> k, j >> k)) {
            return c;
        }
    }
    return std::nullopt;
}

std::size_t SpatialMesh::locate(Point p) const
{
    const int L = max_level_;
    const std::int64_t ni = static_cast<std::int64_t>(nx_) << L;
    const std::int64_t nj = static_cast<std::int64_t>(ny_) << L;
    auto i = static_cast<std::int64_t>(std::floor((p.x - domain_.x0) / domain_.width() * static_cast<double>(ni)));
    auto j = static_cast<std::int64_t>(std::floor((p.y - domain_.y0) / domain_.height() * static_cast<double>(nj)));
    i = std::clamp<std::int64_t>(i, 0, ni - 1);
    j = std::clamp<std::int64_t>(j, 0, nj - 1);
    if (auto c = covering_leaf(L, i, j)) {
        return *c;
    }
    throw std::logic_error("SpatialMesh::locate: point not covered by any leaf");
}

SpatialMesh SpatialMesh::refine(std::span<const std::size_t> marks) const
{
    std::set<std::size_t> to_refine;
    for (const auto m : marks) {
        if (m >= cells_.size()) {
            throw std::out_of_range("SpatialMesh::refine: unknown cell id " + std::to_string(m));
        }
        to_refine.insert(m);
    }

    // Closure: a refined cell's children sit next to every edge neighbour, so a
    // coarser neighbour must be refined as well.
    std::vector<std::size_t> work(to_refine.begin(), to_refine.end());
    while (!work.empty()) {
        const std::size_t c = work.back();
        work.pop_back();
        const auto& cell = cells_[c];
        if (cell.level + 1 > max_supported_level) {
            throw std::runtime_error("SpatialMesh::refine: maximum refinement level exceeded");
        }
        for (const auto& off : neighbour_offsets) {
            const auto n = covering_leaf(cell.level, cell.i + off[0], cell.j + off[1]);
            if (n && cells_[*n].level < cell.level && !to_refine.contains(*n)) {
                to_refine.insert(*n);
                work.push_back(*n);
            }
        }
    }

    std::vector<Cell> next;
    next.reserve(cells_.size() + 3 * to_refine.size());
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        const auto& cell = cells_[c];
        if (!to_refine.contains(c)) {
            next.push_back(cell);
            continue;
        }
        for (int cj = 0; cj < 2; ++cj) {
            for (int ci = 0; ci < 2; ++ci) {
                next.push_back(make_cell(cell.level + 1, 2 * cell.i + ci, 2 * cell.j + cj));
            }
        }
    }
    return SpatialMesh(domain_, nx_, ny_, std::move(next));
}

SpatialMesh SpatialMesh::refine_all() const
{
    std::vector<std::size_t> all(cells_.size());
    for (std::size_t c = 0; c < all.size(); ++c) {
        all[c] = c;
    }
    return refine(all);
}

double SpatialMesh::h() const
{
    double h = 0.0;
    for (const auto& c : cells_) {
        h = std::max(h, c.diameter());
    }
    return h;
}

bool SpatialMesh::is_one_irregular() const
{
    for (const auto& cell : cells_) {
        for (const auto& off : neighbour_offsets) {
            const auto n = covering_leaf(cell.level, cell.i + off[0], cell.j + off[1]);
            if (n && cells_[*n].level < cell.level - 1) {
                return false;
            }
        }
    }
    return true;
}

std::string SpatialMesh::dump() const
{
    std::string out;
    char line[160];
    for (const auto& c : cells_) {
        std::snprintf(line, sizeof line, "%d %.17g %.17g %.17g %.17g\n", c.level, c.x0, c.y0, c.x1, c.y1);
        out += line;
    }
    return out;
}

}  // namespace stdwr
