#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace stdwr {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Rectangle {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 1.0;
    double y1 = 1.0;

    [[nodiscard]] double width() const { return x1 - x0; }
    [[nodiscard]] double height() const { return y1 - y0; }
    [[nodiscard]] double area() const { return width() * height(); }

    static Rectangle unit_square() { return {}; }
};

/// A leaf of the quadtree forest. (i, j) index the cell inside the level-`level`
/// grid of nx*2^level by ny*2^level congruent cells.
struct Cell {
    int level = 0;
    std::int64_t i = 0;
    std::int64_t j = 0;
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    [[nodiscard]] double hx() const { return x1 - x0; }
    [[nodiscard]] double hy() const { return y1 - y0; }
    [[nodiscard]] double area() const { return hx() * hy(); }
    /// h_K, the length of the cell diagonal.
    [[nodiscard]] double diameter() const;
    [[nodiscard]] Point corner(int k) const;  // 0:(x0,y0) 1:(x1,y0) 2:(x0,y1) 3:(x1,y1)
};

/// Axis-aligned quadrilateral mesh built by recursive quadrisection of an
/// nx-by-ny root grid. Instances are immutable; refinement returns a new mesh.
/// The leaves are kept one-irregular across edges.
class SpatialMesh {
public:
    static SpatialMesh uniform(const Rectangle& domain, int nx, int ny);

    /// Quadrisect the marked leaves, then close the one-irregularity condition.
    [[nodiscard]] SpatialMesh refine(std::span<const std::size_t> marks) const;
    [[nodiscard]] SpatialMesh refine_all() const;

    [[nodiscard]] const Rectangle& domain() const { return domain_; }
    [[nodiscard]] int nx() const { return nx_; }
    [[nodiscard]] int ny() const { return ny_; }
    [[nodiscard]] std::size_t n_cells() const { return cells_.size(); }
    [[nodiscard]] const std::vector<Cell>& cells() const { return cells_; }
    [[nodiscard]] const Cell& cell(std::size_t c) const { return cells_.at(c); }
    [[nodiscard]] int max_level() const { return max_level_; }
    /// Largest cell diameter.
    [[nodiscard]] double h() const;

    /// Leaf index for a cell key, if that cell is a leaf.
    [[nodiscard]] std::optional<std::size_t> leaf(int level, std::int64_t i, std::int64_t j) const;
    /// Leaf covering the same-level key (level, i, j), searching ancestors; empty
    /// when the key lies outside the domain or the region is refined further.
    [[nodiscard]] std::optional<std::size_t> covering_leaf(int level, std::int64_t i, std::int64_t j) const;
    /// Leaf containing the point (boundary points resolve to either neighbour).
    [[nodiscard]] std::size_t locate(Point p) const;

    [[nodiscard]] bool is_one_irregular() const;

    /// One line per leaf: "level x0 y0 x1 y1".
    [[nodiscard]] std::string dump() const;

private:
    SpatialMesh(const Rectangle& domain, int nx, int ny, std::vector<Cell> cells);
    [[nodiscard]] Cell make_cell(int level, std::int64_t i, std::int64_t j) const;

    Rectangle domain_;
    int nx_ = 1;
    int ny_ = 1;
    int max_level_ = 0;
    std::vector<Cell> cells_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
};

}  // namespace stdwr
