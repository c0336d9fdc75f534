#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include <semgsl/error.hpp>

namespace semgsl {

/// Typed index; Tag keeps the different enumerations (cells, voxels,
/// classes, gases, rooms) from being mixed up silently.
template <typename Tag>
struct Id {
    std::size_t value = 0;
    constexpr auto operator<=>(const Id&) const = default;
};

using CellId = Id<struct CellTag>;
using VoxelId = Id<struct VoxelTag>;
using ClassId = Id<struct ClassTag>;
using GasId = Id<struct GasTag>;
using RoomId = Id<struct RoomTag>;

/// Wraps an angle to (-pi, pi].
inline double wrap_pi(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a <= -std::numbers::pi) a += two_pi;
    else if (a > std::numbers::pi) a -= two_pi;
    return a;
}

/// 2D occupancy grid with square cells. Cells are indexed row-major,
/// id = y * width + x, and cell (x, y) covers the half-open square
/// [x*s, (x+1)*s) x [y*s, (y+1)*s) in metres.
class Grid2D {
public:
    Grid2D(std::size_t width, std::size_t height, double cell_size)
        : Grid2D(width, height, cell_size, std::vector<std::uint8_t>(width * height, 1)) {}

    Grid2D(std::size_t width, std::size_t height, double cell_size,
           std::vector<std::uint8_t> free_mask)
        : width_(width), height_(height), cell_size_(cell_size), free_(std::move(free_mask)) {
        if (width_ == 0 || height_ == 0) throw Error("Grid2D: needs at least one cell");
        if (!(cell_size_ > 0.0) || !std::isfinite(cell_size_))
            throw Error("Grid2D: cell size must be positive");
        if (free_.size() != width_ * height_)
            throw Error("Grid2D: free mask size does not match the grid");
    }

    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }
    std::size_t cell_count() const { return width_ * height_; }
    double cell_size() const { return cell_size_; }
    double width_m() const { return static_cast<double>(width_) * cell_size_; }
    double height_m() const { return static_cast<double>(height_) * cell_size_; }
    const std::vector<std::uint8_t>& free_mask() const { return free_; }

    bool in_bounds(CellId c) const { return c.value < cell_count(); }

    bool is_free(CellId c) const {
        if (!in_bounds(c)) throw OutOfBoundsError("Grid2D::is_free: cell outside grid");
        return free_[c.value] != 0;
    }

    std::size_t free_count() const {
        std::size_t n = 0;
        for (std::uint8_t f : free_) n += (f != 0);
        return n;
    }

    CellId cell_id(std::size_t x, std::size_t y) const {
        if (x >= width_ || y >= height_)
            throw OutOfBoundsError("Grid2D::cell_id: coordinates outside grid");
        return CellId{y * width_ + x};
    }

    /// Integer coordinates {x, y} of a cell.
    std::array<std::size_t, 2> coords(CellId c) const {
        if (!in_bounds(c)) throw OutOfBoundsError("Grid2D::coords: cell outside grid");
        return {c.value % width_, c.value / width_};
    }

    /// Centre of a cell in metres.
    std::array<double, 2> center(CellId c) const {
        auto [x, y] = coords(c);
        return {(static_cast<double>(x) + 0.5) * cell_size_,
                (static_cast<double>(y) + 0.5) * cell_size_};
    }

    bool contains(double x, double y) const {
        return x >= 0.0 && y >= 0.0 && x < width_m() && y < height_m();
    }

    /// Cell containing a metric point; the right and bottom grid edges lie
    /// outside every cell.
    CellId cell_at(double x, double y) const {
        if (!contains(x, y)) throw OutOfBoundsError("Grid2D::cell_at: point outside grid");
        auto ix = static_cast<std::size_t>(x / cell_size_);
        auto iy = static_cast<std::size_t>(y / cell_size_);
        if (ix >= width_) ix = width_ - 1;   // guard against x/s rounding up
        if (iy >= height_) iy = height_ - 1;
        return cell_id(ix, iy);
    }

private:
    std::size_t width_;
    std::size_t height_;
    double cell_size_;
    std::vector<std::uint8_t> free_;
};

/// A stack of `layers` copies of a base 2D grid. Voxel v decomposes as
/// v = layer * base.cell_count() + cell, so one vertical column shares a
/// single 2D cell; layer-major order keeps dumps reproducible.
class VoxelGrid {
public:
    VoxelGrid(Grid2D base, std::size_t layers) : base_(std::move(base)), layers_(layers) {
        if (layers_ == 0) throw Error("VoxelGrid: needs at least one layer");
    }

    const Grid2D& base() const { return base_; }
    std::size_t layers() const { return layers_; }
    std::size_t voxel_count() const { return layers_ * base_.cell_count(); }

    CellId column_of(VoxelId v) const {
        if (v.value >= voxel_count())
            throw OutOfBoundsError("VoxelGrid::column_of: voxel outside grid");
        return CellId{v.value % base_.cell_count()};
    }

    std::size_t layer_of(VoxelId v) const {
        if (v.value >= voxel_count())
            throw OutOfBoundsError("VoxelGrid::layer_of: voxel outside grid");
        return v.value / base_.cell_count();
    }

    VoxelId voxel(CellId cell, std::size_t layer) const {
        if (!base_.in_bounds(cell) || layer >= layers_)
            throw OutOfBoundsError("VoxelGrid::voxel: coordinates outside grid");
        return VoxelId{layer * base_.cell_count() + cell.value};
    }

    /// A voxel is traversable exactly when its column's 2D cell is.
    bool is_free(VoxelId v) const { return base_.is_free(column_of(v)); }

private:
    Grid2D base_;
    std::size_t layers_;
};

/// Column of a voxel as a free function, for call sites that read better
/// without the member syntax.
inline CellId column_of(const VoxelGrid& grid, VoxelId v) { return grid.column_of(v); }

} // namespace semgsl
