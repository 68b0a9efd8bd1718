#pragma once

#include <cstddef>
#include <ostream>
#include <vector>

#include "motionfit/geometry.hpp"

namespace motionfit {

// Regular grid of square cells. `origin` is the lower-left corner of cell
// (0, 0); values are stored x-fastest (index = iy * nx + ix).
struct GridSpec {
    Vec2 origin;
    double cell_size = 1.0;
    std::size_t nx = 0;
    std::size_t ny = 0;

    std::size_t size() const { return nx * ny; }
    std::size_t index(std::size_t ix, std::size_t iy) const { return iy * nx + ix; }
    Vec2 cell_center(std::size_t ix, std::size_t iy) const {
        return {origin.x + (static_cast<double>(ix) + 0.5) * cell_size,
                origin.y + (static_cast<double>(iy) + 0.5) * cell_size};
    }
    Vec2 cell_center(std::size_t i) const { return cell_center(i % nx, i / nx); }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

    // Grid covering [x_min, x_max] x [y_min, y_max]; throws on an empty window.
    static GridSpec covering(double x_min, double x_max, double y_min, double y_max, double cell_size);
};

struct FieldGrid {
    GridSpec spec;
    std::vector<double> values;
    std::vector<bool> mask;  // true = cell is in-bounds / defined

    FieldGrid() = default;
    explicit FieldGrid(GridSpec s, double fill = 0.0)
        : spec(s), values(s.size(), fill), mask(s.size(), true) {}

    double& at(std::size_t ix, std::size_t iy) { return values[spec.index(ix, iy)]; }
    double at(std::size_t ix, std::size_t iy) const { return values[spec.index(ix, iy)]; }
};

// "x,y,value" rows for masked-in cells, 6 fractional digits.
void write_grid_csv(const FieldGrid& grid, std::ostream& out);

// Plain (P3) grayscale PPM, top row = largest y. Values are mapped linearly
// from [lo, hi] to [0, 255]; masked-out cells are black.
void write_grid_ppm(const FieldGrid& grid, std::ostream& out, double lo = 0.0, double hi = 1.0);

}  // namespace motionfit
