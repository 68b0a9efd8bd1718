#include "motionfit/field_grid.hpp"

#include <algorithm>
#include <cmath>

#include "motionfit/csv.hpp"
#include "motionfit/error.hpp"

namespace motionfit {

GridSpec GridSpec::covering(double x_min, double x_max, double y_min, double y_max, double cell_size) {
    if (!(cell_size > 0.0)) throw Error("grid resolution must be positive");
    if (!(x_max > x_min) || !(y_max > y_min)) throw Error("empty grid window");
    GridSpec spec;
    spec.origin = {x_min, y_min};
    spec.cell_size = cell_size;
    spec.nx = static_cast<std::size_t>(std::ceil((x_max - x_min) / cell_size - 1e-9));
    spec.ny = static_cast<std::size_t>(std::ceil((y_max - y_min) / cell_size - 1e-9));
    return spec;
}

void write_grid_csv(const FieldGrid& grid, std::ostream& out) {
    out << "x,y,value\n";
    for (std::size_t i = 0; i < grid.spec.size(); ++i) {
        if (!grid.mask[i]) continue;
        const Vec2 c = grid.spec.cell_center(i);
        out << csv::fixed(c.x) << ',' << csv::fixed(c.y) << ',' << csv::fixed(grid.values[i]) << '\n';
    }
}

void write_grid_ppm(const FieldGrid& grid, std::ostream& out, double lo, double hi) {
    const double span = hi > lo ? hi - lo : 1.0;
    out << "P3\n" << grid.spec.nx << ' ' << grid.spec.ny << "\n255\n";
    for (std::size_t row = 0; row < grid.spec.ny; ++row) {
        const std::size_t iy = grid.spec.ny - 1 - row;
        for (std::size_t ix = 0; ix < grid.spec.nx; ++ix) {
            const std::size_t i = grid.spec.index(ix, iy);
            int level = 0;
            if (grid.mask[i]) {
                const double u = std::clamp((grid.values[i] - lo) / span, 0.0, 1.0);
                level = static_cast<int>(std::lround(255.0 * u));
            }
            out << level << ' ' << level << ' ' << level << (ix + 1 == grid.spec.nx ? '\n' : ' ');
        }
    }
}

}  // namespace motionfit
