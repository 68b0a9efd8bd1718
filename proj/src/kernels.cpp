#include "motionfit/kernels.hpp"

#include <cmath>
#include <cstddef>

#include <omp.h>

#include "motionfit/error.hpp"

namespace motionfit {

int resolve_workers(Workers workers) {
    return workers.count > 0 ? workers.count : omp_get_max_threads();
}

namespace kernels {

namespace {

void check_size(std::size_t expected, std::size_t actual) {
    if (expected != actual) throw Error("kernel output size does not match the input");
}

// Squared scaled distance of every sample to the query, summed over the
// dimensions in [first, dim). Hoisted out of grid loops where those
// coordinates stay fixed.
std::vector<double> fixed_partial(const KdeModel& m, std::size_t first, std::span<const double> fixed) {
    const std::size_t dim = m.dim();
    const std::size_t n = m.sample_count();
    const auto s = m.scaled_samples();
    const auto h = m.bandwidths();
    std::vector<double> partial(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double e = 0.0;
        for (std::size_t j = first; j < first + fixed.size(); ++j) {
            const double z = fixed[j - first] / h[j] - s[i * dim + j];
            e += z * z;
        }
        partial[i] = e;
    }
    return partial;
}

// Density at (qx, qy, <fixed>) given the per-sample partial over the fixed dims.
double density_xy(const KdeModel& m, const std::vector<double>& partial, double x, double y) {
    const std::size_t dim = m.dim();
    const std::size_t n = m.sample_count();
    const double* s = m.scaled_samples().data();
    const double qx = x / m.bandwidths()[0];
    const double qy = y / m.bandwidths()[1];
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double zx = qx - s[i * dim];
        const double zy = qy - s[i * dim + 1];
        const double e = zx * zx + zy * zy + partial[i];
        if (e < kKernelCutoff) sum += std::exp(-0.5 * e);
    }
    return m.normalizer() * sum;
}

// Density at (x, y, <v fixed>, t) for 4-D models with only v hoisted.
double density_xyt(const KdeModel& m, const std::vector<double>& partial_v, double x, double y, double t) {
    const double* s = m.scaled_samples().data();
    const std::size_t n = m.sample_count();
    const double qx = x / m.bandwidths()[0];
    const double qy = y / m.bandwidths()[1];
    const double qt = t / m.bandwidths()[3];
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double zx = qx - s[i * 4];
        const double zy = qy - s[i * 4 + 1];
        const double zt = qt - s[i * 4 + 3];
        const double e = zx * zx + zy * zy + partial_v[i] + zt * zt;
        if (e < kKernelCutoff) sum += std::exp(-0.5 * e);
    }
    return m.normalizer() * sum;
}

}  // namespace

// ---------------------------------------------------------------------------

namespace reference {

void kde_density(const KdeModel& model, std::span<const double> points, std::span<double> out) {
    check_size(points.size(), out.size() * model.dim());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = density(model, points.subspan(i * model.dim(), model.dim()));
}

void commitment_slice(const CommitmentModel& model, double v, double t, const GridSpec& grid,
                      std::span<double> out) {
    check_size(grid.size(), out.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Vec2 c = grid.cell_center(i);
        out[i] = commitment_probability(model, {c.x, c.y, v, t});
    }
}

void player_influence(const CommitmentModel& model, const PlayerState& player, Vec2 ball_pos,
                      const GridSpec& grid, const std::vector<bool>& mask, const InfluenceParams& params,
                      std::span<double> out) {
    check_size(grid.size(), out.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!mask[i]) {
            out[i] = 0.0;
            continue;
        }
        const Vec2 c = grid.cell_center(i);
        const RelativeLocation rel = relative_to_player(player, c);
        const double t = time_to_point(ball_pos, c, params.ball_speed, params.t_min);
        out[i] = commitment_probability(model, {rel.x, rel.y, player.speed, t});
    }
}

}  // namespace reference

// ---------------------------------------------------------------------------

namespace omp {

void kde_density(const KdeModel& model, std::span<const double> points, std::span<double> out, Workers workers) {
    check_size(points.size(), out.size() * model.dim());
    const auto n = static_cast<std::ptrdiff_t>(out.size());
    const std::size_t dim = model.dim();
    const int threads = resolve_workers(workers);
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        out[k] = density(model, points.subspan(k * dim, dim));
    }
}

void density_slice(const KdeModel& model, double v, double t, const GridSpec& grid, std::span<double> out,
                   Workers workers) {
    check_size(grid.size(), out.size());
    const double fixed[2] = {v, t};
    const auto partial = fixed_partial(model, 2, fixed);
    const auto n = static_cast<std::ptrdiff_t>(grid.size());
    const int threads = resolve_workers(workers);
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const Vec2 c = grid.cell_center(static_cast<std::size_t>(i));
        out[static_cast<std::size_t>(i)] = density_xy(model, partial, c.x, c.y);
    }
}

void commitment_slice(const CommitmentModel& model, double v, double t, const GridSpec& grid,
                      std::span<double> out, Workers workers) {
    check_size(grid.size(), out.size());
    const double fixed[2] = {v, t};
    const auto partial1 = fixed_partial(model.f1, 2, fixed);
    const auto partial0 = fixed_partial(model.f0, 2, fixed);
    const auto n = static_cast<std::ptrdiff_t>(grid.size());
    const int threads = resolve_workers(workers);
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const Vec2 c = grid.cell_center(static_cast<std::size_t>(i));
        const double f1 = density_xy(model.f1, partial1, c.x, c.y);
        const double f0 = density_xy(model.f0, partial0, c.x, c.y);
        out[static_cast<std::size_t>(i)] = combine_commitment(f1, f0, model.w, model.epsilon_floor);
    }
}

void player_influence(const CommitmentModel& model, const PlayerState& player, Vec2 ball_pos,
                      const GridSpec& grid, const std::vector<bool>& mask, const InfluenceParams& params,
                      std::span<double> out, Workers workers) {
    check_size(grid.size(), out.size());
    const double fixed_v[1] = {player.speed};
    const auto partial1 = fixed_partial(model.f1, 2, fixed_v);
    const auto partial0 = fixed_partial(model.f0, 2, fixed_v);
    const auto n = static_cast<std::ptrdiff_t>(grid.size());
    const int threads = resolve_workers(workers);
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (!mask[k]) {
            out[k] = 0.0;
            continue;
        }
        const Vec2 c = grid.cell_center(k);
        const RelativeLocation rel = relative_to_player(player, c);
        const double t = time_to_point(ball_pos, c, params.ball_speed, params.t_min);
        const double f1 = density_xyt(model.f1, partial1, rel.x, rel.y, t);
        const double f0 = density_xyt(model.f0, partial0, rel.x, rel.y, t);
        out[k] = combine_commitment(f1, f0, model.w, model.epsilon_floor);
    }
}

}  // namespace omp

}  // namespace kernels
}  // namespace motionfit
