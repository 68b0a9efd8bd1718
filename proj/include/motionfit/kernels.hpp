#pragma once

// Hot loops of the library in two flavours. `reference` is the plain serial
// evaluation through the public per-point functions; `omp` is the
// OpenMP-parallel path used in production, with per-slice precomputation.
// The omp results are bitwise independent of the worker count and agree with
// the reference to rounding.

#include <span>
#include <vector>

#include "motionfit/field_grid.hpp"
#include "motionfit/kde.hpp"
#include "motionfit/parallel.hpp"
#include "motionfit/spatial.hpp"

namespace motionfit::kernels {

namespace reference {

// points is row-major, out.size() x model.dim().
void kde_density(const KdeModel& model, std::span<const double> points, std::span<double> out);

void commitment_slice(const CommitmentModel& model, double v, double t, const GridSpec& grid,
                      std::span<double> out);

// Cells with mask[i] == false are set to 0.
void player_influence(const CommitmentModel& model, const PlayerState& player, Vec2 ball_pos,
                      const GridSpec& grid, const std::vector<bool>& mask, const InfluenceParams& params,
                      std::span<double> out);

}  // namespace reference

namespace omp {

void kde_density(const KdeModel& model, std::span<const double> points, std::span<double> out, Workers workers);

void density_slice(const KdeModel& model, double v, double t, const GridSpec& grid, std::span<double> out,
                   Workers workers);

void commitment_slice(const CommitmentModel& model, double v, double t, const GridSpec& grid,
                      std::span<double> out, Workers workers);

void player_influence(const CommitmentModel& model, const PlayerState& player, Vec2 ball_pos,
                      const GridSpec& grid, const std::vector<bool>& mask, const InfluenceParams& params,
                      std::span<double> out, Workers workers);

}  // namespace omp

}  // namespace motionfit::kernels
