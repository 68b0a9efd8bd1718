#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "motionfit/field_grid.hpp"
#include "motionfit/geometry.hpp"
#include "motionfit/kde.hpp"
#include "motionfit/parallel.hpp"

namespace motionfit {

inline constexpr std::size_t kMaxPlayersPerTeam = 18;
inline constexpr double kDefaultBallSpeed = 20.0;  // m/s
inline constexpr double kMinTimeToPoint = 0.5;     // s

// Elliptical playing surface inscribed in a length x width box centred on the origin.
struct Pitch {
    double length = 160.0;
    double width = 130.0;

    bool contains(Vec2 p) const {
        const double u = 2.0 * p.x / length;
        const double v = 2.0 * p.y / width;
        return u * u + v * v <= 1.0;
    }
    GridSpec grid(double cell_size) const;
    std::vector<bool> mask(const GridSpec& spec) const;
    // Centre of the goal line attacked toward +x (or -x).
    Vec2 goal(bool toward_positive_x = true) const { return {toward_positive_x ? 0.5 * length : -0.5 * length, 0.0}; }
};

struct InfluenceParams {
    double ball_speed = kDefaultBallSpeed;
    double t_min = kMinTimeToPoint;
};

struct Snapshot {
    double t = 0.0;
    Vec2 ball_pos;
    std::string possession_team;
    std::vector<PlayerState> players;

    // Team ids in order of first appearance.
    std::vector<std::string> teams() const;
    std::vector<PlayerState> team_players(const std::string& team) const;
};

// Throws on an empty snapshot, more than two teams, more than 18 players on
// a team, or a ball off the pitch.
void validate_snapshot(const Snapshot& snapshot, const Pitch& pitch);

// Constant-speed kick model, floored at t_min.
double time_to_point(Vec2 ball_pos, Vec2 target, double ball_speed, double t_min = kMinTimeToPoint);

double influence_at(const PlayerState& player, Vec2 ball_pos, const CommitmentModel& model, Vec2 point,
                    const InfluenceParams& params = {});

double team_influence_at(const Snapshot& snapshot, const std::string& team, const CommitmentModel& model,
                         Vec2 point, const InfluenceParams& params = {});

// Commitment probability of one player over the in-bounds cells of the grid.
FieldGrid player_influence(const PlayerState& player, Vec2 ball_pos, const CommitmentModel& model,
                           const Pitch& pitch, const GridSpec& spec, const InfluenceParams& params = {},
                           Workers workers = {});

// Sum of the team's player grids, accumulated in player-id order.
FieldGrid team_influence(const Snapshot& snapshot, const std::string& team, const CommitmentModel& model,
                         const Pitch& pitch, const GridSpec& spec, const InfluenceParams& params = {},
                         Workers workers = {});

// a / (a + o), or 0.5 where a + o is below the floor.
double dominance_value(double inf_a, double inf_o, double epsilon_floor = kDefaultDensityFloor);

// Throws on mismatched grid specs.
FieldGrid dominance(const FieldGrid& inf_a, const FieldGrid& inf_o, double epsilon_floor = kDefaultDensityFloor);

struct TeamFields {
    std::string team_a;  // possession team
    std::string team_o;
    FieldGrid influence_a;
    FieldGrid influence_o;
    FieldGrid dominance_a;
};

TeamFields evaluate_snapshot(const Snapshot& snapshot, const CommitmentModel& model, const Pitch& pitch,
                             double cell_size, const InfluenceParams& params = {}, Workers workers = {});

nlohmann::json to_json(const Snapshot& snapshot);
Snapshot snapshot_from_json(const nlohmann::json& j);

}  // namespace motionfit
