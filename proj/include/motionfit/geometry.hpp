#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace motionfit {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(b - a); }

// Below this speed a player has no usable heading.
inline constexpr double kMinHeadingSpeed = 0.3;  // m/s

// Pitch frame: origin at the centre, +x toward the home team's attacking goal.
inline constexpr Vec2 kPitchFrameHeading{1.0, 0.0};

struct TrackingSample {
    std::string match_id;
    std::string player_id;
    std::string team_id;
    double t = 0.0;  // s
    Vec2 pos;        // m
};

struct PlayerState {
    std::string player_id;
    std::string team_id;
    double t = 0.0;
    Vec2 pos;
    Vec2 heading;  // unit vector when heading_defined
    double speed = 0.0;
    bool heading_defined = false;

    // Heading if defined, otherwise the pitch frame.
    Vec2 orientation() const { return heading_defined ? heading : kPitchFrameHeading; }
};

// Position of a target in a player's movement frame: +x along the movement
// direction, +y to the player's left.
struct RelativeLocation {
    double x = 0.0;
    double y = 0.0;
    double d = 0.0;
    double theta = 0.0;  // [0, pi]
};

struct KinematicsOptions {
    // Centered moving-average window over positions; 1 disables smoothing.
    int smoothing_window = 1;
    double min_heading_speed = kMinHeadingSpeed;
};

// Speed and heading by central differences (one-sided at the ends).
// Throws "insufficient track" / "unordered track".
std::vector<PlayerState> derive_kinematics(std::span<const TrackingSample> track,
                                           const KinematicsOptions& options = {});

// Target relative to the movement vector prev -> cur. The side of the target
// is kept in the sign of y (positive = left of the movement direction).
// Throws "undefined orientation" when prev == cur.
RelativeLocation relative_location(Vec2 prev_pos, Vec2 cur_pos, Vec2 target_pos);

// Same transform using a unit heading directly.
RelativeLocation relative_to_heading(Vec2 pos, Vec2 heading, Vec2 target_pos);

// Uses the player's heading, or the pitch frame when the heading is undefined.
RelativeLocation relative_to_player(const PlayerState& player, Vec2 target_pos);

}  // namespace motionfit
