#include "motionfit/geometry.hpp"

#include <algorithm>
#include <cstddef>

#include "motionfit/error.hpp"

namespace motionfit {

namespace {

std::vector<Vec2> smoothed_positions(std::span<const TrackingSample> track, int window) {
    std::vector<Vec2> out(track.size());
    if (window <= 1) {
        for (std::size_t i = 0; i < track.size(); ++i) out[i] = track[i].pos;
        return out;
    }
    const auto half = static_cast<std::ptrdiff_t>(window / 2);
    const auto n = static_cast<std::ptrdiff_t>(track.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
        Vec2 sum;
        for (std::ptrdiff_t j = lo; j <= hi; ++j) sum = sum + track[j].pos;
        out[i] = sum * (1.0 / static_cast<double>(hi - lo + 1));
    }
    return out;
}

}  // namespace

std::vector<PlayerState> derive_kinematics(std::span<const TrackingSample> track,
                                           const KinematicsOptions& options) {
    if (track.size() < 2) throw Error("insufficient track");
    for (std::size_t i = 1; i < track.size(); ++i) {
        if (!(track[i].t > track[i - 1].t)) throw Error("unordered track");
    }

    const std::vector<Vec2> pos = smoothed_positions(track, options.smoothing_window);
    const std::size_t n = track.size();
    std::vector<PlayerState> states(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
        const Vec2 velocity = (pos[hi] - pos[lo]) * (1.0 / (track[hi].t - track[lo].t));

        PlayerState& s = states[i];
        s.player_id = track[i].player_id;
        s.team_id = track[i].team_id;
        s.t = track[i].t;
        s.pos = track[i].pos;
        s.speed = norm(velocity);
        s.heading_defined = s.speed >= options.min_heading_speed;
        if (s.heading_defined) s.heading = velocity * (1.0 / s.speed);
    }
    return states;
}

RelativeLocation relative_to_heading(Vec2 pos, Vec2 heading, Vec2 target_pos) {
    const Vec2 to_target = target_pos - pos;
    const double d = norm(to_target);
    if (d == 0.0) return {};
    RelativeLocation r;
    r.x = dot(heading, to_target);
    r.y = cross(heading, to_target);
    r.d = d;
    r.theta = std::atan2(std::abs(r.y), r.x);
    return r;
}

RelativeLocation relative_location(Vec2 prev_pos, Vec2 cur_pos, Vec2 target_pos) {
    const Vec2 movement = cur_pos - prev_pos;
    const double length = norm(movement);
    if (length == 0.0) throw Error("undefined orientation");
    return relative_to_heading(cur_pos, movement * (1.0 / length), target_pos);
}

RelativeLocation relative_to_player(const PlayerState& player, Vec2 target_pos) {
    return relative_to_heading(player.pos, player.orientation(), target_pos);
}

}  // namespace motionfit
