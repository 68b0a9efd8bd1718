#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "motionfit/ingest.hpp"
#include "motionfit/spatial.hpp"

namespace motionfit {

inline constexpr std::string_view kGroundTruthHeader = "contest_id,player_id,p_star,committed";

// p* = logistic(a - b * max(0, d/t - v_max) - c * (1 - cos theta)), where d and
// theta locate the contest in the player's movement frame. `constant`
// replaces the whole rule with a fixed probability.
struct TrueRule {
    double a = 2.0;
    double b = 1.5;      // per m/s of infeasibility
    double v_max = 8.0;  // m/s
    double c = 0.5;
    std::optional<double> constant;
};

struct SynthConfig {
    std::uint64_t seed = 0;
    std::size_t n_contests = 100;
    std::size_t players_per_team = kMaxPlayersPerTeam;
    Pitch pitch;
    TrueRule true_rule;
    double kick_speed = kDefaultBallSpeed;  // m/s
    double noise = 0.2;                     // positional sigma, m
    std::string match_id = "synthetic";
    std::string home_team = "home";
    std::string away_team = "away";
    // Per team, this many players start within `near_radius` of the contest;
    // the rest between near_radius and far_radius.
    std::size_t near_players = 4;
    double near_radius = 8.0;
    double far_radius = 60.0;
    double min_speed = 0.5;
    double max_speed = 7.0;
};

// Throws on t <= 0 or non-finite input.
double ground_truth_probability(const TrueRule& rule, double x, double y, double v, double t);
double ground_truth_probability(const SynthConfig& config, double x, double y, double v, double t);

struct GroundTruthRow {
    std::size_t contest_id = 0;
    std::string player_id;
    std::string team_id;
    double p_star = 0.0;
    bool committed = false;
    // Noise-free features of the player at the kick.
    double x = 0.0;
    double y = 0.0;
    double v = 0.0;
    double t = 0.0;
};

struct SynthContest {
    double t_p = 0.0;
    double t_c = 0.0;
    Vec2 point;
    std::string kicker_id;
    std::string kicker_team;
    std::string credited_id;
    EventKind kind = EventKind::spoil;
};

struct SynthData {
    std::vector<TrackingSample> tracking;
    std::vector<TransactionEvent> events;
    std::vector<GroundTruthRow> labels;  // every player but the kicker, per contest
    std::vector<SynthContest> contests;
};

// One scripted possession per 20 s window: a kick at a whole second toward an
// on-pitch contest point 1 to 4 s later. Committed players run to within 1 m
// of the point; the credited one lands on it exactly. Everyone else keeps
// running and ends at least 3 m away. If nobody commits, the kicker runs onto
// the ball. Tracking is 10 Hz.
SynthData generate(const SynthConfig& config);

void write_ground_truth_csv(const std::vector<GroundTruthRow>& rows, std::ostream& out);

}  // namespace motionfit
