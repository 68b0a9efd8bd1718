#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "motionfit/field_grid.hpp"
#include "motionfit/ingest.hpp"
#include "motionfit/kde.hpp"
#include "motionfit/parallel.hpp"
#include "motionfit/spatial.hpp"
#include "motionfit/stats.hpp"

namespace motionfit {

inline constexpr std::string_view kPassFeaturesHeader = "pass_id,distance,dominance,influence,equity,dist_to_goal";
inline constexpr double kDefaultSmoothingRadius = 15.0;  // m

// Field equity sampled at cell centres, bilinearly interpolated in between and
// clamped to the outermost centres beyond them.
struct EquitySurface {
    FieldGrid grid;

    double value_at(Vec2 p) const;
};

// Synthetic stand-in: 1 at the +x goal falling linearly to 0 one pitch length away.
// Not a real equity model.
EquitySurface placeholder_equity(const Pitch& pitch, double cell_size = 2.0);

nlohmann::json to_json(const EquitySurface& surface);
EquitySurface equity_from_json(const nlohmann::json& j);

struct PassConfig {
    Pitch pitch;
    InfluenceParams influence;
    // Team attacking +x; everyone else attacks -x. Unset: all teams attack +x.
    std::optional<std::string> home_team;

    Vec2 attacking_goal(const std::string& team) const {
        return pitch.goal(!home_team || *home_team == team);
    }
};

struct PassFeatures {
    std::size_t pass_id = 0;
    double distance = 0.0;
    double dominance = 0.0;
    double influence = 0.0;
    double equity = 0.0;
    double dist_to_goal = 0.0;
    Vec2 origin_pos;
    Vec2 receive_pos;
};

// Player states of one match at time t, with the ball at `ball_pos`.
Snapshot snapshot_at(const TrackingData& tracking, const std::string& match_id, double t, Vec2 ball_pos,
                     const std::string& possession_team);

// Dominance and influence of the passing team at the reception point with the
// ball at the origin; equity = FE(receive) - FE(origin).
// Throws "off-pitch reception".
PassFeatures compute_pass_features(std::size_t pass_id, const PassEvent& pass, const Snapshot& snapshot,
                                   const CommitmentModel& model, const EquitySurface& equity,
                                   const PassConfig& config);

// Features for every pass, snapshots taken from tracking at each kick.
std::vector<PassFeatures> compute_all_pass_features(const std::vector<PassEvent>& passes,
                                                    const TrackingData& tracking, const CommitmentModel& model,
                                                    const EquitySurface& equity, const PassConfig& config,
                                                    Workers workers = {});

enum class PassFeature { distance, dominance, influence, equity, dist_to_goal };

std::string_view to_string(PassFeature feature);
PassFeature parse_pass_feature(std::string_view text);
double feature_value(const PassFeatures& f, PassFeature feature);

// Nadaraya-Watson mean of the feature around each cell, Gaussian weights on
// the distance to the reception point. Cells with total weight below 1e-6
// (or outside `pitch`, when given) are masked.
FieldGrid smooth_by_location(const std::vector<PassFeatures>& passes, PassFeature feature, const GridSpec& spec,
                             double kernel_radius = kDefaultSmoothingRadius,
                             const std::optional<Pitch>& pitch = std::nullopt, Workers workers = {});

struct GoalCorrelation {
    PassFeature feature = PassFeature::dominance;
    double rho = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

// Spearman rho of each feature against dist_to_goal, with significance.
std::vector<GoalCorrelation> correlate_with_goal_distance(const std::vector<PassFeatures>& passes,
                                                          const std::vector<PassFeature>& features);

void write_pass_features_csv(const std::vector<PassFeatures>& passes, std::ostream& out);
std::vector<PassFeatures> read_pass_features_csv(std::istream& in);

}  // namespace motionfit
