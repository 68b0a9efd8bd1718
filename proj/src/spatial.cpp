#include "motionfit/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "motionfit/error.hpp"
#include "motionfit/kernels.hpp"

namespace motionfit {

GridSpec Pitch::grid(double cell_size) const {
    return GridSpec::covering(-0.5 * length, 0.5 * length, -0.5 * width, 0.5 * width, cell_size);
}

std::vector<bool> Pitch::mask(const GridSpec& spec) const {
    std::vector<bool> m(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) m[i] = contains(spec.cell_center(i));
    return m;
}

std::vector<std::string> Snapshot::teams() const {
    std::vector<std::string> out;
    for (const auto& p : players) {
        if (std::find(out.begin(), out.end(), p.team_id) == out.end()) out.push_back(p.team_id);
    }
    return out;
}

std::vector<PlayerState> Snapshot::team_players(const std::string& team) const {
    std::vector<PlayerState> out;
    for (const auto& p : players) {
        if (p.team_id == team) out.push_back(p);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const PlayerState& a, const PlayerState& b) { return a.player_id < b.player_id; });
    return out;
}

void validate_snapshot(const Snapshot& snapshot, const Pitch& pitch) {
    if (snapshot.players.empty()) throw Error("snapshot has no players");
    std::map<std::string, std::size_t> per_team;
    for (const auto& p : snapshot.players) ++per_team[p.team_id];
    if (per_team.size() > 2) throw Error("snapshot has more than two teams");
    for (const auto& [team, count] : per_team) {
        if (count > kMaxPlayersPerTeam) {
            throw Error("team " + team + " has " + std::to_string(count) + " players on field (max 18)");
        }
    }
    if (!pitch.contains(snapshot.ball_pos)) throw Error("ball position is off the pitch");
}

double time_to_point(Vec2 ball_pos, Vec2 target, double ball_speed, double t_min) {
    if (!(ball_speed > 0.0)) throw Error("ball speed must be positive");
    return std::max(distance(ball_pos, target) / ball_speed, t_min);
}

double influence_at(const PlayerState& player, Vec2 ball_pos, const CommitmentModel& model, Vec2 point,
                    const InfluenceParams& params) {
    const RelativeLocation rel = relative_to_player(player, point);
    const double t = time_to_point(ball_pos, point, params.ball_speed, params.t_min);
    return commitment_probability(model, {rel.x, rel.y, player.speed, t});
}

double team_influence_at(const Snapshot& snapshot, const std::string& team, const CommitmentModel& model,
                         Vec2 point, const InfluenceParams& params) {
    double sum = 0.0;
    for (const auto& p : snapshot.team_players(team)) sum += influence_at(p, snapshot.ball_pos, model, point, params);
    return sum;
}

FieldGrid player_influence(const PlayerState& player, Vec2 ball_pos, const CommitmentModel& model,
                           const Pitch& pitch, const GridSpec& spec, const InfluenceParams& params,
                           Workers workers) {
    if (!(params.ball_speed > 0.0)) throw Error("ball speed must be positive");
    FieldGrid grid(spec);
    grid.mask = pitch.mask(spec);
    kernels::omp::player_influence(model, player, ball_pos, spec, grid.mask, params, grid.values, workers);
    return grid;
}

FieldGrid team_influence(const Snapshot& snapshot, const std::string& team, const CommitmentModel& model,
                         const Pitch& pitch, const GridSpec& spec, const InfluenceParams& params,
                         Workers workers) {
    FieldGrid total(spec);
    total.mask = pitch.mask(spec);
    for (const auto& p : snapshot.team_players(team)) {
        const FieldGrid g = player_influence(p, snapshot.ball_pos, model, pitch, spec, params, workers);
        for (std::size_t i = 0; i < total.values.size(); ++i) total.values[i] += g.values[i];
    }
    return total;
}

double dominance_value(double inf_a, double inf_o, double epsilon_floor) {
    const double sum = inf_a + inf_o;
    if (!(sum >= epsilon_floor)) return 0.5;
    return inf_a / sum;
}

FieldGrid dominance(const FieldGrid& inf_a, const FieldGrid& inf_o, double epsilon_floor) {
    if (!(inf_a.spec == inf_o.spec)) throw Error("influence grids do not share a grid spec");
    FieldGrid out(inf_a.spec);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] = dominance_value(inf_a.values[i], inf_o.values[i], epsilon_floor);
        out.mask[i] = inf_a.mask[i] && inf_o.mask[i];
    }
    return out;
}

TeamFields evaluate_snapshot(const Snapshot& snapshot, const CommitmentModel& model, const Pitch& pitch,
                             double cell_size, const InfluenceParams& params, Workers workers) {
    validate_snapshot(snapshot, pitch);
    TeamFields f;
    f.team_a = snapshot.possession_team;
    const auto teams = snapshot.teams();
    if (std::find(teams.begin(), teams.end(), f.team_a) == teams.end()) {
        throw Error("possession team " + f.team_a + " has no players in the snapshot");
    }
    for (const auto& team : teams) {
        if (team != f.team_a) f.team_o = team;
    }
    const GridSpec spec = pitch.grid(cell_size);
    f.influence_a = team_influence(snapshot, f.team_a, model, pitch, spec, params, workers);
    f.influence_o = team_influence(snapshot, f.team_o, model, pitch, spec, params, workers);
    f.dominance_a = dominance(f.influence_a, f.influence_o, model.epsilon_floor);
    return f;
}

// ---------------------------------------------------------------------------

namespace {

Vec2 vec_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2) throw Error("expected a 2-element [x, y] array");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

nlohmann::json to_json(const Snapshot& snapshot) {
    nlohmann::json players = nlohmann::json::array();
    for (const auto& p : snapshot.players) {
        const Vec2 h = p.heading_defined ? p.heading : Vec2{};
        players.push_back({{"player_id", p.player_id},
                           {"team_id", p.team_id},
                           {"pos", {p.pos.x, p.pos.y}},
                           {"heading", {h.x, h.y}},
                           {"speed", p.speed}});
    }
    return {{"t", snapshot.t},
            {"ball_pos", {snapshot.ball_pos.x, snapshot.ball_pos.y}},
            {"possession_team", snapshot.possession_team},
            {"players", players}};
}

Snapshot snapshot_from_json(const nlohmann::json& j) {
    try {
        Snapshot s;
        s.t = j.value("t", 0.0);
        s.ball_pos = vec_from_json(j.at("ball_pos"));
        s.possession_team = j.at("possession_team").get<std::string>();
        for (const auto& pj : j.at("players")) {
            PlayerState p;
            p.player_id = pj.at("player_id").get<std::string>();
            p.team_id = pj.at("team_id").get<std::string>();
            p.t = s.t;
            p.pos = vec_from_json(pj.at("pos"));
            p.speed = pj.value("speed", 0.0);
            if (p.speed < 0.0) throw Error("player speed must be non-negative");
            const Vec2 h = pj.contains("heading") ? vec_from_json(pj.at("heading")) : Vec2{};
            const double len = norm(h);
            p.heading_defined = p.speed >= kMinHeadingSpeed && len > 0.0;
            if (p.heading_defined) p.heading = h * (1.0 / len);
            s.players.push_back(std::move(p));
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed snapshot: ") + e.what());
    }
}

}  // namespace motionfit
