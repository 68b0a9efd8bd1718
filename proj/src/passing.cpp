#include "motionfit/passing.hpp"

#include <algorithm>
#include <cmath>

#include "motionfit/csv.hpp"
#include "motionfit/error.hpp"

namespace motionfit {

double EquitySurface::value_at(Vec2 p) const {
    const GridSpec& s = grid.spec;
    auto axis = [&](double coord, double origin, std::size_t count, std::size_t& i0, double& frac) {
        const double u = std::clamp((coord - origin) / s.cell_size - 0.5, 0.0, static_cast<double>(count - 1));
        i0 = count > 1 ? std::min(static_cast<std::size_t>(u), count - 2) : 0;
        frac = count > 1 ? u - static_cast<double>(i0) : 0.0;
    };
    std::size_t ix = 0, iy = 0;
    double fx = 0.0, fy = 0.0;
    axis(p.x, s.origin.x, s.nx, ix, fx);
    axis(p.y, s.origin.y, s.ny, iy, fy);
    const std::size_t ix1 = s.nx > 1 ? ix + 1 : ix;
    const std::size_t iy1 = s.ny > 1 ? iy + 1 : iy;
    const double v00 = grid.at(ix, iy);
    const double v10 = grid.at(ix1, iy);
    const double v01 = grid.at(ix, iy1);
    const double v11 = grid.at(ix1, iy1);
    return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11);
}

EquitySurface placeholder_equity(const Pitch& pitch, double cell_size) {
    EquitySurface surface;
    surface.grid = FieldGrid(pitch.grid(cell_size));
    const Vec2 goal = pitch.goal(true);
    for (std::size_t i = 0; i < surface.grid.values.size(); ++i) {
        const double d = distance(surface.grid.spec.cell_center(i), goal);
        surface.grid.values[i] = std::clamp(1.0 - d / pitch.length, 0.0, 1.0);
    }
    return surface;
}

nlohmann::json to_json(const EquitySurface& surface) {
    const GridSpec& s = surface.grid.spec;
    return {{"origin", {s.origin.x, s.origin.y}},
            {"cell_size", s.cell_size},
            {"nx", s.nx},
            {"ny", s.ny},
            {"values", surface.grid.values}};
}

EquitySurface equity_from_json(const nlohmann::json& j) {
    try {
        GridSpec s;
        const auto& o = j.at("origin");
        if (!o.is_array() || o.size() != 2) throw Error("equity origin must be [x, y]");
        s.origin = {o[0].get<double>(), o[1].get<double>()};
        s.cell_size = j.at("cell_size").get<double>();
        s.nx = j.at("nx").get<std::size_t>();
        s.ny = j.at("ny").get<std::size_t>();
        if (!(s.cell_size > 0.0) || s.nx == 0 || s.ny == 0) throw Error("equity grid must be non-empty");
        EquitySurface surface;
        surface.grid = FieldGrid(s);
        surface.grid.values = j.at("values").get<std::vector<double>>();
        if (surface.grid.values.size() != s.size()) throw Error("equity values do not match nx * ny");
        for (double v : surface.grid.values) {
            if (!std::isfinite(v)) throw Error("equity values must be finite");
        }
        return surface;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed equity surface: ") + e.what());
    }
}

Snapshot snapshot_at(const TrackingData& tracking, const std::string& match_id, double t, Vec2 ball_pos,
                     const std::string& possession_team) {
    Snapshot snap;
    snap.t = t;
    snap.ball_pos = ball_pos;
    snap.possession_team = possession_team;
    for (std::size_t ti : tracking.tracks_in_match(match_id)) {
        const PlayerTrack& track = tracking.tracks()[ti];
        const auto i = TrackingData::sample_index_at(track, t);
        if (i) snap.players.push_back(track.states[*i]);
    }
    return snap;
}

PassFeatures compute_pass_features(std::size_t pass_id, const PassEvent& pass, const Snapshot& snapshot,
                                   const CommitmentModel& model, const EquitySurface& equity,
                                   const PassConfig& config) {
    if (!config.pitch.contains(pass.receive_pos)) throw Error("off-pitch reception");
    PassFeatures f;
    f.pass_id = pass_id;
    f.origin_pos = pass.origin_pos;
    f.receive_pos = pass.receive_pos;
    f.distance = distance(pass.origin_pos, pass.receive_pos);

    std::string opponent;
    for (const auto& team : snapshot.teams()) {
        if (team != pass.team_id) opponent = team;
    }
    Snapshot from_origin = snapshot;
    from_origin.ball_pos = pass.origin_pos;
    const double inf_a = team_influence_at(from_origin, pass.team_id, model, pass.receive_pos, config.influence);
    const double inf_o =
        opponent.empty() ? 0.0 : team_influence_at(from_origin, opponent, model, pass.receive_pos, config.influence);
    f.influence = inf_a;
    f.dominance = dominance_value(inf_a, inf_o, model.epsilon_floor);
    f.equity = equity.value_at(pass.receive_pos) - equity.value_at(pass.origin_pos);
    f.dist_to_goal = distance(pass.receive_pos, config.attacking_goal(pass.team_id));
    return f;
}

std::vector<PassFeatures> compute_all_pass_features(const std::vector<PassEvent>& passes,
                                                    const TrackingData& tracking, const CommitmentModel& model,
                                                    const EquitySurface& equity, const PassConfig& config,
                                                    Workers workers) {
    std::vector<PassFeatures> out(passes.size());
    std::vector<std::string> errors(passes.size());
    const auto n = static_cast<std::ptrdiff_t>(passes.size());
    const int threads = resolve_workers(workers);
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const PassEvent& p = passes[k];
        try {
            const Snapshot snap = snapshot_at(tracking, p.match_id, p.t_p, p.origin_pos, p.team_id);
            out[k] = compute_pass_features(k, p, snap, model, equity, config);
        } catch (const Error& e) {
            errors[k] = e.what();
        }
    }
    for (const auto& e : errors) {
        if (!e.empty()) throw Error(e);
    }
    return out;
}

std::string_view to_string(PassFeature feature) {
    switch (feature) {
        case PassFeature::distance: return "distance";
        case PassFeature::dominance: return "dominance";
        case PassFeature::influence: return "influence";
        case PassFeature::equity: return "equity";
        case PassFeature::dist_to_goal: return "dist_to_goal";
    }
    return "distance";
}

PassFeature parse_pass_feature(std::string_view text) {
    for (PassFeature f : {PassFeature::distance, PassFeature::dominance, PassFeature::influence, PassFeature::equity,
                          PassFeature::dist_to_goal}) {
        if (to_string(f) == text) return f;
    }
    throw Error("unknown pass feature '" + std::string(text) + "'");
}

double feature_value(const PassFeatures& f, PassFeature feature) {
    switch (feature) {
        case PassFeature::distance: return f.distance;
        case PassFeature::dominance: return f.dominance;
        case PassFeature::influence: return f.influence;
        case PassFeature::equity: return f.equity;
        case PassFeature::dist_to_goal: return f.dist_to_goal;
    }
    return 0.0;
}

FieldGrid smooth_by_location(const std::vector<PassFeatures>& passes, PassFeature feature, const GridSpec& spec,
                             double kernel_radius, const std::optional<Pitch>& pitch, Workers workers) {
    if (passes.empty()) throw Error("smoothing needs at least one pass");
    if (!(kernel_radius > 0.0)) throw Error("smoothing radius must be positive");
    std::vector<double> values(passes.size());
    for (std::size_t i = 0; i < passes.size(); ++i) values[i] = feature_value(passes[i], feature);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double vmin = *lo, vmax = *hi;

    FieldGrid grid(spec);
    if (pitch) grid.mask = pitch->mask(spec);
    const double inv2r2 = 1.0 / (2.0 * kernel_radius * kernel_radius);
    const auto n = static_cast<std::ptrdiff_t>(spec.size());
    const int threads = resolve_workers(workers);
    std::vector<char> defined(spec.size(), 0);
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::ptrdiff_t ci = 0; ci < n; ++ci) {
        const auto k = static_cast<std::size_t>(ci);
        const Vec2 c = spec.cell_center(k);
        double total = 0.0;
        double weighted = 0.0;
        for (std::size_t i = 0; i < passes.size(); ++i) {
            const Vec2 d = passes[i].receive_pos - c;
            const double w = std::exp(-(d.x * d.x + d.y * d.y) * inv2r2);
            total += w;
            weighted += w * values[i];
        }
        if (total >= 1e-6) {
            defined[k] = 1;
            grid.values[k] = std::clamp(weighted / total, vmin, vmax);
        }
    }
    for (std::size_t k = 0; k < spec.size(); ++k) grid.mask[k] = grid.mask[k] && defined[k];
    return grid;
}

std::vector<GoalCorrelation> correlate_with_goal_distance(const std::vector<PassFeatures>& passes,
                                                          const std::vector<PassFeature>& features) {
    std::vector<double> goal(passes.size());
    for (std::size_t i = 0; i < passes.size(); ++i) goal[i] = passes[i].dist_to_goal;
    std::vector<GoalCorrelation> out;
    for (PassFeature feature : features) {
        std::vector<double> xs(passes.size());
        for (std::size_t i = 0; i < passes.size(); ++i) xs[i] = feature_value(passes[i], feature);
        GoalCorrelation c;
        c.feature = feature;
        c.n = passes.size();
        c.rho = spearman(xs, goal);
        c.p_value = spearman_significance(c.rho, c.n);
        out.push_back(c);
    }
    return out;
}

void write_pass_features_csv(const std::vector<PassFeatures>& passes, std::ostream& out) {
    out << kPassFeaturesHeader << '\n';
    for (const auto& p : passes) {
        out << p.pass_id << ',' << csv::fixed(p.distance) << ',' << csv::fixed(p.dominance) << ','
            << csv::fixed(p.influence) << ',' << csv::fixed(p.equity) << ',' << csv::fixed(p.dist_to_goal) << '\n';
    }
}

std::vector<PassFeatures> read_pass_features_csv(std::istream& in) {
    csv::expect_header(in, kPassFeaturesHeader);
    std::vector<PassFeatures> out;
    std::string line;
    std::size_t line_no = 1;
    while (csv::read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != 6) {
            throw Error("line " + std::to_string(line_no) + ": expected 6 fields, found " + std::to_string(f.size()));
        }
        double v[6];
        for (int k = 0; k < 6; ++k) {
            const auto parsed = csv::parse_double(f[k]);
            if (!parsed) throw Error("line " + std::to_string(line_no) + ": non-numeric field '" + f[k] + "'");
            v[k] = *parsed;
        }
        PassFeatures p;
        p.pass_id = static_cast<std::size_t>(v[0]);
        p.distance = v[1];
        p.dominance = v[2];
        p.influence = v[3];
        p.equity = v[4];
        p.dist_to_goal = v[5];
        out.push_back(p);
    }
    return out;
}

}  // namespace motionfit
