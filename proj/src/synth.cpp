#include "motionfit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "motionfit/csv.hpp"
#include "motionfit/error.hpp"
#include "motionfit/geometry.hpp"

namespace motionfit {

double ground_truth_probability(const TrueRule& rule, double x, double y, double v, double t) {
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(v) || !std::isfinite(t)) {
        throw Error("ground truth needs finite inputs");
    }
    if (!(t > 0.0)) throw Error("time-to-point must be positive");
    if (rule.constant) return *rule.constant;
    const double d = std::hypot(x, y);
    const double cos_theta = d > 0.0 ? x / d : 1.0;
    const double infeasible = std::max(0.0, d / t - rule.v_max);
    const double z = rule.a - rule.b * infeasible - rule.c * (1.0 - cos_theta);
    return 1.0 / (1.0 + std::exp(-z));
}

double ground_truth_probability(const SynthConfig& config, double x, double y, double v, double t) {
    return ground_truth_probability(config.true_rule, x, y, v, t);
}

namespace {

constexpr int kWindowTicks = 200;    // 20 s per possession
constexpr int kKickTick = 20;        // kick 2 s into the window
constexpr int kLeadTicks = 10;       // tracking starts 1 s before the kick
constexpr int kTailTicks = 5;        // and ends 0.5 s after the contest
constexpr double kCommitSpread = 1.0;  // m, committed players end this close
constexpr double kClearance = 3.0;     // m, everyone else ends at least this far
constexpr int kMaxPlacementTries = 1000;

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    std::size_t index(std::size_t n) { return std::min(n - 1, static_cast<std::size_t>(unit() * static_cast<double>(n))); }
    Vec2 direction() {
        const double a = uniform(0.0, 2.0 * std::numbers::pi);
        return {std::cos(a), std::sin(a)};
    }
    // Uniform over a disk of radius r.
    Vec2 in_disk(double r) { return std::sqrt(unit()) * r * direction(); }

private:
    std::mt19937_64 rng_;
};

void check_config(const SynthConfig& c) {
    if (c.n_contests == 0) throw Error("n_contests must be at least 1");
    if (c.players_per_team == 0 || c.players_per_team > kMaxPlayersPerTeam) {
        throw Error("players_per_team must be between 1 and 18");
    }
    if (!(c.kick_speed > 0.0)) throw Error("kick_speed must be positive");
    if (!(c.noise >= 0.0)) throw Error("noise must be non-negative");
    if (!(c.pitch.length > 0.0) || !(c.pitch.width > 0.0)) throw Error("pitch dimensions must be positive");
    if (c.home_team == c.away_team) throw Error("team ids must differ");
    if (!(c.min_speed >= kMinHeadingSpeed) || !(c.max_speed >= c.min_speed)) {
        throw Error("player speeds must be at least 0.3 m/s and ordered");
    }
    if (!(c.near_radius > 0.0) || !(c.far_radius > c.near_radius)) throw Error("placement radii must be ordered");
    if (c.true_rule.constant && !(*c.true_rule.constant >= 0.0 && *c.true_rule.constant <= 1.0)) {
        throw Error("constant rule must lie in [0, 1]");
    }
}

std::string player_name(const std::string& team, std::size_t i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02zu", i + 1);
    return team + "_" + buf;
}

struct Actor {
    std::string id;
    std::string team;
    Vec2 start;  // at the kick
    Vec2 velocity;
    Vec2 end;    // at the contest
};

}  // namespace

SynthData generate(const SynthConfig& config) {
    check_config(config);
    Sampler script(config.seed);
    std::mt19937_64 noise_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> noise(0.0, config.noise > 0.0 ? config.noise : 1.0);

    Pitch inner = config.pitch;
    inner.length *= 0.9;
    inner.width *= 0.9;

    SynthData out;
    const std::string teams[2] = {config.home_team, config.away_team};
    for (std::size_t ci = 0; ci < config.n_contests; ++ci) {
        const int window = static_cast<int>(ci) * kWindowTicks;
        const int kick_tick = window + kKickTick;
        const int flight = 1 + static_cast<int>(script.index(4));  // whole seconds
        const int contest_tick = kick_tick + 10 * flight;
        const double t_p = kick_tick / 10.0;
        const double t_c = contest_tick / 10.0;
        const double dt = static_cast<double>(flight);

        // Contest point and kick origin, both on the pitch.
        Vec2 point, origin;
        bool placed = false;
        for (int tries = 0; tries < kMaxPlacementTries && !placed; ++tries) {
            point = {script.uniform(-0.5, 0.5) * inner.length, script.uniform(-0.5, 0.5) * inner.width};
            if (!inner.contains(point)) continue;
            origin = point - config.kick_speed * dt * script.direction();
            placed = config.pitch.contains(origin);
        }
        if (!placed) throw Error("could not place a contest on the pitch");

        const std::size_t attacking = ci % 2;
        const std::size_t kicker_index = script.index(config.players_per_team);

        std::vector<Actor> actors;
        std::vector<std::size_t> committed;
        for (std::size_t team = 0; team < 2; ++team) {
            for (std::size_t j = 0; j < config.players_per_team; ++j) {
                Actor a;
                a.id = player_name(teams[team], j);
                a.team = teams[team];
                const double speed = script.uniform(config.min_speed, config.max_speed);
                a.velocity = speed * script.direction();
                const bool is_kicker = team == attacking && j == kicker_index;
                if (is_kicker) {
                    a.start = origin;
                } else {
                    for (int tries = 0; tries < kMaxPlacementTries; ++tries) {
                        const double r = j < config.near_players
                                             ? config.near_radius * std::sqrt(script.unit())
                                             : script.uniform(config.near_radius, config.far_radius);
                        a.start = point + r * script.direction();
                        if (config.pitch.contains(a.start)) break;
                    }
                }
                a.end = a.start + dt * a.velocity;
                if (!is_kicker) {
                    const RelativeLocation rel = relative_to_heading(a.start, (1.0 / speed) * a.velocity, point);
                    GroundTruthRow row;
                    row.contest_id = ci;
                    row.player_id = a.id;
                    row.team_id = a.team;
                    row.x = rel.x;
                    row.y = rel.y;
                    row.v = speed;
                    row.t = dt;
                    row.p_star = ground_truth_probability(config.true_rule, rel.x, rel.y, speed, dt);
                    row.committed = script.unit() < row.p_star;
                    if (row.committed) committed.push_back(actors.size());
                    out.labels.push_back(row);
                }
                actors.push_back(std::move(a));
            }
        }

        const std::size_t kicker = attacking * config.players_per_team + kicker_index;
        std::size_t credited = kicker;
        if (!committed.empty()) credited = committed[script.index(committed.size())];
        for (std::size_t i = 0; i < actors.size(); ++i) {
            Actor& a = actors[i];
            if (i == credited) {
                a.end = point;
            } else if (std::find(committed.begin(), committed.end(), i) != committed.end()) {
                a.end = point + script.in_disk(kCommitSpread);
            } else if (i != kicker) {
                const Vec2 away = a.end - point;
                const double gap = norm(away);
                if (gap < kClearance) {
                    const Vec2 dir = gap > 0.0 ? (1.0 / gap) * away : Vec2{1.0, 0.0};
                    a.end = point + kClearance * dir;
                }
            }
        }

        const bool same_team = actors[credited].team == teams[attacking];
        const bool primary = script.unit() < 0.7;
        const EventKind kind = (same_team == primary) ? EventKind::contested_mark : EventKind::spoil;

        out.events.push_back({config.match_id, t_p, EventKind::kick, actors[kicker].id, actors[kicker].team});
        out.events.push_back({config.match_id, t_c, kind, actors[credited].id, actors[credited].team});
        out.contests.push_back({t_p, t_c, point, actors[kicker].id, actors[kicker].team, actors[credited].id, kind});

        for (const Actor& a : actors) {
            const Vec2 hand_off = a.start + 0.1 * a.velocity;
            for (int tick = kick_tick - kLeadTicks; tick <= contest_tick + kTailTicks; ++tick) {
                Vec2 pos;
                if (tick <= kick_tick + 1) {
                    pos = a.start + ((tick - kick_tick) / 10.0) * a.velocity;
                } else if (tick >= contest_tick) {
                    pos = a.end;
                } else {
                    const double u = static_cast<double>(tick - kick_tick - 1) / (contest_tick - kick_tick - 1);
                    pos = hand_off + u * (a.end - hand_off);
                }
                if (config.noise > 0.0) {
                    pos.x += noise(noise_rng);
                    pos.y += noise(noise_rng);
                }
                out.tracking.push_back({config.match_id, a.id, a.team, tick / 10.0, pos});
            }
        }
    }
    return out;
}

void write_ground_truth_csv(const std::vector<GroundTruthRow>& rows, std::ostream& out) {
    out << kGroundTruthHeader << '\n';
    for (const auto& r : rows) {
        out << r.contest_id << ',' << r.player_id << ',' << csv::fixed(r.p_star) << ',' << (r.committed ? 1 : 0)
            << '\n';
    }
}

}  // namespace motionfit
