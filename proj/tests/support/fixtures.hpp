#pragma once

#include <random>
#include <string>
#include <vector>

#include "motionfit/ingest.hpp"
#include "motionfit/kde.hpp"
#include "motionfit/synth.hpp"

namespace fixtures {

// Samples built the same way the pipeline builds them: synth -> ingest.
inline motionfit::SampleSet synthetic_samples(std::size_t contests, std::uint64_t seed, double noise = 0.2) {
    using namespace motionfit;
    SynthConfig config;
    config.seed = seed;
    config.n_contests = contests;
    config.noise = noise;
    const SynthData data = generate(config);
    Diagnostics diag;
    const TrackingData tracking(data.tracking, &diag);
    const auto contests_found = extract_contests(align_transactions(data.events), tracking, diag);
    return build_commitment_samples(contests_found, tracking);
}

// Small commitment model fitted on synthetic data; cached per process.
inline const motionfit::CommitmentModel& synthetic_model() {
    static const motionfit::CommitmentModel model =
        motionfit::fit_commitment_model(synthetic_samples(60, 101).samples);
    return model;
}

inline motionfit::PlayerState player(const std::string& id, const std::string& team, motionfit::Vec2 pos,
                                     motionfit::Vec2 heading, double speed) {
    motionfit::PlayerState p;
    p.player_id = id;
    p.team_id = team;
    p.pos = pos;
    p.speed = speed;
    p.heading_defined = speed >= motionfit::kMinHeadingSpeed;
    if (p.heading_defined) p.heading = heading * (1.0 / motionfit::norm(heading));
    return p;
}

// Two teams of `per_team` players scattered over the pitch.
inline motionfit::Snapshot random_snapshot(std::uint64_t seed, std::size_t per_team = 18) {
    using namespace motionfit;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-70.0, 70.0), uy(-55.0, 55.0), ua(-3.14159, 3.14159), us(0.0, 7.0);
    Snapshot s;
    s.possession_team = "home";
    s.ball_pos = {ux(rng) * 0.5, uy(rng) * 0.5};
    const Pitch pitch;
    for (const char* team : {"home", "away"}) {
        for (std::size_t i = 0; i < per_team; ++i) {
            Vec2 pos;
            do {
                pos = {ux(rng), uy(rng)};
            } while (!pitch.contains(pos));
            const double a = ua(rng);
            s.players.push_back(player(std::string(team) + "_" + std::to_string(i), team, pos,
                                       {std::cos(a), std::sin(a)}, us(rng)));
        }
    }
    return s;
}

}  // namespace fixtures
