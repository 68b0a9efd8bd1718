#include "motionfit/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "motionfit/csv.hpp"

namespace motionfit {

namespace {

std::string line_error(std::size_t line_no, const std::string& what) {
    return "line " + std::to_string(line_no) + ": " + what;
}

double parse_field(const std::string& field, std::size_t line_no, const char* name) {
    const auto value = csv::parse_double(field);
    if (!value) throw Error(line_error(line_no, std::string("non-numeric ") + name + " '" + field + "'"));
    return *value;
}

// Kinematics over runs of samples without long gaps.
void derive_segmented(PlayerTrack& track, const KinematicsOptions& kinematics) {
    const auto& s = track.samples;
    track.states.clear();
    track.states.reserve(s.size());
    std::size_t begin = 0;
    while (begin < s.size()) {
        std::size_t end = begin + 1;
        while (end < s.size() && s[end].t - s[end - 1].t <= TrackingData::kMaxGap) ++end;
        if (end - begin == 1) {
            PlayerState lone;
            lone.player_id = s[begin].player_id;
            lone.team_id = s[begin].team_id;
            lone.t = s[begin].t;
            lone.pos = s[begin].pos;
            track.states.push_back(lone);
        } else {
            auto states = derive_kinematics(std::span(s).subspan(begin, end - begin), kinematics);
            track.states.insert(track.states.end(), states.begin(), states.end());
        }
        begin = end;
    }
}

std::vector<TransactionEvent> match_ordered(const std::vector<TransactionEvent>& events) {
    std::vector<TransactionEvent> sorted = events;
    std::stable_sort(sorted.begin(), sorted.end(), [](const TransactionEvent& a, const TransactionEvent& b) {
        if (a.match_id != b.match_id) return a.match_id < b.match_id;
        return a.t < b.t;
    });
    return sorted;
}

}  // namespace

// ---------------------------------------------------------------------------
// Tracking

TrackingData::TrackingData(std::vector<TrackingSample> samples, Diagnostics* diagnostics,
                           const KinematicsOptions& kinematics) {
    for (auto& sample : samples) {
        auto key = std::make_pair(sample.match_id, sample.player_id);
        auto [it, inserted] = index_.try_emplace(key, tracks_.size());
        if (inserted) {
            PlayerTrack track;
            track.match_id = sample.match_id;
            track.player_id = sample.player_id;
            track.team_id = sample.team_id;
            tracks_.push_back(std::move(track));
        }
        tracks_[it->second].samples.push_back(std::move(sample));
    }

    // Order tracks by (match, player) so iteration is independent of row order.
    std::vector<PlayerTrack> ordered;
    ordered.reserve(tracks_.size());
    for (auto& [key, idx] : index_) {
        ordered.push_back(std::move(tracks_[idx]));
        idx = ordered.size() - 1;
    }
    tracks_ = std::move(ordered);

    for (auto& track : tracks_) {
        auto& s = track.samples;
        std::stable_sort(s.begin(), s.end(),
                         [](const TrackingSample& a, const TrackingSample& b) { return a.t < b.t; });
        std::vector<TrackingSample> unique;
        unique.reserve(s.size());
        for (auto& sample : s) {
            if (!unique.empty() && unique.back().t == sample.t) {
                if (diagnostics) {
                    diagnostics->warn("duplicate tracking sample for player " + sample.player_id + " at t=" +
                                      csv::fixed(sample.t, 3) + "; keeping the first");
                }
                continue;
            }
            unique.push_back(std::move(sample));
        }
        s = std::move(unique);
        sample_count_ += s.size();
        derive_segmented(track, kinematics);
    }
}

const PlayerTrack* TrackingData::find(const std::string& match_id, const std::string& player_id) const {
    auto it = index_.find({match_id, player_id});
    return it == index_.end() ? nullptr : &tracks_[it->second];
}

std::vector<std::size_t> TrackingData::tracks_in_match(const std::string& match_id) const {
    std::vector<std::size_t> out;
    for (auto it = index_.lower_bound({match_id, std::string()}); it != index_.end() && it->first.first == match_id;
         ++it) {
        out.push_back(it->second);
    }
    return out;
}

std::optional<std::size_t> TrackingData::sample_index_at(const PlayerTrack& track, double t) {
    const auto& s = track.samples;
    if (s.empty()) return std::nullopt;
    auto it = std::lower_bound(s.begin(), s.end(), t, [](const TrackingSample& a, double v) { return a.t < v; });
    std::size_t best = s.size();
    double best_gap = kLookupTolerance;
    auto consider = [&](std::size_t i) {
        const double gap = std::abs(s[i].t - t);
        if (gap <= best_gap) {
            best_gap = gap;
            best = i;
        }
    };
    const auto pos = static_cast<std::size_t>(it - s.begin());
    if (pos > 0) consider(pos - 1);
    if (pos < s.size()) consider(pos);
    if (best == s.size()) return std::nullopt;
    return best;
}

std::optional<Vec2> TrackingData::position_at(const std::string& match_id, const std::string& player_id,
                                              double t) const {
    const PlayerTrack* track = find(match_id, player_id);
    if (!track) return std::nullopt;
    auto i = sample_index_at(*track, t);
    if (!i) return std::nullopt;
    return track->samples[*i].pos;
}

std::optional<PlayerState> TrackingData::state_at(const std::string& match_id, const std::string& player_id,
                                                  double t) const {
    const PlayerTrack* track = find(match_id, player_id);
    if (!track) return std::nullopt;
    auto i = sample_index_at(*track, t);
    if (!i) return std::nullopt;
    return track->states[*i];
}

TrackingData load_tracking(std::istream& in, Diagnostics& diagnostics, const KinematicsOptions& kinematics) {
    csv::expect_header(in, kTrackingHeader);
    std::vector<TrackingSample> samples;
    std::string line;
    std::size_t line_no = 1;
    while (csv::read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != 6) throw Error(line_error(line_no, "expected 6 fields, found " + std::to_string(f.size())));
        TrackingSample s;
        s.match_id = f[0];
        s.player_id = f[1];
        s.team_id = f[2];
        s.t = parse_field(f[3], line_no, "t");
        s.pos = {parse_field(f[4], line_no, "x"), parse_field(f[5], line_no, "y")};
        samples.push_back(std::move(s));
    }
    return TrackingData(std::move(samples), &diagnostics, kinematics);
}

void write_tracking_csv(const std::vector<TrackingSample>& samples, std::ostream& out) {
    out << kTrackingHeader << '\n';
    for (const auto& s : samples) {
        out << s.match_id << ',' << s.player_id << ',' << s.team_id << ',' << csv::fixed(s.t, 3) << ','
            << csv::fixed(s.pos.x) << ',' << csv::fixed(s.pos.y) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Transactions

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::kick: return "kick";
        case EventKind::mark: return "mark";
        case EventKind::contested_mark: return "contested_mark";
        case EventKind::spoil: return "spoil";
        case EventKind::other: return "other";
    }
    return "other";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
    for (EventKind k : {EventKind::kick, EventKind::mark, EventKind::contested_mark, EventKind::spoil,
                        EventKind::other}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

std::vector<TransactionEvent> load_transactions(std::istream& in) {
    csv::expect_header(in, kTransactionHeader);
    std::vector<TransactionEvent> events;
    std::string line;
    std::size_t line_no = 1;
    while (csv::read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != 5) throw Error(line_error(line_no, "expected 5 fields, found " + std::to_string(f.size())));
        TransactionEvent e;
        e.match_id = f[0];
        e.t = parse_field(f[1], line_no, "t");
        const auto kind = parse_event_kind(f[2]);
        if (!kind) throw Error(line_error(line_no, "unknown event kind '" + f[2] + "'"));
        e.kind = *kind;
        e.player_id = f[3];
        e.team_id = f[4];
        events.push_back(std::move(e));
    }
    return events;
}

void write_transactions_csv(const std::vector<TransactionEvent>& events, std::ostream& out) {
    out << kTransactionHeader << '\n';
    for (const auto& e : events) {
        out << e.match_id << ',' << static_cast<long long>(std::floor(e.t)) << ',' << to_string(e.kind) << ','
            << e.player_id << ',' << e.team_id << '\n';
    }
}

std::vector<TransactionEvent> align_transactions(std::vector<TransactionEvent> events) {
    for (auto& e : events) e.t = std::floor(e.t);
    return events;
}

// ---------------------------------------------------------------------------
// Contests and passes

std::vector<Contest> extract_contests(const std::vector<TransactionEvent>& events, const TrackingData& tracking,
                                      Diagnostics& diagnostics) {
    std::vector<Contest> contests;
    const TransactionEvent* last_kick = nullptr;
    const auto ordered = match_ordered(events);
    for (const auto& e : ordered) {
        if (last_kick && last_kick->match_id != e.match_id) last_kick = nullptr;
        if (e.kind == EventKind::kick) {
            last_kick = &e;
            continue;
        }
        if (!is_contest(e.kind)) continue;

        const std::string where = std::string(to_string(e.kind)) + " at t=" + csv::fixed(e.t, 0) + " (match " +
                                  e.match_id + ", player " + e.player_id + ")";
        if (!last_kick || e.t - last_kick->t > kMaxTimeToPoint) {
            diagnostics.warn("no kick within " + csv::fixed(kMaxTimeToPoint, 0) + " s before " + where + "; skipped");
            continue;
        }
        if (e.t - last_kick->t <= 0.0) {
            diagnostics.warn("contest in the same second as its kick, " + where + "; skipped");
            continue;
        }
        const auto pos = tracking.position_at(e.match_id, e.player_id, e.t);
        if (!pos) {
            diagnostics.warn("no tracking for " + where + "; skipped");
            continue;
        }
        Contest c;
        c.match_id = e.match_id;
        c.t_p = last_kick->t;
        c.t_c = e.t;
        c.contest_pos = *pos;
        c.kind = e.kind;
        c.passer_id = last_kick->player_id;
        c.passer_team = last_kick->team_id;
        c.player_id = e.player_id;
        c.team_id = e.team_id;
        contests.push_back(std::move(c));
    }
    return contests;
}

std::vector<PassEvent> extract_passes(const std::vector<TransactionEvent>& events, const TrackingData& tracking,
                                      PassSummary* summary) {
    PassSummary local;
    PassSummary& sum = summary ? *summary : local;
    sum = {};

    const auto ordered = match_ordered(events);
    std::vector<PassEvent> passes;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        const auto& kick = ordered[i];
        if (kick.kind != EventKind::kick) continue;
        ++sum.kicks;

        std::size_t j = i + 1;
        while (j < ordered.size() && ordered[j].match_id == kick.match_id && ordered[j].kind == EventKind::other) ++j;
        if (j >= ordered.size() || ordered[j].match_id != kick.match_id || !is_reception(ordered[j].kind) ||
            ordered[j].t <= kick.t || ordered[j].t - kick.t > kMaxTimeToPoint) {
            ++sum.no_reception;
            continue;
        }
        const auto& mark = ordered[j];
        if (mark.team_id != kick.team_id || mark.player_id == kick.player_id) {
            ++sum.turnovers;
            continue;
        }
        const auto origin = tracking.position_at(kick.match_id, kick.player_id, kick.t);
        const auto receive = tracking.position_at(mark.match_id, mark.player_id, mark.t);
        if (!origin || !receive) {
            ++sum.missing_tracking;
            continue;
        }
        const double d = distance(*origin, *receive);
        if (d < kMinPassDistance) {
            ++sum.too_short;
            continue;
        }
        PassEvent p;
        p.match_id = kick.match_id;
        p.t_p = kick.t;
        p.t_c = mark.t;
        p.passer_id = kick.player_id;
        p.receiver_id = mark.player_id;
        p.team_id = kick.team_id;
        p.origin_pos = *origin;
        p.receive_pos = *receive;
        p.distance = d;
        p.contested = mark.kind == EventKind::contested_mark;
        passes.push_back(std::move(p));
        ++sum.passes;
    }
    return passes;
}

// ---------------------------------------------------------------------------
// Samples

SampleSet build_commitment_samples(const std::vector<Contest>& contests, const TrackingData& tracking,
                                   Workers workers, double radius) {
    struct PerContest {
        std::vector<CommitmentSample> samples;
        std::vector<SampleOrigin> origins;
        std::size_t skipped = 0;
    };
    std::vector<PerContest> parts(contests.size());
    const auto n = static_cast<std::ptrdiff_t>(contests.size());
    const int threads = resolve_workers(workers);

#pragma omp parallel for num_threads(threads) schedule(dynamic, 4)
    for (std::ptrdiff_t ci = 0; ci < n; ++ci) {
        const Contest& contest = contests[static_cast<std::size_t>(ci)];
        PerContest& part = parts[static_cast<std::size_t>(ci)];
        for (std::size_t ti : tracking.tracks_in_match(contest.match_id)) {
            const PlayerTrack& track = tracking.tracks()[ti];
            if (track.player_id == contest.passer_id) continue;
            const auto at_kick = TrackingData::sample_index_at(track, contest.t_p);
            // Absent at the kick: not on the field.
            if (!at_kick) continue;
            const auto at_contest = TrackingData::sample_index_at(track, contest.t_c);
            if (!at_contest) {
                ++part.skipped;
                continue;
            }
            const PlayerState& state = track.states[*at_kick];
            const RelativeLocation rel = relative_to_player(state, contest.contest_pos);
            CommitmentSample s;
            s.x = rel.x;
            s.y = rel.y;
            s.v = state.speed;
            s.t = contest.time_to_point();
            s.c = distance(track.samples[*at_contest].pos, contest.contest_pos) < radius ? 1 : 0;
            part.samples.push_back(s);
            part.origins.push_back({static_cast<std::size_t>(ci), track.player_id});
        }
    }

    SampleSet out;
    for (auto& part : parts) {
        out.samples.insert(out.samples.end(), part.samples.begin(), part.samples.end());
        for (auto& o : part.origins) out.origins.push_back(std::move(o));
        out.skipped_players += part.skipped;
    }
    return out;
}

std::vector<CommitmentSample> build_displacement_samples(const TrackingData& tracking, double horizon,
                                                         std::size_t stride) {
    if (!(horizon > 0.0)) throw Error("displacement horizon must be positive");
    if (stride == 0) stride = 1;
    std::vector<CommitmentSample> out;
    for (const PlayerTrack& track : tracking.tracks()) {
        for (std::size_t i = 0; i < track.samples.size(); i += stride) {
            const PlayerState& state = track.states[i];
            if (!state.heading_defined) continue;
            const auto later = TrackingData::sample_index_at(track, state.t + horizon);
            if (!later) continue;
            const RelativeLocation rel = relative_to_player(state, track.samples[*later].pos);
            out.push_back({rel.x, rel.y, state.speed, horizon, 1});
        }
    }
    return out;
}

void write_samples_csv(const std::vector<CommitmentSample>& samples, std::ostream& out) {
    out << kSamplesHeader << '\n';
    for (const auto& s : samples) {
        out << csv::fixed(s.x) << ',' << csv::fixed(s.y) << ',' << csv::fixed(s.v) << ',' << csv::fixed(s.t) << ','
            << s.c << '\n';
    }
}

std::vector<CommitmentSample> read_samples_csv(std::istream& in) {
    csv::expect_header(in, kSamplesHeader);
    std::vector<CommitmentSample> out;
    std::string line;
    std::size_t line_no = 1;
    while (csv::read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != 5) throw Error(line_error(line_no, "expected 5 fields, found " + std::to_string(f.size())));
        CommitmentSample s;
        s.x = parse_field(f[0], line_no, "x");
        s.y = parse_field(f[1], line_no, "y");
        s.v = parse_field(f[2], line_no, "v");
        s.t = parse_field(f[3], line_no, "t");
        if (f[4] != "0" && f[4] != "1") throw Error(line_error(line_no, "label c must be 0 or 1, found '" + f[4] + "'"));
        s.c = f[4] == "1" ? 1 : 0;
        out.push_back(s);
    }
    return out;
}

}  // namespace motionfit
