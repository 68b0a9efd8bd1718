#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "motionfit/error.hpp"
#include "motionfit/geometry.hpp"
#include "motionfit/parallel.hpp"

namespace motionfit {

inline constexpr double kMaxTimeToPoint = 10.0;   // s
inline constexpr double kCommitmentRadius = 2.0;  // m
inline constexpr double kMinPassDistance = 15.0;  // m, a kick must travel this far to be marked
inline constexpr double kTrackingPeriod = 0.1;    // s, 10 Hz

inline constexpr std::string_view kTrackingHeader = "match_id,player_id,team_id,t,x,y";
inline constexpr std::string_view kTransactionHeader = "match_id,t,kind,player_id,team_id";
inline constexpr std::string_view kSamplesHeader = "x,y,v,t,c";

struct PlayerTrack {
    std::string match_id;
    std::string player_id;
    std::string team_id;
    std::vector<TrackingSample> samples;  // strictly increasing t
    std::vector<PlayerState> states;      // one per sample
};

// Tracking grouped per (match, player) with kinematics derived up front.
// Tracks are split into segments at gaps longer than `max_gap`, and each
// segment is differenced on its own.
class TrackingData {
public:
    static constexpr double kLookupTolerance = 0.5 * kTrackingPeriod + 1e-6;
    static constexpr double kMaxGap = 1.0;

    TrackingData() = default;
    // Sorts per player, keeps the first of duplicate (player, t) rows.
    explicit TrackingData(std::vector<TrackingSample> samples, Diagnostics* diagnostics = nullptr,
                          const KinematicsOptions& kinematics = {});

    const std::vector<PlayerTrack>& tracks() const { return tracks_; }
    std::size_t sample_count() const { return sample_count_; }
    bool empty() const { return tracks_.empty(); }

    const PlayerTrack* find(const std::string& match_id, const std::string& player_id) const;
    // Indices into tracks() for one match, ordered by player id.
    std::vector<std::size_t> tracks_in_match(const std::string& match_id) const;

    // Nearest sample within kLookupTolerance of t.
    static std::optional<std::size_t> sample_index_at(const PlayerTrack& track, double t);

    std::optional<Vec2> position_at(const std::string& match_id, const std::string& player_id, double t) const;
    std::optional<PlayerState> state_at(const std::string& match_id, const std::string& player_id,
                                        double t) const;

private:
    std::vector<PlayerTrack> tracks_;
    std::map<std::pair<std::string, std::string>, std::size_t> index_;
    std::size_t sample_count_ = 0;
};

TrackingData load_tracking(std::istream& in, Diagnostics& diagnostics, const KinematicsOptions& kinematics = {});
void write_tracking_csv(const std::vector<TrackingSample>& samples, std::ostream& out);

enum class EventKind { kick, mark, contested_mark, spoil, other };

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

inline bool is_contest(EventKind k) { return k == EventKind::contested_mark || k == EventKind::spoil; }
inline bool is_reception(EventKind k) { return k == EventKind::mark || k == EventKind::contested_mark; }

struct TransactionEvent {
    std::string match_id;
    double t = 0.0;  // s, whole seconds after alignment
    EventKind kind = EventKind::other;
    std::string player_id;
    std::string team_id;
};

std::vector<TransactionEvent> load_transactions(std::istream& in);
void write_transactions_csv(const std::vector<TransactionEvent>& events, std::ostream& out);

// Transactions carry whole-second stamps and are taken to happen at the start
// of that second: t is floored. Order is preserved.
std::vector<TransactionEvent> align_transactions(std::vector<TransactionEvent> events);

struct Contest {
    std::string match_id;
    double t_p = 0.0;  // kick
    double t_c = 0.0;  // contest
    Vec2 contest_pos;
    EventKind kind = EventKind::spoil;
    std::string passer_id;
    std::string passer_team;
    std::string player_id;  // who was credited with the contest
    std::string team_id;

    double time_to_point() const { return t_c - t_p; }
};

// Pairs each contested mark / spoil with the latest preceding kick in the same
// match. The contest location is the credited player's tracked position at t_c.
std::vector<Contest> extract_contests(const std::vector<TransactionEvent>& events, const TrackingData& tracking,
                                      Diagnostics& diagnostics);

struct PassEvent {
    std::string match_id;
    double t_p = 0.0;
    double t_c = 0.0;
    std::string passer_id;
    std::string receiver_id;
    std::string team_id;
    Vec2 origin_pos;
    Vec2 receive_pos;
    double distance = 0.0;
    bool contested = false;
};

struct PassSummary {
    std::size_t kicks = 0;
    std::size_t no_reception = 0;  // the next event after the kick was not a mark
    std::size_t turnovers = 0;     // marked by an opponent (or by the kicker)
    std::size_t too_short = 0;
    std::size_t missing_tracking = 0;
    std::size_t passes = 0;
};

// Kick followed (ignoring `other` events) by a mark or contested mark from a
// teammate, with both endpoints located from tracking and distance >= 15 m.
std::vector<PassEvent> extract_passes(const std::vector<TransactionEvent>& events, const TrackingData& tracking,
                                      PassSummary* summary = nullptr);

struct CommitmentSample {
    double x = 0.0;  // m, along the player's movement direction
    double y = 0.0;  // m, to the player's left
    double v = 0.0;  // m/s at t_p
    double t = 0.0;  // s, ball time-to-point
    int c = 0;

    friend bool operator==(const CommitmentSample&, const CommitmentSample&) = default;
};

struct SampleOrigin {
    std::size_t contest_index = 0;
    std::string player_id;
};

struct SampleSet {
    std::vector<CommitmentSample> samples;
    std::vector<SampleOrigin> origins;  // parallel to samples
    std::size_t skipped_players = 0;    // missing tracking at t_p or t_c
};

// One sample per contest and on-field player (both teams, passer excluded).
// c = 1 iff the player is within `radius` of the contest at t_c.
SampleSet build_commitment_samples(const std::vector<Contest>& contests, const TrackingData& tracking,
                                   Workers workers = {}, double radius = kCommitmentRadius);

// Baseline samples from each player's own displacement over `horizon` seconds,
// taken at every `stride`-th tracking sample with a defined heading.
std::vector<CommitmentSample> build_displacement_samples(const TrackingData& tracking, double horizon,
                                                         std::size_t stride = 1);

void write_samples_csv(const std::vector<CommitmentSample>& samples, std::ostream& out);
std::vector<CommitmentSample> read_samples_csv(std::istream& in);

}  // namespace motionfit
