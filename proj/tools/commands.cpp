#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "motionfit/csv.hpp"
#include "motionfit/error.hpp"
#include "motionfit/gmm.hpp"
#include "motionfit/ingest.hpp"
#include "motionfit/kde.hpp"
#include "motionfit/passing.hpp"
#include "motionfit/spatial.hpp"
#include "motionfit/synth.hpp"

namespace fs = std::filesystem;

namespace motionfit::cli {

namespace {

struct GlobalOptions {
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    std::string pitch = "160x130";
    double ball_speed = kDefaultBallSpeed;
    double cell_size = 2.0;
    double bandwidth_scale = 1.0;
    int threads = 0;

    Workers workers() const { return {threads}; }
};

Pitch parse_pitch(const std::string& text) {
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) throw Error("pitch must be given as LxW, got '" + text + "'");
    const auto l = csv::parse_double(text.substr(0, x));
    const auto w = csv::parse_double(text.substr(x + 1));
    if (!l || !w || !(*l > 0.0) || !(*w > 0.0)) throw Error("pitch dimensions must be positive numbers: '" + text + "'");
    return {*l, *w};
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return in;
}

class OutputDir {
public:
    explicit OutputDir(const std::string& dir) : dir_(dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) throw Error("cannot create output directory '" + dir + "'");
    }

    std::ofstream open(const std::string& name) {
        const fs::path path = dir_ / name;
        std::ofstream out(path);
        if (!out) throw Error("cannot write '" + path.string() + "'");
        return out;
    }

    template <typename Fn>
    void write(const std::string& name, Fn&& fn) {
        std::ofstream out = open(name);
        fn(out);
        out.flush();
        if (!out) throw Error("failed writing '" + (dir_ / name).string() + "'");
    }

    void write_json(const std::string& name, const nlohmann::json& j) {
        write(name, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
    }

    void write_grid(const std::string& stem, const FieldGrid& grid, double lo, double hi) {
        write(stem + ".csv", [&](std::ostream& o) { write_grid_csv(grid, o); });
        write(stem + ".ppm", [&](std::ostream& o) { write_grid_ppm(grid, o, lo, hi); });
    }

private:
    fs::path dir_;
};

nlohmann::json read_json(const std::string& path) {
    std::ifstream in = open_input(path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error("'" + path + "' is not valid JSON: " + e.what());
    }
}

void flush_warnings(const Diagnostics& diag, std::ostream& err) {
    for (const auto& w : diag.warnings) err << "warning: " << w << '\n';
}

TrackingData read_tracking(const std::string& path, Diagnostics& diag) {
    std::ifstream in = open_input(path);
    try {
        return load_tracking(in, diag);
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

std::vector<TransactionEvent> read_transactions(const std::string& path) {
    std::ifstream in = open_input(path);
    try {
        return align_transactions(load_transactions(in));
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string format_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
    std::size_t contests = 100;
    std::size_t players = kMaxPlayersPerTeam;
    double noise = 0.2;
    double kick_speed = kDefaultBallSpeed;
    std::optional<double> constant_rule;
};

int cmd_synth(const GlobalOptions& g, const SynthArgs& a, std::ostream& out, std::ostream&) {
    SynthConfig config;
    config.seed = g.seed;
    config.n_contests = a.contests;
    config.players_per_team = a.players;
    config.noise = a.noise;
    config.kick_speed = a.kick_speed;
    config.pitch = parse_pitch(g.pitch);
    config.true_rule.constant = a.constant_rule;
    const SynthData data = generate(config);

    OutputDir dir(g.out_dir);
    dir.write("tracking.csv", [&](std::ostream& o) { write_tracking_csv(data.tracking, o); });
    dir.write("transactions.csv", [&](std::ostream& o) { write_transactions_csv(data.events, o); });
    dir.write("ground_truth.csv", [&](std::ostream& o) { write_ground_truth_csv(data.labels, o); });
    dir.write_json("equity_placeholder.json", to_json(placeholder_equity(config.pitch, g.cell_size)));

    // Example snapshot at the first kick.
    const TrackingData tracking(data.tracking);
    const SynthContest& first = data.contests.front();
    const auto origin = tracking.position_at(config.match_id, first.kicker_id, first.t_p);
    const Snapshot snap =
        snapshot_at(tracking, config.match_id, first.t_p, origin.value_or(Vec2{}), first.kicker_team);
    dir.write_json("snapshot.json", to_json(snap));

    std::size_t committed = 0;
    double p_sum = 0.0;
    for (const auto& r : data.labels) {
        committed += r.committed ? 1 : 0;
        p_sum += r.p_star;
    }
    const double n = static_cast<double>(data.labels.size());
    out << "contests: " << data.contests.size() << '\n'
        << "tracking rows: " << data.tracking.size() << '\n'
        << "events: " << data.events.size() << '\n'
        << "labels: " << data.labels.size() << '\n'
        << "committed: " << committed << '\n'
        << "committed fraction: " << csv::fixed(committed / n, 4) << '\n'
        << "mean p*: " << csv::fixed(p_sum / n, 4) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
    std::string tracking;
    std::string transactions;
    std::string samples;
    std::string bandwidth_rule = "scott";
    std::vector<double> bandwidths;
    std::optional<double> displacement_horizon;
};

int cmd_fit(const GlobalOptions& g, const FitArgs& a, std::ostream& out, std::ostream& err) {
    BandwidthConfig bw;
    bw.rule = parse_bandwidth_rule(a.bandwidth_rule);
    bw.manual = a.bandwidths;
    bw.scale = g.bandwidth_scale;

    std::vector<CommitmentSample> samples;
    std::optional<TrackingData> tracking;
    Diagnostics diag;
    if (!a.samples.empty()) {
        std::ifstream in = open_input(a.samples);
        try {
            samples = read_samples_csv(in);
        } catch (const Error& e) {
            throw Error(a.samples + ": " + e.what());
        }
    } else {
        if (a.tracking.empty() || a.transactions.empty()) {
            throw Error("fit needs --samples, or both --tracking and --transactions");
        }
        tracking = read_tracking(a.tracking, diag);
        const auto events = read_transactions(a.transactions);
        const auto contests = extract_contests(events, *tracking, diag);
        SampleSet set = build_commitment_samples(contests, *tracking, g.workers());
        if (set.skipped_players > 0) {
            diag.warn(std::to_string(set.skipped_players) + " player(s) skipped for missing tracking at the contest");
        }
        out << "contests: " << contests.size() << '\n';
        samples = std::move(set.samples);
    }
    flush_warnings(diag, err);

    const CommitmentModel model = fit_commitment_model(samples, bw);
    OutputDir dir(g.out_dir);
    dir.write_json("model.json", to_json(model));
    dir.write("samples.csv", [&](std::ostream& o) { write_samples_csv(samples, o); });

    if (a.displacement_horizon) {
        if (!tracking) throw Error("--displacement-horizon needs --tracking");
        const auto disp = build_displacement_samples(*tracking, *a.displacement_horizon);
        if (disp.empty()) throw Error("no displacement samples at the requested horizon");
        dir.write_json("displacement_model.json", to_json(fit_displacement_model(disp, bw)));
        out << "displacement samples: " << disp.size() << '\n';
    }

    const auto bws = model.f1.bandwidths();
    nlohmann::json summary = {{"committed", model.committed_count()},
                              {"not_committed", model.uncommitted_count()},
                              {"w", model.w},
                              {"bandwidth_rule", to_string(bw.rule)},
                              {"bandwidth_scale", bw.scale},
                              {"bandwidths", std::vector<double>(bws.begin(), bws.end())}};
    dir.write_json("fit_summary.json", summary);
    out << "committed (c=1): " << model.committed_count() << '\n'
        << "not committed (c=0): " << model.uncommitted_count() << '\n'
        << "w: " << csv::fixed(model.w, 4) << '\n'
        << "bandwidths (x, y, v, t):";
    for (double h : bws) out << ' ' << csv::fixed(h, 4);
    out << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// grid

struct GridArgs {
    std::string model;
    std::string snapshot;
    std::vector<std::string> slices;
    std::string displacement_model;
    double slice_extent = 40.0;
};

std::pair<double, double> parse_slice(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw Error("--slice expects v,t, got '" + text + "'");
    const auto v = csv::parse_double(text.substr(0, comma));
    const auto t = csv::parse_double(text.substr(comma + 1));
    if (!v || !t || *v < 0.0 || !(*t > 0.0)) throw Error("--slice expects v >= 0 and t > 0, got '" + text + "'");
    return {*v, *t};
}

double grid_max(const FieldGrid& g) {
    double hi = 0.0;
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        if (g.mask[i]) hi = std::max(hi, g.values[i]);
    }
    return hi;
}

int cmd_grid(const GlobalOptions& g, const GridArgs& a, std::ostream& out, std::ostream&) {
    if (a.snapshot.empty() && a.slices.empty()) throw Error("grid needs --snapshot and/or --slice");
    const CommitmentModel model = commitment_model_from_json(read_json(a.model));
    const Pitch pitch = parse_pitch(g.pitch);
    OutputDir dir(g.out_dir);

    if (!a.snapshot.empty()) {
        const Snapshot snap = snapshot_from_json(read_json(a.snapshot));
        InfluenceParams params;
        params.ball_speed = g.ball_speed;
        const TeamFields fields = evaluate_snapshot(snap, model, pitch, g.cell_size, params, g.workers());
        const double hi = std::max({grid_max(fields.influence_a), grid_max(fields.influence_o), 1e-12});
        dir.write_grid("influence_a", fields.influence_a, 0.0, hi);
        dir.write_grid("influence_o", fields.influence_o, 0.0, hi);
        dir.write_grid("dominance_a", fields.dominance_a, 0.0, 1.0);
        out << "team a: " << fields.team_a << '\n'
            << "team o: " << (fields.team_o.empty() ? "(none)" : fields.team_o) << '\n'
            << "grid: " << fields.dominance_a.spec.nx << " x " << fields.dominance_a.spec.ny << " cells of "
            << format_number(g.cell_size) << " m\n";
    }

    std::optional<KdeModel> displacement;
    if (!a.displacement_model.empty()) displacement = kde_model_from_json(read_json(a.displacement_model));
    const double e = a.slice_extent;
    const GridSpec window = GridSpec::covering(-e, e, -e, e, g.cell_size);
    for (const auto& text : a.slices) {
        const auto [v, t] = parse_slice(text);
        const std::string stem = "slice_v" + format_number(v) + "_t" + format_number(t);
        const FieldGrid slice = slice_grid(model, v, t, window, g.workers());
        dir.write_grid(stem, slice, 0.0, 1.0);
        std::size_t best = 0;
        for (std::size_t i = 1; i < slice.values.size(); ++i) {
            if (slice.values[i] > slice.values[best]) best = i;
        }
        const Vec2 mode = window.cell_center(best);
        out << "slice v=" << format_number(v) << " t=" << format_number(t) << ": max p " << csv::fixed(slice.values[best], 4)
            << " at (" << csv::fixed(mode.x, 1) << ", " << csv::fixed(mode.y, 1) << ")\n";
        if (displacement) {
            const FieldGrid dens = slice_density(*displacement, v, t, window, g.workers());
            dir.write_grid("displacement_" + stem, dens, 0.0, std::max(grid_max(dens), 1e-300));
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// passes

struct PassArgs {
    std::string tracking;
    std::string transactions;
    std::string model;
    std::string equity;
    std::string home_team;
    double radius = kDefaultSmoothingRadius;
};

const std::vector<PassFeature> kReportFeatures = {PassFeature::dominance, PassFeature::influence,
                                                  PassFeature::distance, PassFeature::equity};

int cmd_passes(const GlobalOptions& g, const PassArgs& a, std::ostream& out, std::ostream& err) {
    Diagnostics diag;
    const TrackingData tracking = read_tracking(a.tracking, diag);
    const auto events = read_transactions(a.transactions);
    const CommitmentModel model = commitment_model_from_json(read_json(a.model));

    PassConfig config;
    config.pitch = parse_pitch(g.pitch);
    config.influence.ball_speed = g.ball_speed;
    if (!a.home_team.empty()) config.home_team = a.home_team;
    EquitySurface equity;
    if (a.equity.empty()) {
        diag.warn("no --equity given; using the synthetic placeholder surface");
        equity = placeholder_equity(config.pitch, g.cell_size);
    } else {
        equity = equity_from_json(read_json(a.equity));
    }

    PassSummary summary;
    const auto passes = extract_passes(events, tracking, &summary);
    std::vector<PassFeatures> features;
    std::size_t off_pitch = 0;
    std::vector<PassEvent> kept;
    for (const auto& p : passes) {
        if (config.pitch.contains(p.receive_pos)) {
            kept.push_back(p);
        } else {
            ++off_pitch;
        }
    }
    if (off_pitch > 0) diag.warn(std::to_string(off_pitch) + " pass(es) with an off-pitch reception skipped");
    features = compute_all_pass_features(kept, tracking, model, equity, config, g.workers());

    OutputDir dir(g.out_dir);
    dir.write("pass_features.csv", [&](std::ostream& o) { write_pass_features_csv(features, o); });
    out << "kicks: " << summary.kicks << '\n' << "passes: " << features.size() << '\n';

    std::ofstream report = dir.open("correlations.csv");
    report << "feature,rho,p_value,n\n";
    if (features.empty()) {
        diag.warn("no qualifying passes; outputs are empty");
    } else {
        const GridSpec spec = config.pitch.grid(g.cell_size);
        for (PassFeature f : {PassFeature::dominance, PassFeature::influence}) {
            const FieldGrid grid = smooth_by_location(features, f, spec, a.radius, config.pitch, g.workers());
            const double hi = f == PassFeature::dominance ? 1.0 : std::max(grid_max(grid), 1e-12);
            dir.write_grid("smoothed_" + std::string(to_string(f)), grid, 0.0, hi);
        }
        if (features.size() < 10) {
            diag.warn("fewer than 10 passes; correlations not reported");
        } else {
            for (PassFeature f : kReportFeatures) {
                try {
                    const auto c = correlate_with_goal_distance(features, {f}).front();
                    report << to_string(f) << ',' << format_exact(c.rho) << ',' << format_exact(c.p_value) << ','
                           << c.n << '\n';
                    out << "spearman " << to_string(f) << " vs dist_to_goal: rho = " << csv::fixed(c.rho, 4)
                        << ", p = " << c.p_value << '\n';
                } catch (const Error& e) {
                    diag.warn(std::string(to_string(f)) + ": " + e.what());
                }
            }
        }
    }
    report.flush();
    if (!report) throw Error("failed writing the correlation report");
    flush_warnings(diag, err);
    return 0;
}

// ---------------------------------------------------------------------------
// cluster

struct ClusterArgs {
    std::string features_path;
    std::vector<std::string> use = {"dominance", "influence", "distance", "equity"};
    std::size_t k = 3;
    bool auto_k = false;
    std::size_t k_min = 1;
    std::size_t k_max = 6;
    std::size_t restarts = 5;
    std::size_t max_iter = 500;
};

int cmd_cluster(const GlobalOptions& g, const ClusterArgs& a, std::ostream& out, std::ostream&) {
    std::ifstream in = open_input(a.features_path);
    std::vector<PassFeatures> passes;
    try {
        passes = read_pass_features_csv(in);
    } catch (const Error& e) {
        throw Error(a.features_path + ": " + e.what());
    }
    std::vector<PassFeature> use;
    for (const auto& name : a.use) use.push_back(parse_pass_feature(name));
    if (use.empty()) throw Error("no features selected");
    if (a.k_min == 0 || a.k_max < a.k_min) throw Error("k range must satisfy 1 <= k-min <= k-max");

    DataMatrix data(static_cast<Eigen::Index>(passes.size()), static_cast<Eigen::Index>(use.size()));
    for (std::size_t i = 0; i < passes.size(); ++i) {
        for (std::size_t j = 0; j < use.size(); ++j) {
            data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = feature_value(passes[i], use[j]);
        }
    }

    GmmOptions base;
    base.max_iter = a.max_iter;
    std::vector<std::size_t> ks;
    for (std::size_t k = a.k_min; k <= a.k_max; ++k) {
        if (static_cast<std::size_t>(data.rows()) >= k * (use.size() + 1)) ks.push_back(k);
    }

    OutputDir dir(g.out_dir);
    std::optional<ElbowResult> elbow;
    if (!ks.empty()) {
        elbow = elbow_curve(data, ks, g.seed, a.restarts, base, g.workers());
        dir.write("elbow.csv", [&](std::ostream& o) {
            o << "k,mean_nll,parameters,log_likelihood\n";
            for (const auto& p : elbow->curve) {
                o << p.k << ',' << csv::fixed(p.mean_nll, 6) << ',' << p.parameters << ','
                  << csv::fixed(p.log_likelihood, 6) << '\n';
            }
        });
        out << "elbow pick: k = " << elbow->pick << '\n';
    }

    GmmOptions options = base;
    options.k = a.auto_k && elbow ? elbow->pick : a.k;
    options.seed = g.seed;
    const GmmModel model = fit_em(data, options, g.workers());
    nlohmann::json j = to_json(model);
    std::vector<std::string> names;
    for (PassFeature f : use) names.emplace_back(to_string(f));
    j["features"] = names;
    dir.write_json("gmm.json", j);

    // One row per component, heaviest first.
    std::vector<std::size_t> order(model.k);
    for (std::size_t c = 0; c < model.k; ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return model.weights[x] > model.weights[y]; });
    dir.write("components.csv", [&](std::ostream& o) {
        o << "component,weight";
        for (const auto& n : names) o << ',' << n;
        o << '\n';
        for (std::size_t r = 0; r < order.size(); ++r) {
            const Vector mean = model.original_mean(order[r]);
            o << r << ',' << csv::fixed(model.weights[order[r]], 6);
            for (Eigen::Index q = 0; q < mean.size(); ++q) o << ',' << csv::fixed(mean(q), 6);
            o << '\n';
        }
    });
    out << "k: " << model.k << '\n'
        << "log-likelihood: " << csv::fixed(model.log_likelihood, 4) << '\n'
        << "iterations: " << model.iterations << (model.converged ? "" : " (not converged)") << '\n';
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Commitment-based motion models, spatial influence and pass analysis", "motionfit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--out", g.out_dir, "Output directory");
    app.add_option("--seed", g.seed, "Random seed");
    app.add_option("--pitch", g.pitch, "Pitch size LxW in metres");
    app.add_option("--ball-speed", g.ball_speed, "Ball speed for time-to-point, m/s")->check(CLI::PositiveNumber);
    app.add_option("--cell-size", g.cell_size, "Grid cell size, m")->check(CLI::PositiveNumber);
    app.add_option("--bandwidth-scale", g.bandwidth_scale, "Multiplier on KDE bandwidths")->check(CLI::PositiveNumber);
    app.add_option("--threads", g.threads, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic match with ground truth");
    synth_cmd->add_option("--contests", synth.contests, "Number of contests")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--players", synth.players, "Players per team")->check(CLI::Range(1, 18));
    synth_cmd->add_option("--noise", synth.noise, "Positional noise sigma, m")->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--kick-speed", synth.kick_speed, "Kick speed, m/s")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--constant-rule", synth.constant_rule, "Replace the rule by a fixed probability")
        ->check(CLI::Range(0.0, 1.0));

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a commitment model");
    fit_cmd->add_option("--tracking", fit.tracking, "Tracking CSV");
    fit_cmd->add_option("--transactions", fit.transactions, "Transactions CSV");
    fit_cmd->add_option("--samples", fit.samples, "Pre-built samples CSV (x,y,v,t,c)");
    fit_cmd->add_option("--bandwidth-rule", fit.bandwidth_rule, "scott or manual");
    fit_cmd->add_option("--bandwidths", fit.bandwidths, "Manual bandwidths x,y,v,t")->delimiter(',')->expected(4);
    fit_cmd->add_option("--displacement-horizon", fit.displacement_horizon,
                        "Also fit a displacement model over this horizon, s")
        ->check(CLI::PositiveNumber);

    GridArgs grid;
    auto* grid_cmd = app.add_subcommand("grid", "Influence and dominance grids, probability slices");
    grid_cmd->add_option("--model", grid.model, "Commitment model JSON")->required();
    grid_cmd->add_option("--snapshot", grid.snapshot, "Snapshot JSON");
    grid_cmd->add_option("--slice", grid.slices, "v,t slice of the model (repeatable)");
    grid_cmd->add_option("--displacement-model", grid.displacement_model, "Displacement model JSON for slices");
    grid_cmd->add_option("--slice-extent", grid.slice_extent, "Half-width of slice windows, m")
        ->check(CLI::PositiveNumber);

    PassArgs passes;
    auto* passes_cmd = app.add_subcommand("passes", "Pass features, smoothed maps and correlations");
    passes_cmd->add_option("--tracking", passes.tracking, "Tracking CSV")->required();
    passes_cmd->add_option("--transactions", passes.transactions, "Transactions CSV")->required();
    passes_cmd->add_option("--model", passes.model, "Commitment model JSON")->required();
    passes_cmd->add_option("--equity", passes.equity, "Equity surface JSON");
    passes_cmd->add_option("--home-team", passes.home_team, "Team attacking +x");
    passes_cmd->add_option("--radius", passes.radius, "Smoothing radius, m")->check(CLI::PositiveNumber);

    ClusterArgs cluster;
    auto* cluster_cmd = app.add_subcommand("cluster", "Gaussian mixture clustering of pass features");
    cluster_cmd->add_option("--features", cluster.features_path, "pass_features.csv")->required();
    cluster_cmd->add_option("--use", cluster.use, "Features to cluster on")->delimiter(',');
    cluster_cmd->add_option("--k", cluster.k, "Number of components")->check(CLI::PositiveNumber);
    cluster_cmd->add_flag("--auto-k", cluster.auto_k, "Use the elbow pick as k");
    cluster_cmd->add_option("--k-min", cluster.k_min, "Smallest k on the elbow curve")->check(CLI::PositiveNumber);
    cluster_cmd->add_option("--k-max", cluster.k_max, "Largest k on the elbow curve")->check(CLI::PositiveNumber);
    cluster_cmd->add_option("--restarts", cluster.restarts, "Seeded restarts per k")->check(CLI::PositiveNumber);
    cluster_cmd->add_option("--max-iter", cluster.max_iter, "EM iteration cap")->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*synth_cmd) return cmd_synth(g, synth, out, err);
        if (*fit_cmd) return cmd_fit(g, fit, out, err);
        if (*grid_cmd) return cmd_grid(g, grid, out, err);
        if (*passes_cmd) return cmd_passes(g, passes, out, err);
        if (*cluster_cmd) return cmd_cluster(g, cluster, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace motionfit::cli
