#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <regex>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "commands.hpp"
#include "fixtures.hpp"
#include "motionfit/csv.hpp"
#include "motionfit/passing.hpp"
#include "motionfit/synth.hpp"

namespace fs = std::filesystem;
using namespace motionfit;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    Run r;
    r.code = cli::run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path temp_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("motionfit_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> rows(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::vector<std::vector<std::string>> out;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(csv::split(line));
    }
    return out;
}

double num(const std::string& s) { return std::stod(s); }

// Synthetic match plus fitted model, shared by the grid and passes cases.
const fs::path& fitted_dir() {
    static const fs::path dir = [] {
        const fs::path d = temp_dir("fitted");
        REQUIRE(run({"--out", d.string(), "--seed", "11", "synth", "--contests", "120"}).code == 0);
        REQUIRE(run({"--out", d.string(), "fit", "--tracking", (d / "tracking.csv").string(), "--transactions",
                     (d / "transactions.csv").string()})
                    .code == 0);
        return d;
    }();
    return dir;
}

double boost_p(double rho, double n) {
    if (std::abs(rho) == 1.0) return 0.0;
    const double t = rho * std::sqrt((n - 2.0) / (1.0 - rho * rho));
    return 2.0 * boost::math::cdf(boost::math::complement(boost::math::students_t(n - 2.0), std::abs(t)));
}

}  // namespace

TEST_CASE("synth is reproducible and rejects zero contests") {
    const fs::path a = temp_dir("synth_a"), b = temp_dir("synth_b");
    const Run ra = run({"--out", a.string(), "--seed", "7", "synth", "--contests", "4"});
    const Run rb = run({"--out", b.string(), "--seed", "7", "synth", "--contests", "4"});
    REQUIRE(ra.code == 0);
    REQUIRE(rb.code == 0);
    CHECK(ra.out == rb.out);
    for (const char* f : {"tracking.csv", "transactions.csv", "ground_truth.csv", "snapshot.json"}) {
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK_FALSE(slurp(a / f).empty());
    }
    CHECK(ra.out.find("contests: 4") != std::string::npos);

    const Run zero = run({"--out", a.string(), "synth", "--contests", "0"});
    CHECK(zero.code != 0);
    CHECK_FALSE(zero.err.empty());
}

TEST_CASE("noise-free synth output ingests without warnings") {
    const fs::path d = temp_dir("clean");
    REQUIRE(run({"--out", d.string(), "--seed", "3", "synth", "--contests", "10", "--noise", "0"}).code == 0);
    Diagnostics diag;
    std::ifstream tin(d / "tracking.csv");
    const TrackingData tracking = load_tracking(tin, diag);
    std::ifstream ein(d / "transactions.csv");
    const auto events = align_transactions(load_transactions(ein));
    const auto contests = extract_contests(events, tracking, diag);
    CHECK(contests.size() == 10);
    CHECK(diag.empty());
    const auto set = build_commitment_samples(contests, tracking);
    CHECK(set.skipped_players == 0);

    std::map<std::pair<std::size_t, std::string>, int> from_files;
    for (std::size_t i = 0; i < set.samples.size(); ++i) {
        from_files[{set.origins[i].contest_index, set.origins[i].player_id}] = set.samples[i].c;
    }
    const auto truth = rows(d / "ground_truth.csv");
    REQUIRE(truth.size() == set.samples.size());
    for (const auto& r : truth) {
        CHECK(from_files.at({std::stoul(r[0]), r[1]}) == std::stoi(r[3]));
    }

    const Run fit = run({"--out", d.string(), "fit", "--tracking", (d / "tracking.csv").string(), "--transactions",
                         (d / "transactions.csv").string()});
    CHECK(fit.code == 0);
    CHECK(fit.err.empty());
}

TEST_CASE("fit reports w near the generator's mean commitment") {
    const fs::path& d = fitted_dir();
    const auto truth = rows(d / "ground_truth.csv");
    double mean = 0.0, var = 0.0;
    for (const auto& r : truth) {
        const double p = num(r[2]);
        mean += p;
        var += p * (1.0 - p);
    }
    const double n = static_cast<double>(truth.size());
    const double se = std::sqrt(var) / n;
    mean /= n;
    const auto summary = nlohmann::json::parse(slurp(d / "fit_summary.json"));
    const double w = summary["w"].get<double>();
    MESSAGE("w = " << w << ", mean p* = " << mean << ", SE = " << se);
    CHECK(std::abs(w - mean) <= 3.0 * se);
    CHECK(summary["committed"].get<std::size_t>() + summary["not_committed"].get<std::size_t>() == truth.size());
    CHECK(fs::exists(d / "model.json"));
    CHECK(fs::exists(d / "samples.csv"));
}

TEST_CASE("fit on pre-built samples prints the weight from the counts") {
    const fs::path d = temp_dir("counts");
    {
        std::ofstream s(d / "samples.csv");
        s << "x,y,v,t,c\n";
        for (int i = 0; i < 6392; ++i) s << 0.01 * (i % 97) << ',' << 0.02 * (i % 89) << ',' << 1 + 0.001 * i << ',' << 1 + i % 4 << ",1\n";
        for (int i = 0; i < 39828; ++i) s << 0.03 * (i % 83) << ',' << 0.01 * (i % 79) << ',' << 0.5 + 1e-4 * i << ',' << 1 + i % 3 << ",0\n";
    }
    const Run r = run({"--out", d.string(), "fit", "--samples", (d / "samples.csv").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("committed (c=1): 6392") != std::string::npos);
    CHECK(r.out.find("not committed (c=0): 39828") != std::string::npos);
    CHECK(r.out.find("w: 0.1383") != std::string::npos);
}

TEST_CASE("fit errors") {
    const fs::path d = temp_dir("fit_err");
    const std::string missing = (d / "nope.csv").string();
    const Run r = run({"--out", d.string(), "fit", "--samples", missing});
    CHECK(r.code != 0);
    CHECK(r.err.find(missing) != std::string::npos);

    {
        std::ofstream s(d / "one_sided.csv");
        s << "x,y,v,t,c\n1,2,3,1,0\n2,1,3,2,0\n";
    }
    const Run one = run({"--out", d.string(), "fit", "--samples", (d / "one_sided.csv").string()});
    CHECK(one.code != 0);
    CHECK(one.err.find("cannot weight one-sided data") != std::string::npos);
}

TEST_CASE("grid outputs") {
    const fs::path& src = fitted_dir();
    const fs::path d = temp_dir("grid");
    const std::string model = (src / "model.json").string();

    SUBCASE("swapping possession complements dominance") {
        auto snap = fixtures::random_snapshot(17, 18);
        std::ofstream(d / "a.json") << to_json(snap).dump();
        snap.possession_team = "away";
        std::ofstream(d / "b.json") << to_json(snap).dump();
        REQUIRE(run({"--out", (d / "a").string(), "--cell-size", "4", "grid", "--model", model, "--snapshot",
                     (d / "a.json").string()})
                    .code == 0);
        REQUIRE(run({"--out", (d / "b").string(), "--cell-size", "4", "grid", "--model", model, "--snapshot",
                     (d / "b.json").string()})
                    .code == 0);
        const auto da = rows(d / "a" / "dominance_a.csv"), db = rows(d / "b" / "dominance_a.csv");
        REQUIRE(da.size() == db.size());
        REQUIRE(da.size() > 100);
        for (std::size_t i = 0; i < da.size(); ++i) {
            CHECK(da[i][0] == db[i][0]);
            CHECK(da[i][1] == db[i][1]);
            CHECK(std::abs(num(da[i][2]) + num(db[i][2]) - 1.0) <= 1e-12);
        }
        CHECK(slurp(d / "a" / "influence_a.csv") == slurp(d / "b" / "influence_o.csv"));
        CHECK(slurp(d / "a" / "dominance_a.ppm").rfind("P3\n", 0) == 0);
    }

    SUBCASE("slices at two speeds") {
        const Run r = run({"--out", d.string(), "grid", "--model", model, "--slice", "2,2", "--slice", "5,2"});
        REQUIRE(r.code == 0);
        CHECK(fs::exists(d / "slice_v2_t2.csv"));
        CHECK(fs::exists(d / "slice_v5_t2.ppm"));
        const std::regex line(R"(slice v=(\S+) t=(\S+): max p (\S+) at \((\S+), (\S+)\))");
        std::vector<Vec2> modes;
        for (std::sregex_iterator it(r.out.begin(), r.out.end(), line), end; it != end; ++it) {
            const Vec2 m{num((*it)[4]), num((*it)[5])};
            const double t = num((*it)[2]);
            MESSAGE("mode at v=" << (*it)[1] << ": (" << m.x << ", " << m.y << ")");
            // Inside the generator's reachable zone.
            CHECK(norm(m) / t <= TrueRule{}.v_max);
            CHECK(num((*it)[3]) > 0.5);
            modes.push_back(m);
        }
        REQUIRE(modes.size() == 2);
        CHECK(distance(modes[0], modes[1]) > 0.0);
    }

    SUBCASE("bad snapshots") {
        Snapshot empty;
        empty.possession_team = "home";
        std::ofstream(d / "empty.json") << to_json(empty).dump();
        const Run e = run({"--out", d.string(), "grid", "--model", model, "--snapshot", (d / "empty.json").string()});
        CHECK(e.code != 0);
        CHECK_FALSE(e.err.empty());

        auto crowded = fixtures::random_snapshot(2, 18);
        crowded.players.push_back(fixtures::player("home_extra", "home", {1, 1}, {1, 0}, 1.0));
        std::ofstream(d / "crowded.json") << to_json(crowded).dump();
        const Run c = run({"--out", d.string(), "grid", "--model", model, "--snapshot", (d / "crowded.json").string()});
        CHECK(c.code != 0);
        CHECK_FALSE(c.err.empty());
    }
}

TEST_CASE("passes report") {
    const fs::path& src = fitted_dir();
    const std::string model = (src / "model.json").string();

    SUBCASE("synthetic match with a flat equity surface") {
        const fs::path d = temp_dir("passes_flat");
        EquitySurface flat;
        flat.grid = FieldGrid(Pitch{}.grid(4.0), 0.25);
        std::ofstream(d / "flat.json") << to_json(flat).dump();
        const Run r = run({"--out", d.string(), "passes", "--tracking", (src / "tracking.csv").string(),
                           "--transactions", (src / "transactions.csv").string(), "--model", model, "--equity",
                           (d / "flat.json").string()});
        REQUIRE(r.code == 0);
        const auto features = rows(d / "pass_features.csv");
        REQUIRE(features.size() >= 10);
        for (const auto& f : features) {
            CHECK(num(f[4]) == 0.0);
            CHECK(num(f[1]) >= 15.0);
            CHECK(num(f[2]) >= 0.0);
            CHECK(num(f[2]) <= 1.0);
        }
        for (const auto& c : rows(d / "correlations.csv")) {
            CHECK(std::abs(num(c[2]) - boost_p(num(c[1]), num(c[3]))) <= 1e-6);
        }
        CHECK(fs::exists(d / "smoothed_dominance.ppm"));
        CHECK(fs::exists(d / "smoothed_influence.csv"));
    }

    SUBCASE("engineered monotone passes") {
        const fs::path d = temp_dir("passes_line");
        std::vector<TrackingSample> tracking;
        std::vector<TransactionEvent> events;
        auto still = [&](const std::string& id, const std::string& team, Vec2 pos) {
            for (int k = 0; k <= 300; ++k) tracking.push_back({"m", id, team, k / 10.0, pos});
        };
        still("home_k", "home", {60, 0});
        still("away_1", "away", {0, 40});
        still("away_2", "away", {-20, -40});
        for (int i = 0; i < 12; ++i) {
            const std::string id = "home_r" + std::to_string(10 + i);
            still(id, "home", {40.0 - 8.0 * i, 3.0});
            events.push_back({"m", 2.0 * i, EventKind::kick, "home_k", "home"});
            events.push_back({"m", 2.0 * i + 1.0, EventKind::mark, id, "home"});
        }
        {
            std::ofstream t(d / "tracking.csv");
            write_tracking_csv(tracking, t);
            std::ofstream e(d / "transactions.csv");
            write_transactions_csv(events, e);
        }
        const Run r = run({"--out", d.string(), "passes", "--tracking", (d / "tracking.csv").string(),
                           "--transactions", (d / "transactions.csv").string(), "--model", model});
        REQUIRE(r.code == 0);
        CHECK(r.out.find("passes: 12") != std::string::npos);
        CHECK(r.err.find("placeholder") != std::string::npos);
        std::map<std::string, std::vector<std::string>> report;
        for (const auto& c : rows(d / "correlations.csv")) report[c[0]] = c;
        REQUIRE(report.count("distance"));
        CHECK(num(report["distance"][1]) == 1.0);
        CHECK(num(report["distance"][2]) == 0.0);
        REQUIRE(report.count("equity"));
        CHECK(num(report["equity"][1]) == -1.0);
        for (const auto& [name, c] : report) {
            CHECK(std::abs(num(c[2]) - boost_p(num(c[1]), num(c[3]))) <= 1e-6);
        }
    }

    SUBCASE("no passes") {
        const fs::path d = temp_dir("passes_none");
        std::vector<TrackingSample> tracking;
        for (int k = 0; k <= 20; ++k) tracking.push_back({"m", "home_a", "home", k / 10.0, {0, 0}});
        {
            std::ofstream t(d / "tracking.csv");
            write_tracking_csv(tracking, t);
            std::ofstream e(d / "transactions.csv");
            write_transactions_csv({}, e);
        }
        const Run r = run({"--out", d.string(), "passes", "--tracking", (d / "tracking.csv").string(),
                           "--transactions", (d / "transactions.csv").string(), "--model", model});
        CHECK(r.code == 0);
        CHECK(r.err.find("no qualifying passes") != std::string::npos);
        CHECK(rows(d / "pass_features.csv").empty());
    }
}

TEST_CASE("cluster") {
    const fs::path d = temp_dir("cluster");
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<PassFeatures> passes;
    const double centres[3][4] = {{0.2, 0.5, 20.0, -0.3}, {0.5, 1.3, 35.0, 0.0}, {0.8, 2.1, 50.0, 0.3}};
    const double sds[4] = {0.03, 0.1, 1.5, 0.03};
    const double weights[3] = {0.5, 0.3, 0.2};
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < static_cast<int>(weights[c] * 900); ++i) {
            PassFeatures f;
            f.pass_id = passes.size();
            f.dominance = centres[c][0] + sds[0] * z(rng);
            f.influence = centres[c][1] + sds[1] * z(rng);
            f.distance = centres[c][2] + sds[2] * z(rng);
            f.equity = centres[c][3] + sds[3] * z(rng);
            f.dist_to_goal = 40.0;
            passes.push_back(f);
        }
    }
    {
        std::ofstream o(d / "features.csv");
        write_pass_features_csv(passes, o);
    }
    const std::string features = (d / "features.csv").string();

    SUBCASE("elbow finds three components") {
        const Run r = run({"--out", d.string(), "--seed", "3", "cluster", "--features", features, "--k-max", "5",
                           "--auto-k"});
        REQUIRE(r.code == 0);
        CHECK(r.out.find("elbow pick: k = 3") != std::string::npos);
        CHECK(rows(d / "elbow.csv").size() == 5);
        const auto comps = rows(d / "components.csv");
        REQUIRE(comps.size() == 3);
        CHECK(std::abs(num(comps[0][1]) - 0.5) < 0.05);
        CHECK(std::abs(num(comps[0][4]) - 20.0) < 0.5 * 1.5);
    }
    SUBCASE("one component gives the feature means") {
        const fs::path o = d / "k1";
        const Run r = run({"--out", o.string(), "cluster", "--features", features, "--k", "1", "--k-max", "1"});
        REQUIRE(r.code == 0);
        const auto comps = rows(o / "components.csv");
        REQUIRE(comps.size() == 1);
        double mean_distance = 0.0;
        for (const auto& p : passes) mean_distance += p.distance / static_cast<double>(passes.size());
        CHECK(num(comps[0][1]) == 1.0);
        CHECK(std::abs(num(comps[0][4]) - mean_distance) < 1e-5);
    }
    SUBCASE("same seed, same model") {
        REQUIRE(run({"--out", (d / "s1").string(), "--seed", "9", "cluster", "--features", features, "--k-max", "3"})
                    .code == 0);
        REQUIRE(run({"--out", (d / "s2").string(), "--seed", "9", "cluster", "--features", features, "--k-max", "3",
                     "--threads", "3"})
                    .code == 0);
        CHECK(slurp(d / "s1" / "gmm.json") == slurp(d / "s2" / "gmm.json"));
        CHECK(slurp(d / "s1" / "elbow.csv") == slurp(d / "s2" / "elbow.csv"));
    }
    SUBCASE("errors") {
        const Run missing = run({"--out", d.string(), "cluster", "--features", (d / "none.csv").string()});
        CHECK(missing.code != 0);
        CHECK(missing.err.find("none.csv") != std::string::npos);
        const Run unknown = run({"--out", d.string(), "cluster", "--features", features, "--use", "speed"});
        CHECK(unknown.code != 0);
    }
}

TEST_CASE("usage errors") {
    CHECK(run({}).code != 0);
    CHECK(run({"bogus"}).code != 0);
    CHECK(run({"grid"}).code != 0);
}
