#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "motionfit/error.hpp"
#include "motionfit/geometry.hpp"

using namespace motionfit;

namespace {

std::vector<TrackingSample> track_of(const std::vector<Vec2>& positions, double dt = 0.1) {
    std::vector<TrackingSample> out;
    for (std::size_t k = 0; k < positions.size(); ++k) {
        out.push_back({"m", "p", "a", static_cast<double>(k) * dt, positions[k]});
    }
    return out;
}

// Rotates BC into the frame whose +x axis is AB with an explicit 2x2 matrix.
Vec2 rotation_oracle(Vec2 a, Vec2 b, Vec2 c) {
    const double phi = std::atan2(b.y - a.y, b.x - a.x);
    const double r00 = std::cos(phi), r01 = std::sin(phi);
    const double r10 = -std::sin(phi), r11 = std::cos(phi);
    const Vec2 bc = c - b;
    return {r00 * bc.x + r01 * bc.y, r10 * bc.x + r11 * bc.y};
}

}  // namespace

TEST_CASE("stationary player has zero speed and no heading") {
    const auto states = derive_kinematics(track_of({{3, 4}, {3, 4}, {3, 4}, {3, 4}}));
    for (const auto& s : states) {
        CHECK(s.speed == 0.0);
        CHECK_FALSE(s.heading_defined);
        CHECK(s.orientation() == kPitchFrameHeading);
    }
}

TEST_CASE("uniform linear motion gives unit speed along +x") {
    std::vector<Vec2> pos;
    for (int k = 0; k < 10; ++k) pos.push_back({0.1 * k, 0.0});
    const auto states = derive_kinematics(track_of(pos));
    for (std::size_t i = 1; i + 1 < states.size(); ++i) {
        CHECK(states[i].speed == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(states[i].heading.x == doctest::Approx(1.0));
        CHECK(states[i].heading.y == doctest::Approx(0.0));
    }
}

TEST_CASE("uniform motion speed equals displacement over time") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec2 v{u(rng), u(rng)};
        const Vec2 p0{u(rng) * 10, u(rng) * 10};
        std::vector<Vec2> pos;
        for (int k = 0; k < 8; ++k) pos.push_back(p0 + (0.1 * k) * v);
        const auto states = derive_kinematics(track_of(pos));
        for (std::size_t i = 0; i < states.size(); ++i) {
            const std::size_t lo = i == 0 ? 0 : i - 1;
            const std::size_t hi = i + 1 == states.size() ? i : i + 1;
            const double expected = norm(pos[hi] - pos[lo]) / (0.1 * static_cast<double>(hi - lo));
            CHECK(states[i].speed == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("circular track matches the analytic tangent") {
    std::vector<Vec2> pos;
    for (int k = 0; k <= 100; ++k) {
        const double t = 0.1 * k;
        pos.push_back({std::cos(t), std::sin(t)});
    }
    const auto states = derive_kinematics(track_of(pos));
    for (std::size_t i = 1; i + 1 < states.size(); ++i) {
        const double t = 0.1 * static_cast<double>(i);
        CHECK(std::abs(states[i].speed - 1.0) < 0.01);
        const Vec2 tangent{-std::sin(t), std::cos(t)};
        const double angle = std::acos(std::clamp(dot(tangent, states[i].heading), -1.0, 1.0));
        CHECK(angle < 2.0 * std::numbers::pi / 180.0);
    }
}

TEST_CASE("kinematics errors") {
    CHECK_THROWS_WITH_AS(derive_kinematics(track_of({{0, 0}})), "insufficient track", Error);
    auto track = track_of({{0, 0}, {1, 0}, {2, 0}});
    track[2].t = track[1].t;
    CHECK_THROWS_WITH_AS(derive_kinematics(track), "unordered track", Error);
}

TEST_CASE("moving-average window smooths positions") {
    std::vector<Vec2> pos;
    for (int k = 0; k < 10; ++k) pos.push_back({0.1 * k, k % 2 == 0 ? 0.05 : -0.05});
    KinematicsOptions opts;
    opts.smoothing_window = 3;
    const auto raw = derive_kinematics(track_of(pos));
    const auto smooth = derive_kinematics(track_of(pos), opts);
    CHECK(std::abs(smooth[5].heading.y) < std::abs(raw[5].heading.y) + 1e-15);
}

TEST_CASE("relative location worked examples") {
    SUBCASE("dead ahead") {
        const auto r = relative_location({0, 0}, {1, 0}, {4, 0});
        CHECK(r.theta == doctest::Approx(0.0));
        CHECK(r.x == doctest::Approx(3.0));
        CHECK(r.y == doctest::Approx(0.0));
        CHECK(r.d == doctest::Approx(3.0));
    }
    SUBCASE("perpendicular left") {
        const auto r = relative_location({0, 0}, {1, 0}, {1, 2});
        CHECK(r.theta == doctest::Approx(std::numbers::pi / 2));
        CHECK(r.x == doctest::Approx(0.0));
        CHECK(r.y == doctest::Approx(2.0));
        CHECK(r.d == doctest::Approx(2.0));
    }
    SUBCASE("behind and to the right") {
        const auto r = relative_location({0, 0}, {1, 0}, {-2, -3});
        const Vec2 oracle = rotation_oracle({0, 0}, {1, 0}, {-2, -3});
        CHECK(r.d == doctest::Approx(std::sqrt(18.0)).epsilon(1e-12));
        CHECK(r.x == doctest::Approx(-3.0));
        CHECK(r.y == doctest::Approx(-3.0));
        CHECK(std::abs(r.x - oracle.x) < 1e-12);
        CHECK(std::abs(r.y - oracle.y) < 1e-12);
    }
}

TEST_CASE("relative location edge cases") {
    CHECK_THROWS_WITH_AS(relative_location({1, 1}, {1, 1}, {4, 0}), "undefined orientation", Error);
    const auto r = relative_location({0, 0}, {1, 0}, {1, 0});
    CHECK(r.x == 0.0);
    CHECK(r.y == 0.0);
    CHECK(r.d == 0.0);
    CHECK(r.theta == 0.0);
}

TEST_CASE("relative location invariants on random triples") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-80.0, 80.0);
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    for (int i = 0; i < 2000; ++i) {
        const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
        const auto r = relative_location(a, b, c);

        CHECK(std::abs(r.d - std::hypot(r.x, r.y)) < 1e-9);
        CHECK(r.theta >= 0.0);
        CHECK(r.theta <= std::numbers::pi);
        CHECK(std::abs(r.x - r.d * std::cos(r.theta)) < 1e-9);
        CHECK(std::abs(r.y - (r.y < 0 ? -1.0 : 1.0) * r.d * std::sin(r.theta)) < 1e-9);

        const Vec2 oracle = rotation_oracle(a, b, c);
        CHECK(std::abs(r.x - oracle.x) < 1e-9);
        CHECK(std::abs(r.y - oracle.y) < 1e-9);

        // Rigid motion of all three points.
        const double phi = ang(rng);
        const Vec2 shift{u(rng), u(rng)};
        auto move = [&](Vec2 p) {
            return Vec2{std::cos(phi) * p.x - std::sin(phi) * p.y, std::sin(phi) * p.x + std::cos(phi) * p.y} + shift;
        };
        const auto moved = relative_location(move(a), move(b), move(c));
        CHECK(std::abs(moved.x - r.x) < 1e-9);
        CHECK(std::abs(moved.y - r.y) < 1e-9);
        CHECK(std::abs(moved.d - r.d) < 1e-9);
        CHECK(std::abs(moved.theta - r.theta) < 1e-9);

        // Reflect the target across the movement line.
        const Vec2 axis = (b - a) * (1.0 / norm(b - a));
        const Vec2 bc = c - b;
        const Vec2 along = dot(bc, axis) * axis;
        const Vec2 mirrored = b + along - (bc - along);
        const auto m = relative_location(a, b, mirrored);
        CHECK(std::abs(m.x - r.x) < 1e-9);
        CHECK(std::abs(m.y + r.y) < 1e-9);
        CHECK(std::abs(m.d - r.d) < 1e-9);
        CHECK(std::abs(m.theta - r.theta) < 1e-9);
    }
}

TEST_CASE("player frame falls back to the pitch frame without a heading") {
    PlayerState p;
    p.pos = {10, 10};
    p.speed = 0.1;
    const auto r = relative_to_player(p, {13, 14});
    CHECK(r.x == doctest::Approx(3.0));
    CHECK(r.y == doctest::Approx(4.0));
}
