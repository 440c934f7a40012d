// Copyright 2026 The measchain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "measchain/pointer.hpp"
#include "oracles.hpp"

using namespace measchain::pointer;

namespace {

// c = 1 and N A B = 1, so the drive ratio equals the current.
PointerParams unit_params() { return PointerParams{1.0, 1.0, 1.0, 1.0, 1.0, 1.0}; }

}  // namespace

TEST_CASE("params: validation") {
    CHECK_NOTHROW(unit_params().validate());
    CHECK_THROWS_AS(PointerParams({0.0, 1, 1, 1, 1, 1}).validate(), PointerError);
    CHECK_THROWS_AS(PointerParams({1.0, 1, 1, 1, -1, 1}).validate(), PointerError);
    CHECK_THROWS_AS(PointerParams({1.0, 1, 1, 1, 1, 0}).validate(), PointerError);
    CHECK(unit_params().damping_time() == 2.0);
}

TEST_CASE("integrate: no current and at rest stays at rest") {
    const auto traj = integrate_pointer(unit_params(), {}, CurrentWaveform::constant(0.0), 20.0);
    REQUIRE(traj.size() > 2);
    CHECK(traj.back().t == doctest::Approx(20.0));
    for (const auto& s : traj) {
        CHECK(s.state.theta == 0.0);
        CHECK(s.state.theta_dot == 0.0);
    }
}

TEST_CASE("integrate: free decay never gains energy") {
    for (double eta : {0.1, 1.0, 5.0}) {
        auto p = unit_params();
        p.damping = eta;
        const auto traj = integrate_pointer(p, {0.3, 0.0}, CurrentWaveform::constant(0.0), 200.0);
        double prev = mechanical_energy(p, traj.front().state);
        CHECK(prev == doctest::Approx(0.045));
        for (const auto& s : traj) {
            const double e = mechanical_energy(p, s.state);
            CHECK(e <= prev + 1e-13);
            prev = e;
        }
        CHECK(std::abs(traj.back().state.theta) < 1e-3);
    }
}

TEST_CASE("integrate: constant drive 0.2 settles at 0.1961") {
    const auto p = unit_params();
    const double root = oracle::pointer_root(0.2, 1.0);
    CHECK(root == doctest::Approx(0.1961).epsilon(1e-3));
    const auto traj = integrate_pointer(p, {}, CurrentWaveform::constant(0.2), 60.0);
    CHECK(std::abs(traj.back().state.theta - root) < 1e-4);
    CHECK(std::abs(settled_angle(p, 0.2) - root) < 1e-12);
    CHECK_THROWS_AS(integrate_pointer(p, {}, CurrentWaveform::constant(0.2), 1.0, 0.0), PointerError);
}

TEST_CASE("settled_angle: zero, small drive and sign symmetry") {
    const auto p = unit_params();
    CHECK(settled_angle(p, 0.0) == 0.0);
    for (double k : {1e-4, 1e-3, 0.01, 0.05}) {
        CHECK(settled_angle(p, k) == doctest::Approx(k).epsilon(0.01));
        CHECK(settled_angle(p, -k) == doctest::Approx(-settled_angle(p, k)).epsilon(1e-12));
    }
    auto q = p;
    q.spring = 4.0;
    q.turns = 10.0;
    q.coil_area = 0.02;
    q.field = 2.0;
    // N A B / c = 0.1, so I = 2 gives a ratio of 0.2.
    CHECK(settled_angle(q, 2.0) == doctest::Approx(oracle::pointer_root(0.8, 4.0)).epsilon(1e-12));
}

TEST_CASE("settled_angle: drives at or above pi/2 are rejected") {
    const auto p = unit_params();
    CHECK_NOTHROW(settled_angle(p, 1.5));
    CHECK_THROWS_AS(settled_angle(p, std::numbers::pi / 2.0), PointerError);
    CHECK_THROWS_AS(settled_angle(p, -2.0), PointerError);
    CHECK_THROWS_AS(settle(p, 3.0, {}, 10.0), PointerError);
}

TEST_CASE("sweep: ODE limit matches the root across 1e-3 .. 1") {
    const auto p = unit_params();
    double worst = 0.0;
    for (int i = 0; i <= 12; ++i) {
        const double k = std::pow(10.0, -3.0 + 3.0 * i / 12.0);
        const auto r = settle(p, k, {}, 200.0);
        CHECK(r.settled);
        CHECK(r.root == doctest::Approx(oracle::pointer_root(k, 1.0)).epsilon(1e-12));
        worst = std::max(worst, std::abs(r.angle - r.root));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("settle: criterion needs a full damping time and reports failure") {
    auto p = unit_params();
    p.damping = 0.05;  // slow ring-down
    const auto quick = settle(p, 0.2, {}, 10.0);
    CHECK_FALSE(quick.settled);
    const auto slow = settle(p, 0.2, {}, 2000.0);
    CHECK(slow.settled);
    CHECK(slow.time > 0.0);
    CHECK(std::abs(slow.angle - slow.root) < 1e-4);
}

TEST_CASE("waveform: piecewise-linear interpolation, mean and peak") {
    const CurrentWaveform w({0.0, 1.0, 3.0}, {0.0, 2.0, 0.0});
    CHECK(w(0.5) == doctest::Approx(1.0));
    CHECK(w(2.0) == doctest::Approx(1.0));
    CHECK(w(-1.0) == 0.0);
    CHECK(w(4.0) == 0.0);
    CHECK(w.peak() == 2.0);
    CHECK(w.mean() == doctest::Approx(1.0));
    CHECK(w.duration() == 3.0);
    CHECK_THROWS_AS(CurrentWaveform({0.0, 1.0}, {1.0}), PointerError);
    CHECK_THROWS_AS(CurrentWaveform({1.0, 0.0}, {1.0, 1.0}), PointerError);
}

TEST_CASE("integrate: a short pulse kicks the pointer and it returns to zero") {
    const auto p = unit_params();
    const CurrentWaveform pulse({0.0, 0.1, 0.2}, {0.0, 1.0, 0.0});
    const auto traj = integrate_pointer(p, {}, pulse, 60.0);
    double peak = 0.0;
    for (const auto& s : traj) peak = std::max(peak, s.state.theta);
    CHECK(peak > 0.0);
    CHECK(std::abs(traj.back().state.theta) < 1e-6);
    std::ostringstream os;
    write_pointer_csv(os, traj);
    CHECK(os.str().rfind("t,theta,theta_dot\n", 0) == 0);
}
