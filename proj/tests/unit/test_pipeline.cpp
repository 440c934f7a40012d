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
#include <filesystem>
#include <fstream>

#include "measchain/pipeline/config.hpp"
#include "measchain/pipeline/pipeline.hpp"
#include "report_compare.hpp"

using namespace measchain::pipeline;
using nlohmann::json;

namespace {

const std::filesystem::path kSource = MEASCHAIN_SOURCE_DIR;

// Boltzmann constant and ln 2 typed in directly rather than taken from the
// library.
constexpr double kB = 1.380649e-23;
constexpr double kLn2 = 0.69314718055994530942;

PipelineConfig parse(const char* text) { return PipelineConfig::from_json(json::parse(text)); }

}  // namespace

TEST_CASE("config: unknown sections and keys are rejected") {
    CHECK_THROWS_WITH_AS(parse(R"({"bogus": {}})"), doctest::Contains("bogus"), ConfigError);
    CHECK_THROWS_WITH_AS(parse(R"({"bath": {"temprature": 1}})"), doctest::Contains("bath.temprature"),
                         ConfigError);
    CHECK_THROWS_AS(parse(R"({"bath": 3})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"bath": {"gamma": "fast"}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"([1, 2])"), ConfigError);
    CHECK_NOTHROW(parse("{}"));
}

TEST_CASE("config: every section is validated before running") {
    CHECK_THROWS_AS(parse(R"({"localization": {"spacing": 0.5}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"unraveling": {"scheme": "homodyne"}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"transport": {"model": "drude"}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"avalanche": {"cfl": 1.5}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"pointer": {"spring": 0}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"reporting": {"overhead": 0.5}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"unraveling": {"n_traj": -3}})"), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::load(kSource / "no-such-config.json"), ConfigError);
}

TEST_CASE("config: complex coupling accepts a number or [re, im]") {
    CHECK(parse(R"({"absorption": {"coupling": 0.5}})").absorption.coupling ==
          measchain::Complex(0.5, 0.0));
    CHECK(parse(R"({"absorption": {"coupling": [0.5, -0.25]}})").absorption.coupling ==
          measchain::Complex(0.5, -0.25));
    CHECK_THROWS_AS(parse(R"({"absorption": {"coupling": [1, 2, 3]}})"), ConfigError);
}

TEST_CASE("config: JSON round trip and hash") {
    const auto a = PipelineConfig::load(kSource / "configs" / "demo.json");
    const auto b = PipelineConfig::from_json(a.to_json());
    CHECK(a.to_json() == b.to_json());
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().size() == 16);

    auto c = a;
    c.reporting.out_dir = "/tmp/elsewhere";
    c.reporting.timing = true;
    c.unraveling.threads = 8;
    CHECK(c.hash() == a.hash());
    c.unraveling.master_seed += 1;
    CHECK(c.hash() != a.hash());
    auto d = a;
    d.bath.gamma *= 2.0;
    CHECK(d.hash() != a.hash());

    // Published FNV-1a 64 test vectors.
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("config: overrides") {
    json j = json::object();
    apply_override(j, "bath.gamma=2.5");
    apply_override(j, "unraveling.scheme=diffusive");
    apply_override(j, "absorption.coupling=[0.1,0.2]");
    const auto cfg = PipelineConfig::from_json(j);
    CHECK(cfg.bath.gamma == 2.5);
    CHECK(cfg.unraveling.scheme == "diffusive");
    CHECK(cfg.absorption.coupling == measchain::Complex(0.1, 0.2));
    CHECK_THROWS_AS(apply_override(j, "bath.gamma"), ConfigError);
    CHECK_THROWS_AS(apply_override(j, "gamma=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(j, "a.b.c=1"), ConfigError);
    apply_override(j, "bath.colour=red");
    CHECK_THROWS_AS(PipelineConfig::from_json(j), ConfigError);
}

TEST_CASE("ledger: Landauer bound, overhead and the 300 K single bit") {
    const auto l = reset_ledger(1.0, 1.0, 300.0, 1.0);
    CHECK(l.energy >= l.landauer_bound);
    CHECK(l.landauer_bound == doctest::Approx(kLn2).epsilon(1e-15));
    CHECK(l.energy_joule == doctest::Approx(kB * 300.0 * kLn2).epsilon(1e-14));
    CHECK(l.energy_joule == doctest::Approx(2.87e-21).epsilon(1e-3));
    const auto m = reset_ledger(3.0, 2.0, 77.0, 1.5);
    CHECK(m.landauer_bound == doctest::Approx(3.0 * 2.0 * kLn2));
    CHECK(m.energy == doctest::Approx(1.5 * m.landauer_bound));
    CHECK(m.energy_joule >= m.landauer_bound_joule);
    CHECK_THROWS_AS(reset_ledger(1.0, 1.0, 300.0, 0.9), ConfigError);
    CHECK_THROWS_AS(reset_ledger(-1.0, 1.0, 300.0, 1.0), ConfigError);
    CHECK_THROWS_AS(reset_ledger(1.0, 0.0, 300.0, 1.0), ConfigError);
}

TEST_CASE("pipeline: zero coupling never clicks and only re-arms") {
    const auto cfg = parse(R"({"absorption": {"coupling": 0.0}})");
    const auto r = run_pipeline(cfg);
    CHECK(r["outcome"] == "no_click");
    CHECK_FALSE(r["stages"].contains("avalanche"));
    CHECK_FALSE(r["stages"].contains("transport"));
    CHECK(r["stages"]["pointer"]["settled_angle"] == 0.0);
    CHECK(r["stages"]["pointer"]["detected"] == false);
    CHECK(r["stages"]["absorption"]["click_probability"] == 0.0);
    const auto& reset = r["stages"]["reset"];
    CHECK(reset["n_bits"] == 1.0);
    CHECK(reset["energy"].get<double>() >= reset["landauer_bound"].get<double>());
    CHECK(reset["energy_joule"].get<double>() == doctest::Approx(kB * 300.0 * kLn2).epsilon(1e-14));
}

TEST_CASE("pipeline: a certain click runs every stage in order") {
    const auto cfg = parse(R"({"localization": {"points": 64, "packet_center": 4.0},
                              "transport": {"field": 0.05},
                              "reporting": {"timing": true}})");
    const auto r = run_pipeline(cfg);
    CHECK(r["schema_version"] == kSchemaVersion);
    CHECK(r["config_hash"] == cfg.hash());
    CHECK(r["seed"] == cfg.unraveling.master_seed);
    REQUIRE(r["outcome"] == "click");
    const auto& s = r["stages"];
    for (const char* stage : {"absorption", "collapse", "transport", "avalanche", "pointer", "reset"}) {
        CHECK(s.contains(stage));
        CHECK(r["timing"].contains(stage));
    }
    CHECK(s["collapse"]["trapped"] == true);
    CHECK(s["transport"]["delivered_charge"] == 1.0);
    // The avalanche runs at the transport drift speed with a one-electron seed.
    CHECK(s["avalanche"]["v"].get<double>() ==
          doctest::Approx(std::abs(s["transport"]["drift_velocity"].get<double>())));
    CHECK(s["avalanche"]["seed_charge"] == 1.0);
    CHECK(s["avalanche"]["gain"].get<double>() > 1.0);
    const double settled = s["pointer"]["settled_angle"].get<double>();
    CHECK(settled > 0.0);
    const auto p = make_pointer_params(cfg);
    CHECK(settled == doctest::Approx(measchain::pointer::settled_angle(
                                         p, s["pointer"]["mean_current"].get<double>())));
    CHECK(s["pointer"]["detected"] == true);
}

TEST_CASE("pipeline: array runs count 1 + log2(M) bits") {
    const auto cfg = parse(R"({"absorption": {"mode": "array"}, "twoslit": {"pixels": 8},
                              "avalanche": {"v": 1.0}})");
    const auto r = run_pipeline(cfg);
    CHECK(r["stages"]["reset"]["n_bits"].get<double>() == doctest::Approx(4.0));
    CHECK(r["stages"]["absorption"]["pixels"] == 8);
    if (r["outcome"] == "click") {
        CHECK(r["stages"]["collapse"]["detector"].get<int>() < 8);
    }
    const auto fixed = parse(R"({"reporting": {"n_bits": 2.5}, "absorption": {"coupling": 0}})");
    CHECK(run_pipeline(fixed)["stages"]["reset"]["n_bits"] == 2.5);
}

TEST_CASE("pipeline: a failing stage reports its name and the partial report") {
    const auto cfg = parse(R"({"localization": {"points": 64, "packet_center": 4.0}, "transport": {"field": 0.0}})");
    try {
        (void)run_pipeline(cfg);
        FAIL("expected a stage error");
    } catch (const PipelineError& e) {
        CHECK(e.stage() == "avalanche");
        const auto& p = e.partial();
        CHECK(p["error"]["stage"] == "avalanche");
        CHECK(p["stages"].contains("absorption"));
        CHECK(p["stages"].contains("transport"));
        CHECK_FALSE(p["stages"].contains("reset"));
        CHECK(p["config_hash"] == cfg.hash());
    }
}

TEST_CASE("pipeline: without a bath the photon stays unresolved") {
    const auto cfg = parse(R"({"bath": {"gamma": 0.0}, "localization": {"points": 32, "packet_center": 2.0},
                              "unraveling": {"dt": 0.001}})");
    const auto r = run_pipeline(cfg);
    CHECK(r["outcome"] == "unresolved");
    CHECK(r["stages"]["pointer"]["settled_angle"] == 0.0);
    CHECK(r["stages"].contains("reset"));
}

TEST_CASE("pipeline: demo config reproduces the golden report") {
    const auto cfg = PipelineConfig::load(kSource / "configs" / "demo.json");
    const auto r = run_pipeline(cfg);
    std::ifstream in(kSource / "tests" / "golden" / "demo_pipeline.json");
    REQUIRE(in);
    const auto golden = json::parse(in);
    std::string where;
    const bool same = oracle::reports_close(r, golden, 1e-9, &where);
    INFO("first difference at ", where);
    CHECK(same);
    CHECK(run_pipeline(cfg) == r);
}

TEST_CASE("subcommands: absorb, avalanche, pointer and transport reports") {
    const auto cfg = PipelineConfig::load(kSource / "configs" / "demo.json");
    const auto a = run_absorb(cfg);
    CHECK(a["absorption"]["click_probability"].get<double>() == doctest::Approx(0.75).epsilon(1e-12));
    const auto t = run_transport(cfg);
    CHECK(t["transport"]["conductivity"].get<double>() ==
          doctest::Approx(t["transport"]["drude_conductivity"].get<double>()).epsilon(0.01));
    const auto v = run_avalanche(cfg);
    CHECK(v["avalanche"]["quiescent"] == true);
    CHECK(std::abs(v["avalanche"]["conservation_defect"].get<double>()) < 1e-6);
    const auto p = run_pointer(cfg);
    CHECK(p["pointer"]["settled"] == true);
    CHECK(std::abs(p["pointer"]["angle"].get<double>() - p["pointer"]["root"].get<double>()) < 1e-4);
}

TEST_CASE("scales: SI thermal wavelength and time for an electron at 300 K") {
    constexpr double h = 6.62607015e-34, me = 9.1093837015e-31;
    constexpr double pi = 3.14159265358979323846;
    const auto j = thermal_scales_report(300.0, me, false, 0.0);
    const double lambda = h / std::sqrt(2.0 * pi * me * kB * 300.0);
    const double time = h / (2.0 * pi) / (kB * 300.0);
    CHECK(j["thermal_wavelength_m"].get<double>() == doctest::Approx(lambda).epsilon(1e-12));
    CHECK(j["thermal_time_s"].get<double>() == doctest::Approx(time).epsilon(1e-12));
    CHECK(j["thermal_wavelength_m"].get<double>() == doctest::Approx(4.3e-9).epsilon(0.02));
    CHECK(j["thermal_time_s"].get<double>() == doctest::Approx(2.5e-14).epsilon(0.02));
    CHECK(j["landauer_bound_joule"].get<double>() == doctest::Approx(kB * 300.0 * kLn2));
}
