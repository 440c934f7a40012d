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

// Command-line front end. Every subcommand prints one JSON report on
// stdout. Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "measchain/pipeline/config.hpp"
#include "measchain/pipeline/pipeline.hpp"
#include "measchain/units.hpp"

namespace {

using nlohmann::json;
namespace mp = measchain::pipeline;

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct CommonFlags {
    std::string config;
    std::vector<std::string> sets;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> scheme;
    bool timing = false;
    std::optional<std::uint64_t> photons;
    std::optional<std::uint64_t> n_traj;
    bool dump_trajectories = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "JSON configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--set", f.sets, "Override a setting, section.key=value (repeatable)");
    cmd->add_option("--out-dir", f.out_dir, "Directory for CSV artifacts")->envname("MEASCHAIN_OUT_DIR");
    cmd->add_option("--seed", f.seed, "Master seed");
    cmd->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--scheme", f.scheme, "Unraveling scheme")
        ->check(CLI::IsMember({"jump", "diffusive"}));
    cmd->add_flag("--timing", f.timing, "Include per-stage wall times");
}

mp::PipelineConfig build_config(const CommonFlags& f) {
    json j = json::object();
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in) throw mp::ConfigError("cannot open config file '" + f.config + "'");
        j = json::parse(in, nullptr, false);
        if (j.is_discarded()) throw mp::ConfigError("config file '" + f.config + "' is not valid JSON");
    }
    for (const auto& s : f.sets) mp::apply_override(j, s);
    auto set = [&](const char* section, const char* key, json v) {
        if (!j.contains(section) || j[section].is_null()) j[section] = json::object();
        if (!j[section].is_object()) throw mp::ConfigError(std::string("section '") + section + "' is not an object");
        j[section][key] = std::move(v);
    };
    if (!f.out_dir.empty()) set("reporting", "out_dir", f.out_dir);
    if (f.seed) set("unraveling", "master_seed", *f.seed);
    if (f.threads) set("unraveling", "threads", *f.threads);
    if (f.scheme) set("unraveling", "scheme", *f.scheme);
    if (f.timing) set("reporting", "timing", true);
    if (f.photons) set("twoslit", "photons", *f.photons);
    if (f.n_traj) set("unraveling", "n_traj", *f.n_traj);
    if (f.dump_trajectories) set("reporting", "dump_trajectories", true);
    return mp::PipelineConfig::from_json(j);
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"measchain: photon detection chain simulator"};
    app.require_subcommand(1);
    CommonFlags flags;

    auto* absorb = app.add_subcommand("absorb", "Photon absorption amplitudes");
    auto* collapse = app.add_subcommand("collapse", "Trajectory ensemble on the localization grid");
    auto* twoslit = app.add_subcommand("twoslit", "Two-slit click statistics on a detector array");
    auto* transport = app.add_subcommand("transport", "Boltzmann steady state and conductivity");
    auto* avalanche = app.add_subcommand("avalanche", "Avalanche gain for a one-electron seed");
    auto* pointer = app.add_subcommand("pointer", "Ammeter settling under a constant current");
    auto* pipeline = app.add_subcommand("pipeline", "Full chain for one photon");
    auto* scales = app.add_subcommand("scales", "Thermal wavelength and time in SI units");

    for (auto* cmd : {absorb, collapse, twoslit, transport, avalanche, pointer, pipeline}) {
        add_common(cmd, flags);
    }
    collapse->add_option("--n-traj", flags.n_traj, "Number of trajectories");
    collapse->add_flag("--dump-trajectories", flags.dump_trajectories,
                       "Write one CSV per trajectory under --out-dir");
    pipeline->add_flag("--dump-trajectories", flags.dump_trajectories,
                       "Write the collapse trajectory under --out-dir");
    twoslit->add_option("--photons", flags.photons, "Number of photons");

    double t_kelvin = 300.0;
    std::string mass = "electron";
    bool massless = false;
    double speed = measchain::si::kSpeedOfLight;
    scales->add_option("--T-kelvin", t_kelvin, "Temperature in kelvin")->check(CLI::PositiveNumber);
    scales->add_option("--mass", mass, "'electron' or a mass in kg");
    scales->add_flag("--massless", massless, "Massless carrier moving at --speed");
    scales->add_option("--speed", speed, "Carrier speed in m/s")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    if (*scales) {
        double m = measchain::si::kElectronMass;
        if (mass != "electron") {
            try {
                std::size_t used = 0;
                m = std::stod(mass, &used);
                if (used != mass.size() || !(m > 0.0)) throw std::invalid_argument(mass);
            } catch (const std::exception&) {
                std::cerr << "error: --mass must be 'electron' or a positive number\n";
                return kConfigError;
            }
        }
        try {
            print(mp::thermal_scales_report(t_kelvin, m, massless, speed));
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kRuntimeError;
        }
        return 0;
    }

    mp::PipelineConfig cfg;
    try {
        cfg = build_config(flags);
    } catch (const mp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (*absorb) print(mp::run_absorb(cfg));
        if (*collapse) print(mp::run_collapse(cfg));
        if (*twoslit) print(mp::run_twoslit(cfg));
        if (*transport) print(mp::run_transport(cfg));
        if (*avalanche) print(mp::run_avalanche(cfg));
        if (*pointer) print(mp::run_pointer(cfg));
        if (*pipeline) print(mp::run_pipeline(cfg));
    } catch (const mp::PipelineError& e) {
        print(e.partial());
        std::cerr << "error in stage " << e.stage() << ": " << e.what() << '\n';
        return kRuntimeError;
    } catch (const mp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return 0;
}
