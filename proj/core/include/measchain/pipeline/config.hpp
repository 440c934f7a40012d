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

#pragma once

// Pipeline configuration. The file is JSON with one object per section;
// every section and key is optional and falls back to the defaults below,
// but unknown sections or keys are errors. Lengths on the localization grid
// are in units of lambda, times in units of the thermal time 1/T.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "measchain/numerics/linalg.hpp"

namespace measchain::pipeline {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct BathConfig {
    double temperature = 1.0;
    double gamma = 1.0;
    double mass = 0.25;
    double temperature_kelvin = 300.0;  // physical temperature for SI reporting
};

struct AbsorptionConfig {
    std::string mode = "single";  // single | array
    Complex coupling{1.5707963267948966, 0.0};  // per-electron g
    std::uint64_t electrons = 1;
    double tau = 1.0;
    double omega_k = 0.0;
    double eps_g = 0.0;
    double eps_e = 0.0;
};

struct LocalizationConfig {
    std::uint64_t points = 128;
    double spacing = 0.25;        // dx / lambda
    double packet_center = 8.0;   // x0 / lambda
    double packet_momentum = 0.0;  // k0 lambda
    double packet_width = 1.0;    // w / lambda
    bool kinetic = true;
    int derivative_order = 8;
};

struct UnravelingConfig {
    std::string scheme = "jump";
    double dt = 0.0;  // 0 selects 0.02 / (gamma <A^dagger A>)
    double horizon_decoherence_times = 10.0;
    std::uint64_t n_traj = 1000;
    std::uint64_t master_seed = 42;
    unsigned threads = 1;
    std::uint64_t record_every = 10;
};

struct TwoSlitConfig {
    double slit_separation = 1e-4;
    double slit_width = 2e-5;
    double screen_distance = 1.0;
    double wavelength = 5e-7;
    std::uint64_t pixels = 16;
    double half_width = 0.0;  // 0 selects lambda_ph L / a, the first envelope zero
    std::vector<Complex> amplitudes;  // overrides the slit model when set
    std::vector<double> positions;
    std::uint64_t photons = 100000;
    double dt_gamma = 0.05;
    double horizon_decoherence_times = 20.0;
};

struct TransportConfig {
    std::string model = "rta";  // rta | phonon
    double tau = 1.0;
    double field = 0.01;
    double density = 1.0;
    std::uint64_t points = 128;
    double k_spacing = 0.1;
    std::optional<double> mass;         // defaults to bath.mass
    std::optional<double> temperature;  // defaults to bath.temperature
    double dt = 0.0;     // 0 selects tau / 50 (rta) or 0.01 / w0 (phonon)
    double t_max = 40.0;  // in units of tau
    double w0 = 1.0;
    double sound_speed = 0.5;
    std::vector<double> sweep_fields;
};

struct AvalancheConfig {
    std::optional<double> v;  // defaults to the transport drift speed
    double alpha_rate = 1.2e-3;
    double bound_density = 100.0;
    double length = 1.0;
    std::uint64_t cells = 200;
    double seed_width = 0.01;
    double seed_position = 0.05;
    double cfl = 1.0;
    double quiescence = 1e-12;
};

struct PointerConfig {
    double inertia = 1.0;
    double turns = 1.0;
    double coil_area = 1e-2;
    double field = 1.0;
    double damping = 1.0;
    double spring = 1.0;
    double threshold = 1e-4;  // detection flag on the peak angle
    double tail_damping_times = 20.0;
    double current = 0.1;  // constant drive for the standalone pointer command
};

struct ReportingConfig {
    std::string out_dir;
    bool dump_trajectories = false;
    bool dump_fields = false;
    std::optional<double> n_bits;
    double overhead = 1.0;
    bool timing = false;
};

struct PipelineConfig {
    BathConfig bath;
    AbsorptionConfig absorption;
    LocalizationConfig localization;
    UnravelingConfig unraveling;
    TwoSlitConfig twoslit;
    TransportConfig transport;
    AvalancheConfig avalanche;
    PointerConfig pointer;
    ReportingConfig reporting;

    /// Parses and validates; throws ConfigError naming the offending key.
    static PipelineConfig from_json(const nlohmann::json& j);
    static PipelineConfig load(const std::filesystem::path& path);

    nlohmann::json to_json() const;
    void validate() const;
    /// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
    std::string hash() const;
};

/// Applies "section.key=value" to a JSON config. The value is read as JSON
/// when it parses, otherwise as a string.
void apply_override(nlohmann::json& config, const std::string& assignment);

std::uint64_t fnv1a64(const std::string& data);

}  // namespace measchain::pipeline
