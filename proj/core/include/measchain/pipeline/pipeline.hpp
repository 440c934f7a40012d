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

// End-to-end measurement chain: absorption, collapse, transport, avalanche,
// pointer and the reset ledger. Each stage also runs on its own for the
// command-line subcommands. Reports are JSON.

#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "measchain/avalanche.hpp"
#include "measchain/bath/hybrid.hpp"
#include "measchain/pipeline/config.hpp"
#include "measchain/pointer.hpp"
#include "measchain/transport.hpp"
#include "measchain/twoslit.hpp"

namespace measchain::pipeline {

inline constexpr const char* kSchemaVersion = "1.0";

/// A stage failed. `partial` holds the report up to and including the
/// failing stage's error entry.
class PipelineError : public std::runtime_error {
  public:
    PipelineError(std::string stage, const std::string& message, nlohmann::json partial)
        : std::runtime_error(stage + ": " + message),
          stage_(std::move(stage)),
          partial_(std::move(partial)) {}
    const std::string& stage() const { return stage_; }
    const nlohmann::json& partial() const { return partial_; }

  private:
    std::string stage_;
    nlohmann::json partial_;
};

/// Erasure cost of re-arming the detector.
struct ResetLedger {
    double n_bits = 1.0;
    double overhead = 1.0;
    double energy = 0.0;          // internal units, n_bits T ln 2 overhead
    double landauer_bound = 0.0;  // internal units, n_bits T ln 2
    double energy_joule = 0.0;
    double landauer_bound_joule = 0.0;
};

ResetLedger reset_ledger(double n_bits, double temperature, double temperature_kelvin,
                         double overhead);

/// Spatial collapse model and the post-absorption state alpha|g> + beta|packet>.
struct CollapseSetup {
    bath::HybridModel model;
    ComplexVector initial;
    unraveling::TrajectoryOptions trajectory;
    unraveling::Scheme scheme = unraveling::Scheme::jump;
    double decoherence_time = 0.0;
};

CollapseSetup make_collapse_setup(const PipelineConfig& cfg, Complex alpha, Complex beta);

twoslit::DetectorArray make_detector_array(const PipelineConfig& cfg);
twoslit::ExperimentSettings make_experiment_settings(const PipelineConfig& cfg);

transport::DistributionFunction make_transport_equilibrium(const PipelineConfig& cfg);
/// Steady drift under the configured field. The phonon model runs to t_max.
transport::SteadyState transport_steady_state(const PipelineConfig& cfg);

pointer::PointerParams make_pointer_params(const PipelineConfig& cfg);

/// Report header: schema version, config hash and seed.
nlohmann::json report_header(const PipelineConfig& cfg);

nlohmann::json run_absorb(const PipelineConfig& cfg);
/// Trajectory ensemble on the localization grid.
nlohmann::json run_collapse(const PipelineConfig& cfg);
nlohmann::json run_twoslit(const PipelineConfig& cfg);
nlohmann::json run_transport(const PipelineConfig& cfg);
nlohmann::json run_avalanche(const PipelineConfig& cfg);
nlohmann::json run_pointer(const PipelineConfig& cfg);
/// The full chain for one photon. Throws PipelineError on a stage failure.
nlohmann::json run_pipeline(const PipelineConfig& cfg);

/// Thermal wavelength and time in SI units. `mass_kg` is ignored for
/// massless carriers, `speed` for massive ones.
nlohmann::json thermal_scales_report(double temperature_kelvin, double mass_kg, bool massless,
                                     double speed);

}  // namespace measchain::pipeline
