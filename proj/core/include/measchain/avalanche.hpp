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

// Impact multiplication along a 1D drift region [0, L]:
//
//     dn_e/dt = -v dn_e/dz + alpha n_e n_b
//     dn_b/dt = -alpha n_e n_b
//
// Densities are per unit length, so alpha_rate has units length / time.
// First-order upwind advection Strang-split with a reaction step that solves
// the local logistic equation exactly; the same reaction amount leaves n_b
// and enters n_e, which makes charge bookkeeping exact up to rounding.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "measchain/numerics/linalg.hpp"

namespace measchain::avalanche {

class AvalancheError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct AvalancheState {
    double length = 1.0;
    double v = 1.0;
    double alpha_rate = 0.0;
    RealVector n_e;  // cell averages, cell i centred at (i + 1/2) dz
    RealVector n_b;
    double inflow = 0.0;  // n_e(0, t)

    std::size_t cells() const { return static_cast<std::size_t>(n_e.size()); }
    double dz() const { return length / static_cast<double>(n_e.size()); }
    double z(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dz(); }
    double excited_charge() const { return n_e.sum() * dz(); }
    double bound_charge() const { return n_b.sum() * dz(); }
    void validate() const;
};

/// Uniform bound density and a Gaussian seed of total charge `seed_charge`
/// centred at z0.
AvalancheState make_state(std::size_t cells, double length, double v, double alpha_rate,
                          double bound_density, double seed_charge, double z0, double width);

struct StepReport {
    double outflow = 0.0;   // charge leaving at z = L during the step
    double inflow = 0.0;    // charge entering at z = 0
    double consumed = 0.0;  // bound charge converted
    std::size_t clamps = 0;  // cells where the reaction was limited by n_b
};

/// Reaction alone over dt in every cell (no transport). Conserves
/// n_e + n_b cell by cell.
AvalancheState react(const AvalancheState& s, double dt, StepReport* report = nullptr);

/// One Strang step: react dt/2, upwind advection over dt, react dt/2.
/// Throws on a CFL violation v dt / dz > 1.
AvalancheState step_avalanche(const AvalancheState& s, double dt, StepReport* report = nullptr);

struct AvalancheOptions {
    double cfl = 1.0;  // v dt / dz
    double t_max = 0.0;  // 0 selects 50 transit times
    double quiescence = 1e-12;  // remaining excited charge relative to the seed
    std::size_t record_every = 1;
    bool dump_fields = false;
};

struct AvalancheRun {
    AvalancheState final_state;
    double dt = 0.0;
    double seed_charge = 0.0;
    double initial_bound_charge = 0.0;
    double injected = 0.0;
    double exited = 0.0;
    double consumed = 0.0;
    std::size_t clamp_events = 0;
    std::size_t steps = 0;
    bool quiescent = false;
    std::vector<double> times;    // waveform time base
    std::vector<double> current;  // outflow charge per unit time
    struct Field {
        double t;
        RealVector n_e, n_b;
    };
    std::vector<Field> fields;

    /// (seed + injected + consumed) - (exited + remaining), relative to the seed.
    double conservation_defect() const;
};

AvalancheRun run_avalanche(const AvalancheState& initial, const AvalancheOptions& options = {});

/// Exited charge over seed charge. Throws unless the run reached quiescence.
double gain(const AvalancheRun& run);

/// exp(alpha n_b d / v), the small-signal gain over drift distance d.
double linear_gain(double alpha_rate, double bound_density, double distance, double v);

/// CSV: t, current.
void write_waveform_csv(std::ostream& out, const AvalancheRun& run);
/// CSV: t, z, n_e, n_b.
void write_fields_csv(std::ostream& out, const AvalancheRun& run);

}  // namespace measchain::avalanche
