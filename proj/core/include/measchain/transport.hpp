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

// Homogeneous 1D Boltzmann equation for conduction electrons (hbar = 1,
// electron charge -e):
//
//     df/dt = e E df/dk + C[f]
//
// C is either the relaxation-time term -(f - f_eq)/tau or a one-branch
// acoustic-phonon collision integral. Steps are Strang split: half a
// collision step, an upwind advection step in k, another half collision.

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "measchain/numerics/linalg.hpp"

namespace measchain::transport {

class TransportError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Symmetric k-grid k_j = (j - (n - 1)/2) dk.
struct KGrid {
    std::size_t points = 128;
    double spacing = 0.1;

    double k(std::size_t j) const {
        return (static_cast<double>(j) - 0.5 * static_cast<double>(points - 1)) * spacing;
    }
    double k_max() const { return k(points - 1); }
};

struct DistributionFunction {
    KGrid grid;
    double mass = 1.0;
    RealVector f;

    double energy(std::size_t j) const;
    double velocity(std::size_t j) const;
    /// sum_j f_j dk
    double density() const;
    double mean_k() const;
    /// Mean velocity of the carriers.
    double drift_velocity() const;
    /// Charge current -e sum_j v_j f_j dk.
    double current(double charge = 1.0) const;
    void validate() const;
};

/// sigma = n e^2 tau / m.
double drude_conductivity(double density, double tau, double mass, double charge = 1.0);

RealVector fermi_dirac(const KGrid& grid, double mass, double temperature, double mu);

/// Chemical potential whose Fermi-Dirac distribution holds `density` on the grid.
double chemical_potential(const KGrid& grid, double mass, double temperature, double density);

DistributionFunction equilibrium(const KGrid& grid, double mass, double temperature,
                                 double density);

struct RtaParams {
    double field = 0.0;
    double tau = 1.0;
    double temperature = 1.0;
    double charge = 1.0;
};

/// Throws TransportError unless dt < tau/10 and e |E| dt <= dk.
void check_rta_step(const DistributionFunction& f, const RtaParams& p, double dt);

/// One Strang step of the relaxation-time equation. The equilibrium target
/// carries the current density, so density is conserved.
DistributionFunction step_boltzmann_rta(const DistributionFunction& f, const RtaParams& p,
                                        double dt);

/// Upwind transport by the field only, zero flux through the grid edges.
void advect(DistributionFunction& f, double field, double charge, double dt);

struct PhononBath {
    double sound_speed = 0.5;
    double temperature = 1.0;
    double w0 = 1.0;  // constant scattering strength

    /// Bose occupation of a phonon of energy omega.
    double occupation(double omega) const;
    void validate() const;
};

/// Pairs (j, l) connected by one phonon. Energy and momentum conservation
/// put k_l at +-2 m c_s - k_j, matched to the nearest grid bin.
struct PhononPair {
    std::size_t upper;  // higher-energy state
    std::size_t lower;
    double omega;       // energy difference, on-grid
};
std::vector<PhononPair> phonon_pairs(const KGrid& grid, double mass, double sound_speed);

/// Four-term collision integral: for every pair, emission from the upper
/// state W0 f_u (1 - f_l)(1 + g) and absorption W0 f_l (1 - f_u) g.
RealVector collision_integral_phonon(const DistributionFunction& f, const PhononBath& bath);

/// Field advection Strang-split with an RK4 collision step.
DistributionFunction step_boltzmann_phonon(const DistributionFunction& f, double field,
                                           const PhononBath& bath, double dt,
                                           double charge = 1.0);

struct SteadyState {
    DistributionFunction f;
    double time = 0.0;
    double current = 0.0;
    double drift_velocity = 0.0;
    double conductivity = 0.0;  // current / field
};

/// Runs the relaxation-time equation until the relative change of <k> per
/// relaxation time drops below `tol` or t_max is reached.
SteadyState rta_steady_state(const DistributionFunction& f0, const RtaParams& p, double dt,
                             double t_max, double tol = 1e-10);

struct CurrentFieldRow {
    double field;
    double current;
    double drift_velocity;
};

std::vector<CurrentFieldRow> current_field_table(const DistributionFunction& f0, RtaParams p,
                                                 const std::vector<double>& fields, double dt,
                                                 double t_max);

void write_current_field_csv(std::ostream& out, const std::vector<CurrentFieldRow>& rows);

}  // namespace measchain::transport
