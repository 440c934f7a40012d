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

// Photon absorption as effective two-level dynamics.
//
// The photon-detector state is alpha |1_k, g...g> + sum_n beta_n |0, e_n>.
// With energy conservation imposed and the momentum sum collapsed into one
// effective amplitude per site, the amplitudes obey (hbar = 1)
//
//     i d(alpha)/dt  = sum_n conj(gt_n) beta_n
//     i d(beta_n)/dt = gt_n alpha
//
// where gt_n = sqrt(N) g_n is the collective coupling of the N equivalent
// electrons at site n.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "measchain/numerics/linalg.hpp"

namespace measchain::absorption {

class AbsorptionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct AmplitudeState {
    Complex alpha{1.0, 0.0};
    std::vector<Complex> betas;  // one collective amplitude per detector site

    double norm_squared() const;
    /// Click weights |beta_n|^2.
    std::vector<double> click_weights() const;
    double no_click_probability() const { return std::norm(alpha); }
};

/// Photon present, every electron bound.
AmplitudeState ground_state(std::size_t sites);

struct CouplingModel {
    std::vector<Complex> g_site;  // per-electron coupling at each site (energy)
    std::size_t electrons_per_site = 1;
    double tau = 0.0;  // interaction window
    // Report metadata only; energy conservation removes them from the dynamics.
    double omega_k = 0.0;
    double eps_g = 0.0;
    double eps_e = 0.0;

    static CouplingModel single(Complex g, double tau);
    static CouplingModel equivalent_electrons(Complex g, std::size_t n_electrons, double tau);
    /// Couplings proportional to the photon amplitude at each site,
    /// g_n = scale * amplitude_n.
    static CouplingModel detector_array(std::span<const Complex> amplitudes, Complex scale,
                                        std::size_t n_electrons, double tau);

    std::size_t sites() const { return g_site.size(); }
    /// Collective couplings sqrt(N) g_n.
    std::vector<Complex> g_tilde() const;
    /// sqrt(sum_n |gt_n|^2), the coupling of the equivalent single site.
    double aggregate_strength() const;
};

/// One electron, one site. Requires a normalized state and exactly one site.
AmplitudeState evolve_two_level(const AmplitudeState& state, const CouplingModel& coupling,
                                double t);

/// N equivalent electrons at one site, evolved as a single electron with
/// coupling sqrt(N) g. The returned beta is the collective amplitude.
AmplitudeState evolve_equivalent_electrons(const AmplitudeState& state,
                                           const CouplingModel& coupling, double t);

/// M detector sites sharing one photon. Negative t integrates backwards.
AmplitudeState evolve_detector_array(const AmplitudeState& state, const CouplingModel& coupling,
                                     double t);

/// Per-electron amplitude beta_tilde / sqrt(N), with the position phase
/// average absorbed into beta_tilde.
Complex per_electron_beta(Complex beta_tilde, std::size_t n_electrons);

}  // namespace measchain::absorption
