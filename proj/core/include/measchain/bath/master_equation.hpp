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

// Lindblad evolution on the hybrid space (hbar = 1):
//
//     d(rho)/dt = -i K rho + i rho K^dagger + gamma sum_b A_b rho A_b^dagger
//
// with K = H - (i gamma / 2) A^dagger A on every sector and K|g> = 0. On a
// sector block this is the usual commutator plus dissipator. The interference
// blocks <g|rho|e> and <e_b|rho|e_c> only feel the anticommutator part and
// the free Hamiltonian, so their norm can only shrink, while every block
// trace is conserved.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <vector>

#include "measchain/bath/hybrid.hpp"
#include "measchain/numerics/linalg.hpp"

namespace measchain::bath {

/// Time derivative of rho. Assumes rho is Hermitian.
ComplexMatrix master_derivative(const HybridModel& model, const ComplexMatrix& rho);

/// Same as master_derivative, wrapped with the block metadata of `rho`.
HybridDensityMatrix dissipator(const HybridDensityMatrix& rho, const HybridModel& model);

/// 1 / (gamma <A^dagger A>), the average taken over the excited sectors of
/// rho. Zero when rho has no excited population; infinite when gamma = 0.
double decoherence_time(const HybridModel& model, const HybridDensityMatrix& rho);

struct MasterOptions {
    double tol = 1e-10;
    std::size_t samples = 2;  // equally spaced snapshots including both ends
    bool track_eigenvalues = false;
    bool track_coherence = false;  // interference norm after every accepted step
    double boundary_fraction = 1.0 / 16.0;  // edge band, as a fraction of the extent
    double boundary_weight = 1e-6;
};

struct MasterSnapshot {
    double t = 0.0;
    double trace = 0.0;
    std::vector<double> populations;
    double interference_norm = 0.0;
    double min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    RealVector density;  // continuum density of sector 1 (grid models only)
};

struct MasterResult {
    HybridDensityMatrix rho;
    std::vector<MasterSnapshot> snapshots;
    std::vector<std::pair<double, double>> coherence;  // (t, interference norm)
    double decoherence_time = 0.0;
    bool boundary_touched = false;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
};

/// Integrates the master equation over [0, t] with adaptive Dormand-Prince.
/// Throws StepSizeUnderflow when the integrator fails.
MasterResult evolve_master(const HybridDensityMatrix& rho, const HybridModel& model, double t,
                           const MasterOptions& options = {});

/// CSV: t, trace, rho_gg, interference_norm, then the sector-1 density at
/// every grid point (header names carry the positions).
void write_snapshots_csv(std::ostream& out, const MasterResult& result);

}  // namespace measchain::bath
