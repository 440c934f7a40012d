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

// Schroedinger equation with a self-generated potential,
//
//     i d(psi)/dt = (-1/(2m) d^2/dx^2 + V) psi,
//     dV/dt       = (V_target - V) / tau_V,   V_target = -g_f |psi|^2,
//
// integrated by Strang splitting: exact kinetic propagation in Fourier space
// around a potential kick. tau_V = 0 makes V follow |psi|^2 instantly, which
// gives the cubic nonlinear Schroedinger equation.

#include "measchain/bath/bath.hpp"
#include "measchain/numerics/linalg.hpp"

namespace measchain::bath {

struct FeedbackKernel {
    double strength = 0.0;         // g_f; positive is attractive
    double relaxation_time = 0.0;  // tau_V
    double mass = 0.25;

    void validate() const;
};

struct NlseResult {
    ComplexVector psi;
    RealVector potential;
    std::size_t steps = 0;
};

/// Evolves a normalized grid wave function (sqrt(dx) measure) for time t
/// with steps of at most dt. The potential starts at V_target unless
/// `initial_potential` is given.
NlseResult evolve_feedback_nlse(const ComplexVector& psi, const Grid& grid,
                                const FeedbackKernel& kernel, double t, double dt,
                                const RealVector* initial_potential = nullptr);

/// Width (standard deviation of |psi|^2) of a free Gaussian exp(-x^2/(2 w0^2))
/// after time t.
double free_gaussian_width(double w0, double mass, double t);

/// Norm-1 bright soliton width 2 / (m g_f) of the cubic equation.
double soliton_width(double mass, double strength);

}  // namespace measchain::bath
