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

#include <cstddef>
#include <stdexcept>

#include "measchain/numerics/linalg.hpp"
#include "measchain/units.hpp"

namespace measchain::bath {

class BathError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Phonon heat bath seen by a conduction electron (hbar = k_B = 1).
struct BathSpec {
    double temperature = 1.0;
    double gamma = 1.0;  // coupling rate
    double mass = 0.25;  // electron mass; 1/(4 m T) = 1 makes lambda = 1

    void validate() const;
    /// Localization length hbar / sqrt(4 m k_B T).
    double lambda() const;
};

/// Uniform periodic 1D lattice. Point j sits at (j - points/2) * spacing, so
/// the origin is a grid point.
struct Grid {
    std::size_t points = 0;
    double spacing = 0.0;

    static Grid in_lambda_units(std::size_t points, double spacing_over_lambda, double lambda);

    double position(std::size_t j) const {
        return (static_cast<double>(j) - static_cast<double>(points / 2)) * spacing;
    }
    RealVector positions() const;
    double extent() const { return static_cast<double>(points) * spacing; }
    double min_position() const { return position(0); }
    double max_position() const { return position(points - 1); }
};

enum class ParticleKind { massive, massless };

struct ThermalScales {
    double wavelength;  // lambda_th
    double time;        // t_th
};

/// Thermal wavelength and thermal time at temperature T.
///
/// Massive particles: h / sqrt(2 pi m k_B T). Massless quasi-particles of
/// speed c: pi^(2/3) hbar c / (k_B T). The thermal time is hbar / (k_B T).
/// `mass` is ignored for massless particles and `speed` for massive ones.
ThermalScales thermal_scales(double temperature, double mass, ParticleKind kind, double speed,
                             const PhysicalConstants& units = PhysicalConstants::natural());

}  // namespace measchain::bath
