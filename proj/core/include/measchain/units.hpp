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

#include <numbers>

namespace measchain {

// CODATA 2018 exact / recommended values (SI).
namespace si {
inline constexpr double kPlanck = 6.62607015e-34;  // J s
inline constexpr double kHbar = kPlanck / (2.0 * std::numbers::pi);
inline constexpr double kBoltzmann = 1.380649e-23;  // J/K
inline constexpr double kElectronMass = 9.1093837015e-31;  // kg
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
}  // namespace si

/// hbar and k_B of a unit system. Internal computations use natural().
struct PhysicalConstants {
    double hbar;
    double boltzmann;

    static constexpr PhysicalConstants natural() { return {1.0, 1.0}; }
    static constexpr PhysicalConstants si_units() { return {si::kHbar, si::kBoltzmann}; }

    double planck() const { return 2.0 * std::numbers::pi * hbar; }
};

}  // namespace measchain
