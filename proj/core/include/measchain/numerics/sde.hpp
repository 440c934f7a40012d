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

#include <cmath>
#include <span>
#include <stdexcept>

#include "measchain/numerics/linalg.hpp"
#include "measchain/numerics/rng.hpp"

namespace measchain {

/// Complex Wiener increment with E|dW|^2 = dt and E dW^2 = 0.
inline Complex complex_wiener_increment(RngStream& rng, double dt) {
    return std::sqrt(dt) * rng.complex_normal();
}

/// Real Wiener increment with E dW^2 = dt.
inline double wiener_increment(RngStream& rng, double dt) {
    return std::sqrt(dt) * rng.normal();
}

/// Euler-Maruyama update y + a dt + sum_k b_k dW_k.
template <class State>
State euler_maruyama_step(const State& y, const State& drift, std::span<const State> diffusion,
                          std::span<const Complex> increments, double dt) {
    if (diffusion.size() != increments.size()) {
        throw DimensionError("euler_maruyama_step: one increment per diffusion term required");
    }
    State out = y + dt * drift;
    for (std::size_t k = 0; k < diffusion.size(); ++k) {
        require_same_shape(out, diffusion[k], "euler_maruyama_step");
        out += increments[k] * diffusion[k];
    }
    return out;
}

}  // namespace measchain
