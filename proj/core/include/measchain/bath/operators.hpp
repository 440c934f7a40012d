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

// Grid operators. Wave functions on the grid carry the sqrt(dx) measure, so
// a normalized packet has sum_j |psi_j|^2 = 1 and psi(x_j) = psi_j / sqrt(dx).

#include "measchain/bath/bath.hpp"
#include "measchain/numerics/linalg.hpp"

namespace measchain::bath {

/// Periodic central-difference first derivative of even order 2, 4, 6 or 8.
SparseComplexMatrix derivative_matrix(const Grid& grid, int order);

/// -(1/2m) d^2/dx^2 with the periodic 3-point stencil.
SparseComplexMatrix kinetic_matrix(const Grid& grid, double mass);

/// Diagonal position operator.
SparseComplexMatrix position_matrix(const Grid& grid);

/// exp(-(x - x0)^2 / (2 w^2) + i k x), normalized on the grid.
ComplexVector gaussian_packet(const Grid& grid, double x0, double k, double width);

/// Bath localization operator A = x / lambda + lambda d/dx.
///
/// Its eigenfunctions are width-lambda Gaussians with eigenvalue
/// x0 / lambda + i k lambda. A^dagger A = 2 b^dagger b for the oscillator
/// ladder operator b centred on the grid origin.
class LocalizationOperator {
  public:
    LocalizationOperator(const Grid& grid, double lambda, int derivative_order = 8);

    const SparseComplexMatrix& matrix() const { return a_; }
    const SparseComplexMatrix& adjoint_product() const { return ata_; }
    double lambda() const { return lambda_; }
    int derivative_order() const { return order_; }

    ComplexVector apply(const ComplexVector& psi) const;
    /// <psi|A^dagger A|psi> / <psi|psi>.
    double expectation_ata(const ComplexVector& psi) const;

  private:
    double lambda_;
    int order_;
    SparseComplexMatrix a_;
    SparseComplexMatrix ata_;
};

/// Centroid and standard deviation of |psi|^2 on the grid (no wrapping).
struct PacketMoments {
    double centroid;
    double width;
};
PacketMoments packet_moments(const ComplexVector& psi, const Grid& grid);

/// Weight of |psi|^2 within `margin` of either grid edge.
double edge_weight(const ComplexVector& psi, const Grid& grid, double margin);

}  // namespace measchain::bath
