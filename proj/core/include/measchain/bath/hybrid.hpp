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

// Hybrid Hilbert space: one bound level |g> plus K identical excited sectors
// of dimension d. Index 0 is |g>; sector b (1-based) occupies indices
// 1 + (b-1) d ... b d. The bath couples to each sector through its own copy
// of the sector jump operator A and leaves |g> alone.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "measchain/bath/bath.hpp"
#include "measchain/bath/operators.hpp"
#include "measchain/numerics/linalg.hpp"

namespace measchain::bath {

struct HybridModel {
    SparseComplexMatrix h;    // sector Hamiltonian (d x d)
    SparseComplexMatrix a;    // sector jump operator (d x d)
    SparseComplexMatrix ata;  // a^dagger a
    double gamma = 0.0;
    std::size_t sectors = 1;
    std::optional<Grid> grid;  // set for spatial models

    /// Conduction electron on `grid`: A = x/lambda + lambda d/dx and, when
    /// `kinetic` is set, the free kinetic Hamiltonian. Rejects dx > lambda/4.
    static HybridModel spatial(const BathSpec& bath, const Grid& grid, bool kinetic = true,
                               int derivative_order = 8);
    /// K one-dimensional sectors with A = jump_amplitude and H = energy.
    static HybridModel scalar(double gamma, std::size_t sectors, Complex jump_amplitude = 1.0,
                              double energy = 0.0);

    Eigen::Index sector_dim() const { return a.rows(); }
    Eigen::Index dim() const { return 1 + static_cast<Eigen::Index>(sectors) * sector_dim(); }
    /// First index of sector b (1-based).
    Eigen::Index offset(std::size_t b) const {
        return 1 + static_cast<Eigen::Index>(b - 1) * sector_dim();
    }

    /// H - (i gamma / 2) A^dagger A on every sector, zero on |g>.
    SparseComplexMatrix effective_hamiltonian() const;
    /// Full Hamiltonian on the hybrid space.
    SparseComplexMatrix full_hamiltonian() const;
    /// Jump operator of sector b embedded in the hybrid space.
    SparseComplexMatrix full_jump(std::size_t b) const;

    void validate() const;
};

/// alpha |g> + sum_b betas[b] |phi_b>, with each phi_b normalized first.
ComplexVector hybrid_superposition(const HybridModel& model, Complex alpha,
                                   std::span<const Complex> betas,
                                   std::span<const ComplexVector> sector_states);

/// Populations of |g> and of each sector; entry 0 is the ground level.
std::vector<double> block_populations(const HybridModel& model, const ComplexVector& psi);

/// Density matrix on the hybrid space with block accessors.
///
/// Grid amplitudes carry the sqrt(dx) measure, so the continuum trace
/// rho_gg + sum_x rho_ee(x,x) dx equals the plain matrix trace.
class HybridDensityMatrix {
  public:
    HybridDensityMatrix(ComplexMatrix rho, std::size_t sectors, std::optional<Grid> grid = {});
    static HybridDensityMatrix pure(const HybridModel& model, const ComplexVector& psi);

    const ComplexMatrix& matrix() const { return rho_; }
    ComplexMatrix& matrix() { return rho_; }
    std::size_t sectors() const { return sectors_; }
    Eigen::Index sector_dim() const { return d_; }
    Eigen::Index dim() const { return rho_.rows(); }
    const std::optional<Grid>& grid() const { return grid_; }

    double rho_gg() const { return rho_(0, 0).real(); }
    /// Row block <g| rho |sector b>.
    ComplexVector rho_ge(std::size_t b = 1) const;
    ComplexMatrix rho_ee(std::size_t b = 1) const;
    /// Continuum density rho_ee(x, x) / dx on the grid (sector b).
    RealVector density(std::size_t b = 1) const;

    double trace() const { return rho_.trace().real(); }
    /// Entry 0 is rho_gg; entry b the trace of sector block b.
    std::vector<double> block_populations() const;
    /// Frobenius norm of all off-diagonal blocks, each pair counted once.
    double interference_norm() const;
    /// Smallest eigenvalue of the full matrix.
    double min_eigenvalue() const;
    /// Smallest eigenvalue of the sector-b block.
    double min_eigenvalue_ee(std::size_t b = 1) const;
    /// Throws BathError on a trace, hermiticity or diagonal-sign violation.
    void check_invariants(double trace_tol = 1e-8, double herm_tol = 1e-10,
                          double diag_tol = 1e-10) const;

  private:
    ComplexMatrix rho_;
    std::size_t sectors_;
    Eigen::Index d_;
    std::optional<Grid> grid_;
};

/// Distance of rho from the block-diagonal manifold.
inline double blockdiag_distance(const HybridDensityMatrix& rho) { return rho.interference_norm(); }

}  // namespace measchain::bath
