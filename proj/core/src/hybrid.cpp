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

#include "measchain/bath/hybrid.hpp"

#include <cmath>
#include <string>

namespace measchain::bath {

namespace {

SparseComplexMatrix embed_sectors(const SparseComplexMatrix& block, std::size_t sectors,
                                  std::size_t only_sector) {
    const Eigen::Index d = block.rows();
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(sectors) * d;
    std::vector<Eigen::Triplet<Complex>> entries;
    entries.reserve(static_cast<std::size_t>(block.nonZeros()) * sectors);
    for (std::size_t b = 1; b <= sectors; ++b) {
        if (only_sector != 0 && b != only_sector) continue;
        const Eigen::Index off = 1 + static_cast<Eigen::Index>(b - 1) * d;
        for (Eigen::Index k = 0; k < block.outerSize(); ++k) {
            for (SparseComplexMatrix::InnerIterator it(block, k); it; ++it) {
                entries.emplace_back(off + it.row(), off + it.col(), it.value());
            }
        }
    }
    SparseComplexMatrix out(n, n);
    out.setFromTriplets(entries.begin(), entries.end());
    return out;
}

}  // namespace

HybridModel HybridModel::spatial(const BathSpec& bath, const Grid& grid, bool kinetic,
                                 int derivative_order) {
    bath.validate();
    const double lambda = bath.lambda();
    if (grid.spacing > lambda / 4.0 * (1.0 + 1e-12)) {
        throw BathError("grid too coarse: dx = " + std::to_string(grid.spacing) +
                        " exceeds lambda/4 = " + std::to_string(lambda / 4.0));
    }
    HybridModel m;
    const LocalizationOperator loc(grid, lambda, derivative_order);
    m.a = loc.matrix();
    m.ata = loc.adjoint_product();
    const auto n = static_cast<Eigen::Index>(grid.points);
    m.h = kinetic ? kinetic_matrix(grid, bath.mass) : SparseComplexMatrix(n, n);
    m.gamma = bath.gamma;
    m.sectors = 1;
    m.grid = grid;
    return m;
}

HybridModel HybridModel::scalar(double gamma, std::size_t sectors, Complex jump_amplitude,
                                double energy) {
    HybridModel m;
    m.a.resize(1, 1);
    m.a.insert(0, 0) = jump_amplitude;
    m.ata.resize(1, 1);
    m.ata.insert(0, 0) = std::norm(jump_amplitude);
    m.h.resize(1, 1);
    if (energy != 0.0) m.h.insert(0, 0) = energy;
    m.gamma = gamma;
    m.sectors = sectors;
    m.validate();
    return m;
}

void HybridModel::validate() const {
    if (!(gamma >= 0.0)) throw BathError("gamma must be non-negative");
    if (sectors == 0) throw BathError("hybrid model needs at least one excited sector");
    if (a.rows() == 0 || a.rows() != a.cols()) throw BathError("jump operator must be square");
    if (h.rows() != a.rows() || h.cols() != a.cols() || ata.rows() != a.rows()) {
        throw DimensionError("hybrid model: H, A and A^dagger A differ in shape");
    }
}

SparseComplexMatrix HybridModel::effective_hamiltonian() const {
    const SparseComplexMatrix k = h - Complex(0.0, 0.5 * gamma) * ata;
    return embed_sectors(k, sectors, 0);
}

SparseComplexMatrix HybridModel::full_hamiltonian() const { return embed_sectors(h, sectors, 0); }

SparseComplexMatrix HybridModel::full_jump(std::size_t b) const {
    if (b == 0 || b > sectors) throw BathError("jump channel out of range");
    return embed_sectors(a, sectors, b);
}

ComplexVector hybrid_superposition(const HybridModel& model, Complex alpha,
                                   std::span<const Complex> betas,
                                   std::span<const ComplexVector> sector_states) {
    if (betas.size() != model.sectors || sector_states.size() != model.sectors) {
        throw DimensionError("hybrid_superposition: one amplitude and state per sector required");
    }
    ComplexVector psi = ComplexVector::Zero(model.dim());
    psi(0) = alpha;
    const Eigen::Index d = model.sector_dim();
    for (std::size_t b = 1; b <= model.sectors; ++b) {
        const ComplexVector& phi = sector_states[b - 1];
        if (phi.size() != d) throw DimensionError("hybrid_superposition: sector state size");
        const double n = phi.norm();
        if (!(n > 0.0)) throw BathError("hybrid_superposition: empty sector state");
        psi.segment(model.offset(b), d) = betas[b - 1] * phi / n;
    }
    return psi;
}

std::vector<double> block_populations(const HybridModel& model, const ComplexVector& psi) {
    if (psi.size() != model.dim()) throw DimensionError("block_populations: size mismatch");
    std::vector<double> p(model.sectors + 1);
    p[0] = std::norm(psi(0));
    const Eigen::Index d = model.sector_dim();
    for (std::size_t b = 1; b <= model.sectors; ++b) {
        p[b] = psi.segment(model.offset(b), d).squaredNorm();
    }
    return p;
}

HybridDensityMatrix::HybridDensityMatrix(ComplexMatrix rho, std::size_t sectors,
                                         std::optional<Grid> grid)
    : rho_(std::move(rho)), sectors_(sectors), d_(0), grid_(std::move(grid)) {
    require_square(rho_, "HybridDensityMatrix");
    if (sectors_ == 0) throw BathError("HybridDensityMatrix: need at least one sector");
    const Eigen::Index rest = rho_.rows() - 1;
    if (rest <= 0 || rest % static_cast<Eigen::Index>(sectors_) != 0) {
        throw DimensionError("HybridDensityMatrix: dimension is not 1 + K d");
    }
    d_ = rest / static_cast<Eigen::Index>(sectors_);
    if (grid_ && static_cast<Eigen::Index>(grid_->points) != d_) {
        throw DimensionError("HybridDensityMatrix: grid does not match sector dimension");
    }
}

HybridDensityMatrix HybridDensityMatrix::pure(const HybridModel& model, const ComplexVector& psi) {
    if (psi.size() != model.dim()) throw DimensionError("HybridDensityMatrix::pure: size mismatch");
    return HybridDensityMatrix(psi * psi.adjoint(), model.sectors, model.grid);
}

ComplexVector HybridDensityMatrix::rho_ge(std::size_t b) const {
    if (b == 0 || b > sectors_) throw BathError("sector index out of range");
    return rho_.block(0, 1 + static_cast<Eigen::Index>(b - 1) * d_, 1, d_).transpose();
}

ComplexMatrix HybridDensityMatrix::rho_ee(std::size_t b) const {
    if (b == 0 || b > sectors_) throw BathError("sector index out of range");
    const Eigen::Index off = 1 + static_cast<Eigen::Index>(b - 1) * d_;
    return rho_.block(off, off, d_, d_);
}

RealVector HybridDensityMatrix::density(std::size_t b) const {
    const double dx = grid_ ? grid_->spacing : 1.0;
    return rho_ee(b).diagonal().real() / dx;
}

std::vector<double> HybridDensityMatrix::block_populations() const {
    std::vector<double> p(sectors_ + 1);
    p[0] = rho_gg();
    for (std::size_t b = 1; b <= sectors_; ++b) {
        const Eigen::Index off = 1 + static_cast<Eigen::Index>(b - 1) * d_;
        p[b] = rho_.block(off, off, d_, d_).trace().real();
    }
    return p;
}

double HybridDensityMatrix::interference_norm() const {
    double s = rho_.block(0, 1, 1, rho_.cols() - 1).squaredNorm();
    for (std::size_t b = 1; b <= sectors_; ++b) {
        for (std::size_t c = b + 1; c <= sectors_; ++c) {
            const Eigen::Index ob = 1 + static_cast<Eigen::Index>(b - 1) * d_;
            const Eigen::Index oc = 1 + static_cast<Eigen::Index>(c - 1) * d_;
            s += rho_.block(ob, oc, d_, d_).squaredNorm();
        }
    }
    return std::sqrt(s);
}

double HybridDensityMatrix::min_eigenvalue() const { return min_eigenvalue_hermitian(rho_); }

double HybridDensityMatrix::min_eigenvalue_ee(std::size_t b) const {
    return min_eigenvalue_hermitian(rho_ee(b));
}

void HybridDensityMatrix::check_invariants(double trace_tol, double herm_tol,
                                           double diag_tol) const {
    if (!(std::abs(trace() - 1.0) <= trace_tol)) {
        throw BathError("density matrix trace is " + std::to_string(trace()));
    }
    if (!(hermiticity_defect(rho_) <= herm_tol)) {
        throw BathError("density matrix is not Hermitian");
    }
    if (!(rho_.diagonal().real().minCoeff() >= -diag_tol)) {
        throw BathError("density matrix has a negative diagonal entry");
    }
}

}  // namespace measchain::bath
