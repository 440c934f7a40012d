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

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "measchain/bath/bath.hpp"
#include "measchain/bath/operators.hpp"

namespace measchain::bath {

void BathSpec::validate() const {
    if (!(temperature > 0.0)) throw BathError("bath temperature must be positive");
    if (!(gamma >= 0.0)) throw BathError("bath coupling gamma must be non-negative");
    if (!(mass > 0.0)) throw BathError("electron mass must be positive");
}

double BathSpec::lambda() const {
    validate();
    return 1.0 / std::sqrt(4.0 * mass * temperature);
}

Grid Grid::in_lambda_units(std::size_t points, double spacing_over_lambda, double lambda) {
    return Grid{points, spacing_over_lambda * lambda};
}

RealVector Grid::positions() const {
    RealVector x(static_cast<Eigen::Index>(points));
    for (std::size_t j = 0; j < points; ++j) x(static_cast<Eigen::Index>(j)) = position(j);
    return x;
}

ThermalScales thermal_scales(double temperature, double mass, ParticleKind kind, double speed,
                             const PhysicalConstants& units) {
    if (!(temperature > 0.0)) throw BathError("thermal_scales: temperature must be positive");
    const double kt = units.boltzmann * temperature;
    ThermalScales s{};
    if (kind == ParticleKind::massive) {
        if (!(mass > 0.0)) throw BathError("thermal_scales: mass must be positive");
        s.wavelength = units.planck() / std::sqrt(2.0 * std::numbers::pi * mass * kt);
    } else {
        if (!(speed > 0.0)) throw BathError("thermal_scales: speed must be positive");
        s.wavelength = std::pow(std::numbers::pi, 2.0 / 3.0) * units.hbar * speed / kt;
    }
    s.time = units.hbar / kt;
    return s;
}

SparseComplexMatrix derivative_matrix(const Grid& grid, int order) {
    static const std::array<std::vector<double>, 4> kCoefficients = {{
        {1.0 / 2.0},
        {2.0 / 3.0, -1.0 / 12.0},
        {3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0},
        {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0},
    }};
    if (order < 2 || order > 8 || order % 2 != 0) {
        throw BathError("derivative order must be 2, 4, 6 or 8 (got " + std::to_string(order) + ")");
    }
    const auto& c = kCoefficients[static_cast<std::size_t>(order / 2 - 1)];
    const auto n = static_cast<long>(grid.points);
    if (n < 2 * static_cast<long>(c.size()) + 1) {
        throw BathError("grid too small for the derivative stencil");
    }
    std::vector<Eigen::Triplet<Complex>> entries;
    entries.reserve(static_cast<std::size_t>(n) * 2 * c.size());
    for (long j = 0; j < n; ++j) {
        for (std::size_t m = 0; m < c.size(); ++m) {
            const long off = static_cast<long>(m) + 1;
            const double w = c[m] / grid.spacing;
            entries.emplace_back(j, (j + off) % n, w);
            entries.emplace_back(j, (j - off + n) % n, -w);
        }
    }
    SparseComplexMatrix d(n, n);
    d.setFromTriplets(entries.begin(), entries.end());
    return d;
}

SparseComplexMatrix kinetic_matrix(const Grid& grid, double mass) {
    if (!(mass > 0.0)) throw BathError("kinetic_matrix: mass must be positive");
    const auto n = static_cast<long>(grid.points);
    if (n < 3) throw BathError("kinetic_matrix: need at least 3 grid points");
    const double w = 1.0 / (2.0 * mass * grid.spacing * grid.spacing);
    std::vector<Eigen::Triplet<Complex>> entries;
    for (long j = 0; j < n; ++j) {
        entries.emplace_back(j, j, 2.0 * w);
        entries.emplace_back(j, (j + 1) % n, -w);
        entries.emplace_back(j, (j - 1 + n) % n, -w);
    }
    SparseComplexMatrix h(n, n);
    h.setFromTriplets(entries.begin(), entries.end());
    return h;
}

SparseComplexMatrix position_matrix(const Grid& grid) {
    const auto n = static_cast<Eigen::Index>(grid.points);
    SparseComplexMatrix x(n, n);
    x.reserve(Eigen::VectorXi::Constant(n, 1));
    for (Eigen::Index j = 0; j < n; ++j) {
        x.insert(j, j) = grid.position(static_cast<std::size_t>(j));
    }
    x.makeCompressed();
    return x;
}

ComplexVector gaussian_packet(const Grid& grid, double x0, double k, double width) {
    if (!(width > 0.0)) throw BathError("gaussian_packet: width must be positive");
    ComplexVector psi(static_cast<Eigen::Index>(grid.points));
    for (std::size_t j = 0; j < grid.points; ++j) {
        const double x = grid.position(j);
        const double d = (x - x0) / width;
        psi(static_cast<Eigen::Index>(j)) = std::exp(Complex(-0.5 * d * d, k * x));
    }
    const double norm = psi.norm();
    if (!(norm > 0.0)) throw BathError("gaussian_packet: packet vanishes on the grid");
    return psi / norm;
}

LocalizationOperator::LocalizationOperator(const Grid& grid, double lambda, int derivative_order)
    : lambda_(lambda), order_(derivative_order) {
    if (!(lambda > 0.0)) throw BathError("localization length must be positive");
    a_ = position_matrix(grid) / lambda + lambda * derivative_matrix(grid, derivative_order);
    ata_ = SparseComplexMatrix(a_.adjoint()) * a_;
    ata_.prune(Complex(0.0), 1e-300);
}

ComplexVector LocalizationOperator::apply(const ComplexVector& psi) const {
    if (psi.size() != a_.cols()) throw DimensionError("LocalizationOperator::apply: size mismatch");
    return a_ * psi;
}

double LocalizationOperator::expectation_ata(const ComplexVector& psi) const {
    const double n2 = psi.squaredNorm();
    if (!(n2 > 0.0)) return 0.0;
    return apply(psi).squaredNorm() / n2;
}

PacketMoments packet_moments(const ComplexVector& psi, const Grid& grid) {
    if (static_cast<std::size_t>(psi.size()) != grid.points) {
        throw DimensionError("packet_moments: size mismatch");
    }
    double w = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < grid.points; ++j) {
        const double p = std::norm(psi(static_cast<Eigen::Index>(j)));
        const double x = grid.position(j);
        w += p;
        m1 += p * x;
        m2 += p * x * x;
    }
    if (!(w > 0.0)) return {0.0, 0.0};
    const double mean = m1 / w;
    return {mean, std::sqrt(std::max(0.0, m2 / w - mean * mean))};
}

double edge_weight(const ComplexVector& psi, const Grid& grid, double margin) {
    double w = 0.0, total = 0.0;
    for (std::size_t j = 0; j < grid.points; ++j) {
        const double p = std::norm(psi(static_cast<Eigen::Index>(j)));
        const double x = grid.position(j);
        total += p;
        if (x - grid.min_position() < margin || grid.max_position() - x < margin) w += p;
    }
    return total > 0.0 ? w / total : 0.0;
}

}  // namespace measchain::bath
