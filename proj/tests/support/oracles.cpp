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

#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace oracle {

double grid_x(std::size_t j, std::size_t n, double dx) {
    return (static_cast<double>(j) - static_cast<double>(n / 2)) * dx;
}

// Central-difference weights for the first derivative, obtained by solving
// the Taylor moment conditions sum_k w_k k^(2p-1) = [p == 1] / 2 for the
// antisymmetric stencil.
static std::vector<double> first_derivative_weights(int order) {
    const int m = order / 2;
    Eigen::MatrixXd v(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (int p = 0; p < m; ++p) {
        for (int k = 1; k <= m; ++k) v(p, k - 1) = std::pow(double(k), 2 * p + 1);
    }
    rhs(0) = 0.5;
    const Eigen::VectorXd w = v.fullPivLu().solve(rhs);
    return {w.data(), w.data() + m};
}

Matrix central_difference(std::size_t n, double dx, int order) {
    if (order < 2 || order > 8 || order % 2) throw std::invalid_argument("order");
    const auto w = first_derivative_weights(order);
    Matrix d = Matrix::Zero(long(n), long(n));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 1; k <= w.size(); ++k) {
            d(long(j), long((j + k) % n)) += w[k - 1] / dx;
            d(long(j), long((j + n - k) % n)) -= w[k - 1] / dx;
        }
    }
    return d;
}

Matrix localization_operator(std::size_t n, double dx, double lambda, int order) {
    Matrix a = lambda * central_difference(n, dx, order);
    for (std::size_t j = 0; j < n; ++j) a(long(j), long(j)) += grid_x(j, n, dx) / lambda;
    return a;
}

Matrix kinetic_operator(std::size_t n, double dx, double mass) {
    Matrix t = Matrix::Zero(long(n), long(n));
    const double w = 1.0 / (2.0 * mass * dx * dx);
    for (std::size_t j = 0; j < n; ++j) {
        t(long(j), long(j)) += 2.0 * w;
        t(long(j), long((j + 1) % n)) -= w;
        t(long(j), long((j + n - 1) % n)) -= w;
    }
    return t;
}

Vector gaussian(std::size_t n, double dx, double x0, double width) {
    Vector v(static_cast<long>(n));
    for (std::size_t j = 0; j < n; ++j) {
        const double d = (grid_x(j, n, dx) - x0) / width;
        v(long(j)) = std::exp(-0.5 * d * d);
    }
    return v / v.norm();
}

HybridOperators hybrid_operators(const Matrix& h_sector, const Matrix& a_sector, double gamma,
                                 std::size_t sectors) {
    const long d = h_sector.rows();
    const long dim = 1 + long(sectors) * d;
    HybridOperators ops;
    ops.hamiltonian = Matrix::Zero(dim, dim);
    for (std::size_t b = 0; b < sectors; ++b) {
        const long off = 1 + long(b) * d;
        ops.hamiltonian.block(off, off, d, d) = h_sector;
        Matrix l = Matrix::Zero(dim, dim);
        l.block(off, off, d, d) = std::sqrt(gamma) * a_sector;
        ops.jumps.push_back(std::move(l));
    }
    return ops;
}

static Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i) {
        for (long j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix liouvillian(const Matrix& h, const std::vector<Matrix>& jumps) {
    const long n = h.rows();
    const Matrix id = Matrix::Identity(n, n);
    const Complex i(0.0, 1.0);
    Matrix l = -i * (kron(id, h) - kron(h.transpose(), id));
    for (const auto& c : jumps) {
        const Matrix cdc = c.adjoint() * c;
        l += kron(c.conjugate(), c) - 0.5 * kron(id, cdc) - 0.5 * kron(cdc.transpose(), id);
    }
    return l;
}

Vector expm_action(const Matrix& l, const Vector& v, double t) {
    const double norm = l.cwiseAbs().colwise().sum().maxCoeff() * std::abs(t);
    const int s = std::max(1, int(std::ceil(norm)));
    const double h = t / s;
    Vector out = v;
    for (int step = 0; step < s; ++step) {
        Vector term = out;
        Vector acc = out;
        for (int k = 1; k < 200; ++k) {
            term = (h / k) * (l * term);
            acc += term;
            if (term.norm() <= 1e-17 * acc.norm()) break;
        }
        out = acc;
    }
    return out;
}

Matrix evolve_dense(const Matrix& l, const Matrix& rho0, double t) {
    const long n = rho0.rows();
    const Vector v = Eigen::Map<const Vector>(rho0.data(), n * n);
    const Vector w = expm_action(l, v, t);
    return Eigen::Map<const Matrix>(w.data(), n, n);
}

std::pair<Complex, Complex> two_level(Complex g, double t) {
    const double r = std::abs(g);
    const Complex phase = r > 0.0 ? g / r : Complex(1.0, 0.0);
    return {Complex(std::cos(r * t), 0.0), Complex(0.0, -1.0) * phase * std::sin(r * t)};
}

double trace_distance(const Matrix& a, const Matrix& b) {
    const Matrix d = 0.5 * ((a - b) + (a - b).adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(d, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double pointer_root(double k, double c) {
    double th = k / c;
    for (int it = 0; it < 100; ++it) {
        const double f = c * th - k * std::cos(th);
        const double df = c + k * std::sin(th);
        const double step = f / df;
        th -= step;
        if (std::abs(step) < 1e-16) break;
    }
    return th;
}

double free_packet_sigma(double sigma0, double mass, double t) {
    const double r = t / (2.0 * mass * sigma0 * sigma0);
    return sigma0 * std::sqrt(1.0 + r * r);
}

double fermi(double energy, double mu, double temperature) {
    return 1.0 / (std::exp((energy - mu) / temperature) + 1.0);
}

double gamma_q(double a, double x) {
    if (x <= 0.0) return 1.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double sum = 1.0 / a, term = sum;
        for (int n = 1; n < 1000; ++n) {
            term *= x / (a + n);
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Lentz continued fraction.
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - lg) * h;
}

}  // namespace oracle
