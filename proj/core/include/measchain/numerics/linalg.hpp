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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace measchain {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using SparseComplexMatrix = Eigen::SparseMatrix<Complex>;

inline constexpr Complex kI{0.0, 1.0};

/// Thrown when two operands of a binary operation disagree in shape.
class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

template <class A, class B>
void require_same_shape(const A& a, const B& b, const char* context) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(context) + ": shape mismatch (" +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                             std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
    }
}

template <class A>
void require_square(const A& a, const char* context) {
    if (a.rows() != a.cols()) {
        throw DimensionError(std::string(context) + ": matrix is not square");
    }
}

/// Replace M by (M + M^dagger)/2.
ComplexMatrix hermitize(const ComplexMatrix& m);

/// Largest |M - M^dagger| entry.
double hermiticity_defect(const ComplexMatrix& m);

/// Smallest eigenvalue of the Hermitian part of M.
double min_eigenvalue_hermitian(const ComplexMatrix& m);

/// Trace distance 1/2 ||a - b||_1 between two Hermitian matrices.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product a (x) b.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Embed `block` at diagonal offset `offset` of a zero dim x dim matrix.
ComplexMatrix embed_block(const ComplexMatrix& block, Eigen::Index dim, Eigen::Index offset);

}  // namespace measchain
