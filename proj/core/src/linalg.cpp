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

#include "measchain/numerics/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace measchain {

ComplexMatrix hermitize(const ComplexMatrix& m) {
    require_square(m, "hermitize");
    return 0.5 * (m + m.adjoint());
}

double hermiticity_defect(const ComplexMatrix& m) {
    require_square(m, "hermiticity_defect");
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue_hermitian(const ComplexMatrix& m) {
    require_square(m, "min_eigenvalue_hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitize(m), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "trace_distance");
    require_square(a, "trace_distance");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitize(a - b), Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

ComplexMatrix embed_block(const ComplexMatrix& block, Eigen::Index dim, Eigen::Index offset) {
    require_square(block, "embed_block");
    if (offset < 0 || offset + block.rows() > dim) {
        throw DimensionError("embed_block: block does not fit");
    }
    ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
    out.block(offset, offset, block.rows(), block.cols()) = block;
    return out;
}

}  // namespace measchain
