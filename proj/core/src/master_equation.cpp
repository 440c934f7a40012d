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

#include "measchain/bath/master_equation.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "measchain/numerics/ode.hpp"

namespace measchain::bath {

namespace {

class Generator {
  public:
    explicit Generator(const HybridModel& model)
        : k_(model.effective_hamiltonian()),
          a_(model.a),
          gamma_(model.gamma),
          sectors_(model.sectors),
          d_(model.sector_dim()) {}

    ComplexMatrix operator()(double, const ComplexMatrix& rho) const {
        // -i K rho + i rho K^dagger, written so that it stays exact for
        // non-Hermitian input. Integrator stages pick up an anti-Hermitian
        // round-off part, and the shortcut m + m^dagger amplifies it.
        const ComplexMatrix kr = k_ * rho;
        const ComplexMatrix kra = k_ * rho.adjoint();
        ComplexMatrix out = Complex(0.0, -1.0) * kr + Complex(0.0, 1.0) * kra.adjoint();
        if (gamma_ > 0.0) {
            for (std::size_t b = 0; b < sectors_; ++b) {
                const Eigen::Index o = 1 + static_cast<Eigen::Index>(b) * d_;
                const ComplexMatrix ar = a_ * rho.block(o, o, d_, d_);
                out.block(o, o, d_, d_) += gamma_ * (a_ * ar.adjoint()).adjoint();
            }
        }
        return out;
    }

  private:
    // Row-major storage makes the sparse-times-dense products several times
    // faster than the column-major default.
    Eigen::SparseMatrix<Complex, Eigen::RowMajor> k_;
    Eigen::SparseMatrix<Complex, Eigen::RowMajor> a_;
    double gamma_;
    std::size_t sectors_;
    Eigen::Index d_;
};

MasterSnapshot snapshot(double t, const HybridDensityMatrix& rho, bool eigen) {
    MasterSnapshot s;
    s.t = t;
    s.trace = rho.trace();
    s.populations = rho.block_populations();
    s.interference_norm = rho.interference_norm();
    if (eigen) s.min_eigenvalue = rho.min_eigenvalue();
    if (rho.grid()) s.density = rho.density(1);
    return s;
}

bool touches_boundary(const HybridDensityMatrix& rho, const MasterOptions& opt) {
    if (!rho.grid()) return false;
    const Grid& g = *rho.grid();
    const double margin = opt.boundary_fraction * g.extent();
    for (std::size_t b = 1; b <= rho.sectors(); ++b) {
        const RealVector p = rho.rho_ee(b).diagonal().real();
        double edge = 0.0;
        for (std::size_t j = 0; j < g.points; ++j) {
            const double x = g.position(j);
            if (x - g.min_position() < margin || g.max_position() - x < margin) {
                edge += std::abs(p(static_cast<Eigen::Index>(j)));
            }
        }
        if (edge > opt.boundary_weight) return true;
    }
    return false;
}

}  // namespace

ComplexMatrix master_derivative(const HybridModel& model, const ComplexMatrix& rho) {
    model.validate();
    if (rho.rows() != model.dim() || rho.cols() != model.dim()) {
        throw DimensionError("master_derivative: density matrix does not match the model");
    }
    return Generator(model)(0.0, rho);
}

HybridDensityMatrix dissipator(const HybridDensityMatrix& rho, const HybridModel& model) {
    return HybridDensityMatrix(master_derivative(model, rho.matrix()), rho.sectors(), rho.grid());
}

double decoherence_time(const HybridModel& model, const HybridDensityMatrix& rho) {
    double pop = 0.0, ata = 0.0;
    for (std::size_t b = 1; b <= rho.sectors(); ++b) {
        const ComplexMatrix block = rho.rho_ee(b);
        pop += block.trace().real();
        ata += (model.ata * block).trace().real();
    }
    if (!(pop > 0.0)) return 0.0;
    if (model.gamma == 0.0) return std::numeric_limits<double>::infinity();
    return pop / (model.gamma * ata);
}

MasterResult evolve_master(const HybridDensityMatrix& rho0, const HybridModel& model, double t,
                           const MasterOptions& opt) {
    if (!(t >= 0.0)) throw BathError("evolve_master: t must be non-negative");
    model.validate();
    if (rho0.dim() != model.dim() || rho0.sectors() != model.sectors) {
        throw DimensionError("evolve_master: density matrix does not match the model");
    }
    const Generator gen(model);
    MasterResult result{rho0, {}, {}, decoherence_time(model, rho0), false, 0, 0};

    const std::size_t samples = std::max<std::size_t>(opt.samples, 2);
    ComplexMatrix y = rho0.matrix();
    OdeOptions ode;
    ode.tol = opt.tol;
    result.snapshots.push_back(snapshot(0.0, rho0, opt.track_eigenvalues));
    result.boundary_touched = touches_boundary(rho0, opt);

    auto observer = [&](double tt, const ComplexMatrix& m) {
        if (opt.track_coherence) {
            const HybridDensityMatrix r(m, model.sectors, model.grid);
            result.coherence.emplace_back(tt, r.interference_norm());
        }
    };
    double t_prev = 0.0;
    for (std::size_t i = 1; i < samples; ++i) {
        const double t_next = t * static_cast<double>(i) / static_cast<double>(samples - 1);
        if (i > 1 && opt.track_coherence) result.coherence.pop_back();  // segment start repeats
        auto r = integrate_ode(std::move(y), gen, t_prev, t_next, ode, observer);
        y = hermitize(r.y);
        result.accepted_steps += r.accepted;
        result.rejected_steps += r.rejected;
        if (r.last_step > 0.0) ode.initial_step = r.last_step;
        const HybridDensityMatrix cur(y, model.sectors, model.grid);
        result.snapshots.push_back(snapshot(t_next, cur, opt.track_eigenvalues));
        result.boundary_touched = result.boundary_touched || touches_boundary(cur, opt);
        t_prev = t_next;
    }
    result.rho = HybridDensityMatrix(std::move(y), model.sectors, model.grid);
    return result;
}

void write_snapshots_csv(std::ostream& out, const MasterResult& result) {
    const auto& grid = result.rho.grid();
    out << "t,trace,rho_gg,interference_norm";
    if (grid) {
        for (std::size_t j = 0; j < grid->points; ++j) out << ",x=" << grid->position(j);
    }
    out << '\n' << std::setprecision(17);
    for (const auto& s : result.snapshots) {
        out << s.t << ',' << s.trace << ',' << s.populations.front() << ','
            << s.interference_norm;
        for (Eigen::Index j = 0; j < s.density.size(); ++j) out << ',' << s.density(j);
        out << '\n';
    }
}

}  // namespace measchain::bath
