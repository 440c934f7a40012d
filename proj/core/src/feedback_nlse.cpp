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

#include "measchain/bath/feedback_nlse.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/FFT>

namespace measchain::bath {

void FeedbackKernel::validate() const {
    if (!(mass > 0.0)) throw BathError("feedback kernel: mass must be positive");
    if (!(relaxation_time >= 0.0)) throw BathError("feedback kernel: tau_V must be >= 0");
    if (!std::isfinite(strength)) throw BathError("feedback kernel: strength must be finite");
}

NlseResult evolve_feedback_nlse(const ComplexVector& psi0, const Grid& grid,
                                const FeedbackKernel& kernel, double t, double dt,
                                const RealVector* initial_potential) {
    kernel.validate();
    const auto n = static_cast<Eigen::Index>(grid.points);
    if (psi0.size() != n) throw DimensionError("evolve_feedback_nlse: size mismatch");
    if (!(std::abs(psi0.squaredNorm() - 1.0) <= 1e-9)) {
        throw BathError("evolve_feedback_nlse: wave function is not normalized (norm^2 = " +
                        std::to_string(psi0.squaredNorm()) + ")");
    }
    if (!(t >= 0.0) || !(dt > 0.0)) throw BathError("evolve_feedback_nlse: need t >= 0, dt > 0");

    const auto steps = static_cast<std::size_t>(std::ceil(t / dt - 1e-12));
    const double h = steps > 0 ? t / static_cast<double>(steps) : 0.0;

    ComplexVector half_kick(n);
    const double dk = 2.0 * std::numbers::pi / grid.extent();
    for (Eigen::Index j = 0; j < n; ++j) {
        const double k = dk * static_cast<double>(j < (n + 1) / 2 ? j : j - n);
        half_kick(j) = std::exp(Complex(0.0, -0.5 * h * k * k / (2.0 * kernel.mass)));
    }

    auto target = [&](const ComplexVector& p) -> RealVector {
        return -kernel.strength * p.cwiseAbs2() / grid.spacing;
    };

    NlseResult r;
    r.psi = psi0;
    r.potential = initial_potential ? *initial_potential : target(psi0);
    if (r.potential.size() != n) throw DimensionError("evolve_feedback_nlse: potential size");
    const double relax = kernel.relaxation_time > 0.0 ? std::exp(-h / kernel.relaxation_time) : 0.0;

    Eigen::FFT<double> fft;
    ComplexVector spectrum(n);
    for (std::size_t s = 0; s < steps; ++s) {
        fft.fwd(spectrum, r.psi);
        spectrum = spectrum.cwiseProduct(half_kick);
        fft.inv(r.psi, spectrum);

        const RealVector vt = target(r.psi);
        r.potential = vt + relax * (r.potential - vt);
        for (Eigen::Index j = 0; j < n; ++j) {
            r.psi(j) *= std::exp(Complex(0.0, -h * r.potential(j)));
        }

        fft.fwd(spectrum, r.psi);
        spectrum = spectrum.cwiseProduct(half_kick);
        fft.inv(r.psi, spectrum);
    }
    r.steps = steps;
    return r;
}

double free_gaussian_width(double w0, double mass, double t) {
    const double s = t / (mass * w0 * w0);
    return w0 / std::numbers::sqrt2 * std::sqrt(1.0 + s * s);
}

double soliton_width(double mass, double strength) {
    if (!(strength > 0.0)) throw BathError("soliton_width: strength must be positive");
    return 2.0 / (mass * strength);
}

}  // namespace measchain::bath
