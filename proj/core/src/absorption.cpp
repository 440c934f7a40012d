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

#include "measchain/absorption.hpp"

#include <cmath>
#include <string>

#include "measchain/numerics/ode.hpp"

namespace measchain::absorption {

namespace {

constexpr double kNormTolerance = 1e-9;
constexpr double kIntegratorTolerance = 1e-13;

void require_normalized(const AmplitudeState& s) {
    const double n = s.norm_squared();
    if (!(std::abs(n - 1.0) <= kNormTolerance)) {
        throw AbsorptionError("amplitude state is not normalized (|alpha|^2 + sum|beta|^2 = " +
                              std::to_string(n) + ")");
    }
}

AmplitudeState integrate(const AmplitudeState& s, const std::vector<Complex>& gt, double t) {
    const auto m = static_cast<Eigen::Index>(gt.size());
    if (s.betas.size() != gt.size()) {
        throw AbsorptionError("state has " + std::to_string(s.betas.size()) +
                              " sites but coupling has " + std::to_string(gt.size()));
    }
    ComplexVector g(m);
    for (Eigen::Index n = 0; n < m; ++n) g(n) = gt[static_cast<std::size_t>(n)];

    ComplexVector y(m + 1);
    y(0) = s.alpha;
    for (Eigen::Index n = 0; n < m; ++n) y(n + 1) = s.betas[static_cast<std::size_t>(n)];

    auto rhs = [&g, m](double, const ComplexVector& v) {
        ComplexVector d(m + 1);
        d(0) = -kI * g.dot(v.tail(m));  // dot() conjugates g
        d.tail(m) = (-kI * v(0)) * g;
        return d;
    };
    OdeOptions opt;
    opt.tol = kIntegratorTolerance;
    const ComplexVector out = integrate_ode(y, rhs, 0.0, t, opt).y;

    AmplitudeState r;
    r.alpha = out(0);
    r.betas.resize(gt.size());
    for (Eigen::Index n = 0; n < m; ++n) r.betas[static_cast<std::size_t>(n)] = out(n + 1);
    return r;
}

}  // namespace

double AmplitudeState::norm_squared() const {
    double n = std::norm(alpha);
    for (const auto& b : betas) n += std::norm(b);
    return n;
}

std::vector<double> AmplitudeState::click_weights() const {
    std::vector<double> w;
    w.reserve(betas.size());
    for (const auto& b : betas) w.push_back(std::norm(b));
    return w;
}

AmplitudeState ground_state(std::size_t sites) {
    return AmplitudeState{Complex{1.0, 0.0}, std::vector<Complex>(sites, Complex{})};
}

CouplingModel CouplingModel::single(Complex g, double tau) {
    CouplingModel c;
    c.g_site = {g};
    c.tau = tau;
    return c;
}

CouplingModel CouplingModel::equivalent_electrons(Complex g, std::size_t n_electrons, double tau) {
    CouplingModel c = single(g, tau);
    c.electrons_per_site = n_electrons;
    return c;
}

CouplingModel CouplingModel::detector_array(std::span<const Complex> amplitudes, Complex scale,
                                            std::size_t n_electrons, double tau) {
    CouplingModel c;
    c.g_site.reserve(amplitudes.size());
    for (const auto& a : amplitudes) c.g_site.push_back(scale * a);
    c.electrons_per_site = n_electrons;
    c.tau = tau;
    return c;
}

std::vector<Complex> CouplingModel::g_tilde() const {
    const double root_n = std::sqrt(static_cast<double>(electrons_per_site));
    std::vector<Complex> out;
    out.reserve(g_site.size());
    for (const auto& g : g_site) out.push_back(root_n * g);
    return out;
}

double CouplingModel::aggregate_strength() const {
    double s = 0.0;
    for (const auto& g : g_tilde()) s += std::norm(g);
    return std::sqrt(s);
}

AmplitudeState evolve_two_level(const AmplitudeState& state, const CouplingModel& coupling,
                                double t) {
    require_normalized(state);
    if (coupling.sites() != 1 || state.betas.size() != 1) {
        throw AbsorptionError("evolve_two_level requires exactly one site");
    }
    // A single electron: the bare coupling, whatever electrons_per_site says.
    return integrate(state, coupling.g_site, t);
}

AmplitudeState evolve_equivalent_electrons(const AmplitudeState& state,
                                           const CouplingModel& coupling, double t) {
    require_normalized(state);
    if (coupling.electrons_per_site == 0) {
        throw AbsorptionError("equivalent-electron reduction needs at least one electron");
    }
    if (coupling.sites() != 1 || state.betas.size() != 1) {
        throw AbsorptionError("evolve_equivalent_electrons requires exactly one site");
    }
    return integrate(state, coupling.g_tilde(), t);
}

AmplitudeState evolve_detector_array(const AmplitudeState& state, const CouplingModel& coupling,
                                     double t) {
    require_normalized(state);
    if (coupling.sites() == 0) throw AbsorptionError("detector array needs at least one site");
    if (coupling.electrons_per_site == 0) {
        throw AbsorptionError("detector sites need at least one electron");
    }
    return integrate(state, coupling.g_tilde(), t);
}

Complex per_electron_beta(Complex beta_tilde, std::size_t n_electrons) {
    if (n_electrons == 0) throw AbsorptionError("per_electron_beta: N must be positive");
    return beta_tilde / std::sqrt(static_cast<double>(n_electrons));
}

}  // namespace measchain::absorption
