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

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "measchain/transport.hpp"
#include "oracles.hpp"

using namespace measchain;
using namespace measchain::transport;

namespace {

const KGrid kGrid{128, 0.15};

DistributionFunction eq_state(double mass = 1.0, double temperature = 1.0, double density = 1.0,
                              KGrid grid = kGrid) {
    return equilibrium(grid, mass, temperature, density);
}

// Density-preserving bump: moves weight from k < 0 to k > 0.
DistributionFunction perturbed(const DistributionFunction& eq) {
    DistributionFunction f = eq;
    for (std::size_t j = 0; j < f.grid.points; ++j) {
        const double k = f.grid.k(j);
        f.f(static_cast<Eigen::Index>(j)) += 0.2 * k * std::exp(-k * k) * 0.5;
    }
    return f;
}

double distance(const DistributionFunction& a, const DistributionFunction& b) {
    return (a.f - b.f).norm();
}

}  // namespace

TEST_CASE("drude: unit case and linearity in tau") {
    CHECK(drude_conductivity(1.0, 1.0, 1.0) == 1.0);
    CHECK(drude_conductivity(2.0, 3.0, 0.5) == doctest::Approx(12.0));
    CHECK(drude_conductivity(1.0, 2.0, 1.0) == 2.0 * drude_conductivity(1.0, 1.0, 1.0));
    CHECK_THROWS_AS(drude_conductivity(0.0, 1.0, 1.0), TransportError);
    CHECK_THROWS_AS(drude_conductivity(1.0, -1.0, 1.0), TransportError);
}

TEST_CASE("equilibrium: Fermi-Dirac with the requested density") {
    const auto f = eq_state(1.0, 1.0, 1.5);
    CHECK(f.density() == doctest::Approx(1.5).epsilon(1e-10));
    const double mu = chemical_potential(kGrid, 1.0, 1.0, 1.5);
    for (std::size_t j = 0; j < kGrid.points; j += 7) {
        const double e = kGrid.k(j) * kGrid.k(j) / 2.0;
        CHECK(f.f(long(j)) == doctest::Approx(oracle::fermi(e, mu, 1.0)).epsilon(1e-12));
    }
    CHECK(f.mean_k() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(chemical_potential(kGrid, 1.0, 1.0, 1e3), TransportError);
}

TEST_CASE("rta: equilibrium at zero field is a fixed point") {
    const auto f = eq_state();
    auto g = f;
    for (int i = 0; i < 100; ++i) g = step_boltzmann_rta(g, RtaParams{0.0, 1.0, 1.0, 1.0}, 0.05);
    CHECK(distance(f, g) < 1e-12);
}

TEST_CASE("rta: perturbation relaxes at rate 1/tau") {
    const double tau = 2.0;
    const auto eq = eq_state();
    auto f = perturbed(eq);
    REQUIRE(f.density() == doctest::Approx(eq.density()).epsilon(1e-12));
    const RtaParams p{0.0, tau, 1.0, 1.0};
    const double dt = 0.02;
    const double d0 = distance(f, eq);
    double prev = d0;
    for (int i = 0; i < 200; ++i) {
        f = step_boltzmann_rta(f, p, dt);
        const double d = distance(f, eq);
        CHECK(d <= prev * (1.0 + 1e-12));  // H-theorem style monotone approach
        prev = d;
    }
    const double rate = -std::log(prev / d0) / (200 * dt);
    CHECK(rate == doctest::Approx(1.0 / tau).epsilon(0.02));
}

TEST_CASE("rta: small-field steady state has v_d = -e E tau / m and Drude conductivity") {
    const double tau = 1.0, field = 0.01, mass = 1.0;
    const auto f0 = eq_state(mass);
    const auto s = rta_steady_state(f0, RtaParams{field, tau, 1.0, 1.0}, 0.01, 40.0);
    // Electrons carry charge -e, so they drift against the field.
    CHECK(s.drift_velocity == doctest::Approx(-field * tau / mass).epsilon(0.02));
    CHECK(s.conductivity == doctest::Approx(drude_conductivity(1.0, tau, mass)).epsilon(0.01));
    CHECK(s.f.density() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s.f.f.minCoeff() >= 0.0);
    CHECK(s.f.f.maxCoeff() <= 1.0);
}

TEST_CASE("rta: conductivity doubles with tau and current is linear in small fields") {
    const auto f0 = eq_state();
    const auto a = rta_steady_state(f0, RtaParams{0.01, 1.0, 1.0, 1.0}, 0.01, 40.0);
    const auto b = rta_steady_state(f0, RtaParams{0.01, 2.0, 1.0, 1.0}, 0.01, 80.0);
    CHECK(b.conductivity == doctest::Approx(2.0 * a.conductivity).epsilon(0.01));
    const auto rows = current_field_table(f0, RtaParams{0.0, 1.0, 1.0, 1.0}, {0.005, 0.01, 0.02}, 0.01, 40.0);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].current == doctest::Approx(2.0 * rows[0].current).epsilon(0.01));
    CHECK(rows[2].current == doctest::Approx(2.0 * rows[1].current).epsilon(0.01));
    std::ostringstream os;
    write_current_field_csv(os, rows);
    CHECK(os.str().rfind("field,current,drift_velocity\n", 0) == 0);
}

TEST_CASE("rta: density drift stays below 1e-8 per unit time in a field") {
    auto f = eq_state();
    const double n0 = f.density();
    const RtaParams p{0.05, 1.0, 1.0, 1.0};
    for (int i = 0; i < 500; ++i) f = step_boltzmann_rta(f, p, 0.01);
    CHECK(std::abs(f.density() - n0) / 5.0 < 1e-8);
    CHECK(f.f.minCoeff() >= 0.0);
    CHECK(f.f.maxCoeff() <= 1.0);
}

TEST_CASE("rta: step preconditions") {
    const auto f = eq_state();
    CHECK_THROWS_AS(step_boltzmann_rta(f, RtaParams{0.0, 1.0, 1.0, 1.0}, 0.1), TransportError);
    CHECK_THROWS_AS(step_boltzmann_rta(f, RtaParams{100.0, 1.0, 1.0, 1.0}, 0.01), TransportError);
    CHECK_THROWS_WITH_AS(step_boltzmann_rta(f, RtaParams{100.0, 1.0, 1.0, 1.0}, 0.01),
                         doctest::Contains("CFL"), TransportError);
    CHECK_THROWS_AS(step_boltzmann_rta(f, RtaParams{0.0, 0.0, 1.0, 1.0}, 0.01), TransportError);
}

TEST_CASE("rta: relaxation is irreversible") {
    // Reversing all velocities after relaxing does not lead back to the
    // mirrored initial state; the distance to equilibrium keeps shrinking.
    const auto eq = eq_state();
    const auto f0 = perturbed(eq);
    const RtaParams p{0.0, 1.0, 1.0, 1.0};
    auto f = f0;
    for (int i = 0; i < 50; ++i) f = step_boltzmann_rta(f, p, 0.02);
    DistributionFunction r = f;
    r.f = f.f.reverse().eval();
    for (int i = 0; i < 50; ++i) r = step_boltzmann_rta(r, p, 0.02);
    DistributionFunction mirrored0 = f0;
    mirrored0.f = f0.f.reverse().eval();
    CHECK(distance(r, mirrored0) > 0.5 * distance(f0, eq));
    CHECK(distance(r, eq) < distance(f, eq));
}

TEST_CASE("phonon: Bose occupation and pair construction") {
    const PhononBath b{0.5, 2.0, 1.0};
    CHECK(b.occupation(1.0) == doctest::Approx(1.0 / (std::exp(0.5) - 1.0)));
    CHECK_THROWS_AS(b.occupation(0.0), TransportError);
    const KGrid g{64, 0.25};
    const auto pairs = phonon_pairs(g, 1.0, 0.5);
    REQUIRE_FALSE(pairs.empty());
    for (const auto& p : pairs) {
        // Momentum transfer q = k_u - k_l, phonon energy c_s |q| up to the bin match.
        const double ku = g.k(p.upper), kl = g.k(p.lower);
        CHECK(p.omega == doctest::Approx(std::abs(ku * ku - kl * kl) / 2.0).epsilon(1e-12));
        CHECK(std::abs(ku + kl) == doctest::Approx(2.0 * 0.5).epsilon(0.25));
    }
    CHECK_THROWS_AS(phonon_pairs(KGrid{512, 0.1}, 1.0, 0.5), TransportError);
}

TEST_CASE("phonon: empty band gives no collisions") {
    DistributionFunction f{KGrid{64, 0.25}, 1.0, RealVector::Zero(64)};
    CHECK(collision_integral_phonon(f, PhononBath{}).norm() == 0.0);
}

TEST_CASE("phonon: Fermi-Dirac at the bath temperature is a fixed point") {
    for (double temperature : {0.5, 1.0, 3.0}) {
        const auto f = eq_state(1.0, temperature, 2.0, KGrid{64, 0.25});
        const PhononBath bath{0.5, temperature, 1.7};
        const RealVector d = collision_integral_phonon(f, bath);
        CHECK(d.cwiseAbs().maxCoeff() < 1e-6 * bath.w0);
    }
}

TEST_CASE("phonon: at zero temperature only emission acts") {
    const KGrid g{64, 0.25};
    const auto pairs = phonon_pairs(g, 1.0, 0.5);
    // Occupy the highest-energy state that has a partner.
    std::size_t top = pairs.front().upper;
    for (const auto& p : pairs) {
        if (g.k(p.upper) * g.k(p.upper) > g.k(top) * g.k(top)) top = p.upper;
    }
    DistributionFunction f{g, 1.0, RealVector::Zero(64)};
    f.f(long(top)) = 1.0;
    const RealVector d = collision_integral_phonon(f, PhononBath{0.5, 0.0, 1.0});
    CHECK(d(long(top)) < 0.0);
    double gain = 0.0;
    for (const auto& p : pairs) {
        if (p.upper == top) {
            CHECK(d(long(p.lower)) == doctest::Approx(1.0));
            gain += d(long(p.lower));
        }
    }
    CHECK(d(long(top)) == doctest::Approx(-gain));
    CHECK(std::abs(d.sum()) < 1e-15);
}

TEST_CASE("phonon: evolution conserves density and relaxes toward the bath") {
    const KGrid g{64, 0.25};
    const double temperature = 1.0;
    const auto eq = eq_state(1.0, temperature, 2.0, g);
    auto f = perturbed(eq);
    const PhononBath bath{0.5, temperature, 1.0};
    const double n0 = f.density();
    const double d0 = distance(f, eq);
    for (int i = 0; i < 400; ++i) f = step_boltzmann_phonon(f, 0.0, bath, 0.01);
    CHECK(std::abs(f.density() - n0) / 4.0 < 1e-8);
    CHECK(distance(f, eq) < d0);
    CHECK(f.f.minCoeff() >= 0.0);
    CHECK(f.f.maxCoeff() <= 1.0);
    auto fixed = eq;
    for (int i = 0; i < 100; ++i) fixed = step_boltzmann_phonon(fixed, 0.0, bath, 0.01);
    CHECK(distance(fixed, eq) < 1e-10);
}
