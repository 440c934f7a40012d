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

#include "measchain/transport.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

namespace measchain::transport {

namespace {

void check_grid(const KGrid& g) {
    if (g.points < 2) throw TransportError("k-grid needs at least two points");
    if (!(g.spacing > 0.0)) throw TransportError("k-grid spacing must be positive");
}

}  // namespace

double DistributionFunction::energy(std::size_t j) const {
    const double k = grid.k(j);
    return k * k / (2.0 * mass);
}

double DistributionFunction::velocity(std::size_t j) const { return grid.k(j) / mass; }

double DistributionFunction::density() const { return f.sum() * grid.spacing; }

double DistributionFunction::mean_k() const {
    double s = 0.0;
    for (std::size_t j = 0; j < grid.points; ++j) s += grid.k(j) * f(static_cast<Eigen::Index>(j));
    const double n = f.sum();
    return n > 0.0 ? s / n : 0.0;
}

double DistributionFunction::drift_velocity() const { return mean_k() / mass; }

double DistributionFunction::current(double charge) const {
    double s = 0.0;
    for (std::size_t j = 0; j < grid.points; ++j) s += velocity(j) * f(static_cast<Eigen::Index>(j));
    return -charge * s * grid.spacing;
}

void DistributionFunction::validate() const {
    check_grid(grid);
    if (!(mass > 0.0)) throw TransportError("mass must be positive");
    if (f.size() != static_cast<Eigen::Index>(grid.points)) {
        throw DimensionError("distribution does not match its k-grid");
    }
    if (!f.allFinite()) throw TransportError("distribution is not finite");
}

double drude_conductivity(double density, double tau, double mass, double charge) {
    if (!(density > 0.0 && tau > 0.0 && mass > 0.0)) {
        throw TransportError("drude_conductivity: n, tau and m must be positive");
    }
    return density * charge * charge * tau / mass;
}

RealVector fermi_dirac(const KGrid& grid, double mass, double temperature, double mu) {
    check_grid(grid);
    if (!(temperature > 0.0)) throw TransportError("temperature must be positive");
    RealVector f(static_cast<Eigen::Index>(grid.points));
    for (std::size_t j = 0; j < grid.points; ++j) {
        const double k = grid.k(j);
        const double x = (k * k / (2.0 * mass) - mu) / temperature;
        // Written to stay finite for large |x|.
        f(static_cast<Eigen::Index>(j)) = x > 0 ? std::exp(-x) / (1.0 + std::exp(-x))
                                                : 1.0 / (1.0 + std::exp(x));
    }
    return f;
}

double chemical_potential(const KGrid& grid, double mass, double temperature, double density) {
    check_grid(grid);
    const double capacity = static_cast<double>(grid.points) * grid.spacing;
    if (!(density > 0.0 && density < capacity)) {
        throw TransportError("density " + std::to_string(density) +
                             " is not representable on the k-grid");
    }
    const double e_max = grid.k_max() * grid.k_max() / (2.0 * mass);
    double lo = -60.0 * temperature - e_max;
    double hi = e_max + 60.0 * temperature;
    for (int it = 0; it < 400 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double n = fermi_dirac(grid, mass, temperature, mid).sum() * grid.spacing;
        (n < density ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

DistributionFunction equilibrium(const KGrid& grid, double mass, double temperature,
                                 double density) {
    const double mu = chemical_potential(grid, mass, temperature, density);
    return DistributionFunction{grid, mass, fermi_dirac(grid, mass, temperature, mu)};
}

void check_rta_step(const DistributionFunction& f, const RtaParams& p, double dt) {
    if (!(p.tau > 0.0)) throw TransportError("relaxation time must be positive");
    if (!(p.temperature > 0.0)) throw TransportError("temperature must be positive");
    if (!(dt > 0.0 && dt < p.tau / 10.0)) {
        throw TransportError("time step must satisfy 0 < dt < tau/10");
    }
    if (!(std::abs(p.charge * p.field) * dt <= f.grid.spacing)) {
        throw TransportError("CFL violation: e |E| dt exceeds the k-grid spacing");
    }
}

void advect(DistributionFunction& f, double field, double charge, double dt) {
    // df/dt + c df/dk = 0 with c = -e E, conservative upwind fluxes.
    const double c = -charge * field;
    if (c == 0.0) return;
    const double nu = c * dt / f.grid.spacing;
    const auto n = static_cast<Eigen::Index>(f.grid.points);
    RealVector flux = RealVector::Zero(n + 1);  // flux(i) sits between cells i-1 and i
    for (Eigen::Index i = 1; i < n; ++i) flux(i) = nu * (nu > 0 ? f.f(i - 1) : f.f(i));
    for (Eigen::Index i = 0; i < n; ++i) f.f(i) += flux(i) - flux(i + 1);
}

DistributionFunction step_boltzmann_rta(const DistributionFunction& f0, const RtaParams& p,
                                        double dt) {
    f0.validate();
    check_rta_step(f0, p, dt);
    const double decay = std::exp(-0.5 * dt / p.tau);
    DistributionFunction f = f0;
    auto relax = [&](DistributionFunction& g) {
        const RealVector eq = equilibrium(g.grid, g.mass, p.temperature, g.density()).f;
        g.f = eq + decay * (g.f - eq);
    };
    relax(f);
    advect(f, p.field, p.charge, dt);
    relax(f);
    return f;
}

double PhononBath::occupation(double omega) const {
    if (!(omega > 0.0)) throw TransportError("phonon energy must be positive");
    return 1.0 / std::expm1(omega / temperature);
}

void PhononBath::validate() const {
    if (!(sound_speed > 0.0)) throw TransportError("sound speed must be positive");
    if (!(temperature >= 0.0)) throw TransportError("phonon temperature must be >= 0");
    if (!(w0 >= 0.0)) throw TransportError("scattering strength must be >= 0");
}

std::vector<PhononPair> phonon_pairs(const KGrid& grid, double mass, double sound_speed) {
    check_grid(grid);
    if (grid.points > 256) throw TransportError("phonon collision grid limited to 256 points");
    const auto n = static_cast<long>(grid.points);
    const auto s = static_cast<long>(std::lround(2.0 * mass * sound_speed / grid.spacing));
    std::vector<PhononPair> pairs;
    auto energy = [&](long j) {
        const double k = grid.k(static_cast<std::size_t>(j));
        return k * k / (2.0 * mass);
    };
    for (long j = 0; j < n; ++j) {
        for (long sign : {-1L, 1L}) {
            const long l = (n - 1) - j + sign * s;
            if (l < 0 || l >= n || l <= j) continue;  // each unordered pair once
            const double ej = energy(j), el = energy(l);
            if (ej == el) continue;
            PhononPair p{};
            p.upper = static_cast<std::size_t>(ej > el ? j : l);
            p.lower = static_cast<std::size_t>(ej > el ? l : j);
            p.omega = std::abs(ej - el);
            pairs.push_back(p);
        }
    }
    return pairs;
}

namespace {

RealVector collide(const RealVector& f, const std::vector<PhononPair>& pairs,
                   const PhononBath& bath) {
    RealVector d = RealVector::Zero(f.size());
    for (const auto& p : pairs) {
        const auto u = static_cast<Eigen::Index>(p.upper);
        const auto l = static_cast<Eigen::Index>(p.lower);
        const double g = bath.temperature > 0.0 ? bath.occupation(p.omega) : 0.0;
        const double emission = bath.w0 * f(u) * (1.0 - f(l)) * (1.0 + g);
        const double absorption = bath.w0 * f(l) * (1.0 - f(u)) * g;
        const double net = emission - absorption;
        d(u) -= net;
        d(l) += net;
    }
    return d;
}

}  // namespace

RealVector collision_integral_phonon(const DistributionFunction& f, const PhononBath& bath) {
    f.validate();
    bath.validate();
    return collide(f.f, phonon_pairs(f.grid, f.mass, bath.sound_speed), bath);
}

DistributionFunction step_boltzmann_phonon(const DistributionFunction& f0, double field,
                                           const PhononBath& bath, double dt, double charge) {
    f0.validate();
    bath.validate();
    if (!(dt > 0.0)) throw TransportError("time step must be positive");
    if (!(std::abs(charge * field) * dt <= f0.grid.spacing)) {
        throw TransportError("CFL violation: e |E| dt exceeds the k-grid spacing");
    }
    const auto pairs = phonon_pairs(f0.grid, f0.mass, bath.sound_speed);
    auto rk4 = [&](RealVector& y, double h) {
        const RealVector k1 = collide(y, pairs, bath);
        const RealVector k2 = collide(y + 0.5 * h * k1, pairs, bath);
        const RealVector k3 = collide(y + 0.5 * h * k2, pairs, bath);
        const RealVector k4 = collide(y + h * k3, pairs, bath);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    DistributionFunction f = f0;
    rk4(f.f, 0.5 * dt);
    advect(f, field, charge, dt);
    rk4(f.f, 0.5 * dt);
    return f;
}

SteadyState rta_steady_state(const DistributionFunction& f0, const RtaParams& p, double dt,
                             double t_max, double tol) {
    f0.validate();
    check_rta_step(f0, p, dt);
    DistributionFunction f = f0;
    const auto per_tau = static_cast<std::size_t>(std::ceil(p.tau / dt));
    double t = 0.0;
    double last = f.mean_k();
    while (t < t_max) {
        for (std::size_t i = 0; i < per_tau; ++i) f = step_boltzmann_rta(f, p, dt);
        t += static_cast<double>(per_tau) * dt;
        const double now = f.mean_k();
        const double scale = std::max(std::abs(now), f.grid.spacing * 1e-12);
        if (std::abs(now - last) <= tol * scale) break;
        last = now;
    }
    SteadyState s{f, t, f.current(p.charge), f.drift_velocity(), 0.0};
    s.conductivity = p.field != 0.0 ? s.current / p.field : 0.0;
    return s;
}

std::vector<CurrentFieldRow> current_field_table(const DistributionFunction& f0, RtaParams p,
                                                 const std::vector<double>& fields, double dt,
                                                 double t_max) {
    std::vector<CurrentFieldRow> rows;
    rows.reserve(fields.size());
    for (double e : fields) {
        p.field = e;
        const auto s = rta_steady_state(f0, p, dt, t_max);
        rows.push_back({e, s.current, s.drift_velocity});
    }
    return rows;
}

void write_current_field_csv(std::ostream& out, const std::vector<CurrentFieldRow>& rows) {
    out << "field,current,drift_velocity\n" << std::setprecision(17);
    for (const auto& r : rows) out << r.field << ',' << r.current << ',' << r.drift_velocity << '\n';
}

}  // namespace measchain::transport
