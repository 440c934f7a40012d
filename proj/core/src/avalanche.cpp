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

#include "measchain/avalanche.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

namespace measchain::avalanche {

void AvalancheState::validate() const {
    if (n_e.size() == 0 || n_e.size() != n_b.size()) {
        throw AvalancheError("avalanche state: n_e and n_b must share a non-empty grid");
    }
    if (!(length > 0.0)) throw AvalancheError("avalanche length must be positive");
    if (!(v > 0.0)) throw AvalancheError("drift speed must be positive");
    if (!(alpha_rate >= 0.0)) throw AvalancheError("alpha_rate must be >= 0");
    if (!(inflow >= 0.0)) throw AvalancheError("inflow density must be >= 0");
    if (!(n_e.minCoeff() >= 0.0 && n_b.minCoeff() >= 0.0)) {
        throw AvalancheError("densities must be non-negative");
    }
}

AvalancheState make_state(std::size_t cells, double length, double v, double alpha_rate,
                          double bound_density, double seed_charge, double z0, double width) {
    if (cells == 0) throw AvalancheError("need at least one cell");
    if (!(bound_density >= 0.0)) throw AvalancheError("bound density must be >= 0");
    if (!(seed_charge >= 0.0)) throw AvalancheError("seed charge must be >= 0");
    if (!(width > 0.0)) throw AvalancheError("seed width must be positive");
    AvalancheState s;
    s.length = length;
    s.v = v;
    s.alpha_rate = alpha_rate;
    const auto n = static_cast<Eigen::Index>(cells);
    s.n_b = RealVector::Constant(n, bound_density);
    s.n_e = RealVector::Zero(n);
    const double dz = length / static_cast<double>(cells);
    // Cell averages of the Gaussian via the error function.
    for (Eigen::Index i = 0; i < n; ++i) {
        const double a = (static_cast<double>(i) * dz - z0) / (std::sqrt(2.0) * width);
        const double b = (static_cast<double>(i + 1) * dz - z0) / (std::sqrt(2.0) * width);
        s.n_e(i) = 0.5 * (std::erf(b) - std::erf(a)) / dz;
    }
    const double q = s.n_e.sum() * dz;
    if (seed_charge > 0.0) {
        if (!(q > 0.0)) throw AvalancheError("seed pulse lies outside the domain");
        s.n_e *= seed_charge / q;
    } else {
        s.n_e.setZero();
    }
    s.validate();
    return s;
}

namespace {

// Bound charge converted in one cell over dt with advection frozen. With
// S = n_e + n_b fixed the reaction is logistic and
// n_b(dt) = S n_b / (n_b + n_e e^{alpha S dt}).
double reacted(double alpha, double ne, double nb, double dt) {
    if (alpha == 0.0 || ne == 0.0 || nb == 0.0) return 0.0;
    const double s = ne + nb;
    const double g = std::expm1(alpha * s * dt);
    // nb - n_b(dt) = nb ne (e^{alpha S dt} - 1) / (nb + ne e^{alpha S dt})
    return nb * ne * g / (s + ne * g);
}

}  // namespace

AvalancheState react(const AvalancheState& s, double dt, StepReport* report) {
    if (!(dt >= 0.0)) throw AvalancheError("time step must be non-negative");
    AvalancheState out = s;
    StepReport rep;
    const double dz = s.dz();
    for (Eigen::Index i = 0; i < s.n_e.size(); ++i) {
        double r = reacted(s.alpha_rate, s.n_e(i), s.n_b(i), dt);
        if (r > s.n_b(i)) {
            r = s.n_b(i);
            ++rep.clamps;
        }
        out.n_e(i) += r;
        out.n_b(i) -= r;
        rep.consumed += r * dz;
    }
    if (report) *report = rep;
    return out;
}

AvalancheState step_avalanche(const AvalancheState& s, double dt, StepReport* report) {
    const double dz = s.dz();
    const double nu = s.v * dt / dz;
    if (!(dt > 0.0)) throw AvalancheError("time step must be positive");
    if (nu > 1.0 + 1e-12) {
        throw AvalancheError("CFL violation: v dt / dz = " + std::to_string(nu) + " > 1");
    }
    const auto n = static_cast<Eigen::Index>(s.cells());
    StepReport first, second;
    const AvalancheState m = react(s, 0.5 * dt, &first);
    AvalancheState out = m;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double upstream = i > 0 ? m.n_e(i - 1) : m.inflow;
        out.n_e(i) = m.n_e(i) - nu * (m.n_e(i) - upstream);
    }
    out = react(out, 0.5 * dt, &second);
    if (report) {
        report->outflow = nu * m.n_e(n - 1) * dz;
        report->inflow = nu * s.inflow * dz;
        report->consumed = first.consumed + second.consumed;
        report->clamps = first.clamps + second.clamps;
    }
    return out;
}

double AvalancheRun::conservation_defect() const {
    const double in = seed_charge + injected + consumed;
    const double out = exited + final_state.excited_charge();
    return (in - out) / (seed_charge > 0.0 ? seed_charge : 1.0);
}

AvalancheRun run_avalanche(const AvalancheState& initial, const AvalancheOptions& opt) {
    initial.validate();
    if (!(opt.cfl > 0.0 && opt.cfl <= 1.0)) throw AvalancheError("cfl must lie in (0, 1]");
    if (opt.record_every == 0) throw AvalancheError("record_every must be >= 1");
    AvalancheRun run;
    run.final_state = initial;
    run.seed_charge = initial.excited_charge();
    run.initial_bound_charge = initial.bound_charge();
    run.dt = opt.cfl * initial.dz() / initial.v;
    const double transit = initial.length / initial.v;
    const double t_max = opt.t_max > 0.0 ? opt.t_max : 50.0 * transit;
    const double scale = run.seed_charge > 0.0 ? run.seed_charge : 1.0;

    AvalancheState s = initial;
    double t = 0.0;
    run.times.push_back(0.0);
    run.current.push_back(0.0);
    if (opt.dump_fields) run.fields.push_back({0.0, s.n_e, s.n_b});
    while (true) {
        if (s.inflow == 0.0 && s.excited_charge() <= opt.quiescence * scale) {
            run.quiescent = true;
            break;
        }
        if (t >= t_max) break;
        StepReport rep;
        s = step_avalanche(s, run.dt, &rep);
        t += run.dt;
        ++run.steps;
        run.exited += rep.outflow;
        run.injected += rep.inflow;
        run.consumed += rep.consumed;
        run.clamp_events += rep.clamps;
        if (run.steps % opt.record_every == 0) {
            run.times.push_back(t);
            run.current.push_back(rep.outflow / run.dt);
            if (opt.dump_fields) run.fields.push_back({t, s.n_e, s.n_b});
        }
    }
    run.final_state = std::move(s);
    return run;
}

double gain(const AvalancheRun& run) {
    if (!run.quiescent) {
        throw AvalancheError("gain: the run did not reach outflow quiescence");
    }
    if (!(run.seed_charge > 0.0)) throw AvalancheError("gain: no seed charge");
    return run.exited / run.seed_charge;
}

double linear_gain(double alpha_rate, double bound_density, double distance, double v) {
    return std::exp(alpha_rate * bound_density * distance / v);
}

void write_waveform_csv(std::ostream& out, const AvalancheRun& run) {
    out << "t,current\n" << std::setprecision(17);
    for (std::size_t i = 0; i < run.times.size(); ++i) {
        out << run.times[i] << ',' << run.current[i] << '\n';
    }
}

void write_fields_csv(std::ostream& out, const AvalancheRun& run) {
    out << "t,z,n_e,n_b\n" << std::setprecision(17);
    const AvalancheState& s = run.final_state;
    for (const auto& f : run.fields) {
        for (Eigen::Index i = 0; i < f.n_e.size(); ++i) {
            out << f.t << ',' << s.z(static_cast<std::size_t>(i)) << ',' << f.n_e(i) << ','
                << f.n_b(i) << '\n';
        }
    }
}

}  // namespace measchain::avalanche
