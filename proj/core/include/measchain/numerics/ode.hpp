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

// Explicit Runge-Kutta integrators over Eigen dense objects (vectors or
// matrices). The state type only needs the usual Eigen arithmetic, so a
// density matrix can be integrated directly without flattening.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace measchain {

/// Raised when the adaptive controller cannot meet the tolerance with a
/// representable step. Usually a stiff or singular right-hand side.
class StepSizeUnderflow : public std::runtime_error {
  public:
    StepSizeUnderflow(double t, double h)
        : std::runtime_error(describe(t, h)), time(t), step(h) {}
    double time;
    double step;

  private:
    static std::string describe(double t, double h) {
        std::ostringstream os;
        os << "step size underflow at t=" << t << " (h=" << h
           << "); derivative is stiff or singular on this interval";
        return os.str();
    }
};

struct OdeOptions {
    double tol = 1e-8;  // absolute and relative local error bound
    double initial_step = 0.0;  // 0 selects a starting step automatically
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 50'000'000;
};

template <class State>
struct OdeResult {
    State y;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    double last_step = 0.0;
};

namespace detail {

template <class State>
double max_abs(const State& s) {
    return s.size() == 0 ? 0.0 : static_cast<double>(s.cwiseAbs().maxCoeff());
}

template <class State>
bool all_finite(const State& s) {
    return s.allFinite();
}

}  // namespace detail

/// Dormand-Prince 5(4) with PI step-size control.
///
/// Each accepted step satisfies |err_i| <= tol * (1 + max(|y_i|, |y_new_i|))
/// componentwise. Integration backwards in time (t1 < t0) is supported.
/// `observer(t, y)` is called at t0 and after every accepted step.
template <class State, class Derivative, class Observer>
OdeResult<State> integrate_ode(State y, Derivative&& f, double t0, double t1,
                               const OdeOptions& opt, Observer&& observer) {
    if (!(opt.tol > 0.0)) throw std::invalid_argument("integrate_ode: tol must be positive");

    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeResult<State> result;
    observer(t0, y);
    const double span = t1 - t0;
    if (span == 0.0) {
        result.y = std::move(y);
        return result;
    }
    const double dir = span > 0 ? 1.0 : -1.0;

    double t = t0;
    State k1 = f(t, y);
    if (!detail::all_finite(k1)) throw StepSizeUnderflow(t, 0.0);

    double h = opt.initial_step;
    if (h <= 0.0) {
        // Hairer-Norsett-Wanner starting step.
        const double d0 = detail::max_abs(y) + 1e-300;
        const double d1 = detail::max_abs(k1) + 1e-300;
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, std::abs(span));
        State y1 = y + (dir * h0) * k1;
        State k2 = f(t + dir * h0, y1);
        const double d2 = detail::max_abs(State(k2 - k1)) / h0;
        const double h1 = std::max(d1, d2) <= 1e-15
                              ? std::max(1e-6, h0 * 1e-3)
                              : std::pow(0.01 * opt.tol / std::max(d1, d2), 1.0 / 5.0);
        h = std::min(100 * h0, h1);
    }
    h = std::min({h, opt.max_step, std::abs(span)});

    constexpr double beta = 0.04;
    constexpr double alpha = 0.2 - 0.75 * beta;
    double err_prev = 1e-4;

    while (dir * (t1 - t) > 0.0) {
        if (result.accepted + result.rejected >= opt.max_steps) {
            throw std::runtime_error("integrate_ode: maximum number of steps exceeded");
        }
        bool last = false;
        if (h >= std::abs(t1 - t)) {
            h = std::abs(t1 - t);
            last = true;
        }
        const double min_step = 16.0 * std::numeric_limits<double>::epsilon() *
                                std::max(1.0, std::abs(t));
        if (h < min_step) throw StepSizeUnderflow(t, h);

        const double hs = dir * h;
        State k2 = f(t + c2 * hs, State(y + hs * (a21 * k1)));
        State k3 = f(t + c3 * hs, State(y + hs * (a31 * k1 + a32 * k2)));
        State k4 = f(t + c4 * hs, State(y + hs * (a41 * k1 + a42 * k2 + a43 * k3)));
        State k5 = f(t + c5 * hs, State(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
        State k6 = f(t + hs, State(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 +
                                             a65 * k5)));
        State y_new = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        State k7 = f(t + hs, y_new);
        State err_vec = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err = 0.0;
        bool finite = detail::all_finite(y_new) && detail::all_finite(k7);
        if (finite) {
            for (Eigen::Index i = 0; i < err_vec.size(); ++i) {
                const double scale =
                    opt.tol * (1.0 + std::max(std::abs(y.data()[i]), std::abs(y_new.data()[i])));
                err = std::max(err, std::abs(err_vec.data()[i]) / scale);
            }
        } else {
            err = std::numeric_limits<double>::infinity();
        }

        if (err <= 1.0) {
            t = last ? t1 : t + hs;
            y = std::move(y_new);
            k1 = std::move(k7);
            ++result.accepted;
            result.last_step = h;
            observer(t, y);
            double fac = 0.9 * std::pow(std::max(err, 1e-10), -alpha) * std::pow(err_prev, beta);
            fac = std::clamp(fac, 0.2, 5.0);
            h = std::min(h * fac, opt.max_step);
            err_prev = std::max(err, 1e-4);
        } else {
            ++result.rejected;
            const double fac =
                std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -alpha)) : 0.1;
            h *= fac;
        }
    }
    result.y = std::move(y);
    return result;
}

template <class State, class Derivative>
OdeResult<State> integrate_ode(State y, Derivative&& f, double t0, double t1,
                               const OdeOptions& opt = {}) {
    return integrate_ode(std::move(y), std::forward<Derivative>(f), t0, t1, opt,
                         [](double, const State&) {});
}

/// One classical RK4 step of size h.
template <class State, class Derivative>
State rk4_step(const State& y, Derivative&& f, double t, double h) {
    const State k1 = f(t, y);
    const State k2 = f(t + 0.5 * h, State(y + (0.5 * h) * k1));
    const State k3 = f(t + 0.5 * h, State(y + (0.5 * h) * k2));
    const State k4 = f(t + h, State(y + h * k3));
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Fixed-step RK4 over [t0, t1] with n_steps equal steps.
template <class State, class Derivative>
State integrate_rk4(State y, Derivative&& f, double t0, double t1, std::size_t n_steps) {
    if (n_steps == 0) throw std::invalid_argument("integrate_rk4: n_steps must be positive");
    const double h = (t1 - t0) / static_cast<double>(n_steps);
    for (std::size_t i = 0; i < n_steps; ++i) {
        y = rk4_step(y, f, t0 + static_cast<double>(i) * h, h);
    }
    return y;
}

}  // namespace measchain
