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

#include "measchain/pointer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <string>

#include <Eigen/Core>

#include "measchain/numerics/ode.hpp"

namespace measchain::pointer {

namespace {

constexpr double kRateTol = 1e-6;
constexpr double kAngleTol = 1e-4;

}  // namespace

void PointerParams::validate() const {
    if (!(inertia > 0.0 && damping > 0.0 && spring > 0.0)) {
        throw PointerError("pointer: J, eta and c must be positive");
    }
    if (!std::isfinite(turns * coil_area * field)) throw PointerError("pointer: N A B not finite");
}

double mechanical_energy(const PointerParams& p, const PointerState& s) {
    return 0.5 * p.inertia * s.theta_dot * s.theta_dot + 0.5 * p.spring * s.theta * s.theta;
}

CurrentWaveform::CurrentWaveform(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
    if (times_.size() != values_.size()) {
        throw PointerError("current waveform: times and values differ in length");
    }
    if (!std::is_sorted(times_.begin(), times_.end())) {
        throw PointerError("current waveform: times must be non-decreasing");
    }
}

CurrentWaveform CurrentWaveform::constant(double current) {
    CurrentWaveform w;
    w.constant_ = true;
    w.level_ = current;
    return w;
}

double CurrentWaveform::operator()(double t) const {
    if (constant_) return level_;
    if (times_.empty() || t < times_.front() || t > times_.back()) return 0.0;
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.end()) return values_.back();
    const auto i = static_cast<std::size_t>(it - times_.begin());
    if (i == 0) return values_.front();
    const double t0 = times_[i - 1], t1 = times_[i];
    const double w = t1 > t0 ? (t - t0) / (t1 - t0) : 1.0;
    return values_[i - 1] + w * (values_[i] - values_[i - 1]);
}

double CurrentWaveform::peak() const {
    if (constant_) return level_;
    double m = 0.0;
    for (double v : values_) m = std::abs(v) > std::abs(m) ? v : m;
    return m;
}

double CurrentWaveform::mean() const {
    if (constant_) return level_;
    if (times_.size() < 2 || duration() <= 0.0) return 0.0;
    double area = 0.0;
    for (std::size_t i = 1; i < times_.size(); ++i) {
        area += 0.5 * (values_[i] + values_[i - 1]) * (times_[i] - times_[i - 1]);
    }
    return area / duration();
}

std::vector<PointerSample> integrate_pointer(const PointerParams& p, const PointerState& initial,
                                             const CurrentWaveform& current, double t,
                                             double tol) {
    p.validate();
    if (!(tol > 0.0)) throw PointerError("integrate_pointer: tol must be positive");
    auto rhs = [&](double tt, const Eigen::Vector2d& y) {
        Eigen::Vector2d d;
        d(0) = y(1);
        d(1) = (p.drive(current(tt)) * std::cos(y(0)) - p.damping * y(1) - p.spring * y(0)) /
               p.inertia;
        return d;
    };
    std::vector<PointerSample> out;
    OdeOptions opt;
    opt.tol = tol;
    opt.max_step = p.damping_time() / 4.0;
    integrate_ode(Eigen::Vector2d(initial.theta, initial.theta_dot), rhs, 0.0, t, opt,
                  [&](double tt, const Eigen::Vector2d& y) {
                      out.push_back({tt, PointerState{y(0), y(1)}});
                  });
    return out;
}

double settled_angle(const PointerParams& p, double current) {
    p.validate();
    const double k = p.drive(current);
    if (!(std::abs(k) / p.spring < std::numbers::pi / 2.0)) {
        throw PointerError("drive out of the single-root regime: |N I A B| / c = " +
                           std::to_string(std::abs(k) / p.spring) + " >= pi/2");
    }
    if (k == 0.0) return 0.0;
    auto g = [&](double th) { return p.spring * th - k * std::cos(th); };
    double lo = k > 0 ? 0.0 : -std::numbers::pi / 2.0;
    double hi = k > 0 ? std::numbers::pi / 2.0 : 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

SettleResult settle(const PointerParams& p, double current, const PointerState& initial,
                    double t_max, double tol) {
    SettleResult r;
    r.root = settled_angle(p, current);
    const auto samples = integrate_pointer(p, initial, CurrentWaveform::constant(current), t_max, tol);
    const double hold = p.damping_time();
    bool holding = false;
    for (const auto& s : samples) {
        const bool ok = std::abs(s.state.theta_dot) < kRateTol &&
                        std::abs(s.state.theta - r.root) < kAngleTol;
        if (ok && !holding) {
            holding = true;
            r.time = s.t;
        } else if (!ok) {
            holding = false;
        }
        if (holding && s.t - r.time >= hold) {
            r.settled = true;
            r.angle = s.state.theta;
            return r;
        }
    }
    r.angle = samples.back().state.theta;
    return r;
}

void write_pointer_csv(std::ostream& out, const std::vector<PointerSample>& samples) {
    out << "t,theta,theta_dot\n" << std::setprecision(17);
    for (const auto& s : samples) {
        out << s.t << ',' << s.state.theta << ',' << s.state.theta_dot << '\n';
    }
}

}  // namespace measchain::pointer
