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

// Moving-coil ammeter: J theta'' = N I A B cos(theta) - eta theta' - c theta.

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace measchain::pointer {

class PointerError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct PointerParams {
    double inertia = 1.0;    // J
    double turns = 1.0;      // N
    double coil_area = 1.0;  // A
    double field = 1.0;      // B
    double damping = 1.0;    // eta
    double spring = 1.0;     // c

    void validate() const;
    /// Torque per unit cos(theta), N I A B.
    double drive(double current) const { return turns * current * coil_area * field; }
    /// Amplitude decay time 2 J / eta.
    double damping_time() const { return 2.0 * inertia / damping; }
};

struct PointerState {
    double theta = 0.0;
    double theta_dot = 0.0;
};

/// Mechanical energy J theta'^2 / 2 + c theta^2 / 2.
double mechanical_energy(const PointerParams& p, const PointerState& s);

/// Piecewise-linear current waveform, zero outside its time base.
class CurrentWaveform {
  public:
    CurrentWaveform() = default;
    CurrentWaveform(std::vector<double> times, std::vector<double> values);
    static CurrentWaveform constant(double current);

    double operator()(double t) const;
    double peak() const;
    /// Time average over the time base.
    double mean() const;
    double duration() const { return times_.empty() ? 0.0 : times_.back() - times_.front(); }

  private:
    std::vector<double> times_;
    std::vector<double> values_;
    bool constant_ = false;
    double level_ = 0.0;
};

struct PointerSample {
    double t;
    PointerState state;
};

/// Adaptive Dormand-Prince integration over [0, t], sampled at every
/// accepted step.
std::vector<PointerSample> integrate_pointer(const PointerParams& p, const PointerState& initial,
                                             const CurrentWaveform& current, double t,
                                             double tol = 1e-10);

/// Root of c theta = N I A B cos(theta) by bisection on [-pi/2, pi/2].
/// Requires |N I A B| / c < pi/2.
double settled_angle(const PointerParams& p, double current);

struct SettleResult {
    bool settled = false;
    double time = 0.0;   // when the criterion started to hold
    double angle = 0.0;  // theta at the end of the run
    double root = 0.0;
};

/// Integrates under a constant current until |theta'| < 1e-6 and
/// |theta - root| < 1e-4 hold for one damping time, or t_max is reached.
SettleResult settle(const PointerParams& p, double current, const PointerState& initial,
                    double t_max, double tol = 1e-10);

/// CSV: t, theta, theta_dot.
void write_pointer_csv(std::ostream& out, const std::vector<PointerSample>& samples);

}  // namespace measchain::pointer
