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

// Single photons behind a double slit, detected by a row of M photodiodes.
// Each photon is absorbed coherently by the whole array (site couplings
// proportional to the photon amplitude at the pixel), then a collapse
// trajectory over the M + 1 blocks (no click, pixel 1..M) picks the outcome.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "measchain/absorption.hpp"
#include "measchain/bath/hybrid.hpp"
#include "measchain/numerics/linalg.hpp"
#include "measchain/numerics/rng.hpp"
#include "measchain/unraveling.hpp"

namespace measchain::twoslit {

class TwoSlitError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct SlitGeometry {
    double slit_separation = 1e-4;     // d
    double slit_width = 2e-5;          // a
    double screen_distance = 1.0;      // L
    double photon_wavelength = 5e-7;   // lambda_ph

    void validate() const;
    /// L / d at or above which the far-field formula is trusted.
    static constexpr double kFarFieldRatio = 100.0;
    bool far_field() const { return screen_distance >= kFarFieldRatio * slit_separation; }
    /// Position of the first interference null, lambda_ph L / (2 d).
    double first_null() const;
};

/// Fraunhofer amplitude cos(pi d x / (lambda L)) sinc(pi a x / (lambda L)),
/// unnormalized (value 1 at x = 0).
double slit_amplitude(const SlitGeometry& geom, double x);

struct DetectorArray {
    std::vector<double> positions;
    double pixel_area = 1.0;
    std::vector<Complex> amplitudes;  // sum |A_n|^2 = 1

    /// Any amplitude vector, normalized.
    static DetectorArray from_amplitudes(std::vector<double> positions,
                                         std::vector<Complex> amplitudes, double pixel_area);
    /// M equal pixels tiling [-half_width, half_width], amplitudes sampled at
    /// the pixel centres.
    static DetectorArray tile_screen(const SlitGeometry& geom, std::size_t pixels,
                                     double half_width);

    std::size_t size() const { return amplitudes.size(); }
    std::vector<double> intensities() const;
};

struct ExperimentSettings {
    std::optional<Complex> coupling_scale;  // g_n = scale * A_n; unset gives G tau = pi/2
    std::size_t electrons_per_site = 1;
    double tau = 1.0;
    double gamma = 1.0;          // bath rate in each pixel block
    unraveling::Scheme scheme = unraveling::Scheme::jump;
    double dt_gamma = 0.05;       // dt in units of 1/gamma
    double horizon_decoherence_times = 20.0;

    void validate() const;
};

/// Absorption result and collapse model shared by every photon.
struct PreparedExperiment {
    DetectorArray array;
    absorption::CouplingModel coupling;
    absorption::AmplitudeState absorbed;
    bath::HybridModel model;
    ComplexVector initial;
    unraveling::TrajectoryOptions trajectory;
    unraveling::Scheme scheme = unraveling::Scheme::jump;
};

PreparedExperiment prepare_experiment(const DetectorArray& array, const ExperimentSettings& s);

struct ClickOutcome {
    enum class Kind { click, no_click, unresolved };
    Kind kind = Kind::unresolved;
    std::size_t detector = 0;  // 0-based pixel index for clicks
};

ClickOutcome simulate_photon(const PreparedExperiment& exp, RngStream rng);

struct ClickHistogram {
    std::vector<std::size_t> counts;
    std::size_t total_photons = 0;
    std::size_t no_click_count = 0;
    std::size_t unresolved_count = 0;  // counted separately, never dropped
};

struct FitReport {
    std::vector<double> probabilities;     // |A_n|^2 / sum |A_m|^2
    std::vector<double> expected_counts;   // conditioned on clicking
    double chi_square = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
    double max_sigma_deviation = 0.0;      // max |obs - exp| / binomial sigma
    double no_click_expected = 0.0;        // |alpha(tau)|^2 from the array ODE
    double no_click_aggregate = 0.0;       // cos^2(G tau), G = sqrt(sum |gt_n|^2)
    double no_click_observed = 0.0;
};

/// Pearson chi-square of the click counts against |A_n|^2, cells with zero
/// expectation excluded.
FitReport goodness_of_fit(const ClickHistogram& h, const PreparedExperiment& exp);

struct ExperimentResult {
    ClickHistogram histogram;
    FitReport fit;
};

/// Photon i runs on stream (master_seed, i). Histogram and fit do not depend
/// on the thread count.
ExperimentResult run_experiment(const PreparedExperiment& exp, std::size_t n_photons,
                                std::uint64_t master_seed, unsigned threads = 1);

/// CSV: x_n, |A_n|^2, expected_count, observed_count.
void write_histogram_csv(std::ostream& out, const PreparedExperiment& exp,
                         const ExperimentResult& result);

}  // namespace measchain::twoslit
