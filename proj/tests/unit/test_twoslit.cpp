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
#include <numbers>
#include <sstream>
#include <vector>

#include "measchain/twoslit.hpp"
#include "oracles.hpp"

using namespace measchain;
using namespace measchain::twoslit;

namespace {

std::size_t sum(const std::vector<std::size_t>& v) {
    std::size_t s = 0;
    for (auto x : v) s += x;
    return s;
}

void check_histogram_invariant(const ClickHistogram& h) {
    CHECK(sum(h.counts) + h.no_click_count + h.unresolved_count == h.total_photons);
}

}  // namespace

TEST_CASE("slit amplitude: maximum at the centre, parity and first null") {
    const SlitGeometry g;
    const double a0 = slit_amplitude(g, 0.0);
    CHECK(a0 == 1.0);
    for (double x = -2e-2; x <= 2e-2; x += 1.3e-4) {
        CHECK(std::abs(slit_amplitude(g, x)) <= a0);
        CHECK(slit_amplitude(g, -x) == doctest::Approx(slit_amplitude(g, x)).epsilon(1e-14));
    }
    CHECK(g.first_null() == doctest::Approx(5e-7 / 2e-4));
    CHECK(std::norm(slit_amplitude(g, g.first_null())) < 1e-28);
    // Single-slit envelope zero at lambda L / a.
    CHECK(std::abs(slit_amplitude(g, 5e-7 / 2e-5)) < 1e-14);
}

TEST_CASE("slit geometry: invalid values rejected, far field is only a flag") {
    CHECK_THROWS_AS(slit_amplitude(SlitGeometry{0.0, 1e-5, 1.0, 5e-7}, 0.0), TwoSlitError);
    CHECK_THROWS_AS(SlitGeometry({1e-4, -1.0, 1.0, 5e-7}).validate(), TwoSlitError);
    const SlitGeometry near{1e-2, 1e-3, 0.1, 5e-7};
    CHECK_NOTHROW(near.validate());
    CHECK_FALSE(near.far_field());
    CHECK(SlitGeometry{}.far_field());
}

TEST_CASE("detector array: tiling is normalized and symmetric") {
    const SlitGeometry g;
    const auto arr = DetectorArray::tile_screen(g, 16, 5e-7 / 2e-5);
    REQUIRE(arr.size() == 16);
    double s = 0;
    for (auto a : arr.amplitudes) s += std::norm(a);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t n = 0; n < 16; ++n) {
        CHECK(arr.positions[n] == doctest::Approx(-arr.positions[15 - n]));
        CHECK(std::abs(arr.amplitudes[n] - arr.amplitudes[15 - n]) < 1e-14);
    }
    CHECK(arr.pixel_area == doctest::Approx(2.0 * 5e-7 / 2e-5 / 16));
    CHECK_THROWS_AS(DetectorArray::tile_screen(g, 0, 1.0), TwoSlitError);
    CHECK_THROWS_AS(DetectorArray::from_amplitudes({0.0}, {Complex(0, 0)}, 1.0), TwoSlitError);
    CHECK_THROWS_AS(DetectorArray::from_amplitudes({0.0, 1.0}, {Complex(1, 0)}, 1.0), TwoSlitError);
}

TEST_CASE("single detector at G tau = pi/2 always clicks") {
    const auto arr = DetectorArray::from_amplitudes({0.0}, {Complex(1, 0)}, 1.0);
    const auto exp = prepare_experiment(arr, ExperimentSettings{});
    CHECK(exp.absorbed.no_click_probability() < 1e-12);
    const auto r = run_experiment(exp, 10000, 1);
    check_histogram_invariant(r.histogram);
    CHECK(r.histogram.counts[0] == 10000);
    CHECK(r.histogram.unresolved_count == 0);
}

TEST_CASE("two equal detectors click 1:1 within 3 sigma") {
    const auto arr = DetectorArray::from_amplitudes({-1.0, 1.0}, {Complex(1, 0), Complex(0, 1)}, 1.0);
    const auto r = run_experiment(prepare_experiment(arr, ExperimentSettings{}), 10000, 2);
    check_histogram_invariant(r.histogram);
    const double n = double(sum(r.histogram.counts));
    CHECK(n == 10000);
    CHECK(std::abs(double(r.histogram.counts[0]) - n / 2) <= 3.0 * std::sqrt(n / 4));
}

TEST_CASE("detuned short tau leaves the photon unabsorbed 90% of the time") {
    const auto arr = DetectorArray::from_amplitudes({-1.0, 0.0, 1.0},
                                                    {Complex(0.5, 0), Complex(1, 0), Complex(0.5, 0)}, 1.0);
    ExperimentSettings s;
    s.tau = 0.3;
    s.coupling_scale = std::acos(std::sqrt(0.9)) / s.tau;
    const auto exp = prepare_experiment(arr, s);
    const auto r = run_experiment(exp, 10000, 3);
    check_histogram_invariant(r.histogram);
    CHECK(r.fit.no_click_expected == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(r.fit.no_click_aggregate == doctest::Approx(r.fit.no_click_expected).epsilon(1e-9));
    const double sigma = std::sqrt(0.9 * 0.1 / 10000);
    CHECK(std::abs(r.fit.no_click_observed - 0.9) <= 3.0 * sigma);
}

TEST_CASE("no-click probability: array ODE and aggregate coupling agree") {
    auto rng = rng_split(8, 0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Complex> amps;
        std::vector<double> xs;
        for (int i = 0; i < 7; ++i) {
            amps.push_back(rng.complex_normal());
            xs.push_back(i);
        }
        ExperimentSettings s;
        s.coupling_scale = 0.2 + rng.uniform();
        s.tau = 0.5 + rng.uniform();
        s.electrons_per_site = 1 + trial;
        const auto exp = prepare_experiment(DetectorArray::from_amplitudes(xs, amps, 1.0), s);
        ClickHistogram h;
        h.counts.assign(7, 0);
        const auto f = goodness_of_fit(h, exp);
        CHECK(f.no_click_expected == doctest::Approx(f.no_click_aggregate).epsilon(1e-8));
    }
}

TEST_CASE("scale invariance: doubling every amplitude changes nothing") {
    const std::vector<double> xs{-1.0, 0.0, 1.0, 2.0};
    const std::vector<Complex> a{Complex(0.2, 0.1), Complex(0.7, 0), Complex(0, 0.4), Complex(0.3, 0)};
    std::vector<Complex> b = a;
    for (auto& v : b) v *= 2.0;
    const auto ea = prepare_experiment(DetectorArray::from_amplitudes(xs, a, 1.0), {});
    const auto eb = prepare_experiment(DetectorArray::from_amplitudes(xs, b, 1.0), {});
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(ea.array.intensities()[i] == doctest::Approx(eb.array.intensities()[i]).epsilon(1e-14));
    }
    const auto ra = run_experiment(ea, 3000, 4);
    const auto rb = run_experiment(eb, 3000, 4);
    CHECK(ra.histogram.counts == rb.histogram.counts);
}

TEST_CASE("run_experiment: deterministic and independent of the thread count") {
    const auto arr = DetectorArray::tile_screen(SlitGeometry{}, 8, 5e-7 / 2e-5);
    const auto exp = prepare_experiment(arr, {});
    const auto a = run_experiment(exp, 5000, 17, 1);
    const auto b = run_experiment(exp, 5000, 17, 1);
    const auto c = run_experiment(exp, 5000, 17, 3);
    CHECK(a.histogram.counts == b.histogram.counts);
    CHECK(a.histogram.counts == c.histogram.counts);
    CHECK(a.fit.chi_square == c.fit.chi_square);
    CHECK_THROWS_AS(run_experiment(exp, 0, 17), TwoSlitError);
}

TEST_CASE("sixteen pixels follow |A_n|^2 conditioned on clicking") {
    const auto arr = DetectorArray::tile_screen(SlitGeometry{}, 16, 5e-7 / 2e-5);
    const auto exp = prepare_experiment(arr, {});
    const auto r = run_experiment(exp, 20000, 42);
    check_histogram_invariant(r.histogram);
    CHECK(r.histogram.unresolved_count == 0);
    CHECK(r.fit.p_value > 0.01);
    // Same p-value from the independent incomplete gamma oracle.
    CHECK(r.fit.p_value ==
          doctest::Approx(oracle::gamma_q(0.5 * double(r.fit.dof), 0.5 * r.fit.chi_square)).epsilon(1e-10));
}

TEST_CASE("goodness of fit: clicks where |A|^2 = 0 give p = 0") {
    const auto arr = DetectorArray::from_amplitudes({0.0, 1.0}, {Complex(1, 0), Complex(0, 0)}, 1.0);
    const auto exp = prepare_experiment(arr, {});
    ClickHistogram h;
    h.counts = {10, 1};
    h.total_photons = 11;
    const auto f = goodness_of_fit(h, exp);
    CHECK(f.p_value == 0.0);
    CHECK(f.dof == 0);
}

TEST_CASE("diffusive collapse gives the same conditional statistics") {
    const auto arr = DetectorArray::from_amplitudes({-1.0, 1.0}, {Complex(1, 0), Complex(1, 0)}, 1.0);
    ExperimentSettings s;
    s.scheme = unraveling::Scheme::diffusive;
    s.dt_gamma = 0.01;
    s.horizon_decoherence_times = 30.0;
    const auto r = run_experiment(prepare_experiment(arr, s), 2000, 5);
    check_histogram_invariant(r.histogram);
    const double n = double(sum(r.histogram.counts));
    REQUIRE(n > 1800);
    CHECK(std::abs(double(r.histogram.counts[0]) - n / 2) <= 3.0 * std::sqrt(n / 4));
}

TEST_CASE("histogram CSV has one row per pixel") {
    const auto arr = DetectorArray::tile_screen(SlitGeometry{}, 4, 5e-7 / 2e-5);
    const auto exp = prepare_experiment(arr, {});
    const auto r = run_experiment(exp, 100, 1);
    std::ostringstream os;
    write_histogram_csv(os, exp, r);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "x_n,intensity,expected_count,observed_count");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 4);
}
