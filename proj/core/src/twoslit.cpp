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

#include "measchain/twoslit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include <boost/math/special_functions/gamma.hpp>

namespace measchain::twoslit {

namespace {

constexpr std::size_t kPhotonChunk = 1024;

double sinc(double u) { return std::abs(u) < 1e-8 ? 1.0 - u * u / 6.0 : std::sin(u) / u; }

}  // namespace

void SlitGeometry::validate() const {
    if (!(slit_separation > 0.0 && slit_width > 0.0 && screen_distance > 0.0 &&
          photon_wavelength > 0.0)) {
        throw TwoSlitError("slit geometry: d, a, L and the wavelength must be positive");
    }
}

double SlitGeometry::first_null() const {
    return photon_wavelength * screen_distance / (2.0 * slit_separation);
}

double slit_amplitude(const SlitGeometry& geom, double x) {
    geom.validate();
    const double k = std::numbers::pi * x / (geom.photon_wavelength * geom.screen_distance);
    return std::cos(k * geom.slit_separation) * sinc(k * geom.slit_width);
}

DetectorArray DetectorArray::from_amplitudes(std::vector<double> positions,
                                             std::vector<Complex> amplitudes, double pixel_area) {
    if (amplitudes.empty()) throw TwoSlitError("detector array needs at least one pixel");
    if (positions.size() != amplitudes.size()) {
        throw TwoSlitError("detector array: one position per amplitude required");
    }
    if (!(pixel_area > 0.0)) throw TwoSlitError("detector array: pixel area must be positive");
    double norm = 0.0;
    for (const auto& a : amplitudes) norm += std::norm(a);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw TwoSlitError("detector array: amplitudes vanish everywhere");
    }
    const double s = 1.0 / std::sqrt(norm);
    for (auto& a : amplitudes) a *= s;
    return DetectorArray{std::move(positions), pixel_area, std::move(amplitudes)};
}

DetectorArray DetectorArray::tile_screen(const SlitGeometry& geom, std::size_t pixels,
                                         double half_width) {
    geom.validate();
    if (pixels == 0) throw TwoSlitError("detector array needs at least one pixel");
    if (!(half_width > 0.0)) throw TwoSlitError("screen half width must be positive");
    const double w = 2.0 * half_width / static_cast<double>(pixels);
    std::vector<double> x(pixels);
    std::vector<Complex> a(pixels);
    for (std::size_t n = 0; n < pixels; ++n) {
        x[n] = -half_width + (static_cast<double>(n) + 0.5) * w;
        a[n] = slit_amplitude(geom, x[n]);
    }
    return from_amplitudes(std::move(x), std::move(a), w);
}

std::vector<double> DetectorArray::intensities() const {
    std::vector<double> out;
    out.reserve(amplitudes.size());
    double total = 0.0;
    for (const auto& a : amplitudes) total += std::norm(a);
    for (const auto& a : amplitudes) out.push_back(std::norm(a) / total);
    return out;
}

void ExperimentSettings::validate() const {
    if (electrons_per_site == 0) throw TwoSlitError("electrons_per_site must be >= 1");
    if (!(tau >= 0.0)) throw TwoSlitError("interaction time tau must be >= 0");
    if (!(gamma > 0.0)) throw TwoSlitError("collapse needs a positive bath rate gamma");
    if (!(dt_gamma > 0.0)) throw TwoSlitError("dt_gamma must be positive");
    if (!(horizon_decoherence_times > 0.0)) {
        throw TwoSlitError("horizon_decoherence_times must be positive");
    }
    if (!coupling_scale && !(tau > 0.0)) {
        throw TwoSlitError("the default coupling needs tau > 0");
    }
}

PreparedExperiment prepare_experiment(const DetectorArray& array, const ExperimentSettings& s) {
    s.validate();
    if (array.size() == 0) throw TwoSlitError("detector array needs at least one pixel");
    PreparedExperiment exp{array, {}, {}, {}, {}, {}, s.scheme};
    const Complex scale = s.coupling_scale.value_or(
        Complex(std::numbers::pi / (2.0 * s.tau * std::sqrt(double(s.electrons_per_site))), 0.0));
    exp.coupling = absorption::CouplingModel::detector_array(array.amplitudes, scale,
                                                             s.electrons_per_site, s.tau);
    exp.absorbed = absorption::evolve_detector_array(absorption::ground_state(array.size()),
                                                     exp.coupling, s.tau);
    exp.model = bath::HybridModel::scalar(s.gamma, array.size());

    ComplexVector psi(exp.model.dim());
    psi(0) = exp.absorbed.alpha;
    for (std::size_t n = 0; n < array.size(); ++n) {
        psi(static_cast<Eigen::Index>(n + 1)) = exp.absorbed.betas[n];
    }
    exp.initial = psi / psi.norm();

    // Unit jump amplitude: every pixel block decoheres at rate gamma.
    const double decoherence = 1.0 / s.gamma;
    exp.trajectory.dt = s.dt_gamma / s.gamma;
    exp.trajectory.horizon = s.horizon_decoherence_times * decoherence;
    exp.trajectory.record_every = std::numeric_limits<std::size_t>::max();
    return exp;
}

ClickOutcome simulate_photon(const PreparedExperiment& exp, RngStream rng) {
    const auto tr = unraveling::run_trajectory(exp.scheme, exp.initial, exp.model, exp.trajectory,
                                               std::move(rng));
    ClickOutcome out;
    if (!tr.final_block) return out;
    if (*tr.final_block == 0) {
        out.kind = ClickOutcome::Kind::no_click;
    } else {
        out.kind = ClickOutcome::Kind::click;
        out.detector = *tr.final_block - 1;
    }
    return out;
}

FitReport goodness_of_fit(const ClickHistogram& h, const PreparedExperiment& exp) {
    FitReport f;
    f.probabilities = exp.array.intensities();
    std::size_t clicks = 0;
    for (auto c : h.counts) clicks += c;
    const double n = static_cast<double>(clicks);
    f.expected_counts.resize(f.probabilities.size());
    std::size_t cells = 0;
    for (std::size_t i = 0; i < f.probabilities.size(); ++i) {
        const double p = f.probabilities[i];
        const double e = n * p;
        const double o = static_cast<double>(h.counts[i]);
        f.expected_counts[i] = e;
        if (p > 0.0) {
            ++cells;
            if (e > 0.0) f.chi_square += (o - e) * (o - e) / e;
            if (p < 1.0 && n > 0.0) {
                f.max_sigma_deviation =
                    std::max(f.max_sigma_deviation, std::abs(o - e) / std::sqrt(n * p * (1.0 - p)));
            }
        } else if (o > 0.0) {
            f.chi_square = std::numeric_limits<double>::infinity();
        }
    }
    f.dof = cells > 0 ? cells - 1 : 0;
    if (!std::isfinite(f.chi_square)) {
        f.p_value = 0.0;
    } else if (f.dof > 0 && clicks > 0) {
        f.p_value = boost::math::gamma_q(0.5 * static_cast<double>(f.dof), 0.5 * f.chi_square);
    }
    f.no_click_expected = exp.absorbed.no_click_probability();
    const double phase = exp.coupling.aggregate_strength() * exp.coupling.tau;
    f.no_click_aggregate = std::cos(phase) * std::cos(phase);
    if (h.total_photons > 0) {
        f.no_click_observed =
            static_cast<double>(h.no_click_count) / static_cast<double>(h.total_photons);
    }
    return f;
}

ExperimentResult run_experiment(const PreparedExperiment& exp, std::size_t n_photons,
                                std::uint64_t master_seed, unsigned threads) {
    if (n_photons == 0) throw TwoSlitError("run_experiment: n_photons must be >= 1");
    const std::size_t m = exp.array.size();
    const std::size_t chunks = (n_photons + kPhotonChunk - 1) / kPhotonChunk;
    std::vector<ClickHistogram> parts(chunks);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        try {
            for (std::size_t c = next++; c < chunks; c = next++) {
                ClickHistogram& h = parts[c];
                h.counts.assign(m, 0);
                const std::size_t end = std::min(n_photons, (c + 1) * kPhotonChunk);
                for (std::size_t i = c * kPhotonChunk; i < end; ++i) {
                    const auto o = simulate_photon(exp, rng_split(master_seed, i));
                    ++h.total_photons;
                    switch (o.kind) {
                        case ClickOutcome::Kind::click: ++h.counts[o.detector]; break;
                        case ClickOutcome::Kind::no_click: ++h.no_click_count; break;
                        case ClickOutcome::Kind::unresolved: ++h.unresolved_count; break;
                    }
                }
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = chunks;
        }
    };
    const unsigned n_threads =
        std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    ExperimentResult r;
    r.histogram.counts.assign(m, 0);
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < m; ++i) r.histogram.counts[i] += p.counts[i];
        r.histogram.total_photons += p.total_photons;
        r.histogram.no_click_count += p.no_click_count;
        r.histogram.unresolved_count += p.unresolved_count;
    }
    r.fit = goodness_of_fit(r.histogram, exp);
    return r;
}

void write_histogram_csv(std::ostream& out, const PreparedExperiment& exp,
                         const ExperimentResult& result) {
    out << "x_n,intensity,expected_count,observed_count\n" << std::setprecision(17);
    for (std::size_t i = 0; i < exp.array.size(); ++i) {
        out << exp.array.positions[i] << ',' << result.fit.probabilities[i] << ','
            << result.fit.expected_counts[i] << ',' << result.histogram.counts[i] << '\n';
    }
}

}  // namespace measchain::twoslit
