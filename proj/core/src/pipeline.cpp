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

#include "measchain/pipeline/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>

#include "measchain/absorption.hpp"
#include "measchain/bath/operators.hpp"
#include "measchain/units.hpp"
#include "measchain/unraveling.hpp"

namespace measchain::pipeline {

using nlohmann::json;

namespace {

json cjson(Complex z) { return json::array({z.real(), z.imag()}); }

std::optional<std::filesystem::path> out_dir(const PipelineConfig& cfg) {
    if (cfg.reporting.out_dir.empty()) return std::nullopt;
    std::filesystem::path p(cfg.reporting.out_dir);
    std::filesystem::create_directories(p);
    return p;
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& w) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    w(out);
}

bath::BathSpec bath_spec(const PipelineConfig& cfg) {
    return {cfg.bath.temperature, cfg.bath.gamma, cfg.bath.mass};
}

absorption::CouplingModel single_coupling(const PipelineConfig& cfg) {
    return absorption::CouplingModel::equivalent_electrons(
        cfg.absorption.coupling, static_cast<std::size_t>(cfg.absorption.electrons),
        cfg.absorption.tau);
}

json absorption_metadata(const PipelineConfig& cfg) {
    return {{"omega_k", cfg.absorption.omega_k},
            {"eps_g", cfg.absorption.eps_g},
            {"eps_e", cfg.absorption.eps_e},
            {"tau", cfg.absorption.tau},
            {"electrons", cfg.absorption.electrons}};
}

json single_absorption_json(const PipelineConfig& cfg, const absorption::AmplitudeState& s,
                            const absorption::CouplingModel& c) {
    json j = absorption_metadata(cfg);
    j["mode"] = "single";
    j["alpha"] = cjson(s.alpha);
    j["beta"] = cjson(s.betas.at(0));
    j["beta_per_electron"] =
        cjson(absorption::per_electron_beta(s.betas.at(0), c.electrons_per_site));
    j["no_click_probability"] = s.no_click_probability();
    j["click_probability"] = std::norm(s.betas.at(0));
    j["collective_coupling"] = c.aggregate_strength();
    j["rabi_angle"] = c.aggregate_strength() * cfg.absorption.tau;
    return j;
}

json array_absorption_json(const PipelineConfig& cfg, const twoslit::PreparedExperiment& exp) {
    json j = absorption_metadata(cfg);
    j["mode"] = "array";
    j["pixels"] = exp.array.size();
    j["alpha"] = cjson(exp.absorbed.alpha);
    j["no_click_probability"] = exp.absorbed.no_click_probability();
    j["click_weights"] = exp.absorbed.click_weights();
    j["collective_coupling"] = exp.coupling.aggregate_strength();
    j["rabi_angle"] = exp.coupling.aggregate_strength() * cfg.absorption.tau;
    return j;
}

// Runs one stage; on failure records the error in the report and rethrows
// with the stage name and the partial report.
void run_stage(json& report, const std::string& name, bool timing,
               const std::function<json()>& body) {
    const auto start = std::chrono::steady_clock::now();
    try {
        report["stages"][name] = body();
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        report["error"] = {{"stage", name}, {"message", e.what()}};
        throw PipelineError(name, e.what(), report);
    }
    if (timing) {
        report["timing"][name] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
}

double binomial_max_sigma(const std::vector<std::size_t>& counts, std::size_t n,
                          const std::vector<double>& p) {
    double worst = 0.0;
    for (std::size_t i = 0; i < counts.size() && i < p.size(); ++i) {
        const double var = static_cast<double>(n) * p[i] * (1.0 - p[i]);
        if (var <= 0.0) continue;
        worst = std::max(worst, std::abs(static_cast<double>(counts[i]) -
                                          static_cast<double>(n) * p[i]) /
                                    std::sqrt(var));
    }
    return worst;
}

transport::SteadyState phonon_steady_state(const PipelineConfig& cfg,
                                           const transport::DistributionFunction& f0,
                                           double temperature) {
    const auto& t = cfg.transport;
    transport::PhononBath ph{t.sound_speed, temperature, t.w0};
    const double dt = t.dt > 0.0 ? t.dt : 0.01 / t.w0;
    const double t_max = t.t_max / t.w0;
    const auto per_unit = static_cast<std::size_t>(std::ceil(1.0 / (t.w0 * dt)));
    transport::DistributionFunction f = f0;
    double time = 0.0;
    double last = f.mean_k();
    while (time < t_max) {
        for (std::size_t i = 0; i < per_unit; ++i) {
            f = transport::step_boltzmann_phonon(f, t.field, ph, dt);
        }
        time += static_cast<double>(per_unit) * dt;
        const double now = f.mean_k();
        if (std::abs(now - last) <= 1e-10 * std::max(std::abs(now), f.grid.spacing * 1e-12)) break;
        last = now;
    }
    transport::SteadyState s{f, time, f.current(), f.drift_velocity(), 0.0};
    s.conductivity = t.field != 0.0 ? s.current / t.field : 0.0;
    return s;
}

json transport_json(const PipelineConfig& cfg, const transport::SteadyState& s) {
    const auto& t = cfg.transport;
    const double mass = t.mass.value_or(cfg.bath.mass);
    json j = {{"model", t.model},
              {"field", t.field},
              {"density", s.f.density()},
              {"drift_velocity", s.drift_velocity},
              {"current", s.current},
              {"conductivity", s.conductivity},
              {"relaxation_time", s.time}};
    if (t.model == "rta") {
        j["drude_conductivity"] = transport::drude_conductivity(t.density, t.tau, mass);
        j["drude_drift_velocity"] = -t.field * t.tau / mass;
    }
    return j;
}

avalanche::AvalancheState make_avalanche_state(const PipelineConfig& cfg, double v,
                                               double seed_charge) {
    const auto& a = cfg.avalanche;
    return avalanche::make_state(static_cast<std::size_t>(a.cells), a.length, v, a.alpha_rate,
                                 a.bound_density, seed_charge, a.seed_position, a.seed_width);
}

avalanche::AvalancheOptions avalanche_options(const PipelineConfig& cfg) {
    avalanche::AvalancheOptions o;
    o.cfl = cfg.avalanche.cfl;
    o.quiescence = cfg.avalanche.quiescence;
    o.dump_fields = cfg.reporting.dump_fields;
    return o;
}

json avalanche_json(const PipelineConfig& cfg, const avalanche::AvalancheRun& run, double v) {
    json j = {{"v", v},
              {"seed_charge", run.seed_charge},
              {"exited_charge", run.exited},
              {"consumed_bound_charge", run.consumed},
              {"clamp_events", run.clamp_events},
              {"steps", run.steps},
              {"dt", run.dt},
              {"quiescent", run.quiescent},
              {"conservation_defect", run.conservation_defect()},
              {"linear_gain", avalanche::linear_gain(cfg.avalanche.alpha_rate,
                                                     cfg.avalanche.bound_density,
                                                     cfg.avalanche.length - cfg.avalanche.seed_position,
                                                     v)}};
    j["gain"] = avalanche::gain(run);
    return j;
}

void dump_avalanche(const PipelineConfig& cfg, const avalanche::AvalancheRun& run) {
    const auto dir = out_dir(cfg);
    if (!dir) return;
    write_file(*dir / "avalanche_waveform.csv",
               [&](std::ostream& o) { avalanche::write_waveform_csv(o, run); });
    if (cfg.reporting.dump_fields) {
        write_file(*dir / "avalanche_fields.csv",
                   [&](std::ostream& o) { avalanche::write_fields_csv(o, run); });
    }
}

double resolved_drift_speed(const PipelineConfig& cfg) {
    if (cfg.avalanche.v) return *cfg.avalanche.v;
    const double v = std::abs(transport_steady_state(cfg).drift_velocity);
    if (!(v > 0.0)) {
        throw avalanche::AvalancheError("transport gives zero drift speed; set avalanche.v");
    }
    return v;
}

}  // namespace

ResetLedger reset_ledger(double n_bits, double temperature, double temperature_kelvin,
                         double overhead) {
    if (!(n_bits >= 0.0)) throw ConfigError("reset ledger: n_bits must be >= 0");
    if (!(overhead >= 1.0)) throw ConfigError("reset ledger: overhead must be >= 1");
    if (!(temperature > 0.0 && temperature_kelvin > 0.0)) {
        throw ConfigError("reset ledger: temperatures must be positive");
    }
    ResetLedger l;
    l.n_bits = n_bits;
    l.overhead = overhead;
    l.landauer_bound = n_bits * temperature * std::numbers::ln2;
    l.energy = l.landauer_bound * overhead;
    l.landauer_bound_joule = n_bits * si::kBoltzmann * temperature_kelvin * std::numbers::ln2;
    l.energy_joule = l.landauer_bound_joule * overhead;
    return l;
}

CollapseSetup make_collapse_setup(const PipelineConfig& cfg, Complex alpha, Complex beta) {
    const auto bath = bath_spec(cfg);
    bath.validate();
    const double lambda = bath.lambda();
    const auto& l = cfg.localization;
    const auto grid = bath::Grid::in_lambda_units(static_cast<std::size_t>(l.points), l.spacing,
                                                  lambda);
    CollapseSetup s;
    s.model = bath::HybridModel::spatial(bath, grid, l.kinetic, l.derivative_order);
    s.scheme = unraveling::parse_scheme(cfg.unraveling.scheme);
    const ComplexVector packet = bath::gaussian_packet(grid, l.packet_center * lambda,
                                                       l.packet_momentum / lambda,
                                                       l.packet_width * lambda);
    const std::vector<Complex> betas{beta};
    const std::vector<ComplexVector> states{packet};
    s.initial = bath::hybrid_superposition(s.model, alpha, betas, states);
    s.initial /= s.initial.norm();

    const double packet_rate =
        cfg.bath.gamma * (packet.adjoint() * (s.model.ata * packet))(0).real();
    s.trajectory.dt = cfg.unraveling.dt > 0.0 ? cfg.unraveling.dt
                      : packet_rate > 0.0     ? 0.02 / packet_rate
                                              : 0.01 / cfg.bath.temperature;
    s.trajectory.record_every = static_cast<std::size_t>(cfg.unraveling.record_every);
    s.trajectory.min_decoherence_times = cfg.unraveling.horizon_decoherence_times;
    s.decoherence_time = unraveling::decoherence_time(s.model, s.initial);
    // Without a bath the collapse never completes; run a finite window and
    // report the photon as unresolved.
    const double scale = std::isfinite(s.decoherence_time) ? s.decoherence_time
                                                           : 1.0 / cfg.bath.temperature;
    s.trajectory.horizon = cfg.unraveling.horizon_decoherence_times * scale;
    return s;
}

twoslit::DetectorArray make_detector_array(const PipelineConfig& cfg) {
    const auto& t = cfg.twoslit;
    if (!t.amplitudes.empty()) {
        std::vector<double> pos = t.positions;
        if (pos.empty()) {
            for (std::size_t i = 0; i < t.amplitudes.size(); ++i) pos.push_back(double(i));
        }
        return twoslit::DetectorArray::from_amplitudes(pos, t.amplitudes, 1.0);
    }
    twoslit::SlitGeometry geom{t.slit_separation, t.slit_width, t.screen_distance, t.wavelength};
    const double half = t.half_width > 0.0 ? t.half_width
                                           : t.wavelength * t.screen_distance / t.slit_width;
    return twoslit::DetectorArray::tile_screen(geom, static_cast<std::size_t>(t.pixels), half);
}

twoslit::ExperimentSettings make_experiment_settings(const PipelineConfig& cfg) {
    twoslit::ExperimentSettings s;
    s.coupling_scale = cfg.absorption.coupling;
    s.electrons_per_site = static_cast<std::size_t>(cfg.absorption.electrons);
    s.tau = cfg.absorption.tau;
    s.gamma = cfg.bath.gamma;
    s.scheme = unraveling::parse_scheme(cfg.unraveling.scheme);
    s.dt_gamma = cfg.twoslit.dt_gamma;
    s.horizon_decoherence_times = cfg.twoslit.horizon_decoherence_times;
    return s;
}

transport::DistributionFunction make_transport_equilibrium(const PipelineConfig& cfg) {
    const auto& t = cfg.transport;
    transport::KGrid grid{static_cast<std::size_t>(t.points), t.k_spacing};
    return transport::equilibrium(grid, t.mass.value_or(cfg.bath.mass),
                                  t.temperature.value_or(cfg.bath.temperature), t.density);
}

transport::SteadyState transport_steady_state(const PipelineConfig& cfg) {
    const auto& t = cfg.transport;
    const double temperature = t.temperature.value_or(cfg.bath.temperature);
    const auto f0 = make_transport_equilibrium(cfg);
    if (t.model == "phonon") return phonon_steady_state(cfg, f0, temperature);
    transport::RtaParams p{t.field, t.tau, temperature, 1.0};
    const double dt = t.dt > 0.0 ? t.dt : t.tau / 50.0;
    return transport::rta_steady_state(f0, p, dt, t.t_max * t.tau);
}

pointer::PointerParams make_pointer_params(const PipelineConfig& cfg) {
    const auto& p = cfg.pointer;
    return {p.inertia, p.turns, p.coil_area, p.field, p.damping, p.spring};
}

json report_header(const PipelineConfig& cfg) {
    return {{"schema_version", kSchemaVersion},
            {"config_hash", cfg.hash()},
            {"seed", cfg.unraveling.master_seed}};
}

json run_absorb(const PipelineConfig& cfg) {
    json r = report_header(cfg);
    if (cfg.absorption.mode == "single") {
        const auto c = single_coupling(cfg);
        const auto s = absorption::evolve_equivalent_electrons(absorption::ground_state(1), c,
                                                               cfg.absorption.tau);
        r["absorption"] = single_absorption_json(cfg, s, c);
    } else {
        const auto exp = twoslit::prepare_experiment(make_detector_array(cfg),
                                                     make_experiment_settings(cfg));
        r["absorption"] = array_absorption_json(cfg, exp);
    }
    return r;
}

json run_collapse(const PipelineConfig& cfg) {
    json r = report_header(cfg);
    const auto c = single_coupling(cfg);
    const auto s = absorption::evolve_equivalent_electrons(absorption::ground_state(1), c,
                                                           cfg.absorption.tau);
    const auto setup = make_collapse_setup(cfg, s.alpha, s.betas.at(0));
    unraveling::EnsembleOptions ens;
    ens.n_traj = static_cast<std::size_t>(cfg.unraveling.n_traj);
    ens.master_seed = cfg.unraveling.master_seed;
    ens.threads = cfg.unraveling.threads;
    if (cfg.reporting.dump_trajectories) {
        if (const auto dir = out_dir(cfg)) {
            ens.dump_dir = *dir / "trajectories";
            std::filesystem::create_directories(*ens.dump_dir);
        }
    }
    const auto run = unraveling::run_ensemble(setup.scheme, setup.initial, setup.model,
                                              setup.trajectory, ens);
    const auto& st = run.stats;
    const std::vector<double> expected{std::norm(setup.initial(0)), 1.0 - std::norm(setup.initial(0))};
    r["collapse"] = {{"scheme", unraveling::to_string(setup.scheme)},
                     {"n_traj", st.n_traj},
                     {"resolved", st.n_resolved},
                     {"unresolved", st.n_unresolved},
                     {"block_counts", st.block_counts},
                     {"block_frequencies", st.block_frequencies},
                     {"expected_frequencies", expected},
                     {"max_sigma_deviation",
                      binomial_max_sigma(st.block_counts, st.n_resolved, expected)},
                     {"total_jumps", st.total_jumps},
                     {"decoherence_time", setup.decoherence_time},
                     {"horizon", setup.trajectory.horizon},
                     {"dt", setup.trajectory.dt},
                     {"interference_norm", st.mean_density_matrix.interference_norm()}};
    return r;
}

json run_twoslit(const PipelineConfig& cfg) {
    json r = report_header(cfg);
    const auto exp = twoslit::prepare_experiment(make_detector_array(cfg),
                                                 make_experiment_settings(cfg));
    const auto res = twoslit::run_experiment(exp, static_cast<std::size_t>(cfg.twoslit.photons),
                                             cfg.unraveling.master_seed, cfg.unraveling.threads);
    if (const auto dir = out_dir(cfg)) {
        write_file(*dir / "twoslit_histogram.csv",
                   [&](std::ostream& o) { twoslit::write_histogram_csv(o, exp, res); });
    }
    const auto& h = res.histogram;
    const auto& f = res.fit;
    twoslit::SlitGeometry geom{cfg.twoslit.slit_separation, cfg.twoslit.slit_width,
                               cfg.twoslit.screen_distance, cfg.twoslit.wavelength};
    r["twoslit"] = {{"pixels", exp.array.size()},
                    {"positions", exp.array.positions},
                    {"far_field", geom.far_field()},
                    {"photons", h.total_photons},
                    {"counts", h.counts},
                    {"no_click", h.no_click_count},
                    {"unresolved", h.unresolved_count},
                    {"probabilities", f.probabilities},
                    {"expected_counts", f.expected_counts},
                    {"chi_square", f.chi_square},
                    {"dof", f.dof},
                    {"p_value", f.p_value},
                    {"max_sigma_deviation", f.max_sigma_deviation},
                    {"no_click_expected", f.no_click_expected},
                    {"no_click_aggregate", f.no_click_aggregate},
                    {"no_click_observed", f.no_click_observed}};
    return r;
}

json run_transport(const PipelineConfig& cfg) {
    json r = report_header(cfg);
    const auto s = transport_steady_state(cfg);
    r["transport"] = transport_json(cfg, s);
    const auto& t = cfg.transport;
    if (!t.sweep_fields.empty()) {
        if (t.model != "rta") throw ConfigError("transport.sweep_fields needs the rta model");
        const transport::RtaParams p{t.field, t.tau, t.temperature.value_or(cfg.bath.temperature), 1.0};
        const auto rows = transport::current_field_table(make_transport_equilibrium(cfg), p,
                                                         t.sweep_fields,
                                                         t.dt > 0.0 ? t.dt : t.tau / 50.0,
                                                         t.t_max * t.tau);
        json table = json::array();
        for (const auto& row : rows) {
            table.push_back({{"field", row.field},
                             {"current", row.current},
                             {"drift_velocity", row.drift_velocity}});
        }
        r["transport"]["sweep"] = table;
        if (const auto dir = out_dir(cfg)) {
            write_file(*dir / "current_field.csv",
                       [&](std::ostream& o) { transport::write_current_field_csv(o, rows); });
        }
    }
    return r;
}

json run_avalanche(const PipelineConfig& cfg) {
    json r = report_header(cfg);
    const double v = resolved_drift_speed(cfg);
    const auto run = avalanche::run_avalanche(make_avalanche_state(cfg, v, 1.0),
                                              avalanche_options(cfg));
    dump_avalanche(cfg, run);
    r["avalanche"] = avalanche_json(cfg, run, v);
    return r;
}

json run_pointer(const PipelineConfig& cfg) {
    json r = report_header(cfg);
    const auto p = make_pointer_params(cfg);
    const double t_max = cfg.pointer.tail_damping_times * p.damping_time();
    const auto s = pointer::settle(p, cfg.pointer.current, {}, t_max);
    if (const auto dir = out_dir(cfg)) {
        const auto samples = pointer::integrate_pointer(
            p, {}, pointer::CurrentWaveform::constant(cfg.pointer.current), t_max);
        write_file(*dir / "pointer.csv",
                   [&](std::ostream& o) { pointer::write_pointer_csv(o, samples); });
    }
    r["pointer"] = {{"current", cfg.pointer.current},
                    {"settled", s.settled},
                    {"settle_time", s.time},
                    {"angle", s.angle},
                    {"root", s.root},
                    {"damping_time", p.damping_time()}};
    return r;
}

json run_pipeline(const PipelineConfig& cfg) {
    json report = report_header(cfg);
    const bool timing = cfg.reporting.timing;
    const bool array = cfg.absorption.mode == "array";

    absorption::AmplitudeState absorbed;
    std::optional<twoslit::PreparedExperiment> exp;
    run_stage(report, "absorption", timing, [&] {
        if (array) {
            exp = twoslit::prepare_experiment(make_detector_array(cfg),
                                              make_experiment_settings(cfg));
            absorbed = exp->absorbed;
            return array_absorption_json(cfg, *exp);
        }
        const auto c = single_coupling(cfg);
        absorbed = absorption::evolve_equivalent_electrons(absorption::ground_state(1), c,
                                                           cfg.absorption.tau);
        return single_absorption_json(cfg, absorbed, c);
    });

    std::string outcome;
    run_stage(report, "collapse", timing, [&] {
        const auto rng = rng_split(cfg.unraveling.master_seed, 0);
        json j;
        if (array) {
            const auto tr = unraveling::run_trajectory(exp->scheme, exp->initial, exp->model,
                                                       exp->trajectory, rng);
            j["decoherence_time"] = tr.decoherence_time;
            j["horizon"] = tr.horizon;
            j["jumps"] = tr.jumps;
            if (!tr.final_block) {
                outcome = "unresolved";
            } else if (*tr.final_block == 0) {
                outcome = "no_click";
            } else {
                outcome = "click";
                j["detector"] = *tr.final_block - 1;
                j["position"] = exp->array.positions.at(*tr.final_block - 1);
            }
        } else {
            const auto setup = make_collapse_setup(cfg, absorbed.alpha, absorbed.betas.at(0));
            const auto tr = unraveling::run_trajectory(setup.scheme, setup.initial, setup.model,
                                                       setup.trajectory, rng);
            j["decoherence_time"] = tr.decoherence_time;
            j["horizon"] = tr.horizon;
            j["jumps"] = tr.jumps;
            j["trapped"] = unraveling::trapped_in_final_block(tr);
            if (!tr.final_block) {
                outcome = "unresolved";
            } else {
                outcome = *tr.final_block == 0 ? "no_click" : "click";
            }
            if (cfg.reporting.dump_trajectories) {
                if (const auto dir = out_dir(cfg)) {
                    write_file(*dir / "collapse_trajectory.csv",
                               [&](std::ostream& o) { unraveling::write_trajectory_csv(o, tr); });
                }
            }
        }
        j["scheme"] = cfg.unraveling.scheme;
        j["outcome"] = outcome;
        return j;
    });
    report["outcome"] = outcome;

    if (outcome == "click") {
        double v = 0.0;
        run_stage(report, "transport", timing, [&] {
            const auto s = transport_steady_state(cfg);
            v = cfg.avalanche.v.value_or(std::abs(s.drift_velocity));
            json j = transport_json(cfg, s);
            j["delivered_charge"] = 1.0;
            return j;
        });

        avalanche::AvalancheRun run;
        run_stage(report, "avalanche", timing, [&] {
            if (!(v > 0.0)) {
                throw avalanche::AvalancheError("zero drift speed; set avalanche.v or a field");
            }
            run = avalanche::run_avalanche(make_avalanche_state(cfg, v, 1.0),
                                           avalanche_options(cfg));
            dump_avalanche(cfg, run);
            return avalanche_json(cfg, run, v);
        });

        run_stage(report, "pointer", timing, [&] {
            const auto p = make_pointer_params(cfg);
            const pointer::CurrentWaveform wave(run.times, run.current);
            const double t_end = wave.duration() + cfg.pointer.tail_damping_times * p.damping_time();
            const auto samples = pointer::integrate_pointer(p, {}, wave, t_end);
            double peak = 0.0;
            for (const auto& s : samples) {
                if (std::abs(s.state.theta) > std::abs(peak)) peak = s.state.theta;
            }
            // Mean current over the pulse, taken between the first and last
            // samples carrying charge.
            const double top = std::abs(wave.peak());
            std::size_t first = run.current.size(), last = 0;
            for (std::size_t i = 0; i < run.current.size(); ++i) {
                if (std::abs(run.current[i]) > 1e-9 * top) {
                    first = std::min(first, i);
                    last = i;
                }
            }
            double mean = 0.0, width = 0.0;
            if (first <= last && first < run.current.size()) {
                width = run.times[last] - run.times[first] + run.dt;
                mean = run.exited / width;
            }
            if (const auto dir = out_dir(cfg)) {
                write_file(*dir / "pointer.csv",
                           [&](std::ostream& o) { pointer::write_pointer_csv(o, samples); });
            }
            return json{{"peak_angle", peak},
                        {"settled_angle", pointer::settled_angle(p, mean)},
                        {"mean_current", mean},
                        {"pulse_width", width},
                        {"peak_current", wave.peak()},
                        {"detected", std::abs(peak) >= cfg.pointer.threshold},
                        {"threshold", cfg.pointer.threshold}};
        });
    } else {
        report["stages"]["pointer"] = {{"peak_angle", 0.0},
                                       {"settled_angle", 0.0},
                                       {"detected", false},
                                       {"threshold", cfg.pointer.threshold}};
    }

    run_stage(report, "reset", timing, [&] {
        double bits = 1.0;
        if (cfg.reporting.n_bits) {
            bits = *cfg.reporting.n_bits;
        } else if (array) {
            bits += std::log2(static_cast<double>(exp->array.size()));
        }
        const auto l = reset_ledger(bits, cfg.bath.temperature, cfg.bath.temperature_kelvin,
                                    cfg.reporting.overhead);
        return json{{"n_bits", l.n_bits},
                    {"overhead", l.overhead},
                    {"temperature", cfg.bath.temperature},
                    {"temperature_kelvin", cfg.bath.temperature_kelvin},
                    {"energy", l.energy},
                    {"landauer_bound", l.landauer_bound},
                    {"energy_joule", l.energy_joule},
                    {"landauer_bound_joule", l.landauer_bound_joule}};
    });
    return report;
}

json thermal_scales_report(double temperature_kelvin, double mass_kg, bool massless,
                           double speed) {
    const auto kind = massless ? bath::ParticleKind::massless : bath::ParticleKind::massive;
    const auto s = bath::thermal_scales(temperature_kelvin, mass_kg, kind, speed,
                                        PhysicalConstants::si_units());
    json j = {{"temperature_kelvin", temperature_kelvin},
              {"kind", massless ? "massless" : "massive"},
              {"thermal_wavelength_m", s.wavelength},
              {"thermal_time_s", s.time},
              {"landauer_bound_joule",
               si::kBoltzmann * temperature_kelvin * std::numbers::ln2}};
    if (massless) {
        j["speed_m_per_s"] = speed;
    } else {
        j["mass_kg"] = mass_kg;
        j["localization_length_m"] =
            si::kHbar / std::sqrt(4.0 * mass_kg * si::kBoltzmann * temperature_kelvin);
    }
    return j;
}

}  // namespace measchain::pipeline
