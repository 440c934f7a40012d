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

#include "measchain/pipeline/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "measchain/twoslit.hpp"
#include "measchain/unraveling.hpp"

namespace measchain::pipeline {

using nlohmann::json;

namespace {

// Reads keys out of one section object and remembers which ones it saw, so
// the leftovers can be reported as unknown.
class Section {
  public:
    Section(const json& root, const std::string& name) : name_(name) {
        if (!root.contains(name)) return;
        const json& s = root.at(name);
        if (s.is_null()) return;
        if (!s.is_object()) throw ConfigError("section '" + name + "' must be an object");
        obj_ = &s;
    }

    template <class T>
    void get(const char* key, T& out) {
        const json* v = find(key);
        if (!v || v->is_null()) return;
        try {
            out = v->get<T>();
        } catch (const json::exception&) {
            throw ConfigError(where(key) + ": wrong type (" + std::string(v->type_name()) + ")");
        }
    }

    void get(const char* key, std::uint64_t& out) {
        const json* v = find(key);
        if (!v || v->is_null()) return;
        if (v->is_number_unsigned()) {
            out = v->get<std::uint64_t>();
        } else if (v->is_number_integer() && v->get<std::int64_t>() >= 0) {
            out = static_cast<std::uint64_t>(v->get<std::int64_t>());
        } else if (v->is_number_float() && v->get<double>() >= 0.0 &&
                   std::floor(v->get<double>()) == v->get<double>()) {
            out = static_cast<std::uint64_t>(v->get<double>());
        } else {
            throw ConfigError(where(key) + ": expected a non-negative integer");
        }
    }

    void get(const char* key, double& out) {
        const json* v = find(key);
        if (!v || v->is_null()) return;
        if (!v->is_number()) throw ConfigError(where(key) + ": expected a number");
        out = v->get<double>();
        if (!std::isfinite(out)) throw ConfigError(where(key) + ": not finite");
    }

    void get(const char* key, std::optional<double>& out) {
        const json* v = find(key);
        if (!v || v->is_null()) return;
        double x = 0.0;
        get(key, x);
        out = x;
    }

    void get(const char* key, Complex& out) {
        const json* v = find(key);
        if (!v || v->is_null()) return;
        out = complex_from(*v, where(key));
    }

    void get(const char* key, std::vector<Complex>& out) {
        const json* v = find(key);
        if (!v || v->is_null()) return;
        if (!v->is_array()) throw ConfigError(where(key) + ": expected an array");
        out.clear();
        for (const auto& e : *v) out.push_back(complex_from(e, where(key)));
    }

    void get(const char* key, std::vector<double>& out) {
        const json* v = find(key);
        if (!v || v->is_null()) return;
        if (!v->is_array()) throw ConfigError(where(key) + ": expected an array");
        out.clear();
        for (const auto& e : *v) {
            if (!e.is_number()) throw ConfigError(where(key) + ": expected numbers");
            out.push_back(e.get<double>());
        }
    }

    void finish() const {
        if (!obj_) return;
        for (const auto& [k, _] : obj_->items()) {
            if (!seen_.count(k)) throw ConfigError("unknown key '" + name_ + "." + k + "'");
        }
    }

  private:
    const json* find(const char* key) {
        seen_.insert(key);
        if (!obj_ || !obj_->contains(key)) return nullptr;
        return &obj_->at(key);
    }
    std::string where(const char* key) const { return name_ + "." + key; }

    static Complex complex_from(const json& v, const std::string& where) {
        if (v.is_number()) return {v.get<double>(), 0.0};
        if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
            return {v[0].get<double>(), v[1].get<double>()};
        }
        throw ConfigError(where + ": expected a number or [re, im]");
    }

    std::string name_;
    const json* obj_ = nullptr;
    std::set<std::string> seen_;
};

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    static const std::set<std::string> sections = {
        "bath", "absorption", "localization", "unraveling", "twoslit",
        "transport", "avalanche", "pointer", "reporting"};
    for (const auto& [k, _] : j.items()) {
        if (!sections.count(k)) throw ConfigError("unknown section '" + k + "'");
    }

    PipelineConfig c;
    {
        Section s(j, "bath");
        s.get("temperature", c.bath.temperature);
        s.get("gamma", c.bath.gamma);
        s.get("mass", c.bath.mass);
        s.get("temperature_kelvin", c.bath.temperature_kelvin);
        s.finish();
    }
    {
        Section s(j, "absorption");
        s.get("mode", c.absorption.mode);
        s.get("coupling", c.absorption.coupling);
        s.get("electrons", c.absorption.electrons);
        s.get("tau", c.absorption.tau);
        s.get("omega_k", c.absorption.omega_k);
        s.get("eps_g", c.absorption.eps_g);
        s.get("eps_e", c.absorption.eps_e);
        s.finish();
    }
    {
        Section s(j, "localization");
        auto& l = c.localization;
        s.get("points", l.points);
        s.get("spacing", l.spacing);
        s.get("packet_center", l.packet_center);
        s.get("packet_momentum", l.packet_momentum);
        s.get("packet_width", l.packet_width);
        s.get("kinetic", l.kinetic);
        s.get("derivative_order", l.derivative_order);
        s.finish();
    }
    {
        Section s(j, "unraveling");
        auto& u = c.unraveling;
        s.get("scheme", u.scheme);
        s.get("dt", u.dt);
        s.get("horizon_decoherence_times", u.horizon_decoherence_times);
        s.get("n_traj", u.n_traj);
        s.get("master_seed", u.master_seed);
        s.get("threads", u.threads);
        s.get("record_every", u.record_every);
        s.finish();
    }
    {
        Section s(j, "twoslit");
        auto& t = c.twoslit;
        s.get("slit_separation", t.slit_separation);
        s.get("slit_width", t.slit_width);
        s.get("screen_distance", t.screen_distance);
        s.get("wavelength", t.wavelength);
        s.get("pixels", t.pixels);
        s.get("half_width", t.half_width);
        s.get("amplitudes", t.amplitudes);
        s.get("positions", t.positions);
        s.get("photons", t.photons);
        s.get("dt_gamma", t.dt_gamma);
        s.get("horizon_decoherence_times", t.horizon_decoherence_times);
        s.finish();
    }
    {
        Section s(j, "transport");
        auto& t = c.transport;
        s.get("model", t.model);
        s.get("tau", t.tau);
        s.get("field", t.field);
        s.get("density", t.density);
        s.get("points", t.points);
        s.get("k_spacing", t.k_spacing);
        s.get("mass", t.mass);
        s.get("temperature", t.temperature);
        s.get("dt", t.dt);
        s.get("t_max", t.t_max);
        s.get("w0", t.w0);
        s.get("sound_speed", t.sound_speed);
        s.get("sweep_fields", t.sweep_fields);
        s.finish();
    }
    {
        Section s(j, "avalanche");
        auto& a = c.avalanche;
        s.get("v", a.v);
        s.get("alpha_rate", a.alpha_rate);
        s.get("bound_density", a.bound_density);
        s.get("length", a.length);
        s.get("cells", a.cells);
        s.get("seed_width", a.seed_width);
        s.get("seed_position", a.seed_position);
        s.get("cfl", a.cfl);
        s.get("quiescence", a.quiescence);
        s.finish();
    }
    {
        Section s(j, "pointer");
        auto& p = c.pointer;
        s.get("inertia", p.inertia);
        s.get("turns", p.turns);
        s.get("coil_area", p.coil_area);
        s.get("field", p.field);
        s.get("damping", p.damping);
        s.get("spring", p.spring);
        s.get("threshold", p.threshold);
        s.get("tail_damping_times", p.tail_damping_times);
        s.get("current", p.current);
        s.finish();
    }
    {
        Section s(j, "reporting");
        auto& r = c.reporting;
        s.get("out_dir", r.out_dir);
        s.get("dump_trajectories", r.dump_trajectories);
        s.get("dump_fields", r.dump_fields);
        s.get("n_bits", r.n_bits);
        s.get("overhead", r.overhead);
        s.get("timing", r.timing);
        s.finish();
    }
    c.validate();
    return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "': " + e.what());
    }
    return from_json(j);
}

void PipelineConfig::validate() const {
    require(bath.temperature > 0.0, "bath.temperature must be positive");
    require(bath.gamma >= 0.0, "bath.gamma must be >= 0");
    require(bath.mass > 0.0, "bath.mass must be positive");
    require(bath.temperature_kelvin > 0.0, "bath.temperature_kelvin must be positive");

    require(absorption.mode == "single" || absorption.mode == "array",
            "absorption.mode must be 'single' or 'array'");
    require(absorption.electrons >= 1, "absorption.electrons must be >= 1");
    require(absorption.tau > 0.0, "absorption.tau must be positive");
    require(std::isfinite(std::abs(absorption.coupling)), "absorption.coupling must be finite");

    const auto& l = localization;
    require(l.points >= 8, "localization.points must be >= 8");
    require(l.spacing > 0.0 && l.spacing <= 0.25,
            "localization.spacing must lie in (0, 1/4] (units of lambda)");
    require(l.packet_width > 0.0, "localization.packet_width must be positive");
    require(l.derivative_order == 2 || l.derivative_order == 4 || l.derivative_order == 6 ||
                l.derivative_order == 8,
            "localization.derivative_order must be 2, 4, 6 or 8");
    const double half = 0.5 * static_cast<double>(l.points) * l.spacing;
    require(std::abs(l.packet_center) < half,
            "localization.packet_center lies outside the grid");

    const auto& u = unraveling;
    try {
        (void)unraveling::parse_scheme(u.scheme);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("unraveling.scheme: ") + e.what());
    }
    require(u.dt >= 0.0, "unraveling.dt must be >= 0");
    require(u.horizon_decoherence_times > 0.0, "unraveling.horizon_decoherence_times must be positive");
    require(u.n_traj >= 1, "unraveling.n_traj must be >= 1");
    require(u.threads >= 1, "unraveling.threads must be >= 1");
    require(u.record_every >= 1, "unraveling.record_every must be >= 1");

    const auto& t = twoslit;
    twoslit::SlitGeometry geom{t.slit_separation, t.slit_width, t.screen_distance, t.wavelength};
    try {
        geom.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("twoslit: ") + e.what());
    }
    require(t.half_width >= 0.0, "twoslit.half_width must be >= 0");
    require(t.amplitudes.empty() ? t.pixels >= 1 : true, "twoslit.pixels must be >= 1");
    require(t.positions.empty() || t.positions.size() == t.amplitudes.size(),
            "twoslit.positions must match twoslit.amplitudes in length");
    require(t.photons >= 1, "twoslit.photons must be >= 1");
    require(t.dt_gamma > 0.0, "twoslit.dt_gamma must be positive");
    require(t.horizon_decoherence_times > 0.0, "twoslit.horizon_decoherence_times must be positive");

    const auto& tr = transport;
    require(tr.model == "rta" || tr.model == "phonon", "transport.model must be 'rta' or 'phonon'");
    require(tr.tau > 0.0, "transport.tau must be positive");
    require(tr.density > 0.0, "transport.density must be positive");
    require(tr.points >= 4, "transport.points must be >= 4");
    require(tr.model != "phonon" || tr.points <= 256, "transport.points must be <= 256 for phonons");
    require(tr.k_spacing > 0.0, "transport.k_spacing must be positive");
    require(!tr.mass || *tr.mass > 0.0, "transport.mass must be positive");
    require(!tr.temperature || *tr.temperature > 0.0, "transport.temperature must be positive");
    require(tr.dt >= 0.0, "transport.dt must be >= 0");
    require(tr.t_max > 0.0, "transport.t_max must be positive");
    require(tr.w0 > 0.0, "transport.w0 must be positive");
    require(tr.sound_speed > 0.0, "transport.sound_speed must be positive");

    const auto& a = avalanche;
    require(!a.v || *a.v > 0.0, "avalanche.v must be positive");
    require(a.alpha_rate >= 0.0, "avalanche.alpha_rate must be >= 0");
    require(a.bound_density >= 0.0, "avalanche.bound_density must be >= 0");
    require(a.length > 0.0, "avalanche.length must be positive");
    require(a.cells >= 1, "avalanche.cells must be >= 1");
    require(a.seed_width > 0.0, "avalanche.seed_width must be positive");
    require(a.seed_position >= 0.0 && a.seed_position <= a.length,
            "avalanche.seed_position must lie in [0, length]");
    require(a.cfl > 0.0 && a.cfl <= 1.0, "avalanche.cfl must lie in (0, 1]");
    require(a.quiescence > 0.0, "avalanche.quiescence must be positive");

    const auto& p = pointer;
    require(p.inertia > 0.0 && p.damping > 0.0 && p.spring > 0.0,
            "pointer.inertia, pointer.damping and pointer.spring must be positive");
    require(std::isfinite(p.turns * p.coil_area * p.field), "pointer drive must be finite");
    require(p.threshold >= 0.0, "pointer.threshold must be >= 0");
    require(p.tail_damping_times > 0.0, "pointer.tail_damping_times must be positive");

    require(reporting.overhead >= 1.0, "reporting.overhead must be >= 1");
    require(!reporting.n_bits || *reporting.n_bits >= 0.0, "reporting.n_bits must be >= 0");
}

json PipelineConfig::to_json() const {
    json amps = json::array();
    for (const auto& z : twoslit.amplitudes) amps.push_back(complex_json(z));
    return json{
        {"bath",
         {{"temperature", bath.temperature},
          {"gamma", bath.gamma},
          {"mass", bath.mass},
          {"temperature_kelvin", bath.temperature_kelvin}}},
        {"absorption",
         {{"mode", absorption.mode},
          {"coupling", complex_json(absorption.coupling)},
          {"electrons", absorption.electrons},
          {"tau", absorption.tau},
          {"omega_k", absorption.omega_k},
          {"eps_g", absorption.eps_g},
          {"eps_e", absorption.eps_e}}},
        {"localization",
         {{"points", localization.points},
          {"spacing", localization.spacing},
          {"packet_center", localization.packet_center},
          {"packet_momentum", localization.packet_momentum},
          {"packet_width", localization.packet_width},
          {"kinetic", localization.kinetic},
          {"derivative_order", localization.derivative_order}}},
        {"unraveling",
         {{"scheme", unraveling.scheme},
          {"dt", unraveling.dt},
          {"horizon_decoherence_times", unraveling.horizon_decoherence_times},
          {"n_traj", unraveling.n_traj},
          {"master_seed", unraveling.master_seed},
          {"threads", unraveling.threads},
          {"record_every", unraveling.record_every}}},
        {"twoslit",
         {{"slit_separation", twoslit.slit_separation},
          {"slit_width", twoslit.slit_width},
          {"screen_distance", twoslit.screen_distance},
          {"wavelength", twoslit.wavelength},
          {"pixels", twoslit.pixels},
          {"half_width", twoslit.half_width},
          {"amplitudes", amps},
          {"positions", twoslit.positions},
          {"photons", twoslit.photons},
          {"dt_gamma", twoslit.dt_gamma},
          {"horizon_decoherence_times", twoslit.horizon_decoherence_times}}},
        {"transport",
         {{"model", transport.model},
          {"tau", transport.tau},
          {"field", transport.field},
          {"density", transport.density},
          {"points", transport.points},
          {"k_spacing", transport.k_spacing},
          {"mass", optional_json(transport.mass)},
          {"temperature", optional_json(transport.temperature)},
          {"dt", transport.dt},
          {"t_max", transport.t_max},
          {"w0", transport.w0},
          {"sound_speed", transport.sound_speed},
          {"sweep_fields", transport.sweep_fields}}},
        {"avalanche",
         {{"v", optional_json(avalanche.v)},
          {"alpha_rate", avalanche.alpha_rate},
          {"bound_density", avalanche.bound_density},
          {"length", avalanche.length},
          {"cells", avalanche.cells},
          {"seed_width", avalanche.seed_width},
          {"seed_position", avalanche.seed_position},
          {"cfl", avalanche.cfl},
          {"quiescence", avalanche.quiescence}}},
        {"pointer",
         {{"inertia", pointer.inertia},
          {"turns", pointer.turns},
          {"coil_area", pointer.coil_area},
          {"field", pointer.field},
          {"damping", pointer.damping},
          {"spring", pointer.spring},
          {"threshold", pointer.threshold},
          {"tail_damping_times", pointer.tail_damping_times},
          {"current", pointer.current}}},
        {"reporting",
         {{"out_dir", reporting.out_dir},
          {"dump_trajectories", reporting.dump_trajectories},
          {"dump_fields", reporting.dump_fields},
          {"n_bits", optional_json(reporting.n_bits)},
          {"overhead", reporting.overhead},
          {"timing", reporting.timing}}},
    };
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string PipelineConfig::hash() const {
    // Output-only settings do not change the physics and stay out of the hash.
    json j = to_json();
    j.erase("reporting");
    j["unraveling"].erase("threads");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(j.dump())));
    return buf;
}

void apply_override(json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    const auto dot = path.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == path.size() ||
        path.find('.', dot + 1) != std::string::npos) {
        throw ConfigError("override key '" + path + "' must be section.key");
    }
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    if (!config.is_object()) config = json::object();
    json& section = config[path.substr(0, dot)];
    if (section.is_null()) section = json::object();
    if (!section.is_object()) throw ConfigError("section '" + path.substr(0, dot) + "' is not an object");
    section[path.substr(dot + 1)] = std::move(value);
}

}  // namespace measchain::pipeline
