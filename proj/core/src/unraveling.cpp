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

#include "measchain/unraveling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>

#include "measchain/bath/operators.hpp"
#include "measchain/numerics/sde.hpp"

namespace measchain::unraveling {

using bath::HybridModel;

namespace {

constexpr std::size_t kChunk = 256;

void check_inputs(const ComplexVector& psi, const HybridModel& model,
                  const TrajectoryOptions& opt) {
    model.validate();
    if (psi.size() != model.dim()) throw DimensionError("trajectory: state does not match model");
    if (!(std::abs(psi.squaredNorm() - 1.0) <= 1e-8)) {
        throw UnravelingError("trajectory: initial state is not normalized");
    }
    if (!(opt.horizon >= 0.0)) throw UnravelingError("trajectory: horizon must be >= 0");
    if (!(opt.dt > 0.0)) throw UnravelingError("trajectory: dt must be positive");
    if (opt.record_every == 0) throw UnravelingError("trajectory: record_every must be >= 1");
    const double p = opt.dt * jump_rate(model, psi);
    if (!(p < 0.1)) {
        throw UnravelingError("dt too large: dt * gamma * <A^dagger A> = " + std::to_string(p) +
                              " (must be < 0.1)");
    }
}

BlockSample sample(double t, const HybridModel& model, const ComplexVector& psi) {
    BlockSample s;
    s.t = t;
    s.populations = bath::block_populations(model, psi);
    if (model.grid && model.sectors == 1) {
        const ComplexVector e = psi.segment(1, model.sector_dim());
        if (e.squaredNorm() > 0.0) {
            const auto m = bath::packet_moments(e, *model.grid);
            s.centroid = m.centroid;
            s.width = m.width;
        }
    } else {
        s.centroid = std::numeric_limits<double>::quiet_NaN();
        s.width = std::numeric_limits<double>::quiet_NaN();
    }
    return s;
}

void finish(Trajectory& tr, const HybridModel& model, const TrajectoryOptions& opt) {
    const auto pops = bath::block_populations(model, tr.psi);
    const auto best = static_cast<std::size_t>(
        std::max_element(pops.begin(), pops.end()) - pops.begin());
    const bool long_enough = opt.horizon >= opt.min_decoherence_times * tr.decoherence_time;
    if (pops[best] > opt.resolve_threshold && long_enough) tr.final_block = best;
}

class Propagator {
  public:
    explicit Propagator(const HybridModel& model) : k_(model.effective_hamiltonian()) {
        const Eigen::Index n = k_.rows();
        for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_}) v->resize(n);
    }

    /// One RK4 step of d(psi)/dt = -i K psi into `out`.
    void rk4(const ComplexVector& y, double h, ComplexVector& out) {
        apply(y, k1_);
        tmp_ = y + (0.5 * h) * k1_;
        apply(tmp_, k2_);
        tmp_ = y + (0.5 * h) * k2_;
        apply(tmp_, k3_);
        tmp_ = y + h * k3_;
        apply(tmp_, k4_);
        out = y + (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    }

  private:
    void apply(const ComplexVector& y, ComplexVector& out) const {
        out.noalias() = k_ * y;
        out *= Complex(0.0, -1.0);
    }

    SparseComplexMatrix k_;
    ComplexVector k1_, k2_, k3_, k4_, tmp_;
};

struct Accumulator {
    ComplexMatrix rho;
    std::vector<std::size_t> counts;
    std::size_t n = 0, resolved = 0, jumps = 0;

    Accumulator(Eigen::Index dim, std::size_t blocks)
        : rho(ComplexMatrix::Zero(dim, dim)), counts(blocks, 0) {}

    void add(const Trajectory& tr) {
        rho.noalias() += tr.psi * tr.psi.adjoint();
        ++n;
        jumps += tr.jumps;
        if (tr.final_block) {
            ++resolved;
            ++counts.at(*tr.final_block);
        }
    }
    void merge(const Accumulator& o) {
        rho += o.rho;
        n += o.n;
        resolved += o.resolved;
        jumps += o.jumps;
        for (std::size_t b = 0; b < counts.size(); ++b) counts[b] += o.counts[b];
    }
    EnsembleStats stats(const HybridModel& model) const {
        EnsembleStats s{n, resolved, n - resolved, counts, {},
                        bath::HybridDensityMatrix(n > 0 ? ComplexMatrix(rho / static_cast<double>(n))
                                                        : rho,
                                                  model.sectors, model.grid),
                        jumps};
        s.block_frequencies.resize(counts.size(), 0.0);
        if (resolved > 0) {
            for (std::size_t b = 0; b < counts.size(); ++b) {
                s.block_frequencies[b] =
                    static_cast<double>(counts[b]) / static_cast<double>(resolved);
            }
        }
        return s;
    }
};

}  // namespace

Scheme parse_scheme(std::string_view name) {
    if (name == "jump") return Scheme::jump;
    if (name == "diffusive") return Scheme::diffusive;
    throw UnravelingError("unknown unraveling scheme '" + std::string(name) +
                          "' (expected jump or diffusive)");
}

std::string_view to_string(Scheme s) { return s == Scheme::jump ? "jump" : "diffusive"; }

double jump_rate(const HybridModel& model, const ComplexVector& psi) {
    double r = 0.0;
    const Eigen::Index d = model.sector_dim();
    for (std::size_t b = 1; b <= model.sectors; ++b) {
        r += (model.a * psi.segment(model.offset(b), d)).squaredNorm();
    }
    return model.gamma * r;
}

double decoherence_time(const HybridModel& model, const ComplexVector& psi) {
    const double excited = psi.squaredNorm() - std::norm(psi(0));
    if (!(excited > 0.0)) return 0.0;
    if (model.gamma == 0.0) return std::numeric_limits<double>::infinity();
    return excited / jump_rate(model, psi);
}

Trajectory run_trajectory_jump(const ComplexVector& initial, const HybridModel& model,
                               const TrajectoryOptions& opt, RngStream rng) {
    check_inputs(initial, model, opt);
    Propagator prop(model);
    Trajectory tr{initial, rng, {}, {}, 0, opt.horizon, decoherence_time(model, initial), 0.0};
    ComplexVector& psi = tr.psi;
    RngStream& gen = tr.rng;
    const Eigen::Index d = model.sector_dim();
    const bool dissipative = model.gamma > 0.0;
    const double t_end = opt.horizon;

    tr.block_record.push_back(sample(0.0, model, psi));
    double survival = 1.0;
    double threshold = dissipative ? gen.uniform() : 0.0;
    double t = 0.0;
    std::size_t step = 0;
    ComplexVector phi(psi.size());
    while (t < t_end * (1.0 - 1e-13)) {
        const double h = std::min(opt.dt, t_end - t);
        prop.rk4(psi, h, phi);
        const double s = phi.squaredNorm();
        if (!dissipative || survival * s > threshold) {
            survival *= s;
            psi = phi * (1.0 / std::sqrt(s));
            t += h;
            ++step;
            if (step % opt.record_every == 0) tr.block_record.push_back(sample(t, model, psi));
            continue;
        }
        // Locate the crossing by interpolating the log norm over the step.
        double tau = h;
        if (s < 1.0) tau = std::clamp(h * std::log(threshold / survival) / std::log(s), 0.0, h);
        prop.rk4(psi, tau, phi);
        psi = phi / phi.norm();
        t += tau;

        std::vector<double> cum(model.sectors);
        std::vector<ComplexVector> images(model.sectors);
        double total = 0.0;
        for (std::size_t b = 1; b <= model.sectors; ++b) {
            images[b - 1] = model.a * psi.segment(model.offset(b), d);
            total += images[b - 1].squaredNorm();
            cum[b - 1] = total;
        }
        if (total > 0.0) {
            const double u = gen.uniform() * total;
            std::size_t pick = 0;
            while (pick + 1 < cum.size() && !(u < cum[pick])) ++pick;
            psi.setZero();
            psi.segment(model.offset(pick + 1), d) = images[pick] / std::sqrt(images[pick].squaredNorm());
            ++tr.jumps;
        }
        tr.block_record.push_back(sample(t, model, psi));
        survival = 1.0;
        threshold = gen.uniform();
    }
    if (tr.block_record.back().t != t) tr.block_record.push_back(sample(t, model, psi));
    finish(tr, model, opt);
    return tr;
}

Trajectory run_trajectory_diffusive(const ComplexVector& initial, const HybridModel& model,
                                    const TrajectoryOptions& opt, RngStream rng) {
    check_inputs(initial, model, opt);
    const SparseComplexMatrix h_full = model.full_hamiltonian();
    Trajectory tr{initial, rng, {}, {}, 0, opt.horizon, decoherence_time(model, initial), 0.0};
    ComplexVector& psi = tr.psi;
    const Eigen::Index d = model.sector_dim();
    const std::size_t k = model.sectors;
    const double sg = std::sqrt(model.gamma);

    std::vector<ComplexVector> diffusion(k, ComplexVector::Zero(model.dim()));
    std::vector<Complex> increments(k);

    tr.block_record.push_back(sample(0.0, model, psi));
    const auto steps = static_cast<std::size_t>(std::ceil(opt.horizon / opt.dt - 1e-9));
    for (std::size_t step = 1; step <= steps; ++step) {
        const double t0 = opt.dt * static_cast<double>(step - 1);
        const double h = std::min(opt.dt, opt.horizon - t0);
        ComplexVector drift = Complex(0.0, -1.0) * (h_full * psi);
        if (model.gamma > 0.0) {
            for (std::size_t b = 1; b <= k; ++b) {
                const Eigen::Index o = model.offset(b);
                const ComplexVector seg = psi.segment(o, d);
                const ComplexVector aseg = model.a * seg;
                const Complex mean = seg.dot(aseg);
                drift.segment(o, d) +=
                    model.gamma * (std::conj(mean) * aseg - 0.5 * (model.ata * seg));
                drift -= (0.5 * model.gamma * std::norm(mean)) * psi;
                ComplexVector& dif = diffusion[b - 1];
                dif = (-sg * mean) * psi;
                dif.segment(o, d) += sg * aseg;
                increments[b - 1] = complex_wiener_increment(tr.rng, h);
            }
        }
        ComplexVector next = euler_maruyama_step<ComplexVector>(
            psi, drift, model.gamma > 0.0 ? std::span<const ComplexVector>(diffusion)
                                          : std::span<const ComplexVector>(),
            model.gamma > 0.0 ? std::span<const Complex>(increments) : std::span<const Complex>(),
            h);
        const double n2 = next.squaredNorm();
        tr.max_norm_change = std::max(tr.max_norm_change, std::abs(n2 - 1.0));
        psi = next / std::sqrt(n2);
        if (step % opt.record_every == 0 || step == steps) {
            tr.block_record.push_back(sample(std::min(t0 + h, opt.horizon), model, psi));
        }
    }
    finish(tr, model, opt);
    return tr;
}

Trajectory run_trajectory(Scheme scheme, const ComplexVector& initial, const HybridModel& model,
                          const TrajectoryOptions& options, RngStream rng) {
    return scheme == Scheme::jump ? run_trajectory_jump(initial, model, options, rng)
                                  : run_trajectory_diffusive(initial, model, options, rng);
}

bool trapped_in_final_block(const Trajectory& tr, double enter, double stay) {
    if (!tr.final_block) return false;
    const std::size_t b = *tr.final_block;
    bool inside = false;
    for (const auto& s : tr.block_record) {
        if (!inside && s.populations[b] > enter) inside = true;
        if (inside && s.populations[b] < stay) return false;
    }
    return inside;
}

bool trapped_everywhere(const Trajectory& tr, double enter, double stay) {
    if (tr.block_record.empty()) return true;
    const std::size_t blocks = tr.block_record.front().populations.size();
    for (std::size_t b = 0; b < blocks; ++b) {
        bool inside = false;
        for (const auto& s : tr.block_record) {
            if (!inside && s.populations[b] > enter) inside = true;
            if (inside && s.populations[b] < stay) return false;
        }
    }
    return true;
}

EnsembleStats ensemble_average(std::span<const Trajectory> trajectories,
                               const HybridModel& model) {
    if (trajectories.empty()) throw UnravelingError("ensemble_average: no trajectories");
    const double horizon = trajectories.front().horizon;
    for (const auto& tr : trajectories) {
        if (tr.psi.size() != model.dim() || tr.horizon != horizon) {
            throw UnravelingError("ensemble_average: inhomogeneous ensemble");
        }
    }
    Accumulator total(model.dim(), model.sectors + 1);
    for (std::size_t c = 0; c < trajectories.size(); c += kChunk) {
        Accumulator part(model.dim(), model.sectors + 1);
        const std::size_t end = std::min(trajectories.size(), c + kChunk);
        for (std::size_t i = c; i < end; ++i) part.add(trajectories[i]);
        total.merge(part);
    }
    return total.stats(model);
}

EnsembleRun run_ensemble(Scheme scheme, const ComplexVector& initial, const HybridModel& model,
                         const TrajectoryOptions& options, const EnsembleOptions& ens) {
    if (ens.n_traj == 0) throw UnravelingError("run_ensemble: n_traj must be >= 1");
    check_inputs(initial, model, options);
    if (ens.dump_dir) std::filesystem::create_directories(*ens.dump_dir);

    const std::size_t n_chunks = (ens.n_traj + kChunk - 1) / kChunk;
    std::vector<Accumulator> parts(n_chunks, Accumulator(model.dim(), model.sectors + 1));
    std::vector<std::optional<Trajectory>> kept(ens.keep_trajectories ? ens.n_traj : 0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        try {
            for (std::size_t c = next++; c < n_chunks; c = next++) {
                const std::size_t end = std::min(ens.n_traj, (c + 1) * kChunk);
                for (std::size_t i = c * kChunk; i < end; ++i) {
                    Trajectory tr = run_trajectory(scheme, initial, model, options,
                                                   rng_split(ens.master_seed, ens.first_stream + i));
                    parts[c].add(tr);
                    if (ens.dump_dir) {
                        std::ofstream f(*ens.dump_dir / ("trajectory_" + std::to_string(i) + ".csv"));
                        write_trajectory_csv(f, tr);
                    }
                    if (ens.keep_trajectories) kept[i] = std::move(tr);
                }
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n_chunks;
        }
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(ens.threads, static_cast<unsigned>(n_chunks)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    Accumulator total(model.dim(), model.sectors + 1);
    for (const auto& p : parts) total.merge(p);
    EnsembleRun run{total.stats(model), {}};
    if (ens.keep_trajectories) {
        run.trajectories.reserve(ens.n_traj);
        for (auto& t : kept) run.trajectories.push_back(std::move(*t));
    }
    return run;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& tr) {
    const std::size_t blocks =
        tr.block_record.empty() ? 0 : tr.block_record.front().populations.size();
    out << "t";
    for (std::size_t b = 0; b < blocks; ++b) out << ",p_block" << b;
    out << ",centroid,width\n" << std::setprecision(17);
    for (const auto& s : tr.block_record) {
        out << s.t;
        for (double p : s.populations) out << ',' << p;
        out << ',' << s.centroid << ',' << s.width << '\n';
    }
}

}  // namespace measchain::unraveling
