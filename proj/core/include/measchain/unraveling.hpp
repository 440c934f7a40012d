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

// Stochastic pure-state unravelings of the hybrid master equation.
//
// Jump scheme: the state follows K = H - (i gamma/2) sum_b A_b^dagger A_b
// until the accumulated no-jump probability falls below a uniform draw, then
// jumps to A_b psi / |A_b psi| in a sector chosen with weight |A_b psi|^2.
//
// Diffusive scheme: quantum state diffusion with one complex Wiener process
// per sector,
//
//   d psi = [-iH + gamma sum_b (<A_b>^* A_b - A_b^dagger A_b / 2
//            - |<A_b>|^2 / 2)] psi dt + sqrt(gamma) sum_b (A_b - <A_b>) psi dxi_b,
//
// advanced by Euler-Maruyama and renormalized after every step.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "measchain/bath/hybrid.hpp"
#include "measchain/numerics/linalg.hpp"
#include "measchain/numerics/rng.hpp"

namespace measchain::unraveling {

enum class Scheme { jump, diffusive };

Scheme parse_scheme(std::string_view name);
std::string_view to_string(Scheme s);

class UnravelingError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct TrajectoryOptions {
    double horizon = 1.0;
    double dt = 1e-3;
    std::size_t record_every = 1;  // record block populations every n steps
    double resolve_threshold = 0.999;
    double min_decoherence_times = 10.0;
};

struct BlockSample {
    double t = 0.0;
    std::vector<double> populations;  // ground first, then sectors
    double centroid = 0.0;  // packet moments of the excited part (grid models)
    double width = 0.0;
};

struct Trajectory {
    ComplexVector psi;  // state at the horizon
    RngStream rng;      // stream state after the run
    std::vector<BlockSample> block_record;
    std::optional<std::size_t> final_block;  // empty when UNRESOLVED
    std::size_t jumps = 0;
    double horizon = 0.0;
    double decoherence_time = 0.0;
    double max_norm_change = 0.0;  // largest per-step norm defect before renormalization

    bool resolved() const { return final_block.has_value(); }
};

/// 1 / (gamma <A^dagger A>) over the excited part of psi; 0 without excited
/// weight, infinity when gamma = 0.
double decoherence_time(const bath::HybridModel& model, const ComplexVector& psi);

/// gamma sum_b <psi_b|A^dagger A|psi_b>, the total jump rate of a normalized psi.
double jump_rate(const bath::HybridModel& model, const ComplexVector& psi);

Trajectory run_trajectory_jump(const ComplexVector& initial, const bath::HybridModel& model,
                               const TrajectoryOptions& options, RngStream rng);

Trajectory run_trajectory_diffusive(const ComplexVector& initial, const bath::HybridModel& model,
                                    const TrajectoryOptions& options, RngStream rng);

Trajectory run_trajectory(Scheme scheme, const ComplexVector& initial,
                          const bath::HybridModel& model, const TrajectoryOptions& options,
                          RngStream rng);

/// True when the final block, from the first record where its population
/// exceeds `enter`, never falls below `stay`.
bool trapped_in_final_block(const Trajectory& tr, double enter = 0.999, double stay = 0.99);

/// True when no block that once exceeded `enter` later falls below `stay`.
bool trapped_everywhere(const Trajectory& tr, double enter = 0.999, double stay = 0.99);

struct EnsembleStats {
    std::size_t n_traj = 0;
    std::size_t n_resolved = 0;
    std::size_t n_unresolved = 0;
    std::vector<std::size_t> block_counts;  // resolved trajectories per block
    std::vector<double> block_frequencies;  // block_counts / n_resolved
    bath::HybridDensityMatrix mean_density_matrix;
    std::size_t total_jumps = 0;
};

/// Mean of |psi><psi| over the final states plus block statistics. All
/// trajectories must share dimension and horizon.
EnsembleStats ensemble_average(std::span<const Trajectory> trajectories,
                               const bath::HybridModel& model);

struct EnsembleOptions {
    std::size_t n_traj = 1000;
    std::uint64_t master_seed = 0;
    std::uint64_t first_stream = 0;
    unsigned threads = 1;
    bool keep_trajectories = false;
    std::optional<std::filesystem::path> dump_dir;  // one CSV per trajectory
};

struct EnsembleRun {
    EnsembleStats stats;
    std::vector<Trajectory> trajectories;  // only with keep_trajectories
};

/// Runs trajectory i on stream (master_seed, first_stream + i). Results do
/// not depend on the thread count.
EnsembleRun run_ensemble(Scheme scheme, const ComplexVector& initial,
                         const bath::HybridModel& model, const TrajectoryOptions& options,
                         const EnsembleOptions& ensemble);

/// CSV: t, p_block0..p_blockK, centroid, width.
void write_trajectory_csv(std::ostream& out, const Trajectory& tr);

}  // namespace measchain::unraveling
