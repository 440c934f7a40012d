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

#include <benchmark/benchmark.h>

#include <vector>

#include "measchain/avalanche.hpp"
#include "measchain/bath/master_equation.hpp"
#include "measchain/pointer.hpp"
#include "measchain/transport.hpp"
#include "measchain/twoslit.hpp"
#include "measchain/unraveling.hpp"

using namespace measchain;

namespace {

bath::HybridModel spatial_model(std::size_t points) {
    const auto grid = bath::Grid::in_lambda_units(points, 0.25, 1.0);
    return bath::HybridModel::spatial({1.0, 1.0, 0.25}, grid, true);
}

ComplexVector packet_state(const bath::HybridModel& m, double x0) {
    const std::vector<Complex> betas{0.8};
    const std::vector<ComplexVector> states{bath::gaussian_packet(*m.grid, x0, 0.0, 1.0)};
    return bath::hybrid_superposition(m, 0.6, betas, states);
}

}  // namespace

// One evaluation of the master-equation right-hand side.
static void BM_MasterDerivative(benchmark::State& state) {
    const auto m = spatial_model(static_cast<std::size_t>(state.range(0)));
    const ComplexVector psi = packet_state(m, 2.0);
    const ComplexMatrix rho = psi * psi.adjoint();
    for (auto _ : state) benchmark::DoNotOptimize(bath::master_derivative(m, rho));
}
BENCHMARK(BM_MasterDerivative)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

// A single jump trajectory over ten decoherence times.
static void BM_JumpTrajectory(benchmark::State& state) {
    const auto m = spatial_model(static_cast<std::size_t>(state.range(0)));
    const ComplexVector psi = packet_state(m, 4.0);
    unraveling::TrajectoryOptions o;
    o.horizon = 10.0 * unraveling::decoherence_time(m, psi);
    o.dt = 0.02 * unraveling::decoherence_time(m, psi);
    o.record_every = 10;
    std::uint64_t stream = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(unraveling::run_trajectory_jump(psi, m, o, rng_split(1, stream++)));
    }
}
BENCHMARK(BM_JumpTrajectory)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

// Photons through the 16-pixel two-slit screen.
static void BM_TwoSlitPhotons(benchmark::State& state) {
    const auto arr = twoslit::DetectorArray::tile_screen(twoslit::SlitGeometry{}, 16, 5e-7 / 2e-5);
    const auto exp = twoslit::prepare_experiment(arr, {});
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(twoslit::run_experiment(exp, n, 42));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_TwoSlitPhotons)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_RtaStep(benchmark::State& state) {
    const auto f = transport::equilibrium({static_cast<std::size_t>(state.range(0)), 0.1}, 1.0, 1.0, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(transport::step_boltzmann_rta(f, {0.01, 1.0, 1.0, 1.0}, 0.01));
    }
}
BENCHMARK(BM_RtaStep)->Arg(128)->Arg(512);

static void BM_PhononCollision(benchmark::State& state) {
    const auto f = transport::equilibrium({static_cast<std::size_t>(state.range(0)), 0.25}, 1.0, 1.0, 2.0);
    const transport::PhononBath bath{0.5, 1.0, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(transport::collision_integral_phonon(f, bath));
}
BENCHMARK(BM_PhononCollision)->Arg(64)->Arg(128);

static void BM_AvalancheRun(benchmark::State& state) {
    const auto s = avalanche::make_state(static_cast<std::size_t>(state.range(0)), 1.0, 1.0, 0.05,
                                         100.0, 1.0, 0.05, 0.01);
    for (auto _ : state) benchmark::DoNotOptimize(avalanche::run_avalanche(s));
}
BENCHMARK(BM_AvalancheRun)->Arg(200)->Arg(800)->Unit(benchmark::kMicrosecond);

static void BM_PointerSettle(benchmark::State& state) {
    const pointer::PointerParams p{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(pointer::settle(p, 0.2, {}, 100.0));
}
BENCHMARK(BM_PointerSettle)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
