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

#include <array>
#include <complex>
#include <cstdint>
#include <limits>

namespace measchain {

/// Philox4x32-10 block function (Salmon et al., SC 2011).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream.
///
/// The master seed is the Philox key; the stream index occupies the upper
/// half of the 128-bit counter and the draw number the lower half. Stream i
/// therefore yields the same sequence no matter which thread consumes it or
/// in what order streams are created.
class RngStream {
  public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1].
    double uniform_open();
    /// Standard normal (Box-Muller, platform independent).
    double normal();
    /// Complex normal with E|z|^2 = 1 and E z^2 = 0.
    std::complex<double> complex_normal();

    std::uint64_t master_seed() const { return seed_; }
    std::uint64_t stream_index() const { return stream_; }

  private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_counter_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

/// Stream `index` derived from `master_seed`.
inline RngStream rng_split(std::uint64_t master_seed, std::uint64_t index) {
    return RngStream(master_seed, index);
}

}  // namespace measchain
