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

#include "measchain/numerics/rng.hpp"

#include <cmath>
#include <numbers>

namespace measchain {

namespace {

constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;
constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t lo0, hi0, lo1, hi1;
        mulhilo(kMulA, ctr[0], lo0, hi0);
        mulhilo(kMulB, ctr[2], lo1, hi1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeylA;
        key[1] += kWeylB;
    }
    return ctr;
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : seed_(master_seed), stream_(stream_index) {}

void RngStream::refill() {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_counter_), static_cast<std::uint32_t>(block_counter_ >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                              static_cast<std::uint32_t>(seed_ >> 32)};
    const auto out = philox4x32(ctr, key);
    ++block_counter_;
    buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    buffered_ = 2;
}

RngStream::result_type RngStream::operator()() {
    if (buffered_ == 0) refill();
    return buffer_[2 - buffered_--];
}

double RngStream::uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() {
    return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return spare_normal_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    spare_normal_ = r * std::sin(phi);
    has_spare_normal_ = true;
    return r * std::cos(phi);
}

std::complex<double> RngStream::complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

}  // namespace measchain
