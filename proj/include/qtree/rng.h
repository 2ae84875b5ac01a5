// Copyright 2026 The qtree Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QTREE_RNG_H
#define QTREE_RNG_H

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace qtree {

/// One step of the SplitMix64 sequence; advances `state`.
uint64_t splitmix64(uint64_t &state);

/// Random stream backed by xoshiro256++.
///
/// Streams are cheap to construct, so every independent unit of work
/// (a shot, a pool slot, a Monte Carlo sample) gets its own stream derived
/// from a global seed and a tuple of integer keys. Results never depend on
/// which worker runs the task.
///
/// Normal variates use Box-Muller on our own uniforms instead of
/// std::normal_distribution so that output is identical across standard
/// library implementations.
class Rng {
   public:
    using result_type = uint64_t;

    explicit Rng(uint64_t seed);

    static constexpr result_type min() {
        return 0;
    }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal variate.
    double normal();

   private:
    uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Mixes a seed and a key tuple into a 64-bit stream seed.
uint64_t derive_seed(uint64_t seed, std::initializer_list<uint64_t> keys);

/// Stream for the task identified by `keys` under the global `seed`.
inline Rng stream(uint64_t seed, std::initializer_list<uint64_t> keys) {
    return Rng(derive_seed(seed, keys));
}

// Domain tags keep streams of different subsystems disjoint.
enum class StreamTag : uint64_t {
    kInstance = 0x11,
    kShot = 0x22,
    kPoolSlot = 0x33,
    kNodeSample = 0x44,
    kMisc = 0x55,
};

inline uint64_t tag(StreamTag t) {
    return static_cast<uint64_t>(t);
}

}  // namespace qtree

#endif
