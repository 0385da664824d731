// Copyright 2026 The qpfsim Authors
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

#pragma once

/// Portable seeded randomness. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard. Standard distributions are not
/// (their algorithms are implementation defined), so bounded integers and
/// unit reals are derived here with fixed algorithms. Per-trial streams are
/// seeded by SplitMix64 over (master seed, stream index).

#include <cstdint>
#include <random>

namespace qpf {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream `index` of a master seed.
    static Rng stream(std::uint64_t master_seed, std::uint64_t index) {
        std::uint64_t state = master_seed;
        std::uint64_t mixed = splitmix64(state);
        state = mixed ^ (index * 0xD1B54A32D192ED03ULL);
        splitmix64(state);
        return Rng(splitmix64(state));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, bound) by rejection; bound > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t v = engine_();
        while (v >= limit) {
            v = engine_();
        }
        return v % bound;
    }

    /// Uniform real in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

} // namespace qpf
