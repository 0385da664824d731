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

/// Classical pre- and post-processing for period finding: modular
/// arithmetic, multiplicative order, continued-fraction period extraction
/// and factor recovery. All arithmetic is 64-bit; operands are desk scale
/// (N <= 2^10, denominators <= 2^20) so products never overflow.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpf {

/// A factoring problem instance: the modulus, the base, the register width
/// and the multiplicative order of the base.
struct ModInstance {
    std::uint64_t N = 0;
    std::uint64_t x = 0;
    int L = 0;
    std::uint64_t r = 0;
    /// Set when N < 2^(L-1), i.e. the register is wider than N needs.
    bool oversized_register = false;
};

struct FactorPair {
    std::uint64_t N1 = 0;
    std::uint64_t N2 = 0;
};

inline std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
    if (a == 0 && b == 0) {
        throw std::domain_error("gcd(0, 0) is undefined");
    }
    while (b != 0) {
        const std::uint64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

/// x^k mod N by square-and-multiply.
inline std::uint64_t mod_exp(std::uint64_t x, std::uint64_t k, std::uint64_t N) {
    if (N < 2) {
        throw std::domain_error("mod_exp requires N >= 2");
    }
    std::uint64_t result = 1;
    std::uint64_t base = x % N;
    while (k > 0) {
        if (k & 1U) {
            result = result * base % N;
        }
        base = base * base % N;
        k >>= 1U;
    }
    return result;
}

/// Modular inverse of a mod N; throws when gcd(a, N) != 1.
inline std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t N) {
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = static_cast<std::int64_t>(N);
    std::int64_t new_r = static_cast<std::int64_t>(a % N);
    while (new_r != 0) {
        const std::int64_t q = r / new_r;
        std::int64_t tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    if (r != 1) {
        throw std::domain_error("no modular inverse: " + std::to_string(a) + " mod " +
                                std::to_string(N));
    }
    if (t < 0) {
        t += static_cast<std::int64_t>(N);
    }
    return static_cast<std::uint64_t>(t);
}

/// Smallest r > 0 with x^r = 1 (mod N), by direct scan.
inline std::uint64_t multiplicative_order(std::uint64_t x, std::uint64_t N) {
    if (N < 2) {
        throw std::domain_error("multiplicative_order requires N >= 2");
    }
    if (gcd(x % N, N) != 1) {
        throw std::domain_error("multiplicative_order requires gcd(x, N) = 1");
    }
    std::uint64_t value = x % N;
    std::uint64_t r = 1;
    while (value != 1 % N) {
        value = value * (x % N) % N;
        ++r;
    }
    return r;
}

/// Number of bits needed to hold N, ceil(log2(N)) for non powers of two.
inline int bit_length(std::uint64_t N) {
    int L = 0;
    while ((std::uint64_t{1} << L) < N) {
        ++L;
    }
    return L;
}

/// Validates (N, x) and fills in L and r. When `register_bits` is given it is
/// used as L (the register may be wider than N needs, which sets
/// `oversized_register`); it must still satisfy N <= 2^L.
inline ModInstance make_instance(std::uint64_t N, std::uint64_t x,
                                 std::optional<int> register_bits = std::nullopt) {
    if (N <= 2) {
        throw std::domain_error("N must exceed 2");
    }
    if (x <= 1 || x >= N) {
        throw std::domain_error("x must satisfy 1 < x < N");
    }
    if (gcd(N, x) != 1) {
        throw std::domain_error("gcd(N, x) must be 1");
    }
    ModInstance inst;
    inst.N = N;
    inst.x = x;
    inst.L = register_bits.value_or(bit_length(N));
    if (inst.L < 2 || inst.L > 10) {
        throw std::domain_error("register width must lie in 2..10");
    }
    if (N > (std::uint64_t{1} << inst.L)) {
        throw std::domain_error("N does not fit in the register");
    }
    inst.oversized_register = N <= (std::uint64_t{1} << (inst.L - 1));
    inst.r = multiplicative_order(x, N);
    return inst;
}

/// Continued-fraction expansion of num/den.
inline std::vector<std::uint64_t> continued_fraction(std::uint64_t num, std::uint64_t den) {
    std::vector<std::uint64_t> terms;
    while (den != 0) {
        terms.push_back(num / den);
        const std::uint64_t rem = num % den;
        num = den;
        den = rem;
    }
    return terms;
}

struct Convergent {
    std::uint64_t numerator;
    std::uint64_t denominator;
};

inline std::vector<Convergent> convergents(std::uint64_t num, std::uint64_t den) {
    std::vector<Convergent> out;
    std::uint64_t h_prev = 1, h_prev2 = 0;
    std::uint64_t k_prev = 0, k_prev2 = 1;
    for (const std::uint64_t a : continued_fraction(num, den)) {
        const std::uint64_t h = a * h_prev + h_prev2;
        const std::uint64_t k = a * k_prev + k_prev2;
        out.push_back({h, k});
        h_prev2 = h_prev;
        h_prev = h;
        k_prev2 = k_prev;
        k_prev = k;
    }
    return out;
}

/// Smallest convergent denominator of j / 2^(2L) that is at most N and
/// passes `accept`. The zero convergent (numerator 0) is skipped, so j = 0
/// yields nothing.
inline std::optional<std::uint64_t> extract_period(
    std::uint64_t j, int L, std::uint64_t N,
    const std::function<bool(std::uint64_t)>& accept = {}) {
    const std::uint64_t Q = std::uint64_t{1} << (2 * L);
    if (j == 0 || j >= Q) {
        return std::nullopt;
    }
    for (const Convergent& c : convergents(j, Q)) {
        if (c.numerator == 0) {
            continue;
        }
        if (c.denominator > N) {
            break;
        }
        if (!accept || accept(c.denominator)) {
            return c.denominator;
        }
    }
    return std::nullopt;
}

/// Period search used by the end-to-end demo: every convergent denominator
/// d <= N of j / 2^(2L) and its multiples m*d <= N are tried against
/// x^(m d) = 1 (mod N). Multiples recover r when gcd(c, r) > 1. Every
/// passing candidate is a multiple of the order, so the smallest is kept.
inline std::optional<std::uint64_t> find_period(std::uint64_t j, int L, std::uint64_t N,
                                                std::uint64_t x) {
    const std::uint64_t Q = std::uint64_t{1} << (2 * L);
    if (j == 0 || j >= Q) {
        return std::nullopt;
    }
    std::optional<std::uint64_t> best;
    for (const Convergent& c : convergents(j, Q)) {
        if (c.numerator == 0) {
            continue;
        }
        if (c.denominator > N) {
            break;
        }
        for (std::uint64_t d = c.denominator; d <= N && (!best || d < *best); d += c.denominator) {
            if (mod_exp(x, d, N) == 1) {
                best = d;
                break;
            }
        }
    }
    return best;
}

/// Factors from an even period with x^(r/2) != -1 (mod N); nothing otherwise.
/// Trivial factors (1 or N) also yield nothing.
inline std::optional<FactorPair> recover_factors(const ModInstance& inst) {
    if (inst.r % 2 != 0) {
        return std::nullopt;
    }
    const std::uint64_t half = mod_exp(inst.x, inst.r / 2, inst.N);
    if (half == inst.N - 1) {
        return std::nullopt;
    }
    const std::uint64_t n1 = gcd((half + inst.N - 1) % inst.N, inst.N);
    const std::uint64_t n2 = gcd(half + 1, inst.N);
    if (n1 <= 1 || n1 >= inst.N || n2 <= 1 || n2 >= inst.N || n1 * n2 != inst.N) {
        return std::nullopt;
    }
    return FactorPair{n1, n2};
}

/// The four period-6 instances used for the stability studies, keyed by
/// register width L (qubit count 2L + 4 = 14, 16, 18, 20).
inline ModInstance table_instance(int L) {
    switch (L) {
    case 5: return make_instance(27, 8, 5);
    case 6: return make_instance(63, 31, 6);
    case 7: return make_instance(77, 10, 7);
    case 8: return make_instance(247, 27, 8);
    default: throw std::domain_error("no tabulated instance for L=" + std::to_string(L));
    }
}

} // namespace qpf
