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

/// Analytic output distribution of error-free period finding.
///
/// With the function register collapsed to one branch the 2L-bit register
/// holds M equally weighted terms |k0 + n r>, n = 0..M-1. After the Fourier
/// transform, outcome j has probability
///
///     p(j) = |sum_n exp(2 pi i j n r / 2^(2L))|^2 / (M 2^(2L))
///          = sin^2(pi M j r / 2^(2L)) / (M 2^(2L) sin^2(pi j r / 2^(2L))),
///
/// which is independent of k0 apart from M. When r divides 2^(2L) every
/// branch has M = 2^(2L)/r and the peaks are exactly 1/r.
///
/// The circuit never measures the function register, so its output is the
/// branch mixture: branch k0 carries weight M(k0)/2^(2L). That mixture is
/// `register_averaged_probability`, the exact oracle for simulated circuits.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>
#include <stdexcept>
#include <vector>

namespace qpf {

struct SpectrumParams {
    int L = 0;
    std::uint64_t r = 0;
    std::uint64_t M = 0;
    // Offset of the surviving branch and its function value. Only M depends
    // on them; the peak shape does not.
    std::uint64_t k0 = 0;
    std::uint64_t f0 = 0;

    std::uint64_t register_size() const { return std::uint64_t{1} << (2 * L); }
};

/// Number of k in [0, 2^(2L)) congruent to k0 mod r.
inline std::uint64_t branch_size(int L, std::uint64_t r, std::uint64_t k0 = 0) {
    const std::uint64_t Q = std::uint64_t{1} << (2 * L);
    return (Q - 1 - k0) / r + 1;
}

inline SpectrumParams make_spectrum_params(int L, std::uint64_t r, std::uint64_t k0 = 0) {
    if (L < 1 || L > 15) {
        throw std::domain_error("L out of range");
    }
    if (r == 0 || r >= (std::uint64_t{1} << L) * (std::uint64_t{1} << L)) {
        throw std::domain_error("r out of range");
    }
    if (k0 >= r) {
        throw std::domain_error("k0 must be below r");
    }
    return SpectrumParams{L, r, branch_size(L, r, k0), k0, 0};
}

/// Closed-form single-branch peak probability.
inline double peak_probability(std::uint64_t j, const SpectrumParams& p) {
    const std::uint64_t Q = p.register_size();
    const double M = static_cast<double>(p.M);
    // Reduce j*r mod Q exactly before converting to an angle.
    const std::uint64_t phase_num = (j % Q) * (p.r % Q) % Q;
    if (phase_num == 0) {
        return M / static_cast<double>(Q);
    }
    const double angle = std::numbers::pi * static_cast<double>(phase_num) / static_cast<double>(Q);
    const std::uint64_t mphase = (p.M % Q) * phase_num % Q;
    const double num = std::sin(std::numbers::pi * static_cast<double>(mphase) /
                                static_cast<double>(Q));
    const double den = std::sin(angle);
    return num * num / (den * den * M * static_cast<double>(Q));
}

/// Output distribution of the unmeasured circuit: every branch k0 in 0..r-1
/// weighted by its share M(k0)/2^(2L) of the register.
inline double register_averaged_probability(std::uint64_t j, int L, std::uint64_t r) {
    const std::uint64_t Q = std::uint64_t{1} << (2 * L);
    const std::uint64_t branches = r < Q ? r : Q;
    double total = 0.0;
    for (std::uint64_t k0 = 0; k0 < branches; ++k0) {
        SpectrumParams p = make_spectrum_params(L, r, k0);
        total += static_cast<double>(p.M) / static_cast<double>(Q) * peak_probability(j, p);
    }
    return total;
}

/// {floor(c 2^(2L)/r), ceil(c 2^(2L)/r) : 0 < c < r}.
inline std::set<std::uint64_t> useful_j_set(const SpectrumParams& p) {
    const std::uint64_t Q = p.register_size();
    std::set<std::uint64_t> out;
    for (std::uint64_t c = 1; c < p.r; ++c) {
        const std::uint64_t num = c * Q;
        out.insert(num / p.r);
        out.insert((num + p.r - 1) / p.r);
    }
    return out;
}

inline double success_probability(const SpectrumParams& p) {
    double s = 0.0;
    for (const std::uint64_t j : useful_j_set(p)) {
        s += peak_probability(j, p);
    }
    return s;
}

/// Full single-branch spectrum, index = j.
inline std::vector<double> full_spectrum(const SpectrumParams& p) {
    std::vector<double> out(p.register_size());
    for (std::uint64_t j = 0; j < out.size(); ++j) {
        out[j] = peak_probability(j, p);
    }
    return out;
}

/// The target outcome studied under errors, floor(2^(2L)/6).
inline std::uint64_t default_target(int L) {
    return (std::uint64_t{1} << (2 * L)) / 6;
}

} // namespace qpf
