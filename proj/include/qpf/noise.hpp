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

/// Discrete Pauli faults. A fault site is a (timestep, qubit) pair; the
/// operator acts on the qubit after every gate of that timestep, whether
/// the qubit took part in a gate or idled.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "qpf/circuit.hpp"
#include "qpf/gate.hpp"
#include "qpf/rng.hpp"
#include "qpf/state_vector.hpp"

namespace qpf {

enum class Pauli { X, XZ, Z };

inline std::string pauli_name(Pauli p) {
    switch (p) {
    case Pauli::X: return "X";
    case Pauli::XZ: return "XZ";
    case Pauli::Z: return "Z";
    }
    return "?";
}

inline Pauli parse_pauli(const std::string& s) {
    if (s == "X" || s == "x") {
        return Pauli::X;
    }
    if (s == "XZ" || s == "xz" || s == "Y" || s == "y") {
        return Pauli::XZ;
    }
    if (s == "Z" || s == "z") {
        return Pauli::Z;
    }
    throw std::invalid_argument("unknown Pauli '" + s + "' (expected X, XZ or Z)");
}

struct ErrorEvent {
    int timestep = 0;
    int qubit = 0;
    Pauli pauli = Pauli::X;

    friend bool operator==(const ErrorEvent&, const ErrorEvent&) = default;
    friend bool operator<(const ErrorEvent& a, const ErrorEvent& b) {
        return std::tie(a.timestep, a.qubit) < std::tie(b.timestep, b.qubit);
    }
};

inline GateOp error_gate(const ErrorEvent& e) {
    switch (e.pauli) {
    case Pauli::X: return GateOp::x(e.qubit);
    case Pauli::XZ: return GateOp::xz(e.qubit);
    case Pauli::Z: return GateOp::z(e.qubit);
    }
    return GateOp::x(e.qubit);
}

inline void apply_error(StateVector& state, const ErrorEvent& e) { state.apply(error_gate(e)); }

struct NoiseSpec {
    enum class Mode { PerStep, FixedCount };

    Mode mode = Mode::FixedCount;
    double p = 0.0;          // per qubit and timestep, PerStep only
    std::uint64_t n = 0;     // FixedCount only
    std::uint64_t seed = 0;  // used by the overloads that take no generator

    static NoiseSpec per_step(double p, std::uint64_t seed = 0) { return {Mode::PerStep, p, 0, seed}; }
    static NoiseSpec fixed_count(std::uint64_t n, std::uint64_t seed = 0) {
        return {Mode::FixedCount, 0.0, n, seed};
    }
};

/// Fault sites of layers [begin, end) on every qubit.
struct SiteRange {
    int begin = 0;
    int end = 0;
    int qubits = 0;

    static SiteRange whole(const Circuit& c) { return {0, c.depth(), c.qubit_count}; }

    std::uint64_t size() const {
        return static_cast<std::uint64_t>(end - begin) * static_cast<std::uint64_t>(qubits);
    }

    ErrorEvent site(std::uint64_t index, Pauli p) const {
        const auto q = static_cast<std::uint64_t>(qubits);
        return {begin + static_cast<int>(index / q), static_cast<int>(index % q), p};
    }
};

/// Draws fault events over `sites`, sorted by timestep then qubit. Each
/// event's Pauli is uniform over {X, XZ, Z} unless `only` fixes it. Fixed
/// counts choose distinct sites (Floyd's algorithm), so two faults never
/// share a site and cancel.
inline std::vector<ErrorEvent> sample_errors(const NoiseSpec& spec, const SiteRange& sites, Rng& rng,
                                             std::optional<Pauli> only = std::nullopt) {
    const auto draw_pauli = [&] { return only ? *only : static_cast<Pauli>(rng.below(3)); };
    std::vector<ErrorEvent> out;
    if (spec.mode == NoiseSpec::Mode::PerStep) {
        if (!(spec.p >= 0.0 && spec.p <= 1.0)) {
            throw std::invalid_argument("error probability must lie in [0, 1]");
        }
        for (std::uint64_t i = 0; i < sites.size(); ++i) {
            if (rng.uniform() < spec.p) {
                out.push_back(sites.site(i, draw_pauli()));
            }
        }
        return out;
    }
    const std::uint64_t total = sites.size();
    if (spec.n > total) {
        throw std::invalid_argument("cannot place " + std::to_string(spec.n) + " errors on " +
                                    std::to_string(total) + " sites");
    }
    std::set<std::uint64_t> chosen;
    for (std::uint64_t j = total - spec.n; j < total; ++j) {
        const std::uint64_t t = rng.below(j + 1);
        chosen.insert(chosen.contains(t) ? j : t);
    }
    for (std::uint64_t i : chosen) {
        out.push_back(sites.site(i, Pauli::X));
    }
    for (ErrorEvent& e : out) {
        e.pauli = draw_pauli();
    }
    return out;
}

inline std::vector<ErrorEvent> sample_errors(const NoiseSpec& spec, const Circuit& c, Rng& rng,
                                             std::optional<Pauli> only = std::nullopt) {
    return sample_errors(spec, SiteRange::whole(c), rng, only);
}

/// Draws with a fresh generator seeded from `spec.seed`.
inline std::vector<ErrorEvent> sample_errors(const NoiseSpec& spec, const Circuit& c) {
    Rng rng(spec.seed);
    return sample_errors(spec, c, rng);
}

} // namespace qpf
