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

/// Dense reference state-vector engine.
///
/// Amplitudes live in a flat array indexed by the register value with
/// qubit 0 as the least significant bit. Single-qubit gates are strided
/// in-place updates of amplitude pairs. This engine favours clarity over
/// speed; the trajectory simulator in trajectory.hpp is the fast path and is
/// checked against this one.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qpf/gate.hpp"
#include "qpf/rng.hpp"

namespace qpf {

using cplx = std::complex<double>;

inline constexpr int kMaxQubits = 24;
inline constexpr double kDegenerateBranch = 1e-15;

class DegenerateBranchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MeasurementRecord {
    std::vector<int> bits;
    std::vector<double> branch_probabilities;

    void push(int bit, double p) {
        bits.push_back(bit);
        branch_probabilities.push_back(p);
    }
};

struct MeasureResult {
    int bit;
    double probability;
};

class StateVector {
public:
    explicit StateVector(int num_qubits, std::uint64_t basis_state = 0)
        : n_(num_qubits) {
        if (num_qubits < 1 || num_qubits > kMaxQubits) {
            throw std::out_of_range("qubit count must lie in 1.." + std::to_string(kMaxQubits));
        }
        amps_.assign(std::size_t{1} << num_qubits, cplx{0.0, 0.0});
        if (basis_state >= amps_.size()) {
            throw std::out_of_range("basis state out of range");
        }
        amps_[basis_state] = 1.0;
    }

    StateVector(int num_qubits, std::vector<cplx> amplitudes)
        : n_(num_qubits), amps_(std::move(amplitudes)) {
        if (num_qubits < 1 || num_qubits > kMaxQubits ||
            amps_.size() != (std::size_t{1} << num_qubits)) {
            throw std::invalid_argument("amplitude count must be 2^num_qubits");
        }
    }

    int num_qubits() const { return n_; }
    std::size_t size() const { return amps_.size(); }
    const std::vector<cplx>& amplitudes() const { return amps_; }
    std::vector<cplx>& amplitudes() { return amps_; }
    cplx operator[](std::size_t i) const { return amps_[i]; }

    double norm_squared() const {
        double s = 0.0;
        for (const cplx& a : amps_) {
            s += std::norm(a);
        }
        return s;
    }

    void normalize() {
        const double n = std::sqrt(norm_squared());
        for (cplx& a : amps_) {
            a /= n;
        }
    }

    /// Applies a unitary gate; Measure and Reset need `apply_gate` with a
    /// record instead.
    void apply(const GateOp& g) {
        check(g);
        const int q0 = g.qubits[0];
        const int q1 = g.qubits[1];
        switch (g.kind) {
        case GateKind::Hadamard: hadamard(q0); break;
        case GateKind::PauliX: pauli_x(q0); break;
        case GateKind::PauliZ: phase(q0, cplx{-1.0, 0.0}); break;
        case GateKind::PauliXZ:
            phase(q0, cplx{-1.0, 0.0});
            pauli_x(q0);
            break;
        case GateKind::Phase: phase(q0, std::polar(1.0, g.angle)); break;
        case GateKind::ControlledPhase: controlled_phase(q0, q1, std::polar(1.0, g.angle)); break;
        case GateKind::Cnot: cnot(q0, q1); break;
        case GateKind::Swap: swap(q0, q1); break;
        case GateKind::ClassicalRotation:
        case GateKind::Measure:
        case GateKind::Reset:
            throw std::logic_error("gate needs a measurement record");
        }
    }

    /// Measures `qubit`. A forced outcome collapses onto that branch; its
    /// probability must exceed kDegenerateBranch. The surviving branch is
    /// renormalised.
    MeasureResult measure(int qubit, std::optional<int> forced, Rng* rng) {
        check_qubit(qubit);
        const std::size_t mask = std::size_t{1} << qubit;
        double p1 = 0.0;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & mask) {
                p1 += std::norm(amps_[i]);
            }
        }
        const double total = norm_squared();
        p1 /= total;
        const double p0 = 1.0 - p1;
        int bit;
        if (forced) {
            bit = *forced;
        } else {
            if (rng == nullptr) {
                throw std::invalid_argument("unforced measurement needs a generator");
            }
            bit = rng->uniform() < p1 ? 1 : 0;
        }
        const double p = bit ? p1 : p0;
        if (p < kDegenerateBranch) {
            throw DegenerateBranchError("forced branch has probability " + std::to_string(p));
        }
        const double scale = 1.0 / std::sqrt(p * total);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (((i & mask) != 0) == (bit != 0)) {
                amps_[i] *= scale;
            } else {
                amps_[i] = 0.0;
            }
        }
        return {bit, p};
    }

    void reset(int qubit, int measured_bit) {
        if (measured_bit != 0) {
            pauli_x(qubit);
        }
    }

    /// Applies any gate including the classical ones, which read and write
    /// `record`. `forced_bits`, when given, fixes the outcome of Measure with
    /// record index t to forced_bits[t].
    void apply_gate(const GateOp& g, MeasurementRecord& record,
                    const std::vector<int>* forced_bits = nullptr, Rng* rng = nullptr) {
        switch (g.kind) {
        case GateKind::ClassicalRotation:
            phase(g.qubits[0], std::polar(1.0, feedback_angle(record.bits, g.record)));
            break;
        case GateKind::Measure: {
            std::optional<int> forced;
            if (forced_bits != nullptr) {
                forced = (*forced_bits)[static_cast<std::size_t>(g.record)];
            }
            const MeasureResult m = measure(g.qubits[0], forced, rng);
            record.push(m.bit, m.probability);
            break;
        }
        case GateKind::Reset:
            reset(g.qubits[0], record.bits.at(static_cast<std::size_t>(g.record)));
            break;
        default:
            apply(g);
        }
    }

    /// Splits the state on `master`: alpha holds the master=0 amplitudes and
    /// beta the master=1 amplitudes, both indexed by the remaining qubits in
    /// their original order. No renormalisation.
    std::pair<std::vector<cplx>, std::vector<cplx>> decompose_by_master(int master) const {
        check_qubit(master);
        const std::size_t half = amps_.size() / 2;
        std::vector<cplx> alpha(half), beta(half);
        const std::size_t low_mask = (std::size_t{1} << master) - 1;
        for (std::size_t m = 0; m < half; ++m) {
            const std::size_t idx = ((m & ~low_mask) << 1) | (m & low_mask);
            alpha[m] = amps_[idx];
            beta[m] = amps_[idx | (std::size_t{1} << master)];
        }
        return {std::move(alpha), std::move(beta)};
    }

    static StateVector recompose(int num_qubits, int master, const std::vector<cplx>& alpha,
                                 const std::vector<cplx>& beta) {
        std::vector<cplx> amps(std::size_t{1} << num_qubits);
        const std::size_t low_mask = (std::size_t{1} << master) - 1;
        for (std::size_t m = 0; m < alpha.size(); ++m) {
            const std::size_t idx = ((m & ~low_mask) << 1) | (m & low_mask);
            amps[idx] = alpha[m];
            amps[idx | (std::size_t{1} << master)] = beta[m];
        }
        return StateVector(num_qubits, std::move(amps));
    }

private:
    void check_qubit(int q) const {
        if (q < 0 || q >= n_) {
            throw std::out_of_range("qubit index " + std::to_string(q) + " out of range");
        }
    }

    void check(const GateOp& g) const {
        check_qubit(g.qubits[0]);
        if (g.arity() == 2) {
            check_qubit(g.qubits[1]);
            if (g.qubits[0] == g.qubits[1]) {
                throw std::invalid_argument("two-qubit gate on a repeated qubit");
            }
        }
        if (!std::isfinite(g.angle)) {
            throw std::invalid_argument("gate angle is not finite");
        }
    }

    void hadamard(int q) {
        const std::size_t stride = std::size_t{1} << q;
        const double s = std::numbers::sqrt2 / 2.0;
        for (std::size_t base = 0; base < amps_.size(); base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; ++i) {
                const cplx a = amps_[i];
                const cplx b = amps_[i + stride];
                amps_[i] = s * (a + b);
                amps_[i + stride] = s * (a - b);
            }
        }
    }

    void pauli_x(int q) {
        const std::size_t stride = std::size_t{1} << q;
        for (std::size_t base = 0; base < amps_.size(); base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; ++i) {
                std::swap(amps_[i], amps_[i + stride]);
            }
        }
    }

    void phase(int q, cplx f) {
        const std::size_t mask = std::size_t{1} << q;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & mask) {
                amps_[i] *= f;
            }
        }
    }

    void controlled_phase(int a, int b, cplx f) {
        const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & mask) == mask) {
                amps_[i] *= f;
            }
        }
    }

    void cnot(int c, int t) {
        const std::size_t cm = std::size_t{1} << c;
        const std::size_t tm = std::size_t{1} << t;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & cm) && !(i & tm)) {
                std::swap(amps_[i], amps_[i | tm]);
            }
        }
    }

    void swap(int a, int b) {
        const std::size_t am = std::size_t{1} << a;
        const std::size_t bm = std::size_t{1} << b;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & am) && !(i & bm)) {
                std::swap(amps_[i], amps_[(i & ~am) | bm]);
            }
        }
    }

    int n_;
    std::vector<cplx> amps_;
};

} // namespace qpf
