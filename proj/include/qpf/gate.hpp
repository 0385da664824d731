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

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qpf {

enum class GateKind {
    Hadamard,
    PauliX,
    PauliZ,
    PauliXZ,            // alpha|0> + beta|1>  ->  alpha|1> - beta|0>
    Phase,              // diag(1, e^{i angle})
    ControlledPhase,    // diag(1, 1, 1, e^{i angle})
    Cnot,               // qubits = {control, target}
    Swap,
    ClassicalRotation,  // Phase with angle derived from earlier recorded bits
    Measure,            // records bit `record`
    Reset,              // returns a just-measured qubit to |0>
};

struct GateOp {
    GateKind kind = GateKind::Hadamard;
    std::array<int, 2> qubits{-1, -1};
    double angle = 0.0;
    // Bit index written by Measure / consumed by ClassicalRotation and Reset.
    int record = -1;

    int arity() const { return qubits[1] < 0 ? 1 : 2; }

    static GateOp h(int q) { return {GateKind::Hadamard, {q, -1}}; }
    static GateOp x(int q) { return {GateKind::PauliX, {q, -1}}; }
    static GateOp z(int q) { return {GateKind::PauliZ, {q, -1}}; }
    static GateOp xz(int q) { return {GateKind::PauliXZ, {q, -1}}; }
    static GateOp phase(int q, double a) { return {GateKind::Phase, {q, -1}, a}; }
    static GateOp cphase(int a, int b, double angle) {
        return {GateKind::ControlledPhase, {a, b}, angle};
    }
    static GateOp cnot(int c, int t) { return {GateKind::Cnot, {c, t}}; }
    static GateOp swap(int a, int b) { return {GateKind::Swap, {a, b}}; }
    static GateOp classical_rotation(int q, int bit) {
        return {GateKind::ClassicalRotation, {q, -1}, 0.0, bit};
    }
    static GateOp measure(int q, int bit) { return {GateKind::Measure, {q, -1}, 0.0, bit}; }
    static GateOp reset(int q, int bit) { return {GateKind::Reset, {q, -1}, 0.0, bit}; }
};

/// Whether the gate's action on `qubit` is diagonal in the computational
/// basis (it commutes with every other gate diagonal on that qubit).
inline bool diagonal_on(const GateOp& g, int qubit) {
    switch (g.kind) {
    case GateKind::PauliZ:
    case GateKind::Phase:
    case GateKind::ControlledPhase:
    case GateKind::ClassicalRotation:
        return true;
    case GateKind::Cnot:
        return qubit == g.qubits[0];
    default:
        return false;
    }
}

inline bool two_qubit(const GateOp& g) { return g.arity() == 2; }

/// Rotation applied before the final Hadamard of measurement step t of the
/// semiclassical inverse Fourier transform. Bits are read least significant
/// first, so step t undoes the phase contributed by bits 0..t-1:
/// theta_t = -2 pi sum_{u<t} b_u / 2^(t-u+1).
inline double feedback_angle(std::span<const int> bits, int t) {
    double theta = 0.0;
    for (int u = 0; u < t; ++u) {
        if (bits[static_cast<std::size_t>(u)] != 0) {
            theta -= 2.0 * std::numbers::pi / std::ldexp(1.0, t - u + 1);
        }
    }
    return theta;
}

inline std::string_view gate_name(GateKind k) {
    switch (k) {
    case GateKind::Hadamard: return "h";
    case GateKind::PauliX: return "x";
    case GateKind::PauliZ: return "z";
    case GateKind::PauliXZ: return "xz";
    case GateKind::Phase: return "p";
    case GateKind::ControlledPhase: return "cp";
    case GateKind::Cnot: return "cnot";
    case GateKind::Swap: return "swap";
    case GateKind::ClassicalRotation: return "crot";
    case GateKind::Measure: return "measure";
    case GateKind::Reset: return "reset";
    }
    return "?";
}

} // namespace qpf
