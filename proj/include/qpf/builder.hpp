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

/// Construction of the 2L+4 qubit period-finding circuits.
///
/// Wires (logical roles):
///   b0..bL   accumulator, L data bits plus one overflow bit; it is held in
///            the Fourier basis while constants are added to it
///   x0..xL-1 work register, starts at |1> and ends at |x^k mod N>
///   anc      comparison ancilla of the modular adder
///   aux      parity wire holding the XOR of the two adder controls
///   master   the single control qubit standing in for the 2L-bit register
///
/// For i = 2L-1 down to 0 the master is prepared in |+>, controls a modular
/// multiplication of the work register by x^(2^i) mod N, receives the
/// feedback rotation for the bits already read, and is measured and reset.
/// Bits therefore come out least significant first.
///
/// The controlled multiplication is the Fourier-basis construction: a
/// controlled multiply-accumulate into b, a controlled swap of x and b, and
/// the inverse multiply-accumulate by the modular inverse, which clears b.
/// Each modular addition of a constant follows the usual sequence of
/// Fourier adds, an overflow test copied into anc, a conditional add-back of
/// N and a second test that restores anc.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <string>
#include <vector>

#include "qpf/circuit.hpp"
#include "qpf/gate.hpp"
#include "qpf/lnn_router.hpp"
#include "qpf/numtheory.hpp"

namespace qpf {

struct WireMap {
    int L;

    int b(int k) const { return k; }
    int x(int q) const { return L + 1 + q; }
    int anc() const { return 2 * L + 1; }
    int aux() const { return 2 * L + 2; }
    int master() const { return 2 * L + 3; }
    int count() const { return 2 * L + 4; }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (int k = 0; k <= L; ++k) {
            out.push_back("b" + std::to_string(k));
        }
        for (int q = 0; q < L; ++q) {
            out.push_back("x" + std::to_string(q));
        }
        out.push_back("anc");
        out.push_back("aux");
        out.push_back("master");
        return out;
    }
};

namespace detail {

/// Phase 2 pi * value / 2^bits reduced exactly before conversion.
inline double dyadic_angle(std::int64_t value, int bits) {
    const std::int64_t mod = std::int64_t{1} << bits;
    std::int64_t v = value % mod;
    if (v < 0) {
        v += mod;
    }
    if (2 * v > mod) {
        v -= mod;
    }
    return 2.0 * std::numbers::pi * static_cast<double>(v) / static_cast<double>(mod);
}

/// Gate-level emitter of the arithmetic in terms of wires. `Sink` receives
/// gates on wires (it is the scheduler for the arbitrary-connectivity
/// layout and the router for the linear layout).
template <class Sink>
class ArithmeticEmitter {
public:
    ArithmeticEmitter(Sink& sink, const ModInstance& inst)
        : sink_(sink), inst_(inst), w_{inst.L}, width_(inst.L + 1), anc_(w_.anc()), par_(w_.aux()) {}

    const WireMap& wires() const { return w_; }

    /// Fourier transform of b, most significant wire first; leaves wire k in
    /// (|0> + e^{2 pi i b / 2^(k+1)} |1>)/sqrt2.
    ///
    /// Laid out as the usual 2n-3 step wavefront: CP(b_j, b_k) belongs to
    /// step 2n-3-j-k, and each step starts after the previous one. Ladders
    /// emitted later fill the idle slots around it.
    void qft() {
        if constexpr (kLinear) {
            for (const GateOp& g : qft_network(b_order())) {
                sink_.add(g);
            }
            return;
        }
        const int n = width_;
        int prev = -1;
        sink_.add(GateOp::h(w_.b(n - 1)));
        for (int t = 0; t <= 2 * n - 4; ++t) {
            for (int k = 1; k < n - 1; ++k) {
                if (2 * n - 3 - 2 * k == t) {
                    sink_.add(GateOp::h(w_.b(k)));
                }
            }
            int cur = prev;
            for (int k = n - 1; k >= 1; --k) {
                const int j = 2 * n - 3 - t - k;
                if (j >= 0 && j < k) {
                    cur = std::max(cur, sink_.add(GateOp::cphase(w_.b(j), w_.b(k), fourier_angle(k - j)),
                                                  prev + 1));
                }
            }
            prev = cur;
        }
        sink_.add(GateOp::h(w_.b(0)));
    }

    /// Inverse of qft(); CP(b_j, b_k) belongs to step j+k-1.
    void iqft() {
        if constexpr (kLinear) {
            std::vector<int> order = b_order();
            std::reverse(order.begin(), order.end());
            std::vector<GateOp> net = qft_network(order);
            for (auto it = net.rbegin(); it != net.rend(); ++it) {
                GateOp g = *it;
                g.angle = -g.angle;
                sink_.add(g);
            }
            return;
        }
        const int n = width_;
        int prev = -1;
        sink_.add(GateOp::h(w_.b(0)));
        for (int t = 0; t <= 2 * n - 4; ++t) {
            int cur = prev;
            for (int k = 1; k < n; ++k) {
                const int j = t + 1 - k;
                if (j >= 0 && j < k) {
                    cur = std::max(cur, sink_.add(GateOp::cphase(w_.b(j), w_.b(k), -fourier_angle(k - j)),
                                                  prev + 1));
                }
            }
            prev = cur;
            for (int k = 1; k < n; ++k) {
                if (2 * k - 2 == t) {
                    sink_.add(GateOp::h(w_.b(k)));
                }
            }
        }
    }

    /// b += value (mod 2^(L+1)) in the Fourier basis, uncontrolled.
    void add(std::int64_t value) {
        for (int k = width_ - 1; k >= 0; --k) {
            sink_.add(GateOp::phase(w_.b(k), dyadic_angle(value, k + 1)));
        }
    }

    /// b += value controlled by one wire.
    void add_controlled(std::int64_t value, int control) {
        for (int k = width_ - 1; k >= 0; --k) {
            sink_.add(GateOp::cphase(control, w_.b(k), dyadic_angle(value, k + 1)));
        }
    }

    /// b += value controlled by c1 AND c2, given aux == c1 XOR c2, as three
    /// independent phase ladders: theta/2 from c1, theta/2 from c2 and
    /// -theta/2 from aux. Ladders that lead into an inverse transform run
    /// from b0 upwards (that transform consumes b0 first); the others run
    /// from the top wire down.
    void add_doubly_controlled(std::int64_t value, int c1, int c2, bool ascending) {
        add_controlled_half(value, c1, +1, ascending);
        add_controlled_half(value, c2, +1, ascending);
        add_controlled_half(value, w_.aux(), -1, ascending);
    }

    /// b = b + a (mod N) controlled by c1 AND c2, for b < N on entry and b in
    /// the Fourier basis throughout. anc is |0> on entry and exit.
    void modular_add(std::int64_t a, int c1, int c2) {
        const auto N = static_cast<std::int64_t>(inst_.N);
        const int top = w_.b(width_ - 1);
        add_doubly_controlled(a, c1, c2, true);
        add(-N);
        iqft();
        sink_.add(GateOp::cnot(top, w_.anc()));
        qft();
        add_controlled(N, w_.anc());
        add_doubly_controlled(-a, c1, c2, false);
        iqft();
        sink_.add(GateOp::x(top));
        sink_.add(GateOp::cnot(top, w_.anc()));
        sink_.add(GateOp::x(top));
        qft();
        add_doubly_controlled(a, c1, c2, false);
    }

    /// Exact inverse of modular_add.
    void modular_subtract(std::int64_t a, int c1, int c2) {
        const auto N = static_cast<std::int64_t>(inst_.N);
        const int top = w_.b(width_ - 1);
        add_doubly_controlled(-a, c1, c2, true);
        iqft();
        sink_.add(GateOp::x(top));
        sink_.add(GateOp::cnot(top, w_.anc()));
        sink_.add(GateOp::x(top));
        qft();
        add_doubly_controlled(a, c1, c2, false);
        add_controlled(-N, w_.anc());
        iqft();
        sink_.add(GateOp::cnot(top, w_.anc()));
        qft();
        add(N);
        add_doubly_controlled(-a, c1, c2, false);
    }

    /// b += a * x (mod N) controlled by `control`; b computational on entry
    /// and exit.
    void multiply_accumulate(std::uint64_t a, int control) {
        qft();
        sink_.add(GateOp::cnot(control, w_.aux()));
        for (int q = 0; q < inst_.L; ++q) {
            const std::uint64_t term = a % inst_.N * ((std::uint64_t{1} << q) % inst_.N) % inst_.N;
            sink_.add(GateOp::cnot(w_.x(q), w_.aux()));
            modular_add(static_cast<std::int64_t>(term), control, w_.x(q));
            sink_.add(GateOp::cnot(w_.x(q), w_.aux()));
        }
        sink_.add(GateOp::cnot(control, w_.aux()));
        iqft();
    }

    void multiply_accumulate_inverse(std::uint64_t a, int control) {
        qft();
        sink_.add(GateOp::cnot(control, w_.aux()));
        for (int q = inst_.L - 1; q >= 0; --q) {
            const std::uint64_t term = a % inst_.N * ((std::uint64_t{1} << q) % inst_.N) % inst_.N;
            sink_.add(GateOp::cnot(w_.x(q), w_.aux()));
            modular_subtract(static_cast<std::int64_t>(term), control, w_.x(q));
            sink_.add(GateOp::cnot(w_.x(q), w_.aux()));
        }
        sink_.add(GateOp::cnot(control, w_.aux()));
        iqft();
    }

    /// Toffoli(c1, c2 -> t) as H . CCZ . H with the three-ladder CCZ.
    void toffoli(int c1, int c2, int t) {
        sink_.add(GateOp::h(t));
        sink_.add(GateOp::cphase(c1, t, std::numbers::pi / 2));
        sink_.add(GateOp::cphase(c2, t, std::numbers::pi / 2));
        sink_.add(GateOp::cnot(c1, c2));
        sink_.add(GateOp::cphase(c2, t, -std::numbers::pi / 2));
        sink_.add(GateOp::cnot(c1, c2));
        sink_.add(GateOp::h(t));
    }

    /// Swaps x and the low L wires of b when `control` is set.
    void controlled_swap(int control) {
        for (int q = 0; q < inst_.L; ++q) {
            sink_.add(GateOp::cnot(w_.b(q), w_.x(q)));
            toffoli(control, w_.x(q), w_.b(q));
            sink_.add(GateOp::cnot(w_.b(q), w_.x(q)));
        }
    }

    /// x = a * x (mod N) controlled by `control`. The three parts are
    /// recorded as regions `<label>.mac`, `<label>.swap` and `<label>.unmac`.
    void controlled_multiply(std::uint64_t a, int control, const std::string& label) {
        const std::uint64_t inv = mod_inverse(a, inst_.N);
        if constexpr (kLinear) {
            linear_controlled_multiply(a, inv, control, label);
        } else {
            sink_.begin_region(label + ".mac");
            multiply_accumulate(a, control);
            sink_.end_region();
            sink_.begin_region(label + ".swap");
            controlled_swap(control);
            sink_.end_region();
            sink_.begin_region(label + ".unmac");
            multiply_accumulate_inverse(inv, control);
            sink_.end_region();
        }
    }

    /// Line order at the start of every linear multiply-accumulate, left to
    /// right: the work register from x_{L-1} down to x_0, the control, the
    /// two spare wires and the accumulator with its top wire on the left.
    static std::vector<int> linear_layout(const WireMap& w) {
        std::vector<int> out;
        for (int q = w.L - 1; q >= 0; --q) {
            out.push_back(w.x(q));
        }
        out.push_back(w.master());
        out.push_back(w.aux());
        out.push_back(w.anc());
        for (int k = w.L; k >= 0; --k) {
            out.push_back(w.b(k));
        }
        return out;
    }

    /// Linear multiply-accumulate. b starts and ends in the computational
    /// basis with its top wire leftmost.
    ///
    /// Every phase ladder is a crossing: the control walks over the
    /// accumulator with fused phase-and-swap gates. The controls (the
    /// master, the work wire of the current addition and the parity wire
    /// holding their XOR) cross right to left in the middle of an addition
    /// and left to right across the boundary between two additions, where
    /// the closing ladders of one addition and the opening ladders of the
    /// next share a single crossing. The second parity needed there lives on
    /// the comparison wire, and the two spare wires trade roles afterwards.
    /// The comparison wire reaches the top accumulator wire by trailing it
    /// through each inverse transform.
    void linear_multiply_accumulate(std::uint64_t a, int m) {
        const auto N = static_cast<std::int64_t>(inst_.N);
        const int L = inst_.L;
        const auto term = [&](int q) {
            return static_cast<std::int64_t>(a % inst_.N * ((std::uint64_t{1} << q) % inst_.N) %
                                             inst_.N);
        };
        qft();
        for (int q = 0;; ++q) {
            boundary_window(q, m, q > 0 ? term(q - 1) : 0, q < L ? term(q) : 0);
            if (q == L) {
                break;
            }
            add(-N);
            iqft_trailing(anc_);
            compare(false);
            qft();
            // Middle of addition q: the controls head back left while the
            // comparison wire adds N on its way right.
            const std::int64_t t = term(q);
            for (const Crossing& c : nearest_first({{m, -t}, {w_.x(q), -t}, {par_, t}})) {
                crossing_ladder(c.wire, [&, v = c.value](int k) { return dyadic_angle(v, k + 2); });
            }
            crossing_ladder(anc_, [&](int k) { return dyadic_angle(N, k + 1); });
            iqft_trailing(anc_);
            compare(true);
            qft();
        }
        iqft();
    }

    /// Line order for the controlled swap: b_q and x_q side by side with the
    /// control just right of x_0; the remaining wires keep their order.
    std::vector<int> swap_layout(int control) const {
        std::vector<int> out{w_.b(w_.L)};
        for (int q = w_.L - 1; q >= 0; --q) {
            out.push_back(w_.b(q));
            out.push_back(w_.x(q));
        }
        out.push_back(control);
        for (int p = 0; p < w_.count(); ++p) {
            const int wire = sink_.line().wire_at(p);
            if (std::find(out.begin(), out.end(), wire) == out.end()) {
                out.push_back(wire);
            }
        }
        return out;
    }

    /// Fredkin as CNOT . Toffoli . CNOT on neighbours, with the control
    /// walking down the interleaved registers. The doubly controlled phase
    /// is split into phases between neighbours.
    void linear_controlled_swap(int control) {
        const std::vector<int> home = sink_.line().placement();
        sink_.rearrange(swap_layout(control));
        const double quarter = std::numbers::pi / 2;
        for (int q = 0; q < inst_.L; ++q) {
            const int x = w_.x(q);
            const int b = w_.b(q);
            sink_.add(GateOp::cnot(b, x));
            sink_.add(GateOp::h(b));
            sink_.add(GateOp::cphase(x, b, quarter));
            sink_.add(GateOp::cnot(control, x));
            sink_.add(GateOp::cphase(x, b, -quarter));
            sink_.add(GateOp::cnot(control, x));
            sink_.add(GateOp::swap(control, x));
            sink_.add(GateOp::cphase(control, b, quarter));
            sink_.add(GateOp::swap(control, b));
            sink_.add(GateOp::h(b));
            sink_.add(GateOp::cnot(b, x));
        }
        sink_.rearrange(home);
    }

    /// Spare wire roles; they trade places inside the linear construction.
    void set_roles(int anc, int par) {
        anc_ = anc;
        par_ = par;
    }

private:
    static constexpr bool kLinear = requires(Sink& s) { s.position(0); };

    /// b wires ordered by position.
    std::vector<int> b_order() const {
        std::vector<int> out;
        for (int k = 0; k < width_; ++k) {
            out.push_back(w_.b(k));
        }
        if constexpr (kLinear) {
            std::sort(out.begin(), out.end(),
                      [&](int l, int r) { return sink_.position(l) < sink_.position(r); });
        }
        return out;
    }

    int b_index(int wire) const { return wire - w_.b(0); }

    /// Nearest-neighbour Fourier transform of b laid out as `order`: wire
    /// b_k is rotated and then carried past every lower wire with fused
    /// controlled-phase and swap gates. The order is reversed at the end.
    std::vector<GateOp> qft_network(std::vector<int> order) const {
        std::vector<GateOp> out;
        const auto at = [&](int wire) {
            return static_cast<int>(std::find(order.begin(), order.end(), wire) - order.begin());
        };
        const int dir = at(w_.b(0)) > at(w_.b(width_ - 1)) ? 1 : -1;
        for (int k = width_ - 1; k >= 0; --k) {
            out.push_back(GateOp::h(w_.b(k)));
            int i = at(w_.b(k));
            while (i + dir >= 0 && i + dir < width_ &&
                   b_index(order[static_cast<std::size_t>(i + dir)]) < k) {
                const int other = order[static_cast<std::size_t>(i + dir)];
                out.push_back(GateOp::cphase(other, w_.b(k), fourier_angle(k - b_index(other))));
                out.push_back(GateOp::swap(other, w_.b(k)));
                std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i + dir)]);
                i += dir;
            }
        }
        return out;
    }

    struct Crossing {
        int wire;
        std::int64_t value;
        bool passive = false;
    };

    /// Orders crossings so the wire closest to the accumulator goes first.
    std::vector<Crossing> nearest_first(std::vector<Crossing> cs) const {
        const std::vector<int> order = b_order();
        const int lo = sink_.position(order.front());
        const int hi = sink_.position(order.back());
        const auto gap = [&](int wire) {
            const int p = sink_.position(wire);
            return p < lo ? lo - p : p - hi;
        };
        std::stable_sort(cs.begin(), cs.end(),
                         [&](const Crossing& l, const Crossing& r) { return gap(l.wire) < gap(r.wire); });
        return cs;
    }

    /// Left-to-right crossing between additions q-1 and q: the closing
    /// ladders of addition q-1 (value `closing`) and the opening ladders of
    /// addition q (value `opening`).
    void boundary_window(int q, int m, std::int64_t closing, std::int64_t opening) {
        const int L = inst_.L;
        std::vector<Crossing> cs{{m, closing + opening}};
        if (q > 0) {
            cs.push_back({w_.x(q - 1), closing});
            cs.push_back({par_, -closing});
        } else {
            cs.push_back({par_, 0, true});
        }
        if (q < L) {
            sink_.add(GateOp::cnot(m, anc_));
            sink_.add(GateOp::cnot(w_.x(q), anc_));
            cs.push_back({w_.x(q), opening});
            cs.push_back({anc_, -opening});
        } else {
            cs.push_back({anc_, 0, true});
        }
        for (const Crossing& c : nearest_first(cs)) {
            if (c.passive) {
                crossing_ladder(c.wire, std::nullopt);
            } else {
                crossing_ladder(c.wire, [&, v = c.value](int k) { return dyadic_angle(v, k + 2); });
            }
        }
        if (q > 0) {
            sink_.add(GateOp::cnot(m, par_));
            sink_.add(GateOp::cnot(w_.x(q - 1), par_));
        }
        if (q < L) {
            std::swap(anc_, par_);
            sink_.bring_adjacent(anc_, w_.b(width_ - 1));
        }
    }

    /// Copies the overflow bit into the comparison wire (inverted when
    /// `negate` is set) and moves the wire to the left of the top bit.
    void compare(bool negate) {
        const int top = w_.b(width_ - 1);
        if (negate) {
            sink_.add(GateOp::x(top));
        }
        sink_.add(GateOp::cnot(top, anc_));
        if (negate) {
            sink_.add(GateOp::x(top));
        }
        sink_.add(GateOp::swap(top, anc_));
    }

    /// Inverse transform in which `trail`, starting just right of the top
    /// wire, follows that wire to the left end of the register.
    void iqft_trailing(int trail) {
        const int top = w_.b(width_ - 1);
        std::vector<int> order = b_order();
        std::reverse(order.begin(), order.end());
        const std::vector<GateOp> net = qft_network(order);
        int pending = -1;
        for (auto it = net.rbegin(); it != net.rend(); ++it) {
            const GateOp g = inverse_gate(*it);
            sink_.add(g);
            // The wire the top just passed is free once their phase is in.
            if (g.kind == GateKind::ControlledPhase && pending >= 0) {
                sink_.add(GateOp::swap(trail, pending));
                pending = -1;
            }
            if (g.kind == GateKind::Swap && (g.qubits[0] == top || g.qubits[1] == top)) {
                pending = g.qubits[0] == top ? g.qubits[1] : g.qubits[0];
            }
        }
    }

    /// The inverse multiply-accumulate is the time reverse of a forward one
    /// by the inverse constant, recorded from the line as it was before the
    /// forward pass. Undoing it returns every wire to where it started.
    void linear_controlled_multiply(std::uint64_t a, std::uint64_t inv, int control,
                                    const std::string& label) {
        const LineTracker start = sink_.line();
        const int anc0 = anc_;
        const int par0 = par_;
        sink_.begin_region(label + ".mac");
        linear_multiply_accumulate(a, control);
        sink_.end_region();
        sink_.begin_region(label + ".swap");
        linear_controlled_swap(control);
        sink_.end_region();
        sink_.begin_region(label + ".unmac");
        LineRecorder rec(start);
        ArithmeticEmitter<LineRecorder> forward(rec, inst_);
        forward.set_roles(anc0, par0);
        forward.linear_multiply_accumulate(inv, control);
        if (rec.line().placement() != sink_.line().placement()) {
            throw std::logic_error("inverse multiply-accumulate starts from a different line");
        }
        for (auto it = rec.gates().rbegin(); it != rec.gates().rend(); ++it) {
            sink_.add_physical(inverse_gate(*it));
        }
        sink_.end_region();
        set_roles(anc0, par0);
    }

    static GateOp inverse_gate(GateOp g) {
        if (g.kind == GateKind::Phase || g.kind == GateKind::ControlledPhase) {
            g.angle = -g.angle;
        }
        return g;
    }

    /// Phase ladder from `control` onto every b wire in which the control
    /// walks across the register, one fused phase-and-swap per wire. Without
    /// an angle the control only changes sides.
    template <class Angle>
    void crossing_ladder(int control, Angle angle) {
        std::vector<int> order = b_order();
        if (sink_.position(control) > sink_.position(order.front())) {
            std::reverse(order.begin(), order.end());
        }
        for (int wire : order) {
            if constexpr (!std::is_same_v<Angle, std::nullopt_t>) {
                sink_.add(GateOp::cphase(control, wire, angle(b_index(wire))));
            }
            sink_.add(GateOp::swap(control, wire));
        }
    }

    void add_controlled_half(std::int64_t value, int control, int sign, bool ascending) {
        for (int step = 0; step < width_; ++step) {
            const int k = ascending ? step : width_ - 1 - step;
            sink_.add(GateOp::cphase(control, w_.b(k), dyadic_angle(value * sign, k + 2)));
        }
    }

    static double fourier_angle(int distance) {
        return std::numbers::pi / std::ldexp(1.0, distance);
    }

    Sink& sink_;
    ModInstance inst_;
    WireMap w_;
    int width_;
    int anc_;
    int par_;
};

/// Emits the whole period-finding program on wires.
template <class Sink>
void emit_period_finding(Sink& sink, const ModInstance& inst) {
    ArithmeticEmitter<Sink> e(sink, inst);
    const WireMap& w = e.wires();
    const int m = w.master();
    const int bits = 2 * inst.L;
    sink.add(GateOp::x(w.x(0)));
    for (int t = 0; t < bits; ++t) {
        const int i = bits - 1 - t;
        const std::uint64_t a = mod_exp(inst.x, std::uint64_t{1} << i, inst.N);
        sink.begin_region("stage" + std::to_string(t));
        sink.add(GateOp::h(m));
        e.controlled_multiply(a, m, "stage" + std::to_string(t));
        sink.add(GateOp::classical_rotation(m, t));
        sink.add(GateOp::h(m));
        sink.add(GateOp::measure(m, t));
        sink.add(GateOp::reset(m, t));
        sink.end_region();
    }
}

} // namespace detail

inline std::vector<int> lnn_placement(const WireMap& w) {
    return detail::ArithmeticEmitter<LnnRouter>::linear_layout(w);
}

/// The accumulator wires are never moved by fallback routing.
inline std::vector<bool> lnn_fixed(const WireMap& w) {
    std::vector<bool> f(static_cast<std::size_t>(w.count()), false);
    for (int k = 0; k <= w.L; ++k) {
        f[static_cast<std::size_t>(w.b(k))] = true;
    }
    return f;
}

/// Builds the scheduled circuit for `layout`.
inline Circuit build_qpf(const ModInstance& inst, Layout layout) {
    const WireMap w{inst.L};
    Circuit c;
    c.layout = layout;
    c.instance = inst;
    c.measurement_count = 2 * inst.L;
    if (layout == Layout::NonLnn) {
        Scheduler s(w.count());
        detail::emit_period_finding(s, inst);
        s.finish(c);
        c.master = w.master();
        for (int q = 0; q < w.count(); ++q) {
            c.initial_wires.push_back(q);
        }
        c.wire_names = w.names();
    } else {
        LnnRouter router(lnn_placement(w), lnn_fixed(w));
        detail::emit_period_finding(router, inst);
        router.finish(c);
        const auto names = w.names();
        const std::vector<int>& start = router.initial_placement();
        c.initial_wires = start;
        for (int wire : start) {
            c.wire_names.push_back(names[static_cast<std::size_t>(wire)]);
        }
        // Each stage returns the line to its starting order, so the master
        // is measured where it started.
        c.master = static_cast<int>(std::find(start.begin(), start.end(), w.master()) - start.begin());
    }
    return c;
}

} // namespace qpf
