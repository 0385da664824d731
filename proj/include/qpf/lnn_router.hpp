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

/// Placement of logical wires on a line of physical qubits.
///
/// Gates arrive on wires. The tracker keeps the wire to position map and
/// turns each gate into gates on positions. A SWAP exchanges the states of
/// two positions, so the two wires trade places. A two-qubit gate on wires
/// that are not neighbours is preceded by swaps that walk the movable
/// operand next to the other one.

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qpf/circuit.hpp"
#include "qpf/gate.hpp"

namespace qpf {

class LineTracker {
public:
    /// `placement[p]` is the wire at position p. Wires with `fixed[w]` set
    /// are never moved to make room for a gate.
    LineTracker(std::vector<int> placement, std::vector<bool> fixed)
        : wire_at_(std::move(placement)), pos_(wire_at_.size(), -1), fixed_(std::move(fixed)) {
        for (std::size_t p = 0; p < wire_at_.size(); ++p) {
            pos_.at(static_cast<std::size_t>(wire_at_[p])) = static_cast<int>(p);
        }
    }

    int position(int wire) const { return pos_[static_cast<std::size_t>(wire)]; }
    int wire_at(int p) const { return wire_at_[static_cast<std::size_t>(p)]; }
    int size() const { return static_cast<int>(wire_at_.size()); }
    const std::vector<int>& placement() const { return wire_at_; }

    /// Translates `g` to positions, calling `out` for every physical gate.
    template <class Out>
    void place(const GateOp& g, Out&& out) {
        if (g.arity() == 2 && std::abs(position(g.qubits[0]) - position(g.qubits[1])) != 1) {
            bring_adjacent(g.qubits[0], g.qubits[1], out);
        }
        GateOp p = g;
        p.qubits[0] = position(g.qubits[0]);
        if (g.arity() == 2) {
            p.qubits[1] = position(g.qubits[1]);
        }
        out(p);
        if (p.kind == GateKind::Swap) {
            exchange(p.qubits[0], p.qubits[1]);
        }
    }

    /// Follows a gate already expressed on positions.
    void apply_physical(const GateOp& p) {
        if (p.arity() == 2 && std::abs(p.qubits[0] - p.qubits[1]) != 1) {
            throw std::logic_error("gate on non-adjacent positions");
        }
        if (p.kind == GateKind::Swap) {
            exchange(p.qubits[0], p.qubits[1]);
        }
    }

    /// Walks the movable one of `u`, `v` until the two are neighbours.
    template <class Out>
    void bring_adjacent(int u, int v, Out&& out) {
        const int mover = fixed_[static_cast<std::size_t>(u)] ? v : u;
        const int target = mover == u ? v : u;
        if (fixed_[static_cast<std::size_t>(mover)]) {
            throw std::logic_error("cannot route a gate between fixed wires " +
                                   std::to_string(u) + " and " + std::to_string(v));
        }
        while (std::abs(position(mover) - position(target)) != 1) {
            const int p = position(mover);
            const int q = p + (position(target) > p ? 1 : -1);
            out(GateOp::swap(p, q));
            exchange(p, q);
        }
    }

    /// Moves every wire to its index in `order` with an odd-even
    /// transposition network.
    template <class Out>
    void rearrange(const std::vector<int>& order, Out&& out) {
        if (order.size() != wire_at_.size()) {
            throw std::invalid_argument("rearrange needs one entry per position");
        }
        std::vector<int> rank(wire_at_.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            rank.at(static_cast<std::size_t>(order[i])) = static_cast<int>(i);
        }
        const auto r = [&](int p) { return rank[static_cast<std::size_t>(wire_at(p))]; };
        const auto sorted = [&] {
            for (int p = 0; p + 1 < size(); ++p) {
                if (r(p) > r(p + 1)) {
                    return false;
                }
            }
            return true;
        };
        for (int pass = 0; !sorted(); ++pass) {
            for (int p = pass % 2; p + 1 < size(); p += 2) {
                if (r(p) > r(p + 1)) {
                    out(GateOp::swap(p, p + 1));
                    exchange(p, p + 1);
                }
            }
        }
    }

private:
    void exchange(int a, int b) {
        std::swap(wire_at_[static_cast<std::size_t>(a)], wire_at_[static_cast<std::size_t>(b)]);
        pos_[static_cast<std::size_t>(wire_at_[static_cast<std::size_t>(a)])] = a;
        pos_[static_cast<std::size_t>(wire_at_[static_cast<std::size_t>(b)])] = b;
    }

    std::vector<int> wire_at_;
    std::vector<int> pos_;
    std::vector<bool> fixed_;
};

/// Gate sink for the linear layout: a line tracker feeding a scheduler.
class LnnRouter {
public:
    LnnRouter(std::vector<int> placement, std::vector<bool> fixed)
        : line_(placement, std::move(fixed)),
          sched_(static_cast<int>(placement.size())),
          initial_(std::move(placement)) {}

    int position(int wire) const { return line_.position(wire); }
    const LineTracker& line() const { return line_; }
    const std::vector<int>& initial_placement() const { return initial_; }

    int add(const GateOp& g, int not_before = 0) {
        int layer = -1;
        line_.place(g, [&](const GateOp& p) { layer = sched_.add(p, not_before); });
        return layer;
    }

    void add_physical(const GateOp& p) {
        line_.apply_physical(p);
        sched_.add(p);
    }

    void bring_adjacent(int u, int v) {
        line_.bring_adjacent(u, v, [&](const GateOp& p) { sched_.add(p); });
    }

    void rearrange(const std::vector<int>& order) {
        line_.rearrange(order, [&](const GateOp& p) { sched_.add(p); });
    }

    void begin_region(const std::string& name) { sched_.begin_region(name); }
    void end_region() { sched_.end_region(); }

    void finish(Circuit& out) { sched_.finish(out); }

private:
    LineTracker line_;
    Scheduler sched_;
    std::vector<int> initial_;
};

/// Sink that follows the line like LnnRouter but records the physical gates
/// instead of scheduling them.
class LineRecorder {
public:
    explicit LineRecorder(LineTracker line) : line_(std::move(line)) {}

    int position(int wire) const { return line_.position(wire); }
    const LineTracker& line() const { return line_; }
    const std::vector<GateOp>& gates() const { return gates_; }

    int add(const GateOp& g, int = 0) {
        line_.place(g, [&](const GateOp& p) { gates_.push_back(p); });
        return 0;
    }

    void bring_adjacent(int u, int v) {
        line_.bring_adjacent(u, v, [&](const GateOp& p) { gates_.push_back(p); });
    }

    void rearrange(const std::vector<int>& order) {
        line_.rearrange(order, [&](const GateOp& p) { gates_.push_back(p); });
    }

    void begin_region(const std::string&) {}
    void end_region() {}

private:
    LineTracker line_;
    std::vector<GateOp> gates_;
};

} // namespace qpf
