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

/// Scheduled circuits.
///
/// A circuit is a sequence of timesteps (layers). Each layer holds blocks on
/// disjoint qubits; a block is the fused sequence of gates that one physical
/// operation performs in that timestep. Every two-qubit block costs one
/// timestep. Single-qubit gates never add a timestep: they ride along with
/// an adjacent two-qubit block on the same qubit, and consecutive gates on
/// the same pair fuse into one two-qubit block.
///
/// The scheduler places gates as early as possible. A gate may slide in
/// front of earlier gates on a shared qubit when both act diagonally on it,
/// which lets diagonal phase ladders fill the idle slots of a Fourier
/// transform.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpf/gate.hpp"
#include "qpf/numtheory.hpp"

namespace qpf {

enum class Layout { NonLnn, Lnn };

inline std::string layout_name(Layout l) { return l == Layout::Lnn ? "lnn" : "non_lnn"; }

inline Layout parse_layout(const std::string& s) {
    if (s == "lnn") {
        return Layout::Lnn;
    }
    if (s == "non_lnn" || s == "non-lnn" || s == "nonlnn") {
        return Layout::NonLnn;
    }
    throw std::invalid_argument("unknown layout '" + s + "' (expected lnn or non_lnn)");
}

struct Block {
    std::array<int, 2> qubits{-1, -1};
    std::vector<GateOp> gates;

    bool two_qubit() const { return qubits[1] >= 0; }
};

struct Layer {
    std::vector<Block> blocks;
};

/// A contiguous range of layers [begin, end) covering a named part of the
/// construction.
struct Region {
    std::string name;
    int begin = 0;
    int end = 0;

    int length() const { return end - begin; }
};

struct Circuit {
    int qubit_count = 0;
    Layout layout = Layout::NonLnn;
    ModInstance instance;
    int measurement_count = 0;
    int master = -1;
    std::vector<Layer> layers;
    std::vector<Region> regions;
    /// Wire initially on each position. Wires keep their identity when a
    /// SWAP moves them; in the arbitrary-connectivity layout no wire moves.
    std::vector<int> initial_wires;
    /// Role of the wire initially on each position, e.g. "b3" or "master".
    std::vector<std::string> wire_names;

    int depth() const { return static_cast<int>(layers.size()); }

    /// Depth with every measurement counted as a timestep of its own.
    int depth_with_measurements() const { return depth() + measurement_count; }

    std::uint64_t error_locations() const {
        return static_cast<std::uint64_t>(depth()) * static_cast<std::uint64_t>(qubit_count);
    }

    std::uint64_t gate_count() const {
        std::uint64_t n = 0;
        for (const Layer& l : layers) {
            for (const Block& b : l.blocks) {
                n += b.gates.size();
            }
        }
        return n;
    }

    const Region& region(const std::string& name) const {
        for (const Region& r : regions) {
            if (r.name == name) {
                return r;
            }
        }
        throw std::out_of_range("no region named " + name);
    }
};

/// Closed-form depth K(L) of the two constructions.
struct DepthModel {
    Layout layout;
    std::array<std::int64_t, 4> coefficients;  // L^3, L^2, L, 1

    static DepthModel for_layout(Layout l) {
        return l == Layout::Lnn ? DepthModel{l, {32, 80, -4, -2}}
                                : DepthModel{l, {32, 66, -2, -1}};
    }

    std::int64_t evaluate(std::int64_t L) const {
        return ((coefficients[0] * L + coefficients[1]) * L + coefficients[2]) * L +
               coefficients[3];
    }

    /// Leading-order fault-site count 32 L^3 (2L + 4).
    static std::int64_t leading_sites(std::int64_t L) { return 32 * L * L * L * (2 * L + 4); }

    std::int64_t exact_sites(std::int64_t L) const { return evaluate(L) * (2 * L + 4); }
};

/// Checks structural invariants; returns an empty string when they hold.
inline std::string validate(const Circuit& c) {
    for (std::size_t t = 0; t < c.layers.size(); ++t) {
        std::vector<int> seen(static_cast<std::size_t>(c.qubit_count), 0);
        bool has_two = false;
        for (const Block& b : c.layers[t].blocks) {
            for (int k = 0; k < (b.two_qubit() ? 2 : 1); ++k) {
                const int q = b.qubits[static_cast<std::size_t>(k)];
                if (q < 0 || q >= c.qubit_count) {
                    return "layer " + std::to_string(t) + ": qubit out of range";
                }
                if (seen[static_cast<std::size_t>(q)]++) {
                    return "layer " + std::to_string(t) + ": qubit " + std::to_string(q) +
                           " appears twice";
                }
            }
            if (b.two_qubit()) {
                has_two = true;
                if (c.layout == Layout::Lnn && std::abs(b.qubits[0] - b.qubits[1]) != 1) {
                    return "layer " + std::to_string(t) + ": non-adjacent pair " +
                           std::to_string(b.qubits[0]) + "," + std::to_string(b.qubits[1]);
                }
            }
            for (const GateOp& g : b.gates) {
                for (int k = 0; k < g.arity(); ++k) {
                    const int q = g.qubits[static_cast<std::size_t>(k)];
                    if (q != b.qubits[0] && q != b.qubits[1]) {
                        return "layer " + std::to_string(t) + ": gate outside its block";
                    }
                }
            }
        }
        if (!has_two) {
            return "layer " + std::to_string(t) + " has no two-qubit block";
        }
    }
    return {};
}

/// As-soon-as-possible scheduler with single-qubit absorption, same-pair
/// fusion and diagonal commutation.
class Scheduler {
public:
    explicit Scheduler(int qubit_count)
        : n_(qubit_count),
          last_any_(static_cast<std::size_t>(qubit_count), -1),
          last_nondiag_(static_cast<std::size_t>(qubit_count), -1),
          pending_(static_cast<std::size_t>(qubit_count)) {}

    int qubit_count() const { return n_; }
    int layer_count() const { return static_cast<int>(layers_.size()); }

    /// Places `g` and returns its layer, or -1 while a single-qubit gate is
    /// still waiting for its qubit's first two-qubit gate. A two-qubit gate
    /// is placed no earlier than `not_before`.
    int add(const GateOp& g, int not_before = 0) {
        if (g.arity() == 1) {
            return add_single(g);
        }
        return add_pair(g, not_before);
    }

    /// Later two-qubit gates start after every layer placed so far.
    void barrier() { floor_ = layer_count(); }

    void begin_region(const std::string& name) {
        open_.push_back(regions_.size());
        regions_.push_back({name, std::numeric_limits<int>::max(), -1});
    }

    void end_region() {
        if (open_.empty()) {
            throw std::logic_error("end_region without begin_region");
        }
        Region& r = regions_[open_.back()];
        open_.pop_back();
        if (r.end < 0) {
            r.begin = r.end = 0;
        }
    }

    /// Moves the schedule into `out`, flushing single-qubit gates on qubits
    /// that never took part in a two-qubit gate into the first layer.
    void finish(Circuit& out) {
        for (int q = 0; q < n_; ++q) {
            auto& p = pending_[static_cast<std::size_t>(q)];
            if (p.empty()) {
                continue;
            }
            if (layers_.empty()) {
                throw std::logic_error("circuit without two-qubit gates");
            }
            Block b;
            b.qubits = {q, -1};
            b.gates = std::move(p);
            layers_[0].blocks.push_back(std::move(b));
        }
        out.qubit_count = n_;
        out.layers = std::move(layers_);
        out.regions = std::move(regions_);
    }

private:
    Block& block_at(int layer, int q) {
        const int idx = slots_[static_cast<std::size_t>(layer)][static_cast<std::size_t>(q)];
        return layers_[static_cast<std::size_t>(layer)].blocks[static_cast<std::size_t>(idx)];
    }

    void touch(int layer) {
        for (std::size_t i : open_) {
            regions_[i].begin = std::min(regions_[i].begin, layer);
            regions_[i].end = std::max(regions_[i].end, layer + 1);
        }
    }

    int add_single(const GateOp& g) {
        const int q = g.qubits[0];
        check(q);
        const int t = last_any_[static_cast<std::size_t>(q)];
        if (t < 0) {
            pending_[static_cast<std::size_t>(q)].push_back(g);
            return -1;
        }
        block_at(t, q).gates.push_back(g);
        touch(t);
        if (!diagonal_on(g, q)) {
            last_nondiag_[static_cast<std::size_t>(q)] = t;
        }
        return t;
    }

    int add_pair(const GateOp& g, int not_before) {
        const int a = g.qubits[0];
        const int b = g.qubits[1];
        check(a);
        check(b);
        if (a == b) {
            throw std::invalid_argument("two-qubit gate on a repeated qubit");
        }
        const int ta = last_any_[static_cast<std::size_t>(a)];
        const int tb = last_any_[static_cast<std::size_t>(b)];
        // Same pair as the latest block on both qubits: fuse.
        if (ta >= 0 && ta == tb && ta >= floor_ && ta >= not_before &&
            slots_[static_cast<std::size_t>(ta)][static_cast<std::size_t>(a)] ==
                slots_[static_cast<std::size_t>(ta)][static_cast<std::size_t>(b)]) {
            block_at(ta, a).gates.push_back(g);
            touch(ta);
            for (int q : {a, b}) {
                if (!diagonal_on(g, q)) {
                    last_nondiag_[static_cast<std::size_t>(q)] = ta;
                }
            }
            return ta;
        }
        int lower = std::max(floor_, not_before);
        for (int q : {a, b}) {
            const auto& bound = diagonal_on(g, q) ? last_nondiag_ : last_any_;
            lower = std::max(lower, bound[static_cast<std::size_t>(q)] + 1);
        }
        int t = lower;
        while (t < layer_count() && (slot(t, a) >= 0 || slot(t, b) >= 0)) {
            ++t;
        }
        if (t == layer_count()) {
            layers_.emplace_back();
            slots_.emplace_back(static_cast<std::size_t>(n_), -1);
        }
        Block blk;
        blk.qubits = {a, b};
        for (int q : {a, b}) {
            auto& p = pending_[static_cast<std::size_t>(q)];
            for (const GateOp& early : p) {
                if (!diagonal_on(early, q)) {
                    last_nondiag_[static_cast<std::size_t>(q)] = t;
                }
            }
            blk.gates.insert(blk.gates.end(), p.begin(), p.end());
            p.clear();
        }
        blk.gates.push_back(g);
        auto& layer = layers_[static_cast<std::size_t>(t)];
        const int idx = static_cast<int>(layer.blocks.size());
        layer.blocks.push_back(std::move(blk));
        slots_[static_cast<std::size_t>(t)][static_cast<std::size_t>(a)] = idx;
        slots_[static_cast<std::size_t>(t)][static_cast<std::size_t>(b)] = idx;
        touch(t);
        for (int q : {a, b}) {
            auto& any = last_any_[static_cast<std::size_t>(q)];
            any = std::max(any, t);
            if (!diagonal_on(g, q)) {
                last_nondiag_[static_cast<std::size_t>(q)] = t;
            }
        }
        return t;
    }

    int slot(int t, int q) const {
        return slots_[static_cast<std::size_t>(t)][static_cast<std::size_t>(q)];
    }

    void check(int q) const {
        if (q < 0 || q >= n_) {
            throw std::out_of_range("qubit " + std::to_string(q) + " out of range");
        }
    }

    int n_;
    int floor_ = 0;
    std::vector<Layer> layers_;
    std::vector<std::vector<int>> slots_;
    std::vector<int> last_any_;
    std::vector<int> last_nondiag_;
    std::vector<std::vector<GateOp>> pending_;
    std::vector<Region> regions_;
    std::vector<std::size_t> open_;
};

} // namespace qpf
