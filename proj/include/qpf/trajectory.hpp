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

/// Fast trajectory simulation of a scheduled circuit.
///
/// The state is indexed by wire rather than by position: a SWAP only
/// changes which wire sits where, so it costs nothing. Amplitudes are cut
/// into chunks over the low `low_bits` wires (the accumulator in the period
/// finding circuits, which is dense in the Fourier basis). A chunk is only
/// stored while some amplitude in it is non-negligible; the work and master
/// wires rarely span more than a few dozen values, so most chunks stay
/// absent.
///
/// Consecutive diagonal gates are fused into one phase vector per setting
/// of the high wires they read, and runs of gates that stay inside a chunk
/// are applied chunk by chunk while the chunk sits in cache.
///
/// Measurements are not renormalised. The squared norm left after the last
/// measurement is the probability of the whole recorded bit string.

#include <algorithm>
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

#include "qpf/circuit.hpp"
#include "qpf/gate.hpp"
#include "qpf/noise.hpp"
#include "qpf/rng.hpp"
#include "qpf/state_vector.hpp"

namespace qpf {

struct Trajectory {
    std::vector<int> bits;
    std::vector<double> branch_probabilities;
    double probability = 0.0;
    /// A forced outcome had probability below kDegenerateBranch; the run
    /// stopped there and `probability` is 0.
    bool degenerate = false;
};

/// Measurement outcomes that spell `j`, least significant bit first.
inline std::vector<int> bits_of(std::uint64_t j, int count) {
    std::vector<int> out(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) {
        out[static_cast<std::size_t>(t)] = static_cast<int>((j >> t) & 1U);
    }
    return out;
}

inline std::uint64_t value_of(const std::vector<int>& bits) {
    std::uint64_t j = 0;
    for (std::size_t t = 0; t < bits.size(); ++t) {
        j |= static_cast<std::uint64_t>(bits[t] & 1) << t;
    }
    return j;
}

namespace detail {

enum class Op : std::uint8_t { H, X, Phase, CPhase, Cnot, Crot, Measure, Reset };

struct Instr {
    Op op;
    int a;
    int b;
    double fr;  // phase factor, Phase and CPhase
    double fi;
    int record;
};

/// Phase vectors of a run of diagonal gates [begin, end), one per setting
/// of the high wires the run reads. Each vector holds the real parts of a
/// chunk followed by the imaginary parts.
struct DiagGroup {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::vector<int> high_bits;  // chunk index bits read by the run
    std::vector<double> table;

    std::size_t variant(std::size_t chunk) const {
        std::size_t v = 0;
        for (std::size_t k = 0; k < high_bits.size(); ++k) {
            v |= ((chunk >> high_bits[k]) & 1U) << k;
        }
        return v;
    }
};

/// One entry of a local run: a single instruction or a fused group. A
/// chunk permutation (X or CNOT on high wires only) rides along as a change
/// of the chunk's index.
struct LocalOp {
    const Instr* instr;
    const DiagGroup* group;
};

// Kernels on one chunk stored as re[0..n) followed by im[0..n).

inline void butterfly(double* __restrict u, double* __restrict v, std::size_t m) {
    const double s = std::numbers::sqrt2 / 2.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double a = u[i];
        const double b = v[i];
        u[i] = (a + b) * s;
        v[i] = (a - b) * s;
    }
}

inline void chunk_h(double* re, double* im, std::size_t n, int w) {
    const std::size_t m = std::size_t{1} << w;
    if (m < 4) {
        const double s = std::numbers::sqrt2 / 2.0;
        for (double* part : {re, im}) {
            for (std::size_t base = 0; base < n; base += 4) {
                double* q = part + base;
                if (m == 1) {
                    const double a0 = q[0], b0 = q[1], a1 = q[2], b1 = q[3];
                    q[0] = (a0 + b0) * s;
                    q[1] = (a0 - b0) * s;
                    q[2] = (a1 + b1) * s;
                    q[3] = (a1 - b1) * s;
                } else {
                    const double a0 = q[0], a1 = q[1], b0 = q[2], b1 = q[3];
                    q[0] = (a0 + b0) * s;
                    q[1] = (a1 + b1) * s;
                    q[2] = (a0 - b0) * s;
                    q[3] = (a1 - b1) * s;
                }
            }
        }
        return;
    }
    for (std::size_t base = 0; base < n; base += 2 * m) {
        butterfly(re + base, re + base + m, m);
        butterfly(im + base, im + base + m, m);
    }
}

inline void chunk_x(double* re, double* im, std::size_t n, int w) {
    const std::size_t m = std::size_t{1} << w;
    for (std::size_t base = 0; base < n; base += 2 * m) {
        for (std::size_t i = base; i < base + m; ++i) {
            std::swap(re[i], re[i + m]);
            std::swap(im[i], im[i + m]);
        }
    }
}

inline void chunk_scale(double* re, double* im, std::size_t first, std::size_t last, double fr,
                        double fi) {
    for (std::size_t i = first; i < last; ++i) {
        const double r = re[i], m = im[i];
        re[i] = r * fr - m * fi;
        im[i] = r * fi + m * fr;
    }
}

inline void chunk_phase(double* re, double* im, std::size_t n, int w, double fr, double fi) {
    const std::size_t m = std::size_t{1} << w;
    for (std::size_t base = 0; base < n; base += 2 * m) {
        chunk_scale(re, im, base + m, base + 2 * m, fr, fi);
    }
}

inline void chunk_cphase(double* re, double* im, std::size_t n, int w1, int w2, double fr,
                         double fi) {
    if (w1 > w2) {
        std::swap(w1, w2);
    }
    const std::size_t m1 = std::size_t{1} << w1;
    const std::size_t m2 = std::size_t{1} << w2;
    for (std::size_t hi = m2; hi < n; hi += 2 * m2) {
        for (std::size_t base = hi; base < hi + m2; base += 2 * m1) {
            chunk_scale(re, im, base + m1, base + 2 * m1, fr, fi);
        }
    }
}

inline void chunk_cnot(double* re, double* im, std::size_t n, int ctl, int tgt) {
    const std::size_t cm = std::size_t{1} << ctl;
    const std::size_t tm = std::size_t{1} << tgt;
    for (std::size_t i = cm; i < n; i = (i + 1) | cm) {
        if (!(i & tm)) {
            std::swap(re[i], re[i | tm]);
            std::swap(im[i], im[i | tm]);
        }
    }
}

inline void chunk_multiply(double* re, double* im, std::size_t n, const double* pr,
                           const double* pi) {
    for (std::size_t i = 0; i < n; ++i) {
        const double r = re[i], m = im[i];
        re[i] = r * pr[i] - m * pi[i];
        im[i] = r * pi[i] + m * pr[i];
    }
}

/// Sparse chunked amplitudes, indexed by wire.
class ChunkState {
public:
    ChunkState(int wires, int low_bits)
        : low_(low_bits),
          size_(std::size_t{1} << low_bits),
          chunks_(std::size_t{1} << (wires - low_bits)) {
        ensure(0);
        chunks_[0][0] = 1.0;
    }

    double norm() const { return norm_; }

    std::size_t live_chunks() const { return live_.size(); }

    /// True when `in` acts inside each chunk, reading high wires at most as
    /// conditions. Such instructions never create or move chunks.
    static bool local(const Instr& in, int low_bits) {
        switch (in.op) {
        case Op::H: return in.a < low_bits;
        case Op::X:
        case Op::Phase:
        case Op::CPhase: return true;
        case Op::Cnot: return in.b < low_bits || in.a >= low_bits;
        default: return false;
        }
    }

    /// Chunk index after the permutation `in` (X or CNOT on high wires).
    static std::size_t permuted(std::size_t c, int low, const Instr& in) {
        if (in.op == Op::X) {
            return c ^ (std::size_t{1} << (in.a - low));
        }
        return ((c >> (in.a - low)) & 1U) ? c ^ (std::size_t{1} << (in.b - low)) : c;
    }

    static bool permutes(const Instr& in, int low) {
        return (in.op == Op::X && in.a >= low) || (in.op == Op::Cnot && in.b >= low);
    }

    /// Applies a local instruction to chunk `c` held in re/im.
    static void local_step(double* re, double* im, std::size_t n, std::size_t c, int low,
                           const Instr& in) {
        const auto set = [&](int w) { return ((c >> (w - low)) & 1U) != 0; };
        switch (in.op) {
        case Op::H: chunk_h(re, im, n, in.a); break;
        case Op::X: chunk_x(re, im, n, in.a); break;
        case Op::Phase:
            if (in.a < low) {
                chunk_phase(re, im, n, in.a, in.fr, in.fi);
            } else if (set(in.a)) {
                chunk_scale(re, im, 0, n, in.fr, in.fi);
            }
            break;
        case Op::CPhase: {
            int w1 = in.a;
            int w2 = in.b;
            if (w1 >= low) {
                std::swap(w1, w2);
            }
            if (w1 >= low) {
                if (set(w1) && set(w2)) {
                    chunk_scale(re, im, 0, n, in.fr, in.fi);
                }
            } else if (w2 >= low) {
                if (set(w2)) {
                    chunk_phase(re, im, n, w1, in.fr, in.fi);
                }
            } else {
                chunk_cphase(re, im, n, w1, w2, in.fr, in.fi);
            }
            break;
        }
        case Op::Cnot:
            if (in.a >= low) {
                if (set(in.a)) {
                    chunk_x(re, im, n, in.b);
                }
            } else {
                chunk_cnot(re, im, n, in.a, in.b);
            }
            break;
        default: throw std::logic_error("instruction is not chunk-local");
        }
    }

    /// Applies a run of local operations chunk by chunk.
    void apply_local(const std::vector<LocalOp>& ops) {
        bool moved = false;
        dest_.resize(live_.size());
        for (std::size_t k = 0; k < live_.size(); ++k) {
            auto c = static_cast<std::size_t>(live_[k]);
            double* re = chunks_[c].data();
            double* im = re + size_;
            for (const LocalOp& op : ops) {
                if (op.group != nullptr) {
                    const double* pr = op.group->table.data() + 2 * size_ * op.group->variant(c);
                    chunk_multiply(re, im, size_, pr, pr + size_);
                } else if (permutes(*op.instr, low_)) {
                    c = permuted(c, low_, *op.instr);
                    moved = true;
                } else {
                    local_step(re, im, size_, c, low_, *op.instr);
                }
            }
            dest_[k] = c;
        }
        if (moved) {
            std::vector<std::vector<double>> held(live_.size());
            for (std::size_t k = 0; k < live_.size(); ++k) {
                held[k] = std::move(chunks_[static_cast<std::size_t>(live_[k])]);
            }
            for (std::size_t k = 0; k < live_.size(); ++k) {
                chunks_[dest_[k]] = std::move(held[k]);
            }
            rebuild_live();
        }
    }

    void x(int w) {
        if (w < low_) {
            for (int c : live_) {
                chunk_x(re(c), im(c), size_, w);
            }
            return;
        }
        const std::size_t m = high(w);
        for (std::size_t c = 0; c < chunks_.size(); ++c) {
            if (!(c & m)) {
                std::swap(chunks_[c], chunks_[c | m]);
            }
        }
        rebuild_live();
    }

    void phase(int w, double fr, double fi) {
        for (int c : live_) {
            if (w < low_) {
                chunk_phase(re(c), im(c), size_, w, fr, fi);
            } else if (static_cast<std::size_t>(c) & high(w)) {
                chunk_scale(re(c), im(c), 0, size_, fr, fi);
            }
        }
    }

    void h(int w) {
        if (w < low_) {
            for (int c : live_) {
                chunk_h(re(c), im(c), size_, w);
            }
            return;
        }
        const double s = std::numbers::sqrt2 / 2.0;
        for (auto [c0, c1] : pairs(high(w))) {
            ensure(c0);
            ensure(c1);
            double* a = chunks_[c0].data();
            double* b = chunks_[c1].data();
            for (std::size_t i = 0; i < 2 * size_; ++i) {
                const double u = a[i];
                const double v = b[i];
                a[i] = (u + v) * s;
                b[i] = (u - v) * s;
            }
            prune(c0);
            prune(c1);
        }
    }

    /// CNOT onto a high target; local targets go through local_step.
    void cnot(int ctl, int tgt) {
        const std::size_t tm = high(tgt);
        if (ctl >= low_) {
            // Chunks with the control set trade places.
            const std::size_t cm = high(ctl);
            for (std::size_t c = 0; c < chunks_.size(); ++c) {
                if ((c & cm) && !(c & tm)) {
                    std::swap(chunks_[c], chunks_[c | tm]);
                }
            }
            rebuild_live();
            return;
        }
        const std::size_t cm = std::size_t{1} << ctl;
        for (auto [c0, c1] : pairs(tm)) {
            ensure(c0);
            ensure(c1);
            double* a = chunks_[c0].data();
            double* b = chunks_[c1].data();
            for (std::size_t base = cm; base < 2 * size_; base += 2 * cm) {
                std::swap_ranges(a + base, a + base + cm, b + base);
            }
            prune(c0);
            prune(c1);
        }
    }

    /// Probability of reading 1 on wire `w`, relative to the current norm.
    double probability_one(int w) const {
        double n1 = 0.0;
        double total = 0.0;
        for (int ci : live_) {
            const auto c = static_cast<std::size_t>(ci);
            const double* a = chunks_[c].data();
            const double* b = a + size_;
            if (w < low_) {
                const std::size_t m = std::size_t{1} << w;
                for (std::size_t i = 0; i < size_; ++i) {
                    const double p = a[i] * a[i] + b[i] * b[i];
                    total += p;
                    n1 += (i & m) ? p : 0.0;
                }
            } else {
                const double p = chunk_norm(c);
                total += p;
                n1 += (c & high(w)) ? p : 0.0;
            }
        }
        return total > 0.0 ? n1 / total : 0.0;
    }

    /// Drops the branch of wire `w` opposite to `bit`, without renormalising.
    void project(int w, int bit) {
        if (w < low_) {
            const std::size_t m = std::size_t{1} << w;
            for (int c : live_) {
                double* a = re(c);
                for (std::size_t i = 0; i < size_; ++i) {
                    if (((i & m) != 0) != (bit != 0)) {
                        a[i] = 0.0;
                        a[i + size_] = 0.0;
                    }
                }
            }
        } else {
            const std::size_t m = high(w);
            for (std::size_t c = 0; c < chunks_.size(); ++c) {
                if (!chunks_[c].empty() && ((c & m) != 0) != (bit != 0)) {
                    release(c);
                }
            }
        }
        norm_ = 0.0;
        for (int c : live_) {
            norm_ += chunk_norm(static_cast<std::size_t>(c));
        }
        for (std::size_t c = 0; c < chunks_.size(); ++c) {
            if (!chunks_[c].empty()) {
                prune(c);
            }
        }
    }

private:
    std::size_t high(int w) const { return std::size_t{1} << (w - low_); }
    double* re(int c) { return chunks_[static_cast<std::size_t>(c)].data(); }
    double* im(int c) { return re(c) + size_; }

    double chunk_norm(std::size_t c) const {
        const double* a = chunks_[c].data();
        double s[4] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < 2 * size_; i += 4) {
            for (std::size_t k = 0; k < 4; ++k) {
                s[k] += a[i + k] * a[i + k];
            }
        }
        return (s[0] + s[1]) + (s[2] + s[3]);
    }

    /// Chunk pairs differing in high bit mask `m` with at least one stored.
    std::vector<std::pair<std::size_t, std::size_t>> pairs(std::size_t m) const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (int ci : live_) {
            const auto c = static_cast<std::size_t>(ci);
            const std::size_t lo = c & ~m;
            if (c == lo || chunks_[lo].empty()) {
                out.emplace_back(lo, lo | m);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    void ensure(std::size_t c) {
        if (!chunks_[c].empty()) {
            return;
        }
        if (pool_.empty()) {
            chunks_[c].assign(2 * size_, 0.0);
        } else {
            chunks_[c] = std::move(pool_.back());
            pool_.pop_back();
            std::fill(chunks_[c].begin(), chunks_[c].end(), 0.0);
        }
        live_.push_back(static_cast<int>(c));
    }

    void release(std::size_t c) {
        pool_.push_back(std::move(chunks_[c]));
        chunks_[c].clear();
        live_.erase(std::find(live_.begin(), live_.end(), static_cast<int>(c)));
    }

    /// Drops a chunk whose weight is negligible against the whole state;
    /// this removes round-off left behind when a wire is uncomputed.
    void prune(std::size_t c) {
        if (chunk_norm(c) <= kNegligible * norm_) {
            release(c);
        }
    }

    void rebuild_live() {
        live_.clear();
        for (std::size_t c = 0; c < chunks_.size(); ++c) {
            if (!chunks_[c].empty()) {
                live_.push_back(static_cast<int>(c));
            }
        }
    }

    static constexpr double kNegligible = 1e-26;

    int low_;
    std::size_t size_;
    std::vector<std::vector<double>> chunks_;
    std::vector<int> live_;
    std::vector<std::size_t> dest_;
    std::vector<std::vector<double>> pool_;
    double norm_ = 1.0;
};

} // namespace detail

/// A circuit compiled for repeated trajectory runs.
class TrajectorySimulator {
public:
    /// `low_bits` defaults to the accumulator width L+1 of the instance.
    explicit TrajectorySimulator(const Circuit& c, int low_bits = -1)
        : qubits_(c.qubit_count), depth_(c.depth()) {
        if (low_bits < 0) {
            low_bits = c.instance.L + 1;
        }
        low_ = std::clamp(low_bits, 2, qubits_);
        std::vector<int> at = c.initial_wires;
        if (at.empty()) {
            for (int q = 0; q < qubits_; ++q) {
                at.push_back(q);
            }
        }
        wire_after_.reserve(static_cast<std::size_t>(depth_) * static_cast<std::size_t>(qubits_));
        for (const Layer& layer : c.layers) {
            for (const Block& b : layer.blocks) {
                for (const GateOp& g : b.gates) {
                    compile(g, at);
                }
            }
            layer_end_.push_back(prog_.size());
            wire_after_.insert(wire_after_.end(), at.begin(), at.end());
        }
        for (std::size_t t = 0; t < layer_end_.size(); ++t) {
            for (std::size_t pc = t ? layer_end_[t - 1] : 0; pc < layer_end_[t]; ++pc) {
                if (prog_[pc].op == Op::Measure) {
                    const auto rec = static_cast<std::size_t>(prog_[pc].record);
                    if (measure_layer_.size() <= rec) {
                        measure_layer_.resize(rec + 1, -1);
                    }
                    measure_layer_[rec] = static_cast<int>(t);
                }
            }
        }
        local_.resize(prog_.size());
        for (std::size_t pc = 0; pc < prog_.size(); ++pc) {
            local_[pc] = detail::ChunkState::local(prog_[pc], low_);
        }
        fuse_diagonal_runs();
    }

    int qubit_count() const { return qubits_; }
    int depth() const { return depth_; }

    /// Layer holding the measurement that records bit `record`.
    int measurement_layer(int record) const { return measure_layer_.at(static_cast<std::size_t>(record)); }

    /// Wire on `position` once layer `timestep` has finished.
    int wire_at(int timestep, int position) const {
        return wire_after_[static_cast<std::size_t>(timestep) * static_cast<std::size_t>(qubits_) +
                           static_cast<std::size_t>(position)];
    }

    /// Partial run: the state after layers [0, layer) and the outcomes so far.
    struct Checkpoint {
        detail::ChunkState state;
        Trajectory partial;
        int layer = 0;
        std::size_t pc = 0;
    };

    Checkpoint start() const { return Checkpoint{detail::ChunkState(qubits_, low_), {}, 0, 0}; }

    /// Runs layers [cp.layer, end_layer) with `events` applied, all of which
    /// must fall in that range. Measurements follow `forced` when given and
    /// are sampled from `rng` otherwise. Returns false once a forced branch
    /// turns out degenerate; the checkpoint is then final.
    bool advance(Checkpoint& cp, int end_layer, std::vector<ErrorEvent> events,
                 const std::vector<int>* forced, Rng* rng = nullptr) const {
        if (cp.partial.degenerate) {
            return false;
        }
        if (end_layer < cp.layer || end_layer > depth_) {
            throw std::out_of_range("layer range outside the circuit");
        }
        std::sort(events.begin(), events.end());
        for (const ErrorEvent& e : events) {
            if (e.timestep < cp.layer || e.timestep >= end_layer || e.qubit < 0 ||
                e.qubit >= qubits_) {
                throw std::out_of_range("error event outside the simulated layers");
            }
        }
        std::vector<detail::LocalOp> ops;
        auto next = events.begin();
        while (cp.layer < end_layer) {
            // Run up to the next layer that carries faults in one sweep.
            const int t = next != events.end() ? next->timestep : end_layer - 1;
            const std::size_t stop = layer_end_[static_cast<std::size_t>(t)];
            while (cp.pc < stop) {
                if (!local_[cp.pc]) {
                    if (!step(cp.state, prog_[cp.pc++], cp.partial, forced, rng)) {
                        cp.partial.degenerate = true;
                        cp.partial.probability = 0.0;
                        return false;
                    }
                    continue;
                }
                ops.clear();
                while (cp.pc < stop && local_[cp.pc]) {
                    const int g = group_at_[cp.pc];
                    if (g >= 0 && groups_[static_cast<std::size_t>(g)].end <= stop) {
                        ops.push_back({nullptr, &groups_[static_cast<std::size_t>(g)]});
                        cp.pc = groups_[static_cast<std::size_t>(g)].end;
                    } else {
                        ops.push_back({&prog_[cp.pc], nullptr});
                        ++cp.pc;
                    }
                }
                cp.state.apply_local(ops);
            }
            cp.layer = t + 1;
            for (; next != events.end() && next->timestep == t; ++next) {
                const int w = wire_at(t, next->qubit);
                if (next->pauli != Pauli::X) {
                    cp.state.phase(w, -1.0, 0.0);
                }
                if (next->pauli != Pauli::Z) {
                    cp.state.x(w);
                }
            }
        }
        cp.partial.probability = cp.state.norm();
        return true;
    }

    /// Finishes the circuit from `cp`.
    Trajectory finish(Checkpoint cp, std::vector<ErrorEvent> events, const std::vector<int>* forced,
                      Rng* rng = nullptr) const {
        advance(cp, depth_, std::move(events), forced, rng);
        return std::move(cp.partial);
    }

    /// Runs the whole circuit.
    Trajectory run(std::vector<ErrorEvent> events, const std::vector<int>* forced,
                   Rng* rng = nullptr) const {
        return finish(start(), std::move(events), forced, rng);
    }

private:
    using Op = detail::Op;
    using Instr = detail::Instr;

    // Shorter diagonal runs are cheaper gate by gate than as a full multiply.
    static constexpr std::size_t kMinFusedRun = 3;

    void compile(const GateOp& g, std::vector<int>& at) {
        const int a = at[static_cast<std::size_t>(g.qubits[0])];
        const int b = g.arity() == 2 ? at[static_cast<std::size_t>(g.qubits[1])] : -1;
        const double cr = std::cos(g.angle);
        const double ci = std::sin(g.angle);
        switch (g.kind) {
        case GateKind::Hadamard: prog_.push_back({Op::H, a, -1, 1.0, 0.0, -1}); break;
        case GateKind::PauliX: prog_.push_back({Op::X, a, -1, 1.0, 0.0, -1}); break;
        case GateKind::PauliZ: prog_.push_back({Op::Phase, a, -1, -1.0, 0.0, -1}); break;
        case GateKind::PauliXZ:
            prog_.push_back({Op::Phase, a, -1, -1.0, 0.0, -1});
            prog_.push_back({Op::X, a, -1, 1.0, 0.0, -1});
            break;
        case GateKind::Phase: prog_.push_back({Op::Phase, a, -1, cr, ci, -1}); break;
        case GateKind::ControlledPhase: prog_.push_back({Op::CPhase, a, b, cr, ci, -1}); break;
        case GateKind::Cnot: prog_.push_back({Op::Cnot, a, b, 1.0, 0.0, -1}); break;
        case GateKind::Swap:
            std::swap(at[static_cast<std::size_t>(g.qubits[0])], at[static_cast<std::size_t>(g.qubits[1])]);
            break;
        case GateKind::ClassicalRotation: prog_.push_back({Op::Crot, a, -1, 1.0, 0.0, g.record}); break;
        case GateKind::Measure: prog_.push_back({Op::Measure, a, -1, 1.0, 0.0, g.record}); break;
        case GateKind::Reset: prog_.push_back({Op::Reset, a, -1, 1.0, 0.0, g.record}); break;
        }
    }

    static bool diagonal(const Instr& in) { return in.op == Op::Phase || in.op == Op::CPhase; }

    void fuse_diagonal_runs() {
        const std::size_t n = std::size_t{1} << low_;
        group_at_.assign(prog_.size(), -1);
        std::size_t pc = 0;
        while (pc < prog_.size()) {
            if (!diagonal(prog_[pc])) {
                ++pc;
                continue;
            }
            std::size_t end = pc;
            while (end < prog_.size() && diagonal(prog_[end])) {
                ++end;
            }
            if (end - pc >= kMinFusedRun) {
                detail::DiagGroup g;
                g.begin = pc;
                g.end = end;
                for (std::size_t k = pc; k < end; ++k) {
                    for (int w : {prog_[k].a, prog_[k].b}) {
                        if (w >= low_) {
                            g.high_bits.push_back(w - low_);
                        }
                    }
                }
                std::sort(g.high_bits.begin(), g.high_bits.end());
                g.high_bits.erase(std::unique(g.high_bits.begin(), g.high_bits.end()), g.high_bits.end());
                const std::size_t variants = std::size_t{1} << g.high_bits.size();
                g.table.assign(variants * 2 * n, 0.0);
                for (std::size_t v = 0; v < variants; ++v) {
                    std::size_t chunk = 0;
                    for (std::size_t k = 0; k < g.high_bits.size(); ++k) {
                        chunk |= ((v >> k) & 1U) << g.high_bits[k];
                    }
                    double* re = g.table.data() + v * 2 * n;
                    std::fill(re, re + n, 1.0);
                    for (std::size_t k = pc; k < end; ++k) {
                        detail::ChunkState::local_step(re, re + n, n, chunk, low_, prog_[k]);
                    }
                }
                group_at_[pc] = static_cast<int>(groups_.size());
                groups_.push_back(std::move(g));
            }
            pc = end;
        }
    }

    static bool step(detail::ChunkState& s, const Instr& in, Trajectory& out,
                     const std::vector<int>* forced, Rng* rng) {
        switch (in.op) {
        case Op::H: s.h(in.a); break;
        case Op::X: s.x(in.a); break;
        case Op::Cnot: s.cnot(in.a, in.b); break;
        case Op::Crot: {
            const double angle = feedback_angle(out.bits, in.record);
            s.phase(in.a, std::cos(angle), std::sin(angle));
            break;
        }
        case Op::Reset:
            if (out.bits.at(static_cast<std::size_t>(in.record)) != 0) {
                s.x(in.a);
            }
            break;
        case Op::Measure: {
            const double p1 = s.probability_one(in.a);
            int bit;
            if (forced != nullptr) {
                bit = forced->at(static_cast<std::size_t>(in.record));
            } else {
                if (rng == nullptr) {
                    throw std::invalid_argument("unforced measurement needs a generator");
                }
                bit = rng->uniform() < p1 ? 1 : 0;
            }
            const double p = bit ? p1 : 1.0 - p1;
            out.bits.push_back(bit);
            out.branch_probabilities.push_back(p);
            if (p < kDegenerateBranch) {
                return false;
            }
            s.project(in.a, bit);
            break;
        }
        default: throw std::logic_error("local instruction outside a local run");
        }
        return true;
    }

    int qubits_;
    int depth_;
    int low_ = 1;
    std::vector<Instr> prog_;
    std::vector<char> local_;
    std::vector<int> group_at_;
    std::vector<detail::DiagGroup> groups_;
    std::vector<std::size_t> layer_end_;
    std::vector<int> wire_after_;
    std::vector<int> measure_layer_;
};

} // namespace qpf
