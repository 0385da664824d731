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

/// Experiments on period finding circuits under discrete Pauli faults:
/// single-fault sensitivity maps, fixed-count stability curves with their
/// random-output baseline, threshold estimates, precision tables and the
/// end-to-end factoring demo.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpf/builder.hpp"
#include "qpf/circuit.hpp"
#include "qpf/noise.hpp"
#include "qpf/numtheory.hpp"
#include "qpf/rng.hpp"
#include "qpf/spectrum.hpp"
#include "qpf/trajectory.hpp"

namespace qpf {

struct TargetProbability {
    double probability = 0.0;
    bool degenerate = false;
};

/// Exact probability of reading `target_j` with `events` injected, from one
/// forced trajectory.
inline TargetProbability target_probability(const TrajectorySimulator& sim, const Circuit& c,
                                            const std::vector<ErrorEvent>& events,
                                            std::uint64_t target_j) {
    const int bits = c.instance.L * 2;
    if (target_j >> bits) {
        throw std::out_of_range("target j must be below 2^(2L)");
    }
    const std::vector<int> forced = bits_of(target_j, bits);
    const Trajectory t = sim.run(events, &forced);
    return {t.probability, t.degenerate};
}

inline TargetProbability target_probability(const Circuit& c, const std::vector<ErrorEvent>& events,
                                            std::uint64_t target_j) {
    return target_probability(TrajectorySimulator(c), c, events, target_j);
}

namespace detail {

inline std::vector<ErrorEvent> events_in(const std::vector<ErrorEvent>& events, int begin, int end) {
    std::vector<ErrorEvent> out;
    for (const ErrorEvent& e : events) {
        if (e.timestep >= begin && e.timestep < end) {
            out.push_back(e);
        }
    }
    return out;
}

inline double outcome_tree(const TrajectorySimulator& sim, TrajectorySimulator::Checkpoint& cp,
                           const std::vector<ErrorEvent>& events, const std::vector<std::uint64_t>& group,
                           int t, int bits) {
    if (group.empty()) {
        return 0.0;
    }
    if (t == bits) {
        const std::vector<int> forced = bits_of(group.front(), bits);
        sim.advance(cp, sim.depth(), events_in(events, cp.layer, sim.depth()), &forced);
        return cp.partial.degenerate ? 0.0 : cp.partial.probability;
    }
    std::array<std::vector<std::uint64_t>, 2> split;
    for (std::uint64_t j : group) {
        split[(j >> t) & 1U].push_back(j);
    }
    const int ml = sim.measurement_layer(t);
    sim.advance(cp, ml, events_in(events, cp.layer, ml), nullptr);
    double total = 0.0;
    for (int b = 0; b < 2; ++b) {
        if (split[static_cast<std::size_t>(b)].empty()) {
            continue;
        }
        const bool last = b == 1 || split[1].empty();
        TrajectorySimulator::Checkpoint branch = last ? std::move(cp) : cp;
        const std::vector<int> forced = bits_of(split[static_cast<std::size_t>(b)].front(), bits);
        if (sim.advance(branch, ml + 1, events_in(events, ml, ml + 1), &forced)) {
            total += outcome_tree(sim, branch, events, split[static_cast<std::size_t>(b)], t + 1, bits);
        }
    }
    return total;
}

} // namespace detail

/// Total probability of the outcomes `targets` with `events` injected,
/// continuing from `cp`. Outcomes share the simulation until their first
/// differing bit.
inline double outcome_set_probability(const TrajectorySimulator& sim, const Circuit& c,
                                      TrajectorySimulator::Checkpoint cp,
                                      const std::vector<ErrorEvent>& events,
                                      const std::vector<std::uint64_t>& targets) {
    const int bits = 2 * c.instance.L;
    const int t = static_cast<int>(cp.partial.bits.size());
    std::vector<std::uint64_t> group;
    for (std::uint64_t j : targets) {
        if (j >> bits) {
            throw std::out_of_range("outcome must be below 2^(2L)");
        }
        bool matches = true;
        for (int k = 0; k < t; ++k) {
            matches = matches && static_cast<int>((j >> k) & 1U) == cp.partial.bits[static_cast<std::size_t>(k)];
        }
        if (matches) {
            group.push_back(j);
        }
    }
    return detail::outcome_tree(sim, cp, events, group, t, bits);
}

/// The useful outcomes of an instance, floor and ceil of c 2^(2L) / r.
inline std::vector<std::uint64_t> useful_outcomes(const ModInstance& inst) {
    const auto set = useful_j_set(make_spectrum_params(inst.L, inst.r));
    return {set.begin(), set.end()};
}

/// Error-free forced trajectory of one target, with snapshots along the way
/// so that a faulty run only simulates from its first fault onwards.
class PrefixCache {
public:
    PrefixCache(const TrajectorySimulator& sim, std::uint64_t target_j, int bits, int snapshots = 32)
        : sim_(sim), forced_(bits_of(target_j, bits)) {
        const int depth = sim.depth();
        const int step = std::max(1, depth / std::max(1, snapshots));
        TrajectorySimulator::Checkpoint cp = sim.start();
        layers_.push_back(0);
        saved_.push_back(cp);
        for (int layer = step; layer < depth; layer += step) {
            sim.advance(cp, layer, {}, &forced_);
            layers_.push_back(layer);
            saved_.push_back(cp);
        }
        baseline_ = sim.finish(cp, {}, &forced_);
    }

    /// Result with no faults.
    const Trajectory& error_free() const { return baseline_; }

    Trajectory run(const std::vector<ErrorEvent>& events) const {
        if (events.empty()) {
            return baseline_;
        }
        int first = events.front().timestep;
        for (const ErrorEvent& e : events) {
            first = std::min(first, e.timestep);
        }
        const auto it = std::upper_bound(layers_.begin(), layers_.end(), first);
        const auto k = static_cast<std::size_t>(it - layers_.begin() - 1);
        return sim_.finish(saved_[k], events, &forced_);
    }

private:
    const TrajectorySimulator& sim_;
    std::vector<int> forced_;
    std::vector<int> layers_;
    std::vector<TrajectorySimulator::Checkpoint> saved_;
    Trajectory baseline_;
};

/// What a sensitivity map records at each site.
enum class SensitivityMeasure {
    Target,     // p(target_j) / p0
    UsefulSet,  // probability of any useful outcome, over its fault-free value
};

inline std::string measure_name(SensitivityMeasure m) {
    return m == SensitivityMeasure::Target ? "target" : "useful";
}

inline SensitivityMeasure parse_measure(const std::string& s) {
    if (s == "target") {
        return SensitivityMeasure::Target;
    }
    if (s == "useful") {
        return SensitivityMeasure::UsefulSet;
    }
    throw std::invalid_argument("unknown measure '" + s + "' (expected target or useful)");
}

struct SensitivityMap {
    int begin = 0;  // first layer of the region
    int end = 0;    // one past the last layer
    int qubits = 0;
    Pauli pauli = Pauli::X;
    SensitivityMeasure measure = SensitivityMeasure::UsefulSet;
    std::uint64_t target_j = 0;
    double p0 = 0.0;  // fault-free value of the measure
    /// s for a fault on qubit q after layer begin + t, at q * length() + t.
    std::vector<double> grid;

    int length() const { return end - begin; }

    double at(int qubit, int timestep) const {
        return grid.at(static_cast<std::size_t>(qubit) * static_cast<std::size_t>(length()) +
                       static_cast<std::size_t>(timestep - begin));
    }

    double mean() const {
        double s = 0.0;
        for (double v : grid) {
            s += v;
        }
        return grid.empty() ? 0.0 : s / static_cast<double>(grid.size());
    }

    /// The measure itself rather than its ratio to p0.
    double absolute_at(int qubit, int timestep) const { return at(qubit, timestep) * p0; }
    double absolute_mean() const { return mean() * p0; }
};

/// Places one `pauli` fault at every site of layers [begin, end) and
/// records s, the chosen success measure relative to its fault-free value.
inline SensitivityMap sensitivity_map(const TrajectorySimulator& sim, const Circuit& c, int begin,
                                      int end, Pauli pauli, std::uint64_t target_j,
                                      SensitivityMeasure measure = SensitivityMeasure::UsefulSet) {
    if (begin < 0 || end < begin || end > c.depth()) {
        throw std::out_of_range("region outside the circuit");
    }
    SensitivityMap m;
    m.begin = begin;
    m.end = end;
    m.qubits = c.qubit_count;
    m.pauli = pauli;
    m.measure = measure;
    m.target_j = target_j;
    m.grid.assign(static_cast<std::size_t>(m.qubits) * static_cast<std::size_t>(m.length()), 0.0);
    const std::vector<std::uint64_t> targets =
        measure == SensitivityMeasure::Target ? std::vector<std::uint64_t>{target_j} : useful_outcomes(c.instance);
    const std::vector<int> forced = bits_of(target_j, 2 * c.instance.L);
    TrajectorySimulator::Checkpoint cp = sim.start();
    m.p0 = outcome_set_probability(sim, c, cp, {}, targets);
    if (m.p0 <= 0.0) {
        throw std::domain_error("measured outcomes have zero probability without faults");
    }
    // Measurements passed on the way to a site follow target_j, so in later
    // stages only outcomes sharing its low bits count.
    sim.advance(cp, begin, {}, &forced);
    for (int t = begin; t < end; ++t) {
        for (int q = 0; q < m.qubits; ++q) {
            const double p = outcome_set_probability(sim, c, cp, {{t, q, pauli}}, targets);
            m.grid[static_cast<std::size_t>(q) * static_cast<std::size_t>(m.length()) +
                   static_cast<std::size_t>(t - begin)] = p / m.p0;
        }
        sim.advance(cp, t + 1, {}, &forced);
    }
    return m;
}

inline SensitivityMap sensitivity_map(const Circuit& c, const Region& region, Pauli pauli,
                                      std::uint64_t target_j,
                                      SensitivityMeasure measure = SensitivityMeasure::UsefulSet) {
    return sensitivity_map(TrajectorySimulator(c), c, region.begin, region.end, pauli, target_j, measure);
}

struct StabilityRecord {
    int L = 0;
    Layout layout = Layout::NonLnn;
    int n_errors = 0;
    int trials = 0;
    std::vector<double> relative_probabilities;
    double mean = 0.0;
    double variance = 0.0;  // sample variance, divisor trials - 1
    double baseline = 0.0;  // random-output level 2^(-2L) / p0
    std::uint64_t target_j = 0;
    std::uint64_t seed = 0;

    double standard_error() const {
        return trials > 0 ? std::sqrt(variance / static_cast<double>(trials)) : 0.0;
    }
};

/// Fills mean and variance from the relative probabilities, in order.
inline void summarize(StabilityRecord& r) {
    r.trials = static_cast<int>(r.relative_probabilities.size());
    double sum = 0.0;
    for (double v : r.relative_probabilities) {
        sum += v;
    }
    r.mean = r.trials > 0 ? sum / r.trials : 0.0;
    double ss = 0.0;
    for (double v : r.relative_probabilities) {
        ss += (v - r.mean) * (v - r.mean);
    }
    r.variance = r.trials > 1 ? ss / (r.trials - 1) : 0.0;
}

/// Generator of trial `trial` at error count `n`. It depends only on these
/// three values, so a record can be reproduced without its neighbours.
inline Rng trial_rng(std::uint64_t seed, int n, int trial) {
    return Rng::stream(Rng::stream(seed, static_cast<std::uint64_t>(n)).next_u64(),
                       static_cast<std::uint64_t>(trial));
}

/// One trial, as handed to a StabilityConfig observer.
struct TrialResult {
    int n_errors = 0;
    int trial = 0;
    double probability = 0.0;
    double relative_probability = 0.0;
    bool degenerate = false;
    std::vector<ErrorEvent> events;
};

struct StabilityConfig {
    int L = 5;
    Layout layout = Layout::NonLnn;
    std::vector<int> n_values;  // error counts to visit
    int trials = 50;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> target_j;  // floor(2^(2L)/6) when absent
    std::function<void(const TrialResult&)> observer;
};

/// Error-free probability of `target_j` from the closed-form branch mixture.
inline double oracle_probability(const ModInstance& inst, std::uint64_t target_j) {
    return register_averaged_probability(target_j, inst.L, inst.r);
}

inline double random_output_baseline(int L, double p0) { return std::ldexp(1.0, -2 * L) / p0; }

inline std::vector<StabilityRecord> stability_curve(const Circuit& c, const TrajectorySimulator& sim,
                                                    const StabilityConfig& cfg) {
    if (cfg.trials < 1) {
        throw std::invalid_argument("need at least one trial");
    }
    const int L = c.instance.L;
    const std::uint64_t target = cfg.target_j.value_or(default_target(L));
    const PrefixCache cache(sim, target, 2 * L);
    const double p0 = cache.error_free().probability;
    if (cache.error_free().degenerate || p0 <= 0.0) {
        throw std::domain_error("target has zero probability without faults");
    }
    const double baseline = random_output_baseline(L, oracle_probability(c.instance, target));
    const SiteRange sites = SiteRange::whole(c);
    std::vector<StabilityRecord> out;
    for (int n : cfg.n_values) {
        StabilityRecord rec;
        rec.L = L;
        rec.layout = c.layout;
        rec.n_errors = n;
        rec.baseline = baseline;
        rec.target_j = target;
        rec.seed = cfg.seed;
        for (int k = 0; k < cfg.trials; ++k) {
            Rng rng = trial_rng(cfg.seed, n, k);
            TrialResult tr;
            tr.n_errors = n;
            tr.trial = k;
            tr.events = sample_errors(NoiseSpec::fixed_count(static_cast<std::uint64_t>(n)), sites, rng);
            const Trajectory t = cache.run(tr.events);
            tr.probability = t.probability;
            tr.degenerate = t.degenerate;
            tr.relative_probability = t.probability / p0;
            rec.relative_probabilities.push_back(tr.relative_probability);
            if (cfg.observer) {
                cfg.observer(tr);
            }
        }
        summarize(rec);
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::vector<StabilityRecord> stability_curve(const StabilityConfig& cfg) {
    const Circuit c = build_qpf(table_instance(cfg.L), cfg.layout);
    const TrajectorySimulator sim(c);
    return stability_curve(c, sim, cfg);
}

/// Error counts 0..max_errors, `trials` trials each.
inline std::vector<StabilityRecord> stability_curve(int L, Layout layout, int max_errors,
                                                    int trials = 50, std::uint64_t seed = 0) {
    StabilityConfig cfg;
    cfg.L = L;
    cfg.layout = layout;
    cfg.trials = trials;
    cfg.seed = seed;
    for (int n = 0; n <= max_errors; ++n) {
        cfg.n_values.push_back(n);
    }
    return stability_curve(cfg);
}

/// Smallest error count whose mean is within two standard errors of the
/// random-output baseline; nothing if no record gets there.
inline std::optional<int> threshold_estimate(std::vector<StabilityRecord> records) {
    std::sort(records.begin(), records.end(),
              [](const StabilityRecord& a, const StabilityRecord& b) { return a.n_errors < b.n_errors; });
    for (const StabilityRecord& r : records) {
        if (r.mean - r.baseline < 2.0 * r.standard_error()) {
            return r.n_errors;
        }
    }
    return std::nullopt;
}

/// Upper tail of the standard normal distribution.
inline double normal_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

struct TrendTest {
    double spearman_rho = 0.0;  // rank correlation of n with relative probability
    double p_decreasing = 1.0;  // one-sided p-value for a decreasing trend
    double worst_rise_p = 1.0;  // smallest one-sided p-value of a rise between neighbours
    double alpha = 0.05;

    /// Significant decrease overall, and no rise between neighbouring
    /// counts that survives a Bonferroni correction.
    bool non_increasing(std::size_t comparisons) const {
        const double rise_alpha = comparisons > 0 ? alpha / static_cast<double>(comparisons) : alpha;
        return p_decreasing < alpha && worst_rise_p >= rise_alpha;
    }
};

namespace detail {

/// Average ranks, ties sharing the mean of their positions.
inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) {
            ++j;
        }
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            r[order[k]] = avg;
        }
        i = j + 1;
    }
    return r;
}

} // namespace detail

/// Monotone trend test on a stability curve: Spearman correlation over all
/// trials (normal approximation) plus one-sided z tests between neighbours.
inline TrendTest trend_test(std::vector<StabilityRecord> records, double alpha = 0.05) {
    std::sort(records.begin(), records.end(),
              [](const StabilityRecord& a, const StabilityRecord& b) { return a.n_errors < b.n_errors; });
    TrendTest out;
    out.alpha = alpha;
    std::vector<double> xs;
    std::vector<double> ys;
    for (const StabilityRecord& r : records) {
        for (double v : r.relative_probabilities) {
            xs.push_back(r.n_errors);
            ys.push_back(v);
        }
    }
    if (xs.size() > 2) {
        const std::vector<double> rx = detail::ranks(xs);
        const std::vector<double> ry = detail::ranks(ys);
        const double n = static_cast<double>(xs.size());
        const double mean = (n + 1.0) / 2.0;
        double sxy = 0.0;
        double sxx = 0.0;
        double syy = 0.0;
        for (std::size_t i = 0; i < rx.size(); ++i) {
            sxy += (rx[i] - mean) * (ry[i] - mean);
            sxx += (rx[i] - mean) * (rx[i] - mean);
            syy += (ry[i] - mean) * (ry[i] - mean);
        }
        out.spearman_rho = sxx > 0.0 && syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
        out.p_decreasing = normal_tail(-out.spearman_rho * std::sqrt(n - 1.0));
    }
    for (std::size_t i = 1; i < records.size(); ++i) {
        const double rise = records[i].mean - records[i - 1].mean;
        const double se = std::hypot(records[i].standard_error(), records[i - 1].standard_error());
        const double p = se > 0.0 ? normal_tail(rise / se) : (rise > 0.0 ? 0.0 : 1.0);
        out.worst_rise_p = std::min(out.worst_rise_p, p);
    }
    return out;
}

/// True when a record within `sigmas` standard errors of the baseline exists.
inline bool reaches_baseline(const std::vector<StabilityRecord>& records, double sigmas = 3.0) {
    return std::any_of(records.begin(), records.end(), [&](const StabilityRecord& r) {
        return r.n_errors > 0 && std::abs(r.mean - r.baseline) <= sigmas * r.standard_error();
    });
}

/// Largest |mean_a - mean_b| / combined standard error over shared counts.
inline double max_separation(const std::vector<StabilityRecord>& a, const std::vector<StabilityRecord>& b) {
    double worst = 0.0;
    for (const StabilityRecord& ra : a) {
        for (const StabilityRecord& rb : b) {
            if (ra.n_errors != rb.n_errors) {
                continue;
            }
            const double gap = std::abs(ra.mean - rb.mean);
            const double se = std::hypot(ra.standard_error(), rb.standard_error());
            worst = std::max(worst, se > 0.0 ? gap / se : (gap > 0.0 ? std::numeric_limits<double>::infinity() : 0.0));
        }
    }
    return worst;
}

/// True when the bands mean +- sigmas * stderr of the two curves overlap at
/// every shared error count.
inline bool bands_overlap(const std::vector<StabilityRecord>& a, const std::vector<StabilityRecord>& b,
                          double sigmas = 3.0) {
    for (const StabilityRecord& ra : a) {
        for (const StabilityRecord& rb : b) {
            if (ra.n_errors == rb.n_errors &&
                std::abs(ra.mean - rb.mean) > sigmas * (ra.standard_error() + rb.standard_error())) {
                return false;
            }
        }
    }
    return true;
}

struct PrecisionModel {
    enum class Count { LeadingOrder, NonLnnPolynomial, LnnPolynomial };

    int L = 0;
    Count count = Count::LeadingOrder;
    std::int64_t n_p = 0;
    /// P(L) / n_p for P(L) = 1, L, L^2, L^3.
    std::array<double, 4> scalings{};
};

inline std::string count_name(PrecisionModel::Count c) {
    switch (c) {
    case PrecisionModel::Count::LeadingOrder: return "leading_order";
    case PrecisionModel::Count::NonLnnPolynomial: return "non_lnn_polynomial";
    case PrecisionModel::Count::LnnPolynomial: return "lnn_polynomial";
    }
    return "?";
}

/// Required component precision for L = 5..L_max, from the leading-order
/// fault-site count 32 L^3 (2L + 4) and from both depth polynomials.
inline std::vector<PrecisionModel> precision_table(int L_max, int L_min = 5) {
    if (L_max < L_min) {
        throw std::invalid_argument("L_max must be at least " + std::to_string(L_min));
    }
    std::vector<PrecisionModel> out;
    for (int L = L_min; L <= L_max; ++L) {
        for (auto count : {PrecisionModel::Count::LeadingOrder, PrecisionModel::Count::NonLnnPolynomial,
                           PrecisionModel::Count::LnnPolynomial}) {
            PrecisionModel m;
            m.L = L;
            m.count = count;
            switch (count) {
            case PrecisionModel::Count::LeadingOrder: m.n_p = DepthModel::leading_sites(L); break;
            case PrecisionModel::Count::NonLnnPolynomial:
                m.n_p = DepthModel::for_layout(Layout::NonLnn).exact_sites(L);
                break;
            case PrecisionModel::Count::LnnPolynomial:
                m.n_p = DepthModel::for_layout(Layout::Lnn).exact_sites(L);
                break;
            }
            double p = 1.0;
            for (double& s : m.scalings) {
                s = p / static_cast<double>(m.n_p);
                p *= L;
            }
            out.push_back(m);
        }
    }
    return out;
}

/// One sampled run of the factoring demo.
struct FactorAttempt {
    std::uint64_t j = 0;
    std::optional<std::uint64_t> period;
    std::optional<FactorPair> factors;
};

struct FactorSummary {
    ModInstance instance;
    int runs = 0;
    int successes = 0;
    double expected_success = 0.0;  // s(L, r) from the spectrum
    // Spectrum mass of every outcome the post-processing turns into factors.
    // Continued fractions also succeed next to the useful outcomes, so this
    // exceeds expected_success.
    double recoverable_success = 0.0;
    std::vector<FactorAttempt> attempts;

    double rate() const { return runs > 0 ? static_cast<double>(successes) / runs : 0.0; }
};

/// Factors recovered from outcome j, or nothing.
inline std::optional<FactorPair> factors_from_outcome(const ModInstance& inst, std::uint64_t j,
                                                      std::optional<std::uint64_t>* period = nullptr) {
    const auto r = find_period(j, inst.L, inst.N, inst.x);
    if (period) {
        *period = r;
    }
    if (!r) {
        return std::nullopt;
    }
    ModInstance found = inst;
    found.r = *r;
    return recover_factors(found);
}

/// Closed-form probability that one fault-free run yields factors.
inline double recoverable_probability(const ModInstance& inst) {
    double total = 0.0;
    for (std::uint64_t j = 0; j < (std::uint64_t{1} << (2 * inst.L)); ++j) {
        if (factors_from_outcome(inst, j)) {
            total += register_averaged_probability(j, inst.L, inst.r);
        }
    }
    return total;
}

/// Samples `runs` fault-free executions and post-processes each outcome
/// with continued fractions and the gcd step.
inline FactorSummary factor_demo(std::uint64_t N, std::uint64_t x, int runs, std::uint64_t seed,
                                 Layout layout = Layout::NonLnn) {
    FactorSummary out;
    out.instance = make_instance(N, x);
    out.runs = runs;
    out.expected_success = success_probability(make_spectrum_params(out.instance.L, out.instance.r));
    out.recoverable_success = recoverable_probability(out.instance);
    const Circuit c = build_qpf(out.instance, layout);
    const TrajectorySimulator sim(c);
    for (int k = 0; k < runs; ++k) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(k));
        const Trajectory t = sim.run({}, nullptr, &rng);
        FactorAttempt a;
        a.j = value_of(t.bits);
        a.factors = factors_from_outcome(out.instance, a.j, &a.period);
        out.successes += a.factors.has_value() ? 1 : 0;
        out.attempts.push_back(a);
    }
    return out;
}

} // namespace qpf
