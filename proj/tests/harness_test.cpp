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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>

#include "qpf/harness.hpp"
#include "reference.hpp"

namespace qpf {
namespace {

const Circuit& tiny(Layout layout) {
    static const Circuit non = build_qpf(make_instance(7, 3, 3), Layout::NonLnn);
    static const Circuit lnn = build_qpf(make_instance(7, 3, 3), Layout::Lnn);
    return layout == Layout::Lnn ? lnn : non;
}

TEST(TargetProbability, FaultFreeMatchesOracle) {
    for (Layout layout : {Layout::NonLnn, Layout::Lnn}) {
        const Circuit c = build_qpf(table_instance(5), layout);
        const TargetProbability t = target_probability(c, {}, default_target(5));
        EXPECT_FALSE(t.degenerate);
        EXPECT_NEAR(t.probability, oracle_probability(c.instance, default_target(5)), 1e-9);
    }
    EXPECT_THROW(target_probability(tiny(Layout::Lnn), {}, 64), std::out_of_range);
}

// A Z on a qubit that is in a computational basis state only changes the
// global phase, however many such faults are injected.
TEST(TargetProbability, PhaseFaultsOnBasisQubitsAreHarmless) {
    for (Layout layout : {Layout::NonLnn, Layout::Lnn}) {
        const Circuit& c = tiny(layout);
        const std::uint64_t j = default_target(3);
        const auto forced = bits_of(j, 6);
        std::vector<ErrorEvent> events;
        testing::dense_run(c, forced, {}, [&](int t, const StateVector& s) {
            for (int q = 0; q < c.qubit_count; ++q) {
                double p1 = 0.0;
                for (std::size_t i = 0; i < s.size(); ++i) {
                    if ((i >> q) & 1U) {
                        p1 += std::norm(s[i]);
                    }
                }
                p1 /= s.norm_squared();
                if (p1 < 1e-14 || p1 > 1.0 - 1e-14) {
                    events.push_back({t, q, Pauli::Z});
                }
            }
        });
        ASSERT_GT(events.size(), 100u);
        const double clean = target_probability(c, {}, j).probability;
        EXPECT_NEAR(target_probability(c, events, j).probability, clean, 1e-9);
        // The same sites with X faults are not harmless.
        for (ErrorEvent& e : events) {
            e.pauli = Pauli::X;
        }
        EXPECT_GT(std::abs(target_probability(c, events, j).probability - clean), 1e-6);
    }
}

TEST(OutcomeSet, AllOutcomesSumToOne) {
    const Circuit& c = tiny(Layout::Lnn);
    const TrajectorySimulator sim(c);
    std::vector<std::uint64_t> all(64);
    for (std::uint64_t j = 0; j < 64; ++j) {
        all[j] = j;
    }
    EXPECT_NEAR(outcome_set_probability(sim, c, sim.start(), {}, all), 1.0, 1e-10);
    const std::vector<ErrorEvent> ev{{5, 1, Pauli::X}, {40, 3, Pauli::XZ}};
    EXPECT_NEAR(outcome_set_probability(sim, c, sim.start(), ev, all), 1.0, 1e-10);
}

TEST(OutcomeSet, EqualsSumOfForcedRuns) {
    const Circuit& c = tiny(Layout::NonLnn);
    const TrajectorySimulator sim(c);
    const auto useful = useful_outcomes(c.instance);
    const std::vector<ErrorEvent> ev{{30, 4, Pauli::X}};
    double sum = 0.0;
    for (std::uint64_t j : useful) {
        const auto forced = bits_of(j, 6);
        sum += testing::dense_run(c, forced, ev).probability;
    }
    EXPECT_NEAR(outcome_set_probability(sim, c, sim.start(), ev, useful), sum, 1e-10);
    EXPECT_NEAR(outcome_set_probability(sim, c, sim.start(), {}, useful),
                success_probability(make_spectrum_params(3, 6)), 0.05);
}

TEST(PrefixCache, MatchesFullRuns) {
    const Circuit c = build_qpf(make_instance(15, 7, 4), Layout::Lnn);
    const TrajectorySimulator sim(c);
    const PrefixCache cache(sim, 64, 8, 7);
    const auto forced = bits_of(64, 8);
    // Resuming from a snapshot regroups the fused gate runs, so only
    // rounding may differ.
    EXPECT_NEAR(cache.error_free().probability, sim.run({}, &forced).probability, 1e-13);
    Rng rng(31);
    for (int k = 0; k < 10; ++k) {
        const auto ev = sample_errors(NoiseSpec::fixed_count(static_cast<std::uint64_t>(1 + k % 3)), c, rng);
        EXPECT_NEAR(cache.run(ev).probability, sim.run(ev, &forced).probability, 1e-13);
    }
}

TEST(SensitivityMap, EmptyRegion) {
    const Circuit& c = tiny(Layout::Lnn);
    const SensitivityMap m = sensitivity_map(c, Region{"empty", 3, 3}, Pauli::X, default_target(3));
    EXPECT_EQ(m.length(), 0);
    EXPECT_TRUE(m.grid.empty());
}

TEST(SensitivityMap, SitesMatchDenseOracle) {
    const Circuit& c = tiny(Layout::Lnn);
    const TrajectorySimulator sim(c);
    const std::uint64_t j = default_target(3);
    const Region r{"window", 20, 26};
    const SensitivityMap target = sensitivity_map(sim, c, r.begin, r.end, Pauli::X, j, SensitivityMeasure::Target);
    const SensitivityMap useful = sensitivity_map(sim, c, r.begin, r.end, Pauli::X, j, SensitivityMeasure::UsefulSet);
    ASSERT_EQ(target.grid.size(), static_cast<std::size_t>(c.qubit_count * r.length()));
    const auto outcomes = useful_outcomes(c.instance);
    const auto dense_set = [&](const std::vector<ErrorEvent>& ev, const std::vector<std::uint64_t>& js) {
        double p = 0.0;
        for (std::uint64_t v : js) {
            p += testing::dense_run(c, bits_of(v, 6), ev).probability;
        }
        return p;
    };
    const double p0 = dense_set({}, {j});
    const double s0 = dense_set({}, outcomes);
    for (int t = r.begin; t < r.end; t += 2) {
        for (int q = 0; q < c.qubit_count; q += 3) {
            EXPECT_NEAR(target.at(q, t), dense_set({{t, q, Pauli::X}}, {j}) / p0, 1e-9);
            EXPECT_NEAR(useful.at(q, t), dense_set({{t, q, Pauli::X}}, outcomes) / s0, 1e-9);
        }
    }
    EXPECT_THROW(sensitivity_map(sim, c, 5, c.depth() + 1, Pauli::X, j), std::out_of_range);
}

TEST(Stability, FaultFreeRecordIsExactlyOne) {
    StabilityConfig cfg;
    cfg.L = 5;
    cfg.layout = Layout::NonLnn;
    cfg.n_values = {0, 1, 3};
    cfg.trials = 4;
    cfg.seed = 77;
    const auto recs = stability_curve(cfg);
    ASSERT_EQ(recs.size(), 3u);
    EXPECT_EQ(recs[0].mean, 1.0);
    EXPECT_EQ(recs[0].variance, 0.0);
    for (const StabilityRecord& r : recs) {
        EXPECT_EQ(r.trials, 4);
        EXPECT_EQ(r.relative_probabilities.size(), 4u);
        EXPECT_DOUBLE_EQ(r.baseline, std::ldexp(1.0, -10) / register_averaged_probability(170, 5, 6));
        double sum = 0.0;
        for (double v : r.relative_probabilities) {
            EXPECT_GE(v, 0.0);
            sum += v;
        }
        EXPECT_DOUBLE_EQ(r.mean, sum / 4);
    }
}

TEST(Stability, SeedReproducesRecordsBitForBit) {
    StabilityConfig cfg;
    cfg.L = 5;
    cfg.layout = Layout::Lnn;
    cfg.n_values = {2, 5};
    cfg.trials = 3;
    cfg.seed = 5;
    const Circuit c = build_qpf(table_instance(5), cfg.layout);
    const TrajectorySimulator sim(c);
    const auto a = stability_curve(c, sim, cfg);
    const auto b = stability_curve(c, sim, cfg);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].relative_probabilities, b[i].relative_probabilities);
    }
    // A record depends only on its own error count.
    StabilityConfig only = cfg;
    only.n_values = {5};
    EXPECT_EQ(stability_curve(c, sim, only)[0].relative_probabilities, a[1].relative_probabilities);
    cfg.seed = 6;
    EXPECT_NE(stability_curve(c, sim, cfg)[1].relative_probabilities, a[1].relative_probabilities);
}

TEST(Stability, ObserverSeesEveryTrial) {
    StabilityConfig cfg;
    cfg.L = 5;
    cfg.n_values = {2};
    cfg.trials = 3;
    std::vector<TrialResult> seen;
    cfg.observer = [&](const TrialResult& t) { seen.push_back(t); };
    const auto recs = stability_curve(cfg);
    ASSERT_EQ(seen.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(seen[k].events.size(), 2u);
        EXPECT_EQ(seen[k].relative_probability, recs[0].relative_probabilities[k]);
    }
}

StabilityRecord synthetic(int n, double mean, double se, double baseline, int trials = 50) {
    StabilityRecord r;
    r.L = 5;
    r.n_errors = n;
    // Two-point sample with the requested mean and standard error.
    const double spread = se * std::sqrt(static_cast<double>(trials)) * std::sqrt((trials - 1.0) / trials);
    for (int k = 0; k < trials; ++k) {
        r.relative_probabilities.push_back(mean + (k % 2 == 0 ? spread : -spread));
    }
    r.baseline = baseline;
    summarize(r);
    return r;
}

TEST(Threshold, AllAtBaselineGivesZero) {
    std::vector<StabilityRecord> recs;
    for (int n = 0; n < 5; ++n) {
        recs.push_back(synthetic(n, 0.01, 0.001, 0.01));
    }
    EXPECT_EQ(threshold_estimate(recs), 0);
}

TEST(Threshold, SyntheticDecay) {
    const double baseline = 0.02;
    const double se = 1e-4;
    std::vector<StabilityRecord> recs;
    for (int n = 0; n <= 20; ++n) {
        recs.push_back(synthetic(n, baseline + (1.0 - baseline) * std::ldexp(1.0, -n), se, baseline));
    }
    int want = 0;
    while ((1.0 - baseline) * std::ldexp(1.0, -want) >= 2 * recs[static_cast<std::size_t>(want)].standard_error()) {
        ++want;
    }
    ASSERT_TRUE(threshold_estimate(recs).has_value());
    EXPECT_EQ(*threshold_estimate(recs), want);
    recs.resize(5);
    EXPECT_FALSE(threshold_estimate(recs).has_value());
}

TEST(TrendTest, DetectsDecreaseAndRejectsRise) {
    std::vector<StabilityRecord> down, up;
    for (int n : {0, 1, 2, 4, 8}) {
        down.push_back(synthetic(n, std::ldexp(1.0, -n), 0.01, 0.0));
        up.push_back(synthetic(n, n == 4 ? 2.0 : std::ldexp(1.0, -n), 0.01, 0.0));
    }
    const TrendTest d = trend_test(down);
    EXPECT_LT(d.spearman_rho, 0.0);
    EXPECT_TRUE(d.non_increasing(down.size() - 1));
    EXPECT_FALSE(trend_test(up).non_increasing(up.size() - 1));
}

TEST(Bands, OverlapAndSeparation) {
    const std::vector<StabilityRecord> a{synthetic(1, 0.50, 0.01, 0.0)};
    const std::vector<StabilityRecord> b{synthetic(1, 0.55, 0.01, 0.0)};
    const std::vector<StabilityRecord> far{synthetic(1, 0.70, 0.01, 0.0)};
    EXPECT_TRUE(bands_overlap(a, b));
    EXPECT_FALSE(bands_overlap(a, far));
    EXPECT_NEAR(max_separation(a, b), 0.05 / std::hypot(0.01, 0.01), 1e-6);
    EXPECT_TRUE(reaches_baseline({synthetic(3, 0.001, 0.001, 0.002)}));
    EXPECT_FALSE(reaches_baseline({synthetic(3, 0.1, 0.001, 0.002)}));
}

TEST(PrecisionTable, LeadingOrderColumnAtTen) {
    const auto table = precision_table(10);
    ASSERT_EQ(table.size(), 6u * 3u);
    const PrecisionModel& m = table[table.size() - 3];
    ASSERT_EQ(m.L, 10);
    ASSERT_EQ(m.count, PrecisionModel::Count::LeadingOrder);
    const double want[] = {1.3e-6, 1.3e-5, 1.3e-4, 1.3e-3};
    for (int k = 0; k < 4; ++k) {
        const double v = m.scalings[static_cast<std::size_t>(k)];
        const double scale = std::pow(10.0, std::floor(std::log10(v)) - 1);
        EXPECT_NEAR(std::round(v / scale) * scale, want[k], want[k] * 1e-9) << v;
    }
    for (const PrecisionModel& row : table) {
        for (std::size_t k = 1; k < 4; ++k) {
            EXPECT_NEAR(row.scalings[k] / row.scalings[k - 1], row.L, 1e-12);
        }
    }
    EXPECT_THROW(precision_table(4), std::invalid_argument);
}

TEST(FactorDemo, SmallInstanceFactorsAtExpectedRate) {
    const FactorSummary s = factor_demo(15, 7, 100, 3);
    EXPECT_EQ(s.instance.r, 4u);
    for (const FactorAttempt& a : s.attempts) {
        if (a.factors) {
            EXPECT_EQ(a.factors->N1 * a.factors->N2, 15u);
        }
    }
    const double sigma = std::sqrt(s.expected_success * (1 - s.expected_success) / s.runs);
    EXPECT_NEAR(s.rate(), s.expected_success, 3 * sigma + 1e-12);
    // r divides 2^(2L): only the exact peaks occur, and all of them factor
    // except j = 0.
    EXPECT_NEAR(s.recoverable_success, s.expected_success, 1e-12);
}

TEST(FactorDemo, OutcomesBesideUsefulOnesAlsoFactor) {
    // Continued fractions find c / 6 from any j closer than 2^(2L) / 72, so
    // the neighbours of the useful outcomes give the period too.
    const ModInstance five = table_instance(5);
    for (std::uint64_t j : useful_outcomes(five)) {
        for (std::uint64_t d : {2u, 3u}) {
            EXPECT_EQ(find_period(j + d, 5, five.N, five.x), five.r) << j << " + " << d;
            EXPECT_EQ(find_period(j - d, 5, five.N, five.x), five.r) << j << " - " << d;
        }
    }
    // 8^3 = -1 mod 27, so this instance never splits.
    EXPECT_EQ(recoverable_probability(five), 0.0);

    const ModInstance six = table_instance(6);
    const double useful = success_probability(make_spectrum_params(6, six.r));
    const double p = recoverable_probability(six);
    EXPECT_GT(p, useful);
    const FactorSummary s = factor_demo(six.N, six.x, 60, 4);
    EXPECT_EQ(s.recoverable_success, p);
    EXPECT_NEAR(s.rate(), p, 3 * std::sqrt(p * (1 - p) / s.runs));
}

} // namespace
} // namespace qpf
