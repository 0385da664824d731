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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.
//
//   acceptance [--cli PATH] [--workdir DIR] [--only 1,2,...] [--max-L 8]
//              [--trials 50] [--grid 0,1,2,4,8,16,32,64] [--seed 2026]

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qpf/qpf.hpp"
#include "reference.hpp"

namespace {

using namespace qpf;
using Clock = std::chrono::steady_clock;

struct Options {
    std::string cli;
    std::filesystem::path workdir = "acceptance_out";
    std::set<int> only;
    int max_L = 8;
    int trials = 50;
    std::vector<int> grid{0, 1, 2, 4, 8, 16, 32, 64};
    std::uint64_t seed = 2026;
};

std::vector<int> parse_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(std::stoi(item));
    }
    return out;
}

void note(const char* fmt, auto... args) {
    std::fprintf(stderr, fmt, args...);
    std::fputc('\n', stderr);
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Result {
    bool pass = true;
    std::string detail;
};

// Criterion 1: depth polynomials and constructed depths.
Result depth_formulas() {
    Result r;
    const std::int64_t want[2][4] = {{5639, 9275, 14195, 20591}, {5978, 9766, 14866, 21470}};
    double worst = 0.0;
    for (int L = 5; L <= 8; ++L) {
        for (Layout layout : {Layout::NonLnn, Layout::Lnn}) {
            const DepthModel m = DepthModel::for_layout(layout);
            const std::int64_t formula = m.evaluate(L);
            r.pass = r.pass && formula == want[layout == Layout::Lnn][L - 5];
            const Circuit c = build_qpf(table_instance(L), layout);
            const double dev = 100.0 * static_cast<double>(c.depth_with_measurements() - formula) /
                               static_cast<double>(formula);
            worst = std::max(worst, std::abs(dev));
            r.pass = r.pass && std::abs(dev) <= 5.0 && validate(c).empty();
            note("  L=%d %-7s formula %lld measured %d (%+.2f%%)", L, layout_name(layout).c_str(),
                 static_cast<long long>(formula), c.depth_with_measurements(), dev);
        }
    }
    r.detail = "polynomials exact, worst measured deviation " + io::format_double(std::round(worst * 100) / 100) + "%";
    return r;
}

// Criterion 2: fault-free forced trajectories against the closed form.
Result error_free_correctness(int max_L) {
    Result r;
    double worst = 0.0;
    for (int L = 5; L <= max_L; ++L) {
        const ModInstance inst = table_instance(L);
        for (Layout layout : {Layout::NonLnn, Layout::Lnn}) {
            const auto t0 = Clock::now();
            const Circuit c = build_qpf(inst, layout);
            const TrajectorySimulator sim(c);
            std::vector<std::uint64_t> js = useful_outcomes(inst);
            js.push_back(default_target(L));
            for (std::uint64_t j : js) {
                const auto forced = bits_of(j, 2 * L);
                const double got = sim.run({}, &forced).probability;
                const double err = std::abs(got - register_averaged_probability(j, L, inst.r));
                worst = std::max(worst, err);
                r.pass = r.pass && err < 1e-9;
            }
            note("  L=%d %-7s %zu outcomes checked in %.1fs", L, layout_name(layout).c_str(), js.size(),
                 seconds_since(t0));
        }
    }
    r.detail = "L=5.." + std::to_string(max_L) + " both layouts, worst |p - oracle| = " + io::format_double(worst);
    return r;
}

// Criterion 3: spectrum peaks and closed form against direct summation.
Result spectrum_oracle() {
    Result r;
    const auto probs = full_spectrum(make_spectrum_params(4, 8));
    for (std::size_t j = 0; j < probs.size(); ++j) {
        r.pass = r.pass && (j % 32 == 0 ? probs[j] == 0.125 : probs[j] == 0.0);
    }
    Rng rng(3);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const int L = 2 + static_cast<int>(rng.below(7));
        const std::uint64_t Q = std::uint64_t{1} << (2 * L);
        const std::uint64_t period = 1 + rng.below(std::min<std::uint64_t>(Q - 1, 200));
        const std::uint64_t k0 = rng.below(period);
        const std::uint64_t j = rng.below(Q);
        worst = std::max(worst, std::abs(peak_probability(j, make_spectrum_params(L, period, k0)) -
                                         testing::direct_peak(j, L, period, k0)));
    }
    r.pass = r.pass && worst < 1e-10;
    r.detail = "r=8 peaks exact, worst closed-form error over 1000 cases " + io::format_double(worst);
    return r;
}

// Criterion 4: master-qubit outcome probabilities from the split halves.
Result master_measurement() {
    Rng rng(4);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const int n = 2 + static_cast<int>(rng.below(11));
        const int master = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        std::vector<std::complex<double>> amps(std::size_t{1} << n);
        double total = 0.0;
        for (auto& a : amps) {
            a = {rng.uniform() - 0.5, rng.uniform() - 0.5};
            total += std::norm(a);
        }
        for (auto& a : amps) {
            a /= std::sqrt(total);
        }
        StateVector s(n, amps);
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        const auto [alpha, beta] = s.decompose_by_master(master);
        std::complex<double> overlap = 0.0;
        double norms = 0.0;
        for (std::size_t m = 0; m < alpha.size(); ++m) {
            overlap += std::conj(alpha[m]) * beta[m];
            norms += std::norm(alpha[m]) + std::norm(beta[m]);
        }
        const double cross = std::real(std::polar(1.0, theta) * overlap);
        s.apply(GateOp::phase(master, theta));
        s.apply(GateOp::h(master));
        const int bit = static_cast<int>(rng.below(2));
        const double want = 0.5 * norms + (bit == 0 ? cross : -cross);
        if (want > kDegenerateBranch) {
            worst = std::max(worst, std::abs(s.measure(master, bit, nullptr).probability - want));
        }
    }
    return {worst < 1e-12, "1000 random states, worst deviation " + io::format_double(worst)};
}

// Criterion 5: norm after every gate, fault and measurement of an L=5 run.
Result norm_preservation() {
    const Circuit c = build_qpf(table_instance(5), Layout::Lnn);
    Rng rng(5);
    auto events = sample_errors(NoiseSpec::fixed_count(6), c, rng);
    const auto forced = bits_of(default_target(5), 10);
    StateVector s(c.qubit_count);
    MeasurementRecord rec;
    double gate_drift = 0.0;
    double measure_drift = 0.0;
    std::size_t checks = 0;
    auto it = events.begin();
    for (int t = 0; t < c.depth(); ++t) {
        for (const Block& b : c.layers[static_cast<std::size_t>(t)].blocks) {
            for (const GateOp& g : b.gates) {
                s.apply_gate(g, rec, &forced);
                const double drift = std::abs(s.norm_squared() - 1.0);
                (g.kind == GateKind::Measure ? measure_drift : gate_drift) =
                    std::max(g.kind == GateKind::Measure ? measure_drift : gate_drift, drift);
                ++checks;
            }
        }
        for (; it != events.end() && it->timestep == t; ++it) {
            apply_error(s, *it);
            gate_drift = std::max(gate_drift, std::abs(s.norm_squared() - 1.0));
            ++checks;
        }
    }
    return {gate_drift < 1e-12 && measure_drift < 1e-10,
            std::to_string(checks) + " checks, gate/fault drift " + io::format_double(gate_drift) +
                ", post-measurement drift " + io::format_double(measure_drift)};
}

// Criterion 6: single-X sensitivity map of the first controlled multiplication.
// s is the useful-set success probability. The block average is taken over s
// itself; a site is invariant when s keeps its fault-free value.
Result sensitivity(const Options& opt) {
    const Circuit c = build_qpf(table_instance(5), Layout::Lnn);
    const TrajectorySimulator sim(c);
    const Region& region = c.region("stage0");
    const auto t0 = Clock::now();
    const SensitivityMap m = sensitivity_map(sim, c, region.begin, region.end, Pauli::X, default_target(5));
    io::write_file((opt.workdir / "map_L5_lnn_stage0.csv").string(), io::map_csv(m, sim, c));
    int invariant = 0;
    int harmful = 0;
    for (double v : m.grid) {
        invariant += v > 0.99;
        harmful += v * m.p0 < 0.1;
    }
    const double mean = m.absolute_mean();
    const auto round4 = [](double v) { return io::format_double(std::round(v * 1e4) / 1e4); };
    note("  %zu sites in %.0fs", m.grid.size(), seconds_since(t0));
    return {std::abs(mean - 0.34) <= 0.15 && invariant > 0 && harmful > 0,
            "layers [" + std::to_string(m.begin) + ", " + std::to_string(m.end) + "), " +
                std::to_string(m.grid.size()) + " sites, mean s " + round4(mean) + " (target 0.34 +- 0.15, fault-free " +
                round4(m.p0) + ", mean ratio " + round4(m.mean()) + "), " + std::to_string(invariant) +
                " invariant sites, " + std::to_string(harmful) + " sites with s < 0.1"};
}

using Curves = std::map<std::pair<int, Layout>, std::vector<StabilityRecord>>;

Curves stability_sweep(const Options& opt) {
    Curves out;
    for (int L = 5; L <= opt.max_L; ++L) {
        for (Layout layout : {Layout::NonLnn, Layout::Lnn}) {
            StabilityConfig cfg;
            cfg.L = L;
            cfg.layout = layout;
            cfg.trials = opt.trials;
            cfg.seed = opt.seed;
            const Circuit c = build_qpf(table_instance(L), layout);
            const TrajectorySimulator sim(c);
            std::vector<StabilityRecord> recs;
            const std::string stem = "stability_L" + std::to_string(L) + "_" + layout_name(layout);
            for (int n : opt.grid) {
                const auto t0 = Clock::now();
                cfg.n_values = {n};
                recs.push_back(stability_curve(c, sim, cfg).front());
                note("  L=%d %-7s n=%-3d mean %.5g se %.3g baseline %.5g (%.0fs)", L, layout_name(layout).c_str(),
                     n, recs.back().mean, recs.back().standard_error(), recs.back().baseline, seconds_since(t0));
                cfg.n_values.clear();
                for (const StabilityRecord& r : recs) {
                    cfg.n_values.push_back(r.n_errors);
                }
                io::write_file((opt.workdir / (stem + ".csv")).string(), io::trials_csv(recs));
                io::write_file((opt.workdir / (stem + ".json")).string(), io::stability_json(cfg, recs).dump(2) + "\n");
            }
            out[{L, layout}] = std::move(recs);
        }
    }
    return out;
}

// Criterion 7: properties of the stability curves.
Result stability_properties(const Curves& curves, int max_L) {
    Result r;
    int failures = 0;
    for (const auto& [key, recs] : curves) {
        const auto [L, layout] = key;
        bool unit = false;
        for (const StabilityRecord& rec : recs) {
            unit = unit || (rec.n_errors == 0 && rec.mean == 1.0 && rec.variance == 0.0);
        }
        const TrendTest trend = trend_test(recs);
        const bool monotone = trend.non_increasing(recs.size() - 1);
        const bool baseline = reaches_baseline(recs, 3.0);
        bool overlap = true;
        if (layout == Layout::Lnn) {
            overlap = bands_overlap(recs, curves.at({L, Layout::NonLnn}), 3.0);
        }
        const bool ok = unit && monotone && baseline && overlap;
        failures += ok ? 0 : 1;
        note("  L=%d %-7s n=0 exact %s, trend rho %.3f p %.2g worst-rise p %.2g %s, baseline %s%s", L,
             layout_name(layout).c_str(), unit ? "yes" : "no", trend.spearman_rho, trend.p_decreasing,
             trend.worst_rise_p, monotone ? "ok" : "FAIL", baseline ? "reached" : "NOT reached",
             layout == Layout::Lnn ? (overlap ? ", bands overlap non_lnn" : ", bands DO NOT overlap non_lnn") : "");
    }
    r.pass = failures == 0;
    r.detail = "L=5.." + std::to_string(max_L) + " both layouts, " + std::to_string(curves.size() - failures) + "/" +
               std::to_string(curves.size()) + " curves satisfy all properties";
    return r;
}

// Criterion 8: thresholds weakly non-decreasing in L, per layout.
Result threshold_monotonicity(const Curves& curves) {
    Result r;
    std::string detail;
    for (Layout layout : {Layout::NonLnn, Layout::Lnn}) {
        int previous = -1;
        detail += layout_name(layout) + ":";
        for (const auto& [key, recs] : curves) {
            if (key.second != layout) {
                continue;
            }
            const auto th = threshold_estimate(recs);
            detail += " L" + std::to_string(key.first) + "=" + (th ? std::to_string(*th) : std::string("none"));
            r.pass = r.pass && th.has_value() && *th >= previous;
            previous = th ? *th : previous;
        }
        detail += layout == Layout::NonLnn ? "; " : "";
    }
    r.detail = detail;
    return r;
}

// Criterion 9: precision table at L = 10.
Result precision() {
    Result r;
    const auto table = precision_table(10);
    const double want[] = {1.3e-6, 1.3e-5, 1.3e-4, 1.3e-3};
    std::string detail;
    for (const PrecisionModel& m : table) {
        if (m.L != 10) {
            continue;
        }
        detail += count_name(m.count) + " (n_p=" + std::to_string(m.n_p) + "):";
        for (std::size_t k = 0; k < 4; ++k) {
            char buf[32];
            std::snprintf(buf, sizeof buf, " %.2g", m.scalings[k]);
            detail += buf;
            if (m.count == PrecisionModel::Count::LeadingOrder) {
                r.pass = r.pass && std::abs(std::strtod(buf, nullptr) - want[k]) <= want[k] * 1e-9;
            }
        }
        detail += "; ";
    }
    r.detail = detail;
    return r;
}

std::string shell_quote(const std::string& s) { return "'" + s + "'"; }

// Criterion 10: sampled fault-free runs factor 247.
Result factoring(const Options& opt) {
    const int runs = 200;
    FactorSummary s;
    if (!opt.cli.empty()) {
        const auto out = opt.workdir / "factor_247_27.json";
        const std::string cmd = shell_quote(opt.cli) + " factor --N 247 --x 27 --runs 200 --seed " +
                                std::to_string(opt.seed) + " --out " + shell_quote(out.string());
        if (std::system(cmd.c_str()) != 0) {
            return {false, "CLI factor run failed"};
        }
        const io::json j = io::json::parse(io::read_file(out.string()));
        s.runs = j.at("runs").get<int>();
        s.successes = j.at("successes").get<int>();
        s.expected_success = j.at("expected_success").get<double>();
        s.recoverable_success = j.at("recoverable_success").get<double>();
        for (const io::json& a : j.at("attempts")) {
            FactorAttempt fa;
            if (!a.at("factors").is_null()) {
                fa.factors = FactorPair{a.at("factors")[0].get<std::uint64_t>(), a.at("factors")[1].get<std::uint64_t>()};
            }
            s.attempts.push_back(fa);
        }
    } else {
        s = factor_demo(247, 27, runs, opt.seed);
    }
    bool correct = true;
    for (const FactorAttempt& a : s.attempts) {
        if (a.factors) {
            correct = correct && std::min(a.factors->N1, a.factors->N2) == 13 && std::max(a.factors->N1, a.factors->N2) == 19;
        }
    }
    const double sigma = std::sqrt(s.expected_success * (1 - s.expected_success) / s.runs);
    const bool rate_ok = std::abs(s.rate() - s.expected_success) <= 3 * sigma;
    return {correct && s.successes > 0 && rate_ok,
            std::to_string(s.successes) + "/" + std::to_string(s.runs) + " runs gave 13 x 19, rate " +
                io::format_double(s.rate()) + " vs s(8, 6) = " +
                io::format_double(std::round(s.expected_success * 1e4) / 1e4) + " +- 3 sigma " +
                io::format_double(std::round(3 * sigma * 1e4) / 1e4) + "; exact mass of outcomes that factor " +
                io::format_double(std::round(s.recoverable_success * 1e4) / 1e4)};
}

// Criterion 11: reruns with the same seed give byte-identical CSV.
Result reproducibility(const Options& opt) {
    std::vector<std::string> texts;
    for (int k = 0; k < 2; ++k) {
        if (!opt.cli.empty()) {
            const auto out = opt.workdir / ("repro_" + std::to_string(k) + ".csv");
            const std::string cmd = shell_quote(opt.cli) + " stability --L 5 --layout lnn --grid 0,2,6 --trials 10 --seed " +
                                    std::to_string(opt.seed) + " --out " + shell_quote(out.string()) + " 2>/dev/null";
            if (std::system(cmd.c_str()) != 0) {
                return {false, "CLI stability run failed"};
            }
            texts.push_back(io::read_file(out.string()));
        } else {
            StabilityConfig cfg;
            cfg.L = 5;
            cfg.layout = Layout::Lnn;
            cfg.n_values = {0, 2, 6};
            cfg.trials = 10;
            cfg.seed = opt.seed;
            texts.push_back(io::trials_csv(stability_curve(cfg)));
        }
    }
    StabilityConfig cfg;
    cfg.L = 5;
    cfg.layout = Layout::Lnn;
    cfg.n_values = {0, 2, 6};
    cfg.trials = 10;
    cfg.seed = opt.seed;
    const std::string in_process = io::trials_csv(stability_curve(cfg));
    const bool same = texts[0] == texts[1] && texts[0] == in_process;
    return {same, std::to_string(texts[0].size()) + " bytes, " +
                      (same ? std::string("identical across two CLI runs and the library")
                            : std::string("outputs differ"))};
}

} // namespace

int main(int argc, char** argv) {
    Options opt;
    for (int i = 1; i < argc; i += 2) {
        const std::string key = argv[i];
        if (key == "--help" || i + 1 == argc) {
            std::fprintf(key == "--help" ? stdout : stderr,
                         "usage: acceptance [--cli PATH] [--workdir DIR] [--only 1,2,...] [--max-L 8]\n"
                         "                  [--trials 50] [--grid 0,1,2,...] [--seed 2026]\n");
            return key == "--help" ? 0 : 2;
        }
        const std::string value = argv[i + 1];
        if (key == "--cli") {
            opt.cli = value;
        } else if (key == "--workdir") {
            opt.workdir = value;
        } else if (key == "--only") {
            for (int c : parse_list(value)) {
                opt.only.insert(c);
            }
        } else if (key == "--max-L") {
            opt.max_L = std::stoi(value);
        } else if (key == "--trials") {
            opt.trials = std::stoi(value);
        } else if (key == "--grid") {
            opt.grid = parse_list(value);
        } else if (key == "--seed") {
            opt.seed = std::stoull(value);
        } else {
            std::fprintf(stderr, "unknown option %s\n", key.c_str());
            return 2;
        }
    }
    std::filesystem::create_directories(opt.workdir);
    setvbuf(stdout, nullptr, _IOLBF, 0);

    const auto wanted = [&](int c) { return opt.only.empty() || opt.only.contains(c); };
    int failed = 0;
    const auto report = [&](int c, const char* title, const auto& fn) {
        if (!wanted(c)) {
            return;
        }
        const auto t0 = Clock::now();
        Result r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        failed += r.pass ? 0 : 1;
        std::printf("[%s] criterion %d: %s - %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", c, title, r.detail.c_str(),
                    seconds_since(t0));
    };

    report(1, "depth formulas", depth_formulas);
    report(3, "spectrum oracle", spectrum_oracle);
    report(4, "master-qubit measurement", master_measurement);
    report(5, "norm preservation", norm_preservation);
    report(9, "precision table", precision);
    report(11, "reproducibility", [&] { return reproducibility(opt); });
    report(2, "fault-free correctness", [&] { return error_free_correctness(opt.max_L); });
    report(10, "factoring demo", [&] { return factoring(opt); });
    report(6, "sensitivity map", [&] { return sensitivity(opt); });
    if (wanted(7) || wanted(8)) {
        Curves curves;
        try {
            curves = stability_sweep(opt);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "stability sweep failed: %s\n", e.what());
        }
        report(7, "stability curves", [&] {
            return curves.empty() ? Result{false, "no curves"} : stability_properties(curves, opt.max_L);
        });
        report(8, "threshold monotonicity", [&] {
            return curves.empty() ? Result{false, "no curves"} : threshold_monotonicity(curves);
        });
    }
    return failed == 0 ? 0 : 1;
}
