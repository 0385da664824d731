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

// Command line front end. Exit status: 0 on success, 1 on bad input or I/O
// failure, 2 when a result breaks an invariant.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "qpf/qpf.hpp"

namespace {

using qpf::io::json;

struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw InvariantViolation(what);
    }
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        qpf::io::write_file(path, text);
    }
}

std::string replace_extension(const std::string& path, const std::string& ext) {
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return path + ext;
    }
    return path.substr(0, dot) + ext;
}

std::vector<qpf::Layout> layouts_of(const std::string& s) {
    if (s == "both") {
        return {qpf::Layout::NonLnn, qpf::Layout::Lnn};
    }
    return {qpf::parse_layout(s)};
}

// Region given by name ("stage0", "stage0.mac", ...) or as begin:end.
qpf::Region region_of(const qpf::Circuit& c, const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) {
        return c.region(s);
    }
    qpf::Region r{s, std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
    if (r.begin < 0 || r.end < r.begin || r.end > c.depth()) {
        throw std::out_of_range("region " + s + " outside the circuit (depth " + std::to_string(c.depth()) + ")");
    }
    return r;
}

void check_record(const qpf::StabilityRecord& r) {
    for (double v : r.relative_probabilities) {
        require(std::isfinite(v) && v >= 0.0, "relative probability " + qpf::io::format_double(v) + " at n=" +
                                                   std::to_string(r.n_errors) + " is negative or not finite");
    }
    if (r.n_errors == 0) {
        require(r.mean == 1.0 && r.variance == 0.0, "fault-free record is not exactly 1");
    }
}

int run_spectrum(int L, std::uint64_t r, std::uint64_t k0, bool mixture, const std::string& out) {
    const qpf::SpectrumParams p = qpf::make_spectrum_params(L, r, k0);
    std::vector<double> probs = qpf::full_spectrum(p);
    if (mixture) {
        for (std::uint64_t j = 0; j < probs.size(); ++j) {
            probs[j] = qpf::register_averaged_probability(j, L, r);
        }
    }
    double total = 0.0;
    for (double v : probs) {
        total += v;
    }
    require(std::abs(total - 1.0) < 1e-9, "spectrum sums to " + qpf::io::format_double(total));
    emit(out, qpf::io::spectrum_csv(probs));
    return 0;
}

int run_depth(const std::vector<int>& Ls, const std::string& layout, const std::string& out) {
    std::string csv = "L,layout,qubits,gates,depth,depth_with_measurements,formula,deviation_percent\n";
    for (int L : Ls) {
        for (qpf::Layout l : layouts_of(layout)) {
            const qpf::Circuit c = qpf::build_qpf(qpf::table_instance(L), l);
            const std::string problem = qpf::validate(c);
            require(problem.empty(), "circuit L=" + std::to_string(L) + " " + qpf::layout_name(l) + ": " + problem);
            const std::int64_t formula = qpf::DepthModel::for_layout(l).evaluate(L);
            const double dev = 100.0 * static_cast<double>(c.depth_with_measurements() - formula) /
                               static_cast<double>(formula);
            csv += std::to_string(L) + "," + qpf::layout_name(l) + "," + std::to_string(c.qubit_count) + "," +
                   std::to_string(c.gate_count()) + "," + std::to_string(c.depth()) + "," +
                   std::to_string(c.depth_with_measurements()) + "," + std::to_string(formula) + "," +
                   qpf::io::format_double(dev) + "\n";
        }
    }
    emit(out, csv);
    return 0;
}

struct MapArgs {
    int L = 5;
    std::string layout = "lnn";
    std::string pauli = "X";
    std::string region = "stage0";
    std::string measure = "useful";
    std::optional<std::uint64_t> target;
    std::string out;
};

int run_map(const MapArgs& a) {
    const qpf::Circuit c = qpf::build_qpf(qpf::table_instance(a.L), qpf::parse_layout(a.layout));
    const qpf::TrajectorySimulator sim(c);
    const qpf::Region r = region_of(c, a.region);
    const qpf::SensitivityMap m =
        qpf::sensitivity_map(sim, c, r.begin, r.end, qpf::parse_pauli(a.pauli),
                             a.target.value_or(qpf::default_target(a.L)), qpf::parse_measure(a.measure));
    for (double v : m.grid) {
        require(std::isfinite(v) && v >= 0.0, "map value " + qpf::io::format_double(v) + " is invalid");
    }
    emit(a.out, qpf::io::map_csv(m, sim, c));
    std::fprintf(stderr, "region %s [%d, %d): %zu sites, mean s = %.6f, mean success = %.6f (fault-free %.6f)\n",
                 a.region.c_str(), m.begin, m.end, m.grid.size(), m.mean(), m.absolute_mean(), m.p0);
    return 0;
}

struct StabilityArgs {
    int L = 5;
    std::string layout = "non_lnn";
    int max_errors = 8;
    std::vector<int> grid;
    int trials = 50;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> target;
    std::string out;
    std::string summary;
    std::string dump;
};

int run_stability(const StabilityArgs& a) {
    qpf::StabilityConfig cfg;
    cfg.L = a.L;
    cfg.layout = qpf::parse_layout(a.layout);
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.target_j = a.target;
    cfg.n_values = a.grid;
    if (cfg.n_values.empty()) {
        for (int n = 0; n <= a.max_errors; ++n) {
            cfg.n_values.push_back(n);
        }
    }
    const qpf::Circuit c = qpf::build_qpf(qpf::table_instance(a.L), cfg.layout);
    const qpf::TrajectorySimulator sim(c);

    qpf::io::TrialDump dump{a.L, cfg.layout, cfg.target_j.value_or(qpf::default_target(a.L)), {}};
    const std::string summary = !a.summary.empty() ? a.summary
                                : (a.out.empty() || a.out == "-") ? std::string()
                                                                  : replace_extension(a.out, ".json");
    // Records are written after each error count so an interrupted sweep
    // keeps what it finished.
    std::vector<qpf::StabilityRecord> records;
    for (int n : cfg.n_values) {
        qpf::StabilityConfig one = cfg;
        one.n_values = {n};
        if (!a.dump.empty()) {
            one.observer = [&](const qpf::TrialResult& t) { dump.trials.push_back(t); };
        }
        qpf::StabilityRecord rec = qpf::stability_curve(c, sim, one).front();
        std::fprintf(stderr, "n=%d mean %.6g se %.3g baseline %.6g\n", n, rec.mean, rec.standard_error(),
                     rec.baseline);
        records.push_back(std::move(rec));
        if (!a.out.empty() && a.out != "-") {
            qpf::io::write_file(a.out, qpf::io::trials_csv(records));
        }
        if (!summary.empty()) {
            qpf::io::write_file(summary, qpf::io::stability_json(cfg, records).dump(2) + "\n");
        }
        if (!a.dump.empty()) {
            qpf::io::write_file(a.dump, qpf::io::to_json(dump).dump(2) + "\n");
        }
    }
    if (a.out.empty() || a.out == "-") {
        std::cout << qpf::io::trials_csv(records);
    }
    for (const qpf::StabilityRecord& r : records) {
        check_record(r);
    }
    return 0;
}

int run_threshold(const std::vector<std::string>& inputs, const std::string& out) {
    std::map<std::pair<int, int>, std::vector<qpf::StabilityRecord>> curves;
    for (const std::string& path : inputs) {
        for (qpf::StabilityRecord& r : qpf::io::records_from_json(json::parse(qpf::io::read_file(path)))) {
            check_record(r);
            curves[{static_cast<int>(r.layout), r.L}].push_back(std::move(r));
        }
    }
    std::vector<std::vector<qpf::StabilityRecord>> list;
    for (auto& [key, curve] : curves) {
        list.push_back(std::move(curve));
    }
    emit(out, qpf::io::thresholds_csv(list));
    return 0;
}

int run_precision(int L_max, int L_min, const std::string& out) {
    const auto table = qpf::precision_table(L_max, L_min);
    for (const qpf::PrecisionModel& m : table) {
        for (std::size_t k = 1; k < m.scalings.size(); ++k) {
            require(m.scalings[k] > m.scalings[k - 1], "precision not increasing with degree at L=" +
                                                           std::to_string(m.L));
        }
    }
    emit(out, qpf::io::precision_csv(table));
    return 0;
}

int run_factor(std::uint64_t N, std::uint64_t x, int runs, std::uint64_t seed, const std::string& layout,
               const std::string& out) {
    const qpf::FactorSummary s = qpf::factor_demo(N, x, runs, seed, qpf::parse_layout(layout));
    for (const qpf::FactorAttempt& a : s.attempts) {
        if (a.factors) {
            require(a.factors->N1 * a.factors->N2 == N && a.factors->N1 > 1 && a.factors->N2 > 1,
                    "recovered factors do not split N");
        }
    }
    emit(out, qpf::io::to_json(s).dump(2) + "\n");
    const double sigma = std::sqrt(s.expected_success * (1.0 - s.expected_success) / std::max(1, s.runs));
    std::fprintf(stderr,
                 "N=%llu x=%llu r=%llu: %d/%d runs factored (rate %.4f, useful-set %.4f +- %.4f, "
                 "all factoring outcomes %.4f)\n",
                 static_cast<unsigned long long>(N), static_cast<unsigned long long>(x),
                 static_cast<unsigned long long>(s.instance.r), s.successes, s.runs, s.rate(), s.expected_success,
                 sigma, s.recoverable_success);
    return 0;
}

// Reruns dumped trials and checks that each reproduces its recorded value.
int run_replay(const std::string& in, const std::string& out) {
    const qpf::io::TrialDump d = qpf::io::dump_from_json(json::parse(qpf::io::read_file(in)));
    const qpf::Circuit c = qpf::build_qpf(qpf::table_instance(d.L), d.layout);
    const qpf::TrajectorySimulator sim(c);
    // Same evaluation path as the stability runs, so values match exactly.
    const qpf::PrefixCache cache(sim, d.target_j, 2 * d.L);
    const double p0 = cache.error_free().probability;
    std::string csv = "n_errors,trial,recorded,replayed\n";
    bool all_match = true;
    for (const qpf::TrialResult& t : d.trials) {
        const double rel = cache.run(t.events).probability / p0;
        all_match = all_match && rel == t.relative_probability;
        csv += std::to_string(t.n_errors) + "," + std::to_string(t.trial) + "," +
               qpf::io::format_double(t.relative_probability) + "," + qpf::io::format_double(rel) + "\n";
    }
    emit(out, csv);
    require(all_match, "replayed trials differ from the recorded values");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Period finding circuits under discrete Pauli faults"};
    app.require_subcommand(1);

    int sp_L = 4;
    std::uint64_t sp_r = 8;
    std::uint64_t sp_k0 = 0;
    bool sp_mixture = false;
    std::string sp_out;
    auto* spectrum = app.add_subcommand("spectrum", "Closed-form output distribution, CSV j,probability");
    spectrum->add_option("--L", sp_L, "Register width L")->required();
    spectrum->add_option("--r", sp_r, "Period")->required();
    spectrum->add_option("--k0", sp_k0, "Offset of the surviving branch");
    spectrum->add_flag("--mixture", sp_mixture, "Average over every branch instead of one");
    spectrum->add_option("--out", sp_out, "Output CSV (stdout when omitted)");

    std::vector<int> d_L;
    std::string d_layout = "both";
    std::string d_out;
    auto* depth = app.add_subcommand("depth", "Build circuits and compare their depth with the closed form");
    depth->add_option("--L", d_L, "Register width(s)")->required();
    depth->add_option("--layout", d_layout, "lnn, non_lnn or both");
    depth->add_option("--out", d_out, "Output CSV");

    MapArgs m;
    auto* map = app.add_subcommand("map", "Single-fault sensitivity map over a region");
    map->add_option("--L", m.L, "Register width")->required();
    map->add_option("--layout", m.layout, "lnn or non_lnn");
    map->add_option("--pauli", m.pauli, "X, XZ or Z");
    map->add_option("--region", m.region, "Region name (stage0, stage0.mac, ...) or begin:end");
    map->add_option("--measure", m.measure, "useful (any useful outcome) or target (one outcome)");
    map->add_option("--target", m.target, "Target outcome j");
    map->add_option("--out", m.out, "Output CSV");

    StabilityArgs s;
    auto* stability = app.add_subcommand("stability", "Fixed-count fault trials per error count");
    stability->add_option("--L", s.L, "Register width")->required();
    stability->add_option("--layout", s.layout, "lnn or non_lnn");
    stability->add_option("--max-errors", s.max_errors, "Visit n = 0..max-errors");
    stability->add_option("--grid", s.grid, "Explicit error counts, overriding --max-errors")->delimiter(',');
    stability->add_option("--trials", s.trials, "Trials per error count");
    stability->add_option("--seed", s.seed, "Experiment seed");
    stability->add_option("--target", s.target, "Target outcome j");
    stability->add_option("--out", s.out, "Per-trial CSV");
    stability->add_option("--summary", s.summary, "JSON summary (defaults to --out with .json)");
    stability->add_option("--dump-errors", s.dump, "Write every trial's fault list as JSON");

    std::vector<std::string> t_in;
    std::string t_out;
    auto* threshold = app.add_subcommand("threshold", "Threshold estimates from stability summaries");
    threshold->add_option("--in", t_in, "JSON summaries")->required();
    threshold->add_option("--out", t_out, "Output CSV");

    int p_max = 10;
    int p_min = 5;
    std::string p_out;
    auto* precision = app.add_subcommand("precision-table", "Required component precision");
    precision->add_option("--Lmax", p_max, "Largest L")->required();
    precision->add_option("--Lmin", p_min, "Smallest L");
    precision->add_option("--out", p_out, "Output CSV");

    std::uint64_t f_N = 247;
    std::uint64_t f_x = 27;
    int f_runs = 200;
    std::uint64_t f_seed = 0;
    std::string f_layout = "non_lnn";
    std::string f_out;
    auto* factor = app.add_subcommand("factor", "Sampled fault-free runs with classical post-processing");
    factor->add_option("--N", f_N, "Number to factor")->required();
    factor->add_option("--x", f_x, "Base")->required();
    factor->add_option("--runs", f_runs, "Number of sampled runs");
    factor->add_option("--seed", f_seed, "Seed");
    factor->add_option("--layout", f_layout, "lnn or non_lnn");
    factor->add_option("--out", f_out, "Output JSON");

    std::string r_in;
    std::string r_out;
    auto* replay = app.add_subcommand("replay", "Rerun trials written by --dump-errors");
    replay->add_option("--in", r_in, "Dump file")->required();
    replay->add_option("--out", r_out, "Output CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (spectrum->parsed()) {
            return run_spectrum(sp_L, sp_r, sp_k0, sp_mixture, sp_out);
        }
        if (depth->parsed()) {
            return run_depth(d_L, d_layout, d_out);
        }
        if (map->parsed()) {
            return run_map(m);
        }
        if (stability->parsed()) {
            return run_stability(s);
        }
        if (threshold->parsed()) {
            return run_threshold(t_in, t_out);
        }
        if (precision->parsed()) {
            return run_precision(p_max, p_min, p_out);
        }
        if (factor->parsed()) {
            return run_factor(f_N, f_x, f_runs, f_seed, f_layout, f_out);
        }
        if (replay->parsed()) {
            return run_replay(r_in, r_out);
        }
    } catch (const InvariantViolation& e) {
        std::fprintf(stderr, "invariant violated: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
