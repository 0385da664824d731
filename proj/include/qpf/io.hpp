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

/// CSV and JSON persistence. Numbers are written in shortest round-trip
/// form, so equal results always give byte-equal files.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qpf/harness.hpp"

namespace qpf::io {

using json = nlohmann::json;

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write to " + path + " failed");
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string spectrum_csv(const std::vector<double>& probabilities) {
    std::string out = "j,probability\n";
    for (std::size_t j = 0; j < probabilities.size(); ++j) {
        out += std::to_string(j) + "," + format_double(probabilities[j]) + "\n";
    }
    return out;
}

/// One row per site. `wire` is the role of the wire occupying the position
/// at that timestep, `s` the ratio to the fault-free value and `success` the
/// measure itself.
inline std::string map_csv(const SensitivityMap& m, const TrajectorySimulator& sim, const Circuit& c) {
    const std::vector<std::string> names = WireMap{c.instance.L}.names();
    std::string out = "qubit,wire,timestep,s,success\n";
    for (int q = 0; q < m.qubits; ++q) {
        for (int t = m.begin; t < m.end; ++t) {
            const int wire = sim.wire_at(t, q);
            out += std::to_string(q) + "," + names.at(static_cast<std::size_t>(wire)) + "," +
                   std::to_string(t) + "," + format_double(m.at(q, t)) + "," +
                   format_double(m.absolute_at(q, t)) + "\n";
        }
    }
    return out;
}

/// One row per trial.
inline std::string trials_csv(const std::vector<StabilityRecord>& records) {
    std::string out = "L,layout,n_errors,trial,seed,target_j,relative_probability\n";
    for (const StabilityRecord& r : records) {
        for (std::size_t k = 0; k < r.relative_probabilities.size(); ++k) {
            out += std::to_string(r.L) + "," + layout_name(r.layout) + "," + std::to_string(r.n_errors) + "," +
                   std::to_string(k) + "," + std::to_string(r.seed) + "," + std::to_string(r.target_j) + "," +
                   format_double(r.relative_probabilities[k]) + "\n";
        }
    }
    return out;
}

inline json to_json(const StabilityRecord& r) {
    return {{"L", r.L},
            {"layout", layout_name(r.layout)},
            {"n_errors", r.n_errors},
            {"trials", r.trials},
            {"seed", r.seed},
            {"target_j", r.target_j},
            {"mean", r.mean},
            {"variance", r.variance},
            {"standard_error", r.standard_error()},
            {"baseline", r.baseline},
            {"relative_probabilities", r.relative_probabilities}};
}

inline StabilityRecord record_from_json(const json& j) {
    StabilityRecord r;
    r.L = j.at("L").get<int>();
    r.layout = parse_layout(j.at("layout").get<std::string>());
    r.n_errors = j.at("n_errors").get<int>();
    r.seed = j.value("seed", std::uint64_t{0});
    r.target_j = j.value("target_j", default_target(r.L));
    r.baseline = j.at("baseline").get<double>();
    r.relative_probabilities = j.at("relative_probabilities").get<std::vector<double>>();
    summarize(r);
    if (j.contains("trials") && j.at("trials").get<int>() != r.trials) {
        throw std::runtime_error("record trial count does not match its list");
    }
    return r;
}

/// Summary document: the configuration that produced the records and one
/// entry per error count.
inline json stability_json(const StabilityConfig& cfg, const std::vector<StabilityRecord>& records) {
    json recs = json::array();
    for (const StabilityRecord& r : records) {
        recs.push_back(to_json(r));
    }
    json out = {{"config",
                 {{"L", cfg.L},
                  {"layout", layout_name(cfg.layout)},
                  {"n_values", cfg.n_values},
                  {"trials", cfg.trials},
                  {"seed", cfg.seed},
                  {"target_j", cfg.target_j.value_or(default_target(cfg.L))}}},
                {"records", recs}};
    const auto th = threshold_estimate(records);
    out["threshold"] = th ? json(*th) : json(nullptr);
    return out;
}

/// Accepts a summary document, a bare array of records or a single record.
inline std::vector<StabilityRecord> records_from_json(const json& j) {
    std::vector<StabilityRecord> out;
    const json& list = j.is_object() && j.contains("records") ? j.at("records") : j;
    if (list.is_array()) {
        for (const json& r : list) {
            out.push_back(record_from_json(r));
        }
    } else {
        out.push_back(record_from_json(list));
    }
    return out;
}

inline json to_json(const ErrorEvent& e) {
    return {{"timestep", e.timestep}, {"qubit", e.qubit}, {"pauli", pauli_name(e.pauli)}};
}

inline ErrorEvent event_from_json(const json& j) {
    return {j.at("timestep").get<int>(), j.at("qubit").get<int>(), parse_pauli(j.at("pauli").get<std::string>())};
}

/// Fault lists of individual trials, enough to rerun each one.
struct TrialDump {
    int L = 0;
    Layout layout = Layout::NonLnn;
    std::uint64_t target_j = 0;
    std::vector<TrialResult> trials;
};

inline json to_json(const TrialDump& d) {
    json trials = json::array();
    for (const TrialResult& t : d.trials) {
        json events = json::array();
        for (const ErrorEvent& e : t.events) {
            events.push_back(to_json(e));
        }
        trials.push_back({{"n_errors", t.n_errors},
                          {"trial", t.trial},
                          {"probability", t.probability},
                          {"relative_probability", t.relative_probability},
                          {"degenerate", t.degenerate},
                          {"events", events}});
    }
    return {{"L", d.L}, {"layout", layout_name(d.layout)}, {"target_j", d.target_j}, {"trials", trials}};
}

inline TrialDump dump_from_json(const json& j) {
    TrialDump d;
    d.L = j.at("L").get<int>();
    d.layout = parse_layout(j.at("layout").get<std::string>());
    d.target_j = j.value("target_j", default_target(d.L));
    for (const json& t : j.at("trials")) {
        TrialResult r;
        r.n_errors = t.value("n_errors", 0);
        r.trial = t.value("trial", 0);
        r.probability = t.value("probability", 0.0);
        r.relative_probability = t.value("relative_probability", 0.0);
        r.degenerate = t.value("degenerate", false);
        for (const json& e : t.at("events")) {
            r.events.push_back(event_from_json(e));
        }
        d.trials.push_back(std::move(r));
    }
    return d;
}

inline std::string thresholds_csv(const std::vector<std::vector<StabilityRecord>>& curves) {
    std::string out = "L,layout,max_n,threshold\n";
    for (const auto& curve : curves) {
        if (curve.empty()) {
            continue;
        }
        int max_n = 0;
        for (const StabilityRecord& r : curve) {
            max_n = std::max(max_n, r.n_errors);
        }
        const auto th = threshold_estimate(curve);
        out += std::to_string(curve.front().L) + "," + layout_name(curve.front().layout) + "," +
               std::to_string(max_n) + "," + (th ? std::to_string(*th) : std::string("none")) + "\n";
    }
    return out;
}

inline std::string precision_csv(const std::vector<PrecisionModel>& table) {
    std::string out = "L,count,n_p,P_1,P_L,P_L2,P_L3\n";
    for (const PrecisionModel& m : table) {
        out += std::to_string(m.L) + "," + count_name(m.count) + "," + std::to_string(m.n_p);
        for (double s : m.scalings) {
            out += "," + format_double(s);
        }
        out += "\n";
    }
    return out;
}

inline json to_json(const FactorSummary& s) {
    json attempts = json::array();
    for (const FactorAttempt& a : s.attempts) {
        json row = {{"j", a.j}};
        row["period"] = a.period ? json(*a.period) : json(nullptr);
        row["factors"] = a.factors ? json::array({a.factors->N1, a.factors->N2}) : json(nullptr);
        attempts.push_back(row);
    }
    return {{"N", s.instance.N},
            {"x", s.instance.x},
            {"L", s.instance.L},
            {"r", s.instance.r},
            {"runs", s.runs},
            {"successes", s.successes},
            {"rate", s.rate()},
            {"recoverable_success", s.recoverable_success},
            {"expected_success", s.expected_success},
            {"attempts", attempts}};
}

} // namespace qpf::io
