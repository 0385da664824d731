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

#include <cstdlib>
#include <filesystem>

#include "qpf/io.hpp"

namespace qpf {
namespace {

TEST(Io, ShortestRoundTripNumbers) {
    for (double v : {0.0, 1.0, 0.1, 1.0 / 3.0, 1e-300, 0.028497386528, 6.02214076e23}) {
        EXPECT_EQ(std::strtod(io::format_double(v).c_str(), nullptr), v);
    }
    EXPECT_EQ(io::format_double(0.5), "0.5");
    EXPECT_EQ(io::format_double(1.0), "1");
}

std::vector<StabilityRecord> small_records(std::uint64_t seed) {
    StabilityConfig cfg;
    cfg.L = 5;
    cfg.n_values = {0, 2};
    cfg.trials = 3;
    cfg.seed = seed;
    return stability_curve(cfg);
}

TEST(Io, TrialsCsvIsByteIdenticalOnRerun) {
    const std::string a = io::trials_csv(small_records(9));
    const std::string b = io::trials_csv(small_records(9));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.rfind("L,layout,n_errors,trial,seed,target_j,relative_probability\n", 0), 0u);
    EXPECT_NE(a.find("5,non_lnn,0,0,9,170,1\n"), std::string::npos);
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 7);
}

TEST(Io, RecordsRoundTripThroughJson) {
    StabilityConfig cfg;
    cfg.L = 5;
    cfg.n_values = {0, 2};
    cfg.trials = 3;
    cfg.seed = 9;
    const auto recs = small_records(9);
    const io::json doc = io::json::parse(io::stability_json(cfg, recs).dump());
    EXPECT_EQ(doc.at("config").at("seed").get<std::uint64_t>(), 9u);
    const auto back = io::records_from_json(doc);
    ASSERT_EQ(back.size(), recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        EXPECT_EQ(back[i].relative_probabilities, recs[i].relative_probabilities);
        EXPECT_EQ(back[i].mean, recs[i].mean);
        EXPECT_EQ(back[i].baseline, recs[i].baseline);
        EXPECT_EQ(back[i].layout, recs[i].layout);
    }
    EXPECT_EQ(io::records_from_json(doc.at("records").at(1)).size(), 1u);

    io::json bad = doc.at("records").at(1);
    bad["trials"] = 7;
    EXPECT_THROW(io::record_from_json(bad), std::runtime_error);
}

TEST(Io, DumpRoundTrip) {
    io::TrialDump d{5, Layout::Lnn, 170, {}};
    TrialResult t;
    t.n_errors = 2;
    t.trial = 4;
    t.relative_probability = 0.25;
    t.events = {{3, 1, Pauli::XZ}, {9, 0, Pauli::Z}};
    d.trials.push_back(t);
    const io::TrialDump back = io::dump_from_json(io::json::parse(io::to_json(d).dump()));
    EXPECT_EQ(back.layout, Layout::Lnn);
    ASSERT_EQ(back.trials.size(), 1u);
    EXPECT_EQ(back.trials[0].events, t.events);
    EXPECT_EQ(back.trials[0].relative_probability, 0.25);
}

TEST(Io, FilesRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "qpf_io_test.txt";
    io::write_file(path.string(), "a,b\n1,2\n");
    EXPECT_EQ(io::read_file(path.string()), "a,b\n1,2\n");
    std::filesystem::remove(path);
    EXPECT_THROW(io::read_file(path.string()), std::runtime_error);
}

TEST(Io, TablesHaveOneRowPerEntry) {
    const std::string p = io::precision_csv(precision_table(7));
    EXPECT_EQ(std::count(p.begin(), p.end(), '\n'), 1 + 3 * 3);
    const std::string s = io::spectrum_csv(full_spectrum(make_spectrum_params(4, 8)));
    EXPECT_NE(s.find("\n32,0.125\n"), std::string::npos);
}

} // namespace
} // namespace qpf
