// Copyright 2026 The Spacetime Readout Authors
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

#include "rt_cli.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace readout::cli;

namespace {

struct RtResult {
  int code;
  std::string out;
  std::string err;
};

RtResult rt(std::vector<std::string> args) {
  args.insert(args.begin(), "rt");
  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string &text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

// Column values grouped by n, in output order.
std::map<int, std::vector<double>> by_n(const std::string &csv, std::size_t col) {
  std::map<int, std::vector<double>> out;
  const auto rows = parse_csv(csv);
  for (std::size_t i = 1; i < rows.size(); ++i) out[std::stoi(rows[i][0])].push_back(std::stod(rows[i][col]));
  return out;
}

std::filesystem::path temp_file(const std::string &name, const std::string &content) {
  const auto path = std::filesystem::temp_directory_path() / ("rt_cli_test_" + name);
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST(Cli, csv_is_deterministic_with_one_header) {
  const RtResult a = rt({"mi-sweep", "--n-max", "3", "--t-points", "7"});
  const RtResult b = rt({"mi-sweep", "--n-max", "3", "--t-points", "7"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto rows = parse_csv(a.out);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"n", "t_ms", "snr", "mi", "eta_opt"}));
  EXPECT_EQ(rows.size(), 1u + 3 * 7);
  EXPECT_EQ(a.out.find('\r'), std::string::npos);
  EXPECT_EQ(a.out.find("n,"), 0u);
  EXPECT_EQ(a.out.find("\nn,"), std::string::npos);
}

TEST(Cli, twelve_significant_digits) {
  Table t{{"x"}, {{1.0 / 3}, {2.0}, {1e-20 / 3}}};
  EXPECT_EQ(to_csv(t), "x\n0.333333333333\n2\n3.33333333333e-21\n");
}

TEST(Cli, ideal_snr_monotone_in_time) {
  const RtResult r = rt({"snr-sweep", "--model", "ideal", "--t-start", "0.1", "--t-stop", "5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto cols = by_n(r.out, 2);
  EXPECT_EQ(cols.size(), 5u);
  for (const auto &[n, snr] : cols) {
    for (std::size_t i = 1; i < snr.size(); ++i) EXPECT_GT(snr[i], snr[i - 1]) << n;
  }
}

TEST(Cli, noisy_snr_unimodal_in_time) {
  const RtResult r = rt({"snr-sweep", "--t-start", "0.01", "--t-stop", "100", "--t-points", "120",
                    "--t-spacing", "log"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const auto &[n, snr] : by_n(r.out, 2)) {
    std::size_t i = 1;
    while (i < snr.size() && snr[i] > snr[i - 1]) ++i;
    ASSERT_LT(i, snr.size()) << "no peak for n=" << n;
    for (; i < snr.size(); ++i) EXPECT_LT(snr[i], snr[i - 1]) << n;
  }
}

TEST(Cli, single_qubit_range_matches_baseline_rows) {
  const RtResult one = rt({"snr-sweep", "--n-min", "1", "--n-max", "1", "--t-points", "9"});
  const RtResult many = rt({"snr-sweep", "--n-min", "1", "--n-max", "4", "--t-points", "9"});
  const auto a = parse_csv(one.out);
  const auto b = parse_csv(many.out);
  ASSERT_EQ(a.size(), 10u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Cli, speedup_ratios) {
  const RtResult ideal = rt({"speedup", "--model", "ideal", "--target-snr", "8", "--n-max", "6"});
  ASSERT_EQ(ideal.code, kExitOk) << ideal.err;
  for (const auto &[n, ratio] : by_n(ideal.out, 2)) EXPECT_NEAR(ratio[0], n, 1e-9 * n);

  const RtResult low = rt({"speedup", "--p", "0.001", "--target-snr", "8", "--n-max", "10"});
  for (const auto &[n, ratio] : by_n(low.out, 2)) {
    if (n >= 2) EXPECT_GT(ratio[0], n);
  }
  const RtResult high = rt({"speedup", "--p", "0.01", "--target-snr", "8", "--n-max", "10"});
  for (const auto &[n, ratio] : by_n(high.out, 2)) {
    if (n >= 2) EXPECT_LT(ratio[0], n);
  }
}

TEST(Cli, speedup_flags_unreachable_rows) {
  const RtResult r = rt({"speedup", "--p", "0.01", "--target-snr", "10.6", "--n-max", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = parse_csv(r.out);
  // S = 10.6 is beyond the one- and two-qubit peaks but not the three-qubit one;
  // without a baseline time there is no ratio.
  EXPECT_EQ(rows[1], (std::vector<std::string>{"1", "", "", "false"}));
  EXPECT_EQ(rows[2][3], "false");
  EXPECT_EQ(rows[3][3], "true");
  EXPECT_FALSE(rows[3][1].empty());
  EXPECT_EQ(rows[3][2], "");
}

TEST(Cli, compilation_dist_ten_qubits) {
  const RtResult r = rt({"compilation-dist", "--p", "0.005", "--n-min", "10", "--n-max", "10"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 1u + 2 * 11);
  for (const auto &row : rows) {
    if (row[2] == "10") EXPECT_NEAR(std::stod(row[3]), std::pow(0.995, 9), 1e-12);
    if (row[2] == "9") EXPECT_EQ(row[3], "0");
  }
  EXPECT_EQ(rows[1][0], "flat");
  EXPECT_EQ(rows[12][0], "cascade");
}

TEST(Cli, peak_snr_rows) {
  const RtResult r = rt({"peak-snr", "--n-max", "5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto s = by_n(r.out, 1);
  for (int n = 2; n <= 5; ++n) EXPECT_GT(s.at(n)[0], s.at(n - 1)[0]);
  const RtResult ideal = rt({"peak-snr", "--model", "ideal", "--n-max", "1"});
  EXPECT_EQ(parse_csv(ideal.out)[1], (std::vector<std::string>{"1", "inf", "inf", "true"}));
}

TEST(Cli, validate_default_passes) {
  const RtResult r = rt({"validate"});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  EXPECT_EQ(r.out.find("fail"), std::string::npos);
  EXPECT_NE(r.out.find("scheme_p1"), std::string::npos);
}

TEST(Cli, validate_single_shot_is_inconclusive) {
  const RtResult r = rt({"validate", "--shots", "1", "--seed", "3"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  const auto rows = parse_csv(r.out);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i][3], "inconclusive");
}

TEST(Cli, validate_report_small_register) {
  RunConfig c;
  c.command = Command::kValidate;
  c.shots = 1000000;
  c.n_max = 2;
  const ValidationReport report = run_validate(c);
  EXPECT_TRUE(report.passed);
  for (const auto &row : report.table.rows) EXPECT_EQ(std::get<std::string>(row[3]), "pass");
}

TEST(Cli, usage_errors) {
  EXPECT_EQ(rt({}).code, kExitUsage);
  EXPECT_EQ(rt({"bogus"}).code, kExitUsage);
  EXPECT_EQ(rt({"speedup"}).code, kExitUsage);
  EXPECT_EQ(rt({"snr-sweep", "--t-points", "1"}).code, kExitUsage);
  EXPECT_EQ(rt({"snr-sweep", "--t-start", "5", "--t-stop", "1"}).code, kExitUsage);
  EXPECT_EQ(rt({"snr-sweep", "--t-start", "0", "--t-spacing", "log"}).code, kExitUsage);
  EXPECT_EQ(rt({"snr-sweep", "--mu0", "20"}).code, kExitUsage);
  EXPECT_EQ(rt({"snr-sweep", "--p", "1.5"}).code, kExitUsage);
  EXPECT_EQ(rt({"snr-sweep", "--n-min", "3", "--n-max", "2"}).code, kExitUsage);
  EXPECT_EQ(rt({"snr-sweep", "--compilation", "tree"}).code, kExitUsage);
  EXPECT_EQ(rt({"validate", "--shots", "0"}).code, kExitUsage);
  EXPECT_EQ(rt({"snr-sweep", "--config", "/nonexistent/rt.cfg"}).code, kExitUsage);
}

TEST(Cli, corrupted_config_file) {
  EXPECT_EQ(rt({"snr-sweep", "--config", temp_file("garbage", "this is not a config\n").string()}).code,
            kExitUsage);
  EXPECT_EQ(rt({"snr-sweep", "--config", temp_file("badnum", "mu0=abc\n").string()}).code, kExitUsage);
  EXPECT_EQ(rt({"snr-sweep", "--config", temp_file("unknown", "colour=red\n").string()}).code,
            kExitUsage);
}

TEST(Cli, flags_override_file_override_defaults) {
  const auto cfg = temp_file("prec", "# rates\nmu0=3.0\nmu1=12\nn-max=1\nt-points=2\n");
  const RtResult r = rt({"snr-sweep", "--config", cfg.string(), "--mu1", "14", "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["config_echo"]["mu0"], 3.0);   // file
  EXPECT_EQ(doc["config_echo"]["mu1"], 14.0);  // flag
  EXPECT_EQ(doc["config_echo"]["lambda"], 0.0041);  // default
  EXPECT_EQ(doc["rows"].size(), 2u);
}

TEST(Cli, json_echo_reproduces_run) {
  const RtResult first = rt({"mi-sweep", "--p", "0.003", "--compilation", "flat", "--n-min", "2",
                        "--n-max", "3", "--t-start", "0.5", "--t-stop", "4", "--t-points", "5",
                        "--t-spacing", "log", "--format", "json"});
  ASSERT_EQ(first.code, kExitOk) << first.err;
  const auto doc = nlohmann::ordered_json::parse(first.out);
  std::string text;
  for (const auto &[key, value] : doc["config_echo"].items()) {
    text += key + "=" + (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
  }
  const RtResult second = rt({"--config", temp_file("echo", text).string()});
  ASSERT_EQ(second.code, kExitOk) << second.err;
  EXPECT_EQ(first.out, second.out);
}

TEST(Cli, config_text_round_trip) {
  RunConfig c;
  c.command = Command::kSnrSweep;
  c.rates.lambda = 0.1 / 3;
  c.n_max = 2;
  c.t_grid.points = 4;
  const auto path = temp_file("text", to_config_text(c));
  const RtResult a = rt({"--config", path.string()});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, to_csv(run_snr_sweep(c)));
}

TEST(Cli, writes_output_file) {
  const auto path = std::filesystem::temp_directory_path() / "rt_cli_test_out.csv";
  std::filesystem::remove(path);
  const RtResult r = rt({"peak-snr", "--n-max", "2", "--out", path.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), rt({"peak-snr", "--n-max", "2"}).out);
}

TEST(Cli, time_grid_spacing) {
  TimeGrid lin{1.0, 3.0, 3, Spacing::kLinear};
  EXPECT_EQ(lin.values(), (std::vector<double>{1.0, 2.0, 3.0}));
  TimeGrid lg{0.1, 10.0, 3, Spacing::kLog};
  const auto v = lg.values();
  EXPECT_NEAR(v[1], 1.0, 1e-15);
  EXPECT_EQ(v.back(), 10.0);
}
