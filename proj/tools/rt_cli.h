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

#ifndef READOUT_TOOLS_RT_CLI_H
#define READOUT_TOOLS_RT_CLI_H

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "readout/cnot_noise.h"
#include "readout/rates.h"
#include "readout/scheme_stats.h"

namespace readout::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;

/// Bad flags, bad config files and invalid parameter combinations.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { kSnrSweep, kMiSweep, kSpeedup, kPeakSnr, kCompilationDist, kValidate };
enum class Spacing { kLinear, kLog };
enum class Format { kCsv, kJson };

std::string_view to_string(Command c);
Command parse_command(std::string_view name);

struct TimeGrid {
  double start = 0.1;  ///< ms
  double stop = 5.0;   ///< ms
  int points = 50;
  Spacing spacing = Spacing::kLinear;

  std::vector<double> values() const;
};

struct RunConfig {
  Command command = Command::kSnrSweep;
  RateParams rates;
  GateNoise noise;
  ReadoutModel model = ReadoutModel::kNoisyDecaying;
  int n_min = 1;
  int n_max = 5;
  TimeGrid t_grid;
  std::optional<double> target_snr;
  std::optional<std::uint64_t> shots;
  std::optional<std::uint64_t> seed;
  Format format = Format::kCsv;
  std::string out;  ///< empty: standard output

  /// Throws UsageError.
  void validate() const;
};

/// Default shot count and seed for `validate` when none are given.
inline constexpr std::uint64_t kDefaultShots = 1'000'000;
inline constexpr std::uint64_t kDefaultSeed = 1;

using Cell = std::variant<std::monostate, long long, double, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Columns n, t_ms, snr.
Table run_snr_sweep(const RunConfig &config);
/// Columns n, t_ms, snr, mi, eta_opt. Thresholds from the exhaustive scan.
Table run_mi_sweep(const RunConfig &config);
/// Columns n, t_ms, ratio, reachable; t_ms = time to reach target_snr.
Table run_speedup(const RunConfig &config);
/// Columns n, s_max, t_max_ms, unbounded.
Table run_peak_snr(const RunConfig &config);
/// Columns compilation, n, q, prob for both compilations.
Table run_compilation_dist(const RunConfig &config);

struct ValidationReport {
  /// Columns check, tv, threshold, status (pass / fail / inconclusive).
  Table table;
  bool passed = true;
};

/// Monte Carlo against analytic laws at N = n_max, t = t_stop.
ValidationReport run_validate(const RunConfig &config);

/// Floats with 12 significant digits, '\n' line ends, one header row.
std::string to_csv(const Table &table);
/// {"config_echo": {...}, "rows": [{column: value, ...}, ...]}
std::string to_json(const Table &table, const RunConfig &config);

/// Every resolved setting as key=value lines, in config-file syntax. Feeding
/// it back through --config reproduces the run.
std::string to_config_text(const RunConfig &config);

/// Full command-line entry point; returns the process exit code.
int run_main(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace readout::cli

#endif  // READOUT_TOOLS_RT_CLI_H
