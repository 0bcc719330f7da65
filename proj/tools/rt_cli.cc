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

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <thread>

#include "readout/decay_model.h"
#include "readout/dist.h"
#include "readout/gate_wiring.h"
#include "readout/mc_oracle.h"

namespace readout::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::pair<Command, std::string_view> kCommandNames[] = {
    {Command::kSnrSweep, "snr-sweep"}, {Command::kMiSweep, "mi-sweep"},
    {Command::kSpeedup, "speedup"},    {Command::kPeakSnr, "peak-snr"},
    {Command::kCompilationDist, "compilation-dist"}, {Command::kValidate, "validate"},
};

std::string format_double(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string_view spacing_name(Spacing s) { return s == Spacing::kLog ? "log" : "linear"; }
std::string_view format_name(Format f) { return f == Format::kJson ? "json" : "csv"; }

ReadoutModel parse_model(std::string_view name) {
  if (name == "ideal") return ReadoutModel::kIdealPoisson;
  if (name == "noisy") return ReadoutModel::kNoisyDecaying;
  throw UsageError("unknown model '" + std::string(name) + "' (ideal|noisy)");
}

SchemeConfig scheme_for(const RunConfig &config, int n) {
  SchemeConfig s;
  s.n_qubits = n;
  s.rates = config.rates;
  s.noise = config.noise;
  s.model = config.model;
  return s;
}

// Evaluates fn(i) for i in [0, count) on a small pool; results land by index
// so the output order never depends on scheduling.
template <typename Row, typename Fn>
std::vector<Row> parallel_rows(std::size_t count, Fn fn) {
  std::vector<Row> rows(count);
  const std::size_t workers =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) rows[i] = fn(i);
    return rows;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < count; i += workers) rows[i] = fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::vector<int> qubit_range(const RunConfig &c) {
  std::vector<int> ns;
  for (int n = c.n_min; n <= c.n_max; ++n) ns.push_back(n);
  return ns;
}

Json cell_json(const Cell &c) {
  return std::visit(
      [](const auto &v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          return std::isfinite(v) ? Json(v) : Json(format_double(v, 12));
        } else {
          return v;
        }
      },
      c);
}

// Expected TV from pure sampling noise: sum_k E|X_k - n p_k| / (2n) with X_k
// binomial, approximated by the normal mean absolute deviation.
double expected_tv_noise(const DiscreteDist &d, std::uint64_t shots) {
  double s = 0;
  for (double p : d.masses()) s += std::sqrt(2 * p * (1 - p) / (M_PI * static_cast<double>(shots)));
  return s / 2;
}

DiscreteDist outcome_as_dist(const OutcomeDist &o) { return DiscreteDist(0, o.probs); }

}  // namespace

std::string_view to_string(Command c) {
  for (const auto &[cmd, name] : kCommandNames) {
    if (cmd == c) return name;
  }
  return "unknown";
}

Command parse_command(std::string_view name) {
  for (const auto &[cmd, n] : kCommandNames) {
    if (n == name) return cmd;
  }
  throw UsageError("unknown command '" + std::string(name) + "'");
}

std::vector<double> TimeGrid::values() const {
  std::vector<double> v(points);
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    v[i] = spacing == Spacing::kLog ? std::exp(std::log(start) + f * (std::log(stop) - std::log(start)))
                                    : start + f * (stop - start);
  }
  if (points > 1) v.back() = stop;
  return v;
}

void RunConfig::validate() const {
  try {
    rates.validate();
    noise.validate();
  } catch (const std::domain_error &e) {
    throw UsageError(e.what());
  }
  if (n_min < 1 || n_max < n_min || n_max > kMaxQubits) {
    throw UsageError("qubit range must satisfy 1 <= n-min <= n-max <= " +
                     std::to_string(kMaxQubits));
  }
  const bool sweep = command == Command::kSnrSweep || command == Command::kMiSweep;
  if (sweep && t_grid.points < 2) throw UsageError("t-points must be at least 2 for sweeps");
  if (t_grid.points < 1) throw UsageError("t-points must be positive");
  if (!std::isfinite(t_grid.start) || !std::isfinite(t_grid.stop) || t_grid.start < 0) {
    throw UsageError("time grid bounds must be finite and non-negative");
  }
  if (sweep && !(t_grid.start < t_grid.stop)) throw UsageError("t-start must be below t-stop");
  if (t_grid.spacing == Spacing::kLog && !(t_grid.start > 0)) {
    throw UsageError("log spacing needs t-start > 0");
  }
  if (command == Command::kSpeedup && !target_snr) {
    throw UsageError("speedup needs --target-snr");
  }
  if (target_snr && !(*target_snr > 0 && std::isfinite(*target_snr))) {
    throw UsageError("target-snr must be positive");
  }
  if (shots && *shots == 0) throw UsageError("shots must be positive");
  if (command == Command::kValidate && !(t_grid.stop > 0)) {
    throw UsageError("validate needs t-stop > 0");
  }
}

Table run_snr_sweep(const RunConfig &config) {
  config.validate();
  const std::vector<double> times = config.t_grid.values();
  const std::vector<int> ns = qubit_range(config);
  Table table{{"n", "t_ms", "snr"}, {}};
  table.rows = parallel_rows<std::vector<Cell>>(ns.size() * times.size(), [&](std::size_t i) {
    const int n = ns[i / times.size()];
    const double t = times[i % times.size()];
    return std::vector<Cell>{static_cast<long long>(n), t, snr_at(scheme_for(config, n), t)};
  });
  return table;
}

Table run_mi_sweep(const RunConfig &config) {
  config.validate();
  const std::vector<double> times = config.t_grid.values();
  const std::vector<int> ns = qubit_range(config);
  Table table{{"n", "t_ms", "snr", "mi", "eta_opt"}, {}};
  table.rows = parallel_rows<std::vector<Cell>>(ns.size() * times.size(), [&](std::size_t i) {
    const int n = ns[i / times.size()];
    const MeritPoint m = merit_point(scheme_for(config, n), times[i % times.size()]);
    return std::vector<Cell>{static_cast<long long>(n), m.t, m.snr, m.mi, m.eta_opt};
  });
  return table;
}

Table run_speedup(const RunConfig &config) {
  config.validate();
  const std::vector<int> ns = qubit_range(config);
  const double target = *config.target_snr;
  const std::optional<double> t1 = time_to_snr(scheme_for(config, 1), target);
  Table table{{"n", "t_ms", "ratio", "reachable"}, {}};
  table.rows = parallel_rows<std::vector<Cell>>(ns.size(), [&](std::size_t i) {
    const int n = ns[i];
    const std::optional<double> tn = n == 1 ? t1 : time_to_snr(scheme_for(config, n), target);
    std::vector<Cell> row{static_cast<long long>(n), Cell{}, Cell{}, tn.has_value()};
    if (tn) {
      row[1] = *tn;
      if (t1) row[2] = *t1 / *tn;
    }
    return row;
  });
  return table;
}

Table run_peak_snr(const RunConfig &config) {
  config.validate();
  const std::vector<int> ns = qubit_range(config);
  Table table{{"n", "s_max", "t_max_ms", "unbounded"}, {}};
  table.rows = parallel_rows<std::vector<Cell>>(ns.size(), [&](std::size_t i) {
    const PeakSnr p = peak_snr(scheme_for(config, ns[i]));
    return std::vector<Cell>{static_cast<long long>(ns[i]), p.s_max, p.t_max, p.unbounded};
  });
  return table;
}

Table run_compilation_dist(const RunConfig &config) {
  config.validate();
  Table table{{"compilation", "n", "q", "prob"}, {}};
  for (Compilation c : {Compilation::kFlat, Compilation::kCascade}) {
    for (int n : qubit_range(config)) {
      const OutcomeDist d = outcome_dist(n, {config.noise.p, c});
      for (int q = 0; q <= n; ++q) {
        table.rows.push_back({std::string(to_string(c)), static_cast<long long>(n),
                              static_cast<long long>(q), d.probs[q]});
      }
    }
  }
  return table;
}

ValidationReport run_validate(const RunConfig &config) {
  config.validate();
  const std::uint64_t shots = config.shots.value_or(kDefaultShots);
  const std::uint64_t seed = config.seed.value_or(kDefaultSeed);
  const int n = config.n_max;
  const double t = config.t_grid.stop;

  ValidationReport report;
  report.table.columns = {"check", "tv", "threshold", "status"};
  auto check = [&](const std::string &name, const DiscreteDist &exact, const DiscreteDist &sampled) {
    const double tv = tv_distance(exact, sampled);
    // The 5e-3 budget at a million shots, scaled as shots^{-1/2}, but never
    // tighter than three times the noise floor of this particular law.
    const double threshold =
        std::max(5e-3 * std::sqrt(1e6 / static_cast<double>(shots)), 3 * expected_tv_noise(exact, shots));
    std::string status;
    if (threshold >= 0.5) {
      status = "inconclusive";
    } else if (tv <= threshold) {
      status = "pass";
    } else {
      status = "fail";
      report.passed = false;
    }
    report.table.rows.push_back({name, tv, threshold, status});
  };

  const GateWiring wiring = wiring_for(config.noise.compilation, n);
  check("gate_outcomes", outcome_as_dist(outcome_dist(n, config.noise)),
        outcome_as_dist(sample_gate_outcomes(wiring, config.noise.p, shots, seed)));
  check("dark_counts", poisson_pmf(config.rates.mu0 * t),
        sample_photon_counts(config.rates, 0, t, shots, seed).to_dist());
  check("bright_counts", decaying_poisson({config.rates, t}),
        sample_photon_counts(config.rates, 1, t, shots, seed).to_dist());

  McConfig mc;
  mc.shots = shots;
  mc.seed = seed;
  mc.t = t;
  mc.scheme = scheme_for(config, n);
  const SchemeSamples samples = sample_full_scheme(mc);
  const CompositeStats exact = compose(mc.scheme, t);
  check("scheme_p0", exact.p0, samples.h0.to_dist());
  check("scheme_p1", exact.p1, samples.h1.to_dist());
  return report;
}

std::string to_csv(const Table &table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto &row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::visit(
          [&](const auto &v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              out += format_double(v, 12);
            } else if constexpr (std::is_same_v<T, long long>) {
              out += std::to_string(v);
            } else if constexpr (std::is_same_v<T, bool>) {
              out += v ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::string>) {
              out += v;
            }
          },
          row[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

Json config_echo(const RunConfig &c) {
  Json j;
  j["command"] = std::string(to_string(c.command));
  j["mu0"] = c.rates.mu0;
  j["mu1"] = c.rates.mu1;
  j["lambda"] = c.rates.lambda;
  j["p"] = c.noise.p;
  j["compilation"] = std::string(to_string(c.noise.compilation));
  j["model"] = std::string(to_string(c.model));
  j["n-min"] = c.n_min;
  j["n-max"] = c.n_max;
  j["t-start"] = c.t_grid.start;
  j["t-stop"] = c.t_grid.stop;
  j["t-points"] = c.t_grid.points;
  j["t-spacing"] = std::string(spacing_name(c.t_grid.spacing));
  if (c.target_snr) j["target-snr"] = *c.target_snr;
  if (c.shots) j["shots"] = *c.shots;
  if (c.seed) j["seed"] = *c.seed;
  j["format"] = std::string(format_name(c.format));
  return j;
}

}  // namespace

std::string to_json(const Table &table, const RunConfig &config) {
  Json doc;
  doc["config_echo"] = config_echo(config);
  Json rows = Json::array();
  for (const auto &row : table.rows) {
    Json r;
    for (std::size_t i = 0; i < row.size(); ++i) r[table.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string to_config_text(const RunConfig &config) {
  std::string out;
  const Json echo = config_echo(config);
  for (const auto &[key, value] : echo.items()) {
    out += key;
    out += '=';
    if (value.is_number_float()) {
      out += format_double(value.get<double>(), 17);
    } else if (value.is_string()) {
      out += value.get<std::string>();
    } else {
      out += value.dump();
    }
    out += '\n';
  }
  return out;
}

int run_main(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Multi-qubit readout statistics: SNR and MI sweeps, speed-ups, Monte Carlo checks",
               "rt"};
  app.set_config("--config", "", "key=value file; flags given on the command line win");
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::string command;
  RunConfig cfg;
  std::string compilation = "cascade";
  std::string model = "noisy";
  std::string spacing = "linear";
  std::string format = "csv";
  std::optional<double> target;
  std::optional<std::uint64_t> shots;
  std::optional<std::uint64_t> seed;

  std::vector<std::string> names;
  for (const auto &[c, name] : kCommandNames) names.emplace_back(name);
  app.add_option("command", command, "snr-sweep | mi-sweep | speedup | peak-snr | compilation-dist | validate")
      ->required()
      ->check(CLI::IsMember(names));
  app.add_option("--mu0", cfg.rates.mu0, "dark emission rate (1/ms)");
  app.add_option("--mu1", cfg.rates.mu1, "bright emission rate (1/ms)");
  app.add_option("--lambda", cfg.rates.lambda, "bright-state decay rate (1/ms)");
  app.add_option("--p", cfg.noise.p, "CNOT failure probability");
  app.add_option("--compilation", compilation)->check(CLI::IsMember({"flat", "cascade"}));
  app.add_option("--model", model, "noise model")->check(CLI::IsMember({"ideal", "noisy"}));
  app.add_option("--n-min", cfg.n_min);
  app.add_option("--n-max", cfg.n_max);
  app.add_option("--t-start", cfg.t_grid.start, "ms");
  app.add_option("--t-stop", cfg.t_grid.stop, "ms");
  app.add_option("--t-points", cfg.t_grid.points);
  app.add_option("--t-spacing", spacing)->check(CLI::IsMember({"linear", "log"}));
  app.add_option("--target-snr", target);
  app.add_option("--shots", shots);
  app.add_option("--seed", seed);
  app.add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", cfg.out, "output path (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "rt: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    cfg.command = parse_command(command);
    cfg.noise.compilation = parse_compilation(compilation);
    cfg.model = parse_model(model);
    cfg.t_grid.spacing = spacing == "log" ? Spacing::kLog : Spacing::kLinear;
    cfg.format = format == "json" ? Format::kJson : Format::kCsv;
    cfg.target_snr = target;
    cfg.shots = shots;
    cfg.seed = seed;
    cfg.validate();
  } catch (const std::exception &e) {
    err << "rt: " << e.what() << "\n";
    return kExitUsage;
  }

  Table table;
  int status = kExitOk;
  try {
    switch (cfg.command) {
      case Command::kSnrSweep:
        table = run_snr_sweep(cfg);
        break;
      case Command::kMiSweep:
        table = run_mi_sweep(cfg);
        break;
      case Command::kSpeedup:
        table = run_speedup(cfg);
        break;
      case Command::kPeakSnr:
        table = run_peak_snr(cfg);
        break;
      case Command::kCompilationDist:
        table = run_compilation_dist(cfg);
        break;
      case Command::kValidate: {
        ValidationReport report = run_validate(cfg);
        table = std::move(report.table);
        if (!report.passed) status = kExitValidation;
        break;
      }
    }
  } catch (const UsageError &e) {
    err << "rt: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error &e) {
    err << "rt: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument &e) {
    err << "rt: " << e.what() << "\n";
    return kExitUsage;
  }

  const std::string text = cfg.format == Format::kJson ? to_json(table, cfg) : to_csv(table);
  if (cfg.out.empty()) {
    out << text;
  } else {
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file || !(file << text)) {
      err << "rt: cannot write " << cfg.out << "\n";
      return kExitUsage;
    }
  }
  return status;
}

}  // namespace readout::cli
