#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "wavicle/cli.hpp"
#include "wavicle/oracle.hpp"
#include "wavicle/results.hpp"
#include "wavicle/version.hpp"

namespace wavicle {
namespace cli {

namespace {

// Values of the dedicated flags of one subcommand, still as raw text; they
// are normalized into the same key space as --set and the config file.
struct FlagCapture {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::string trials, seed, workers, stats, mode, points;
  std::vector<std::string> sets;
  std::string table_kind;          // oracle-table
  std::string calibration = "1";   // selftest
};

void add_common_output_flags(CLI::App* sub, FlagCapture& cap) {
  sub->add_option("--config", cap.config_path, "JSON config file (flat key/value object)");
  sub->add_option("--out", cap.out_path, "output path (default <subcommand>.<format>)");
  sub->add_option("--format", cap.format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--set", cap.sets, "override a config key, as key=value (repeatable)");
}

void add_run_flags(CLI::App* sub, FlagCapture& cap) {
  add_common_output_flags(sub, cap);
  sub->add_option("--trials", cap.trials, "Monte Carlo trials per scan point");
  sub->add_option("--seed", cap.seed, "master seed (default 42 or WAVICLE_SEED)");
  sub->add_option("--workers", cap.workers, "worker threads (result-invariant)");
  sub->add_option("--stats", cap.stats, "particle statistics: boson or fermion");
  sub->add_option("--mode", cap.mode, "sampling mode: eigenvalue or expectation");
  sub->add_option("--points", cap.points, "number of scan points");
}

const char* points_key(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Epr:
      return "gamma_points";
    case ExperimentKind::Hbt:
      return "phase_points";
    case ExperimentKind::SpinFlow:
      return "theta_points";
    case ExperimentKind::Noise:
      return nullptr;
  }
  return nullptr;
}

ExperimentKind kind_from_name(const std::string& name) {
  if (name == "epr") return ExperimentKind::Epr;
  if (name == "hbt") return ExperimentKind::Hbt;
  if (name == "spinflow") return ExperimentKind::SpinFlow;
  if (name == "noise") return ExperimentKind::Noise;
  throw ConfigError("unknown experiment '" + name + "'");
}

void capture_overrides(const FlagCapture& cap, ExperimentKind kind, CliInvocation& inv) {
  if (!cap.trials.empty()) inv.overrides.emplace_back("trials", cap.trials);
  if (!cap.seed.empty()) inv.overrides.emplace_back("seed", cap.seed);
  if (!cap.workers.empty()) inv.overrides.emplace_back("workers", cap.workers);
  if (!cap.stats.empty()) inv.overrides.emplace_back("statistics", cap.stats);
  if (!cap.mode.empty()) inv.overrides.emplace_back("mode", cap.mode);
  if (!cap.points.empty()) {
    const char* key = points_key(kind);
    if (key == nullptr)
      throw ConfigError("--points does not apply to experiment '" + std::string(to_string(kind)) +
                        "'");
    inv.overrides.emplace_back(key, cap.points);
  }
  for (const std::string& kv : cap.sets) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    inv.overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
}

}  // namespace

CliInvocation parse_invocation(const std::vector<std::string>& args) {
  CLI::App app{"wavicle: Monte Carlo and analytic tables for two-source interference"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  FlagCapture epr, hbt, spinflow, noise, table, self;
  add_run_flags(app.add_subcommand("epr", "spin-pair correlation vs analyzer separation"), epr);
  add_run_flags(app.add_subcommand("hbt", "two-mode coincidence vs detector separation"), hbt);
  add_run_flags(app.add_subcommand("spinflow", "single-analyzer means vs analyzer angle"),
                spinflow);
  add_run_flags(app.add_subcommand("noise", "exchange reading noise at one orientation"), noise);

  CLI::App* table_cmd = app.add_subcommand("oracle-table", "analytic scan table, no Monte Carlo");
  table_cmd->add_option("--kind", table.table_kind, "table to print: epr or hbt")
      ->required()
      ->check(CLI::IsMember({"epr", "hbt"}));
  add_run_flags(table_cmd, table);

  CLI::App* self_cmd = app.add_subcommand("selftest", "deterministic verification gates");
  self_cmd->add_option("--seed", self.seed, "gate seed (default 42 or WAVICLE_SEED)");
  self_cmd->add_option("--calibration-scale", self.calibration,
                       "fault injection: rescale the exchange calibration")
      ->group("");  // hidden

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto& seen = app.get_subcommands();
    throw HelpRequested{seen.empty() ? app.help() : seen.front()->help()};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::CallForVersion&) {
    throw HelpRequested{std::string(kVersion) + "\n"};
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  CliInvocation inv;
  CLI::App* sub = app.get_subcommands().front();
  inv.subcommand = sub->get_name();

  const FlagCapture* cap = nullptr;
  if (inv.subcommand == "epr") cap = &epr;
  if (inv.subcommand == "hbt") cap = &hbt;
  if (inv.subcommand == "spinflow") cap = &spinflow;
  if (inv.subcommand == "noise") cap = &noise;
  if (inv.subcommand == "oracle-table") cap = &table;
  if (inv.subcommand == "selftest") cap = &self;

  if (inv.subcommand == "selftest") {
    if (!self.seed.empty()) inv.overrides.emplace_back("seed", self.seed);
    inv.overrides.emplace_back("calibration_scale", self.calibration);
    return inv;
  }

  inv.table_kind = cap->table_kind;
  if (!cap->config_path.empty()) inv.config_path = cap->config_path;
  inv.format = cap->format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  const ExperimentKind kind =
      kind_from_name(inv.subcommand == "oracle-table" ? cap->table_kind : inv.subcommand);
  capture_overrides(*cap, kind, inv);
  inv.output_path = cap->out_path;
  if (inv.output_path.empty())
    inv.output_path = inv.subcommand + (inv.format == OutputFormat::Json ? ".json" : ".csv");
  return inv;
}

namespace {

RunMetadata make_metadata(const LoadedConfig& loaded) {
  RunMetadata meta;
  meta.version = kVersion;
  meta.kind = to_string(loaded.config.kind);
  meta.seed = loaded.config.seed;
  meta.trials = loaded.config.trials;
  meta.resolved_config = loaded.resolved;
  return meta;
}

Table oracle_table(const ExperimentConfig& cfg) {
  Table table;
  table.columns = scan_columns(cfg.kind);
  // The analytic table keeps only the scan geometry columns up front.
  if (cfg.kind == ExperimentKind::Epr) {
    for (const std::array<double, 4>& ang : cfg.epr_angles) {
      const Direction a(ang[0], ang[1]);
      const Direction b(ang[2], ang[3]);
      const oracle::SpinScenario spin{a, b, cfg.occupancy_u, cfg.occupancy_v};
      const double uncorr = oracle::spin_pair_uncorr(spin);
      const double corr = oracle::spin_pair_corr(spin, cfg.stats);
      table.data.push_back({oracle::spin_gamma(a, b), a.theta, a.phi, b.theta, b.phi, uncorr,
                            corr, uncorr + corr});
    }
  } else if (cfg.kind == ExperimentKind::Hbt) {
    std::array<double, 3> delta{};
    double delta2 = 0.0;
    for (size_t i = 0; i < 3; ++i) {
      delta[i] = cfg.p[i] - cfg.p_prime[i];
      delta2 += delta[i] * delta[i];
    }
    for (const double x : cfg.hbt_phases) {
      std::array<double, 3> r{};
      for (size_t i = 0; i < 3; ++i) r[i] = x * delta[i] / delta2;
      const double uncorr = 2.0 * cfg.occupancy_u * cfg.occupancy_v;
      const double total =
          oracle::hbt_correlation(cfg.p, cfg.p_prime, r, cfg.occupancy_u, cfg.occupancy_v,
                                  cfg.stats);
      table.data.push_back({x, uncorr, total - uncorr, total});
    }
  } else {
    throw ConfigError("oracle-table supports kinds 'epr' and 'hbt'");
  }
  table.columns.push_back("oracle_uncorr");
  table.columns.push_back("oracle_corr");
  table.columns.push_back("oracle_total");
  return table;
}

std::uint64_t selftest_seed(const CliInvocation& inv) {
  std::uint64_t seed = 42;
  if (const char* env = std::getenv("WAVICLE_SEED")) {
    try {
      size_t used = 0;
      seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("WAVICLE_SEED: expected a non-negative integer");
    }
  }
  for (const auto& [key, value] : inv.overrides) {
    if (key != "seed") continue;
    try {
      size_t used = 0;
      seed = std::stoull(value, &used);
      if (used != value.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("--seed: expected a non-negative integer");
    }
  }
  return seed;
}

double selftest_scale(const CliInvocation& inv) {
  for (const auto& [key, value] : inv.overrides) {
    if (key != "calibration_scale") continue;
    try {
      size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size() || !(v > 0.0)) throw std::invalid_argument("bad");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("--calibration-scale: expected a positive number");
    }
  }
  return 1.0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliInvocation inv;
  try {
    inv = parse_invocation(args);
  } catch (const HelpRequested& help) {
    out << help.text;
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (inv.subcommand == "selftest") {
      const int failures = selftest(selftest_seed(inv), selftest_scale(inv), out);
      return failures == 0 ? kExitOk : kExitRuntime;
    }

    if (inv.subcommand == "oracle-table") {
      const ExperimentKind kind = kind_from_name(inv.table_kind);
      // Scan geometry keys only; Monte Carlo keys are accepted and echoed but
      // do not affect the analytic values.
      const LoadedConfig loaded = load_config(kind, inv.config_path, inv.overrides);
      write_table(oracle_table(loaded.config), inv.format, inv.output_path,
                  make_metadata(loaded));
      out << "oracle-table " << to_string(kind) << ": wrote " << inv.output_path << "\n";
      return kExitOk;
    }

    const ExperimentKind kind = kind_from_name(inv.subcommand);
    const LoadedConfig loaded = load_config(kind, inv.config_path, inv.overrides);
    const std::vector<ResultRow> rows = run_experiment(loaded.config);
    write_results(rows, kind, inv.format, inv.output_path, make_metadata(loaded));
    out << to_string(kind) << ": " << rows.size() << " scan point(s) x " << loaded.config.trials
        << " trials -> " << inv.output_path << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace cli
}  // namespace wavicle
