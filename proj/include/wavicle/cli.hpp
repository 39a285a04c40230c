#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wavicle/experiments.hpp"

namespace wavicle {
namespace cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;  // I/O and execution failures
inline constexpr int kExitUsage = 2;    // flag and config errors

enum class OutputFormat { Csv, Json };

// Bad flags, bad config keys or values.  Maps to kExitUsage.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failures.  Maps to kExitRuntime.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --help / --version requested; carries the text to print.  Maps to kExitOk.
struct HelpRequested {
  std::string text;
};

// A parsed command line, not yet resolved against defaults or config file.
struct CliInvocation {
  std::string subcommand;  // epr | hbt | spinflow | noise | oracle-table | selftest
  std::optional<std::string> config_path;
  // Key/value settings in the order given; dedicated flags are normalized
  // into the same key space as --set and the config file.
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string output_path;  // empty selects "<subcommand>.csv" or ".json"
  OutputFormat format = OutputFormat::Csv;
  std::string table_kind;  // oracle-table only: epr | hbt
};

CliInvocation parse_invocation(const std::vector<std::string>& args);

// Defaults for `kind`, overlaid by the optional JSON config file, overlaid by
// the override list.  The WAVICLE_SEED environment variable replaces only the
// built-in default seed; file and flag values win over it.  Unknown keys,
// keys that do not apply to `kind`, and out-of-range values all throw
// ConfigError naming the key.
struct LoadedConfig {
  ExperimentConfig config;
  // Full resolved key set in canonical order, echoed into output metadata.
  std::vector<std::pair<std::string, std::string>> resolved;
};

LoadedConfig load_config(ExperimentKind kind, const std::optional<std::string>& config_path,
                         const std::vector<std::pair<std::string, std::string>>& overrides);

struct RunMetadata {
  std::string version;
  std::string kind;
  std::uint64_t seed = 0;
  std::int64_t trials = 0;
  std::vector<std::pair<std::string, std::string>> resolved_config;
};

// Serialize rows to path (temp file + rename, so failures never leave a
// partial file).  CSV is the bare table with reals at full precision; JSON
// carries the same columns plus the run metadata.
void write_results(const std::vector<ResultRow>& rows, ExperimentKind kind, OutputFormat format,
                   const std::string& path, const RunMetadata& meta);

// Deterministic verification pass: algebra and reference identities plus a
// short Monte Carlo smoke run.  Prints one PASS/FAIL line per gate to `out`
// and returns the number of failed gates.  calibration_scale rescales the
// exchange calibration so an injected miscalibration must be caught.
int selftest(std::uint64_t seed, double calibration_scale, std::ostream& out);

// Full tool entry point: parse, run, write, map errors to exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cli
}  // namespace wavicle
