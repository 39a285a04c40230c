#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "wavicle/cli.hpp"

namespace wavicle {
namespace cli {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

enum class ValueType { Int, Real, Str };

constexpr unsigned kEpr = 1u << 0;
constexpr unsigned kHbt = 1u << 1;
constexpr unsigned kSpinFlow = 1u << 2;
constexpr unsigned kNoise = 1u << 3;
constexpr unsigned kAll = kEpr | kHbt | kSpinFlow | kNoise;

unsigned kind_bit(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Epr:
      return kEpr;
    case ExperimentKind::Hbt:
      return kHbt;
    case ExperimentKind::SpinFlow:
      return kSpinFlow;
    case ExperimentKind::Noise:
      return kNoise;
  }
  return 0;
}

struct KeySpec {
  ValueType type;
  unsigned kinds;
};

// Canonical key order; also the echo order in output metadata.
const std::vector<std::pair<std::string, KeySpec>>& schema() {
  static const std::vector<std::pair<std::string, KeySpec>> s = {
      {"kind", {ValueType::Str, kAll}},
      {"trials", {ValueType::Int, kAll}},
      {"seed", {ValueType::Int, kAll}},
      {"workers", {ValueType::Int, kAll}},
      {"statistics", {ValueType::Str, kAll}},
      {"mode", {ValueType::Str, kAll}},
      {"occupancy_u", {ValueType::Real, kAll}},
      {"occupancy_v", {ValueType::Real, kAll}},
      {"omega_u", {ValueType::Real, kAll}},
      {"omega_v", {ValueType::Real, kAll}},
      {"time_step", {ValueType::Real, kAll}},
      {"gamma_points", {ValueType::Int, kEpr}},
      {"gamma_min", {ValueType::Real, kEpr}},
      {"gamma_max", {ValueType::Real, kEpr}},
      {"gamma_list", {ValueType::Str, kEpr}},
      {"angles_list", {ValueType::Str, kEpr}},
      {"phase_points", {ValueType::Int, kHbt}},
      {"phase_min", {ValueType::Real, kHbt}},
      {"phase_max", {ValueType::Real, kHbt}},
      {"phase_list", {ValueType::Str, kHbt}},
      {"p", {ValueType::Str, kHbt}},
      {"pprime", {ValueType::Str, kHbt}},
      {"theta_points", {ValueType::Int, kSpinFlow}},
      {"theta_min", {ValueType::Real, kSpinFlow}},
      {"theta_max", {ValueType::Real, kSpinFlow}},
      {"theta_list", {ValueType::Str, kSpinFlow}},
      {"noise_theta", {ValueType::Real, kNoise}},
      {"noise_phi", {ValueType::Real, kNoise}},
  };
  return s;
}

const KeySpec& lookup(const std::string& key, ExperimentKind kind) {
  for (const auto& [name, spec] : schema()) {
    if (name != key) continue;
    if (!(spec.kinds & kind_bit(kind)))
      throw ConfigError("config key '" + key + "' does not apply to experiment '" +
                        to_string(kind) + "'");
    return spec;
  }
  throw ConfigError("unknown config key '" + key + "'");
}

struct Store {
  std::map<std::string, std::int64_t> ints;
  std::map<std::string, double> reals;
  std::map<std::string, std::string> strs;
  std::uint64_t seed = 42;
};

std::int64_t parse_int(const std::string& key, const std::string& text) {
  try {
    size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + text + "'");
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  try {
    size_t used = 0;
    if (!text.empty() && text[0] == '-') throw std::invalid_argument("negative");
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + text +
                      "'");
  }
}

double parse_real(const std::string& key, const std::string& text) {
  try {
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a finite number, got '" + text + "'");
  }
}

void set_from_string(Store& store, ExperimentKind kind, const std::string& key,
                     const std::string& value) {
  const KeySpec& spec = lookup(key, kind);
  if (key == "seed") {
    store.seed = parse_uint(key, value);
    return;
  }
  switch (spec.type) {
    case ValueType::Int:
      store.ints[key] = parse_int(key, value);
      break;
    case ValueType::Real:
      store.reals[key] = parse_real(key, value);
      break;
    case ValueType::Str:
      store.strs[key] = value;
      break;
  }
}

void set_from_json(Store& store, ExperimentKind kind, const std::string& key, const json& value) {
  const KeySpec& spec = lookup(key, kind);
  if (key == "seed") {
    if (value.is_number_unsigned())
      store.seed = value.get<std::uint64_t>();
    else if (value.is_number_integer() && value.get<std::int64_t>() >= 0)
      store.seed = static_cast<std::uint64_t>(value.get<std::int64_t>());
    else
      throw ConfigError("config key 'seed': expected a non-negative integer");
    return;
  }
  switch (spec.type) {
    case ValueType::Int: {
      if (value.is_number_integer() || value.is_number_unsigned()) {
        store.ints[key] = value.get<std::int64_t>();
      } else if (value.is_number_float()) {
        const double d = value.get<double>();
        if (d != std::trunc(d) || std::abs(d) > 9.0e15)
          throw ConfigError("config key '" + key + "': expected an integer");
        store.ints[key] = static_cast<std::int64_t>(d);
      } else {
        throw ConfigError("config key '" + key + "': expected an integer");
      }
      break;
    }
    case ValueType::Real:
      if (!value.is_number())
        throw ConfigError("config key '" + key + "': expected a number");
      if (!std::isfinite(value.get<double>()))
        throw ConfigError("config key '" + key + "': expected a finite number");
      store.reals[key] = value.get<double>();
      break;
    case ValueType::Str:
      if (!value.is_string())
        throw ConfigError("config key '" + key + "': expected a string");
      store.strs[key] = value.get<std::string>();
      break;
  }
}

Store defaults_for(ExperimentKind kind) {
  Store s;
  s.strs["kind"] = to_string(kind);
  s.ints["trials"] = kind == ExperimentKind::Hbt ? 100000 : 1000000;
  s.ints["workers"] = 4;
  s.strs["statistics"] = "fermion";
  s.strs["mode"] = "eigenvalue";
  s.reals["occupancy_u"] = 1.0;
  s.reals["occupancy_v"] = 1.0;
  s.reals["omega_u"] = 0.0;
  s.reals["omega_v"] = 0.0;
  s.reals["time_step"] = 1.0;
  switch (kind) {
    case ExperimentKind::Epr:
      s.ints["gamma_points"] = 13;
      s.reals["gamma_min"] = 0.0;
      s.reals["gamma_max"] = kPi;
      s.strs["gamma_list"] = "";
      s.strs["angles_list"] = "";
      break;
    case ExperimentKind::Hbt:
      s.ints["phase_points"] = 41;
      s.reals["phase_min"] = 0.0;
      s.reals["phase_max"] = 4.0 * kPi;
      s.strs["phase_list"] = "";
      s.strs["p"] = "1,0,0";
      s.strs["pprime"] = "0,0,0";
      break;
    case ExperimentKind::SpinFlow:
      s.ints["theta_points"] = 7;
      s.reals["theta_min"] = 0.0;
      s.reals["theta_max"] = kPi;
      s.strs["theta_list"] = "";
      break;
    case ExperimentKind::Noise:
      s.reals["noise_theta"] = kPi / 2.0;
      s.reals["noise_phi"] = 0.0;
      break;
  }
  return s;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split(text, ',')) {
    if (item.empty()) throw ConfigError("config key '" + key + "': empty list item");
    out.push_back(parse_real(key, item));
  }
  return out;
}

std::array<double, 3> parse_vec3(const std::string& key, const std::string& text) {
  const std::vector<double> v = parse_real_list(key, text);
  if (v.size() != 3)
    throw ConfigError("config key '" + key + "': expected three comma-separated components");
  return {v[0], v[1], v[2]};
}

std::vector<double> linspace(std::int64_t n, double lo, double hi) {
  std::vector<double> out;
  if (n <= 0) return out;
  out.reserve(static_cast<size_t>(n));
  if (n == 1) {
    out.push_back(lo);
    return out;
  }
  for (std::int64_t k = 0; k < n; ++k)
    out.push_back(k == n - 1 ? hi : lo + static_cast<double>(k) * (hi - lo) /
                                             static_cast<double>(n - 1));
  return out;
}

Direction checked_direction(const std::string& key, double theta, double phi) {
  try {
    return Direction(theta, phi);
  } catch (const std::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void finalize(const Store& s, ExperimentKind kind, LoadedConfig& out) {
  ExperimentConfig& cfg = out.config;
  cfg.kind = kind;
  cfg.seed = s.seed;

  if (s.strs.at("kind") != to_string(kind))
    throw ConfigError("config key 'kind': file says '" + s.strs.at("kind") +
                      "' but the subcommand is '" + to_string(kind) + "'");

  cfg.trials = s.ints.at("trials");
  const std::int64_t min_trials = kind == ExperimentKind::Noise ? 2 : 1;
  if (cfg.trials < min_trials)
    throw ConfigError("config key 'trials': must be >= " + std::to_string(min_trials));

  const std::int64_t workers = s.ints.at("workers");
  if (workers < 1 || workers > 256)
    throw ConfigError("config key 'workers': must lie in [1, 256]");
  cfg.workers = static_cast<int>(workers);

  const std::string& stats = s.strs.at("statistics");
  if (stats == "boson")
    cfg.stats = Statistics::boson();
  else if (stats == "fermion")
    cfg.stats = Statistics::fermion();
  else
    throw ConfigError("config key 'statistics': must be \"boson\" or \"fermion\", got \"" +
                      stats + "\"");

  const std::string& mode = s.strs.at("mode");
  if (mode == "eigenvalue")
    cfg.mode = SamplingMode::Eigenvalue;
  else if (mode == "expectation")
    cfg.mode = SamplingMode::Expectation;
  else
    throw ConfigError("config key 'mode': must be \"eigenvalue\" or \"expectation\", got \"" +
                      mode + "\"");

  cfg.occupancy_u = s.reals.at("occupancy_u");
  cfg.occupancy_v = s.reals.at("occupancy_v");
  if (!(cfg.occupancy_u >= 0.0))
    throw ConfigError("config key 'occupancy_u': must be >= 0");
  if (!(cfg.occupancy_v >= 0.0))
    throw ConfigError("config key 'occupancy_v': must be >= 0");
  cfg.omega_u = s.reals.at("omega_u");
  cfg.omega_v = s.reals.at("omega_v");
  cfg.time_step = s.reals.at("time_step");

  switch (kind) {
    case ExperimentKind::Epr: {
      const std::string& glist = s.strs.at("gamma_list");
      const std::string& alist = s.strs.at("angles_list");
      if (!glist.empty() && !alist.empty())
        throw ConfigError("config keys 'gamma_list' and 'angles_list' are mutually exclusive");
      if (!alist.empty()) {
        for (const std::string& quad : split(alist, ';')) {
          const std::vector<double> v = parse_real_list("angles_list", quad);
          if (v.size() != 4)
            throw ConfigError(
                "config key 'angles_list': each item needs four angles "
                "theta_a,phi_a,theta_b,phi_b");
          checked_direction("angles_list", v[0], v[1]);
          checked_direction("angles_list", v[2], v[3]);
          cfg.epr_angles.push_back({v[0], v[1], v[2], v[3]});
        }
      } else {
        const std::vector<double> gammas =
            glist.empty() ? linspace(s.ints.at("gamma_points"), s.reals.at("gamma_min"),
                                     s.reals.at("gamma_max"))
                          : parse_real_list("gamma_list", glist);
        for (double g : gammas) cfg.epr_angles.push_back({kPi / 2.0, 0.0, kPi / 2.0, g});
      }
      break;
    }
    case ExperimentKind::Hbt: {
      const std::string& plist = s.strs.at("phase_list");
      cfg.hbt_phases = plist.empty()
                           ? linspace(s.ints.at("phase_points"), s.reals.at("phase_min"),
                                      s.reals.at("phase_max"))
                           : parse_real_list("phase_list", plist);
      cfg.p = parse_vec3("p", s.strs.at("p"));
      cfg.p_prime = parse_vec3("pprime", s.strs.at("pprime"));
      double delta2 = 0.0;
      for (int i = 0; i < 3; ++i) {
        const double d = cfg.p[static_cast<size_t>(i)] - cfg.p_prime[static_cast<size_t>(i)];
        delta2 += d * d;
      }
      if (!(delta2 > 0.0) && !cfg.hbt_phases.empty())
        throw ConfigError("config keys 'p' and 'pprime': the two modes must differ");
      break;
    }
    case ExperimentKind::SpinFlow: {
      const std::string& tlist = s.strs.at("theta_list");
      cfg.spinflow_thetas = tlist.empty()
                                ? linspace(s.ints.at("theta_points"), s.reals.at("theta_min"),
                                           s.reals.at("theta_max"))
                                : parse_real_list("theta_list", tlist);
      for (double t : cfg.spinflow_thetas) checked_direction("theta_list", t, 0.0);
      break;
    }
    case ExperimentKind::Noise: {
      cfg.noise_theta = s.reals.at("noise_theta");
      cfg.noise_phi = s.reals.at("noise_phi");
      checked_direction("noise_theta", cfg.noise_theta, cfg.noise_phi);
      break;
    }
  }

  // Echo every applicable key with its effective value, in schema order.
  for (const auto& [name, spec] : schema()) {
    if (!(spec.kinds & kind_bit(kind))) continue;
    if (name == "seed") {
      out.resolved.emplace_back(name, std::to_string(s.seed));
    } else if (spec.type == ValueType::Int) {
      out.resolved.emplace_back(name, std::to_string(s.ints.at(name)));
    } else if (spec.type == ValueType::Real) {
      out.resolved.emplace_back(name, format_real(s.reals.at(name)));
    } else {
      out.resolved.emplace_back(name, s.strs.at(name));
    }
  }
}

}  // namespace

LoadedConfig load_config(ExperimentKind kind, const std::optional<std::string>& config_path,
                         const std::vector<std::pair<std::string, std::string>>& overrides) {
  Store store = defaults_for(kind);

  if (const char* env = std::getenv("WAVICLE_SEED"))
    store.seed = parse_uint("seed (from WAVICLE_SEED)", env);

  if (config_path) {
    std::ifstream in(*config_path);
    if (!in) throw ConfigError("cannot open config file '" + *config_path + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file '" + *config_path + "': " + e.what());
    }
    if (!doc.is_object())
      throw ConfigError("config file '" + *config_path + "': top level must be an object");
    for (const auto& [key, value] : doc.items()) set_from_json(store, kind, key, value);
  }

  for (const auto& [key, value] : overrides) set_from_string(store, kind, key, value);

  LoadedConfig out;
  finalize(store, kind, out);
  return out;
}

}  // namespace cli
}  // namespace wavicle
