#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wavicle/cli.hpp"
#include "wavicle/experiments.hpp"
#include "wavicle/oracle.hpp"
#include "wavicle/results.hpp"
#include "wavicle/version.hpp"

namespace py = pybind11;

namespace {

using wavicle::Complex;
using wavicle::Direction;
using wavicle::HermitianOperator;
using wavicle::SamplingMode;
using wavicle::SourceSpec;
using wavicle::StateVector;
using wavicle::Statistics;

Statistics stats_from(const std::string& name) {
  if (name == "boson") return Statistics::boson();
  if (name == "fermion") return Statistics::fermion();
  throw py::value_error("statistics must be 'boson' or 'fermion', got '" + name + "'");
}

SamplingMode mode_from(const std::string& name) {
  if (name == "eigenvalue") return SamplingMode::Eigenvalue;
  if (name == "expectation") return SamplingMode::Expectation;
  throw py::value_error("mode must be 'eigenvalue' or 'expectation', got '" + name + "'");
}

StateVector state_from(const std::vector<Complex>& amplitudes) {
  return StateVector::normalized(amplitudes);
}

HermitianOperator op_from(const std::vector<std::vector<Complex>>& rows) {
  const int dim = static_cast<int>(rows.size());
  std::vector<Complex> flat;
  flat.reserve(static_cast<size_t>(dim) * dim);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != dim)
      throw py::value_error("operator matrix must be square");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return HermitianOperator(dim, std::move(flat));
}

std::vector<std::vector<Complex>> op_to_rows(const HermitianOperator& op) {
  std::vector<std::vector<Complex>> rows(static_cast<size_t>(op.dim()));
  for (int r = 0; r < op.dim(); ++r) {
    rows[static_cast<size_t>(r)].reserve(static_cast<size_t>(op.dim()));
    for (int c = 0; c < op.dim(); ++c) rows[static_cast<size_t>(r)].push_back(op.at(r, c));
  }
  return rows;
}

wavicle::oracle::TwoSourceScenario scenario_from(const std::vector<Complex>& u,
                                                 const std::vector<Complex>& v,
                                                 const std::vector<std::vector<Complex>>& op_a,
                                                 const std::vector<std::vector<Complex>>& op_b,
                                                 double f_u, double f_v,
                                                 const std::string& statistics) {
  return wavicle::oracle::TwoSourceScenario{SourceSpec{"u", state_from(u), f_u, 0.0},
                                            SourceSpec{"v", state_from(v), f_v, 0.0},
                                            op_from(op_a), op_from(op_b),
                                            stats_from(statistics)};
}

py::dict run_experiment_dict(const py::dict& config) {
  std::string kind_name;
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const auto& item : config) {
    const std::string key = py::cast<std::string>(py::str(item.first));
    const std::string value = py::cast<std::string>(py::str(item.second));
    if (key == "kind")
      kind_name = value;
    else
      overrides.emplace_back(key, value);
  }
  if (kind_name.empty()) throw py::value_error("config must provide 'kind'");

  wavicle::ExperimentKind kind;
  if (kind_name == "epr")
    kind = wavicle::ExperimentKind::Epr;
  else if (kind_name == "hbt")
    kind = wavicle::ExperimentKind::Hbt;
  else if (kind_name == "spinflow")
    kind = wavicle::ExperimentKind::SpinFlow;
  else if (kind_name == "noise")
    kind = wavicle::ExperimentKind::Noise;
  else
    throw py::value_error("kind must be one of epr, hbt, spinflow, noise; got '" + kind_name +
                          "'");

  wavicle::cli::LoadedConfig loaded;
  std::vector<wavicle::ResultRow> rows;
  wavicle::cli::Table table;
  {
    py::gil_scoped_release release;
    loaded = wavicle::cli::load_config(kind, std::nullopt, overrides);
    rows = wavicle::run_experiment(loaded.config);
    table = wavicle::cli::to_table(rows, kind);
  }

  py::dict meta;
  meta["version"] = wavicle::kVersion;
  meta["kind"] = wavicle::to_string(kind);
  meta["seed"] = loaded.config.seed;
  meta["trials"] = loaded.config.trials;
  py::dict resolved;
  for (const auto& [key, value] : loaded.resolved) resolved[py::str(key)] = value;
  meta["config"] = resolved;

  py::dict out;
  out["metadata"] = meta;
  out["columns"] = table.columns;
  out["rows"] = table.data;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Monte Carlo simulator and analytic reference for the correlations two "
            "independent quantum sources imprint on two detectors";
  m.attr("__version__") = wavicle::kVersion;

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const wavicle::cli::ConfigError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const wavicle::cli::IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    }
  });

  // Algebra on raw amplitude lists and nested row-major matrices.
  m.def(
      "spin_operator",
      [](double theta, double phi) {
        return op_to_rows(wavicle::spin_operator(Direction(theta, phi)));
      },
      py::arg("theta"), py::arg("phi"),
      "Spin projection along (theta, phi) as a nested 2x2 matrix");
  m.def(
      "matrix_element",
      [](const std::vector<Complex>& bra, const std::vector<std::vector<Complex>>& op,
         const std::vector<Complex>& ket) {
        return wavicle::matrix_element(state_from(bra), op_from(op), state_from(ket));
      },
      py::arg("bra"), py::arg("op"), py::arg("ket"),
      "<bra|op|ket> with inputs normalized first");
  m.def(
      "spectral_decompose",
      [](const std::vector<std::vector<Complex>>& op) {
        const wavicle::SpectralDecomposition d = wavicle::spectral_decompose(op_from(op));
        std::vector<std::vector<Complex>> vectors;
        vectors.reserve(d.eigenvectors.size());
        for (const StateVector& v : d.eigenvectors)
          vectors.emplace_back(v.components().begin(), v.components().end());
        return py::make_tuple(d.eigenvalues, vectors);
      },
      py::arg("op"),
      "(eigenvalues ascending, eigenvectors) of a hermitian matrix");

  // Closed-form reference values.
  m.def(
      "spin_gamma",
      [](double theta_a, double phi_a, double theta_b, double phi_b) {
        return wavicle::oracle::spin_gamma(Direction(theta_a, phi_a), Direction(theta_b, phi_b));
      },
      py::arg("theta_a"), py::arg("phi_a"), py::arg("theta_b"), py::arg("phi_b"),
      "Angle between two analyzer directions");
  m.def(
      "spin_pair_total",
      [](double theta_a, double phi_a, double theta_b, double phi_b, double f_up, double f_down,
         const std::string& statistics) {
        const wavicle::oracle::SpinScenario spin{Direction(theta_a, phi_a),
                                                 Direction(theta_b, phi_b), f_up, f_down};
        return wavicle::oracle::spin_pair_total(spin, stats_from(statistics));
      },
      py::arg("theta_a"), py::arg("phi_a"), py::arg("theta_b"), py::arg("phi_b"),
      py::arg("f_up") = 1.0, py::arg("f_down") = 1.0, py::arg("statistics") = "fermion",
      "Joint product mean of the spin pair (fermions: -2 cos(gamma) F_up F_down)");
  m.def(
      "spin_pair_corr",
      [](double theta_a, double phi_a, double theta_b, double phi_b, double f_up, double f_down,
         const std::string& statistics) {
        const wavicle::oracle::SpinScenario spin{Direction(theta_a, phi_a),
                                                 Direction(theta_b, phi_b), f_up, f_down};
        return wavicle::oracle::spin_pair_corr(spin, stats_from(statistics));
      },
      py::arg("theta_a"), py::arg("phi_a"), py::arg("theta_b"), py::arg("phi_b"),
      py::arg("f_up") = 1.0, py::arg("f_down") = 1.0, py::arg("statistics") = "fermion",
      "Exchange-channel part of the spin-pair product mean");
  m.def(
      "spin_pair_uncorr",
      [](double theta_a, double phi_a, double theta_b, double phi_b, double f_up,
         double f_down) {
        const wavicle::oracle::SpinScenario spin{Direction(theta_a, phi_a),
                                                 Direction(theta_b, phi_b), f_up, f_down};
        return wavicle::oracle::spin_pair_uncorr(spin);
      },
      py::arg("theta_a"), py::arg("phi_a"), py::arg("theta_b"), py::arg("phi_b"),
      py::arg("f_up") = 1.0, py::arg("f_down") = 1.0,
      "Diagonal-channel part of the spin-pair product mean");
  m.def(
      "singlet_expectation",
      [](double theta_a, double phi_a, double theta_b, double phi_b) {
        return wavicle::oracle::singlet_expectation(Direction(theta_a, phi_a),
                                                    Direction(theta_b, phi_b));
      },
      py::arg("theta_a"), py::arg("phi_a"), py::arg("theta_b"), py::arg("phi_b"),
      "Tensor-product expectation in the unnormalized two-spin singlet");
  m.def(
      "singlet_single_expectation",
      [](double theta, double phi) {
        return wavicle::oracle::singlet_single_expectation(Direction(theta, phi));
      },
      py::arg("theta"), py::arg("phi"),
      "Single-analyzer mean in the singlet (identically zero)");
  m.def(
      "hbt_correlation",
      [](const std::array<double, 3>& p, const std::array<double, 3>& p_prime,
         const std::array<double, 3>& r, double f_p, double f_p_prime,
         const std::string& statistics) {
        return wavicle::oracle::hbt_correlation(p, p_prime, r, f_p, f_p_prime,
                                                stats_from(statistics));
      },
      py::arg("p"), py::arg("p_prime"), py::arg("r"), py::arg("f_p") = 1.0,
      py::arg("f_p_prime") = 1.0, py::arg("statistics") = "boson",
      "Two-detector coincidence rate [1 +/- cos((p - p') . R)] * 2 F_p F_p'");
  m.def("spin_flow_mean", &wavicle::oracle::spin_flow_mean, py::arg("theta"), py::arg("f_up"),
        py::arg("f_down"), "Analyzer mean cos(theta) * (F_up - F_down)");
  m.def("spin_flip_probability", &wavicle::oracle::spin_flip_probability, py::arg("theta"),
        "Probability of reading +1 on an up state: cos^2(theta / 2)");
  m.def(
      "mixed_noise_variance",
      [](const std::vector<Complex>& u, const std::vector<Complex>& v,
         const std::vector<std::vector<Complex>>& op, const std::string& mode) {
        return wavicle::oracle::mixed_noise_variance(state_from(u), state_from(v), op_from(op),
                                                     mode_from(mode));
      },
      py::arg("u"), py::arg("v"), py::arg("op"), py::arg("mode") = "expectation",
      "Phase-averaged variance of one exchange reading before calibration");

  // Generic two-source product means plus the brute-force arbiter.
  m.def(
      "joint_total",
      [](const std::vector<Complex>& u, const std::vector<Complex>& v,
         const std::vector<std::vector<Complex>>& op_a,
         const std::vector<std::vector<Complex>>& op_b, double f_u, double f_v,
         const std::string& statistics) {
        return wavicle::oracle::expected_joint_total(
            scenario_from(u, v, op_a, op_b, f_u, f_v, statistics));
      },
      py::arg("u"), py::arg("v"), py::arg("op_a"), py::arg("op_b"), py::arg("f_u") = 1.0,
      py::arg("f_v") = 1.0, py::arg("statistics") = "fermion",
      "Channel-summed joint product mean of a general two-source scenario");
  m.def(
      "two_particle_expectation",
      [](const std::vector<Complex>& u, const std::vector<Complex>& v,
         const std::vector<std::vector<Complex>>& op_a,
         const std::vector<std::vector<Complex>>& op_b, double f_u, double f_v,
         const std::string& statistics) {
        return wavicle::oracle::two_particle_expectation(
            scenario_from(u, v, op_a, op_b, f_u, f_v, statistics));
      },
      py::arg("u"), py::arg("v"), py::arg("op_a"), py::arg("op_b"), py::arg("f_u") = 1.0,
      py::arg("f_v") = 1.0, py::arg("statistics") = "fermion",
      "Brute-force (anti)symmetrized two-particle expectation, the independent arbiter");

  // Full experiment pipeline on a flat config dict (same keys as the CLI).
  m.def("run_experiment", &run_experiment_dict, py::arg("config"),
        "Run a Monte Carlo scan; returns {'metadata', 'columns', 'rows'}");

  m.def(
      "selftest",
      [](std::uint64_t seed) {
        std::ostringstream out;
        int failed = 0;
        {
          py::gil_scoped_release release;
          failed = wavicle::cli::selftest(seed, 1.0, out);
        }
        return py::make_tuple(failed, out.str());
      },
      py::arg("seed") = 42,
      "Run the verification gates; returns (failed_gate_count, report_text)");
}
