#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wavicle/estimator.hpp"
#include "wavicle/model.hpp"
#include "wavicle/oracle.hpp"
#include "wavicle/sampler.hpp"

namespace wavicle {

enum class ExperimentKind { Epr, Hbt, SpinFlow, Noise };

const char* to_string(ExperimentKind kind);

// Fully resolved run description.  Loading and validating user input into
// this struct is the config layer's job; the runners trust it.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Epr;
  std::int64_t trials = 1000000;  // per scan point
  std::uint64_t seed = 42;
  int workers = 4;
  Statistics stats = Statistics::fermion();
  SamplingMode mode = SamplingMode::Eigenvalue;
  double occupancy_u = 1.0;
  double occupancy_v = 1.0;
  double omega_u = 0.0;
  double omega_v = 0.0;
  double time_step = 1.0;
  // Exchange calibration actually applied; self-test fault injection only.
  double exchange_scale = kExchangeCalibration;

  // Analyzer orientations (theta_a, phi_a, theta_b, phi_b) per scan point.
  std::vector<std::array<double, 4>> epr_angles;
  // (p - p') . R per scan point, realized by scaling R along p - p'.
  std::vector<double> hbt_phases;
  std::array<double, 3> p{1.0, 0.0, 0.0};
  std::array<double, 3> p_prime{0.0, 0.0, 0.0};
  // Analyzer polar angle per scan point.
  std::vector<double> spinflow_thetas;
  // Single analyzer orientation for the exchange-noise study.
  double noise_theta = 1.5707963267948966;
  double noise_phi = 0.0;
};

// One scan point of any experiment: the experiment-specific columns first,
// then the shared Monte Carlo / reference block.  stderr_uncorr and
// stderr_corr stay out of the serialized table but feed the gates.
struct ResultRow {
  std::vector<std::pair<std::string, double>> scan;
  double mc_mean_a = 0.0, stderr_a = 0.0;
  double mc_mean_b = 0.0, stderr_b = 0.0;
  double mc_mean_ab = 0.0, stderr_ab = 0.0;
  double mc_uncorr = 0.0, mc_corr = 0.0;
  double stderr_uncorr = 0.0, stderr_corr = 0.0;
  double oracle_uncorr = 0.0, oracle_corr = 0.0, oracle_total = 0.0;
  double z_score = 0.0;
};

// Experiment-specific leading column names, needed to emit a header even for
// an empty scan.
std::vector<std::string> scan_columns(ExperimentKind kind);

// Scan of the spin-pair correlation against analyzer separation.
std::vector<ResultRow> run_epr_scan(const ExperimentConfig& cfg);
// Scan of the two-mode coincidence rate against detector separation.
std::vector<ResultRow> run_hbt_scan(const ExperimentConfig& cfg);
// Single-analyzer means and +1 frequencies against analyzer angle.
std::vector<ResultRow> run_spinflow(const ExperimentConfig& cfg);
// Exchange-channel reading noise against its predicted law (single point).
std::vector<ResultRow> run_noise_analysis(const ExperimentConfig& cfg);

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

}  // namespace wavicle
