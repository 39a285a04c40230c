#pragma once

#include <array>
#include <utility>

#include "wavicle/algebra.hpp"
#include "wavicle/model.hpp"
#include "wavicle/sampler.hpp"

namespace wavicle {
namespace oracle {

// Two sources feeding two detectors; the object every closed form below and
// the Monte Carlo engine agree to describe.
struct TwoSourceScenario {
  SourceSpec source_u;
  SourceSpec source_v;
  HermitianOperator op_a;
  HermitianOperator op_b;
  Statistics stats;
};

// Spin pair probed by two oriented analyzers.
struct SpinScenario {
  Direction dir_a;
  Direction dir_b;
  double occupancy_up = 1.0;
  double occupancy_down = 1.0;
};

// Up/down sources with analyzer operators along the two directions.
TwoSourceScenario to_two_source(const SpinScenario& spin, Statistics stats);

// Single-source mean reading: <s|Op|s> * F.
double expected_single(const SourceSpec& source, const HermitianOperator& op);

// Two-source separate means for detectors A and B.
std::pair<double, double> expected_separate(const TwoSourceScenario& scn);

// Product mean from the diag channels:
//   [<u|A|u><v|B|v> + <v|A|v><u|B|u>] * F_u * F_v.
double expected_joint_uncorr(const TwoSourceScenario& scn);

// Product mean from the exchange channels:
//   sign * [<u|A|v><v|B|u> + <u|B|v><v|A|u>] * F_u * F_v,
// sign +1 for bosons and -1 for fermions.
double expected_joint_corr(const TwoSourceScenario& scn);

// Sum of the two parts.
double expected_joint_total(const TwoSourceScenario& scn);

// Reference value by brute force: expectation of A (x) B in the
// (anti)symmetrized two-particle vector built from the source states,
// scaled by F_u * F_v.  No channel decomposition involved.
double two_particle_expectation(const TwoSourceScenario& scn);

// Angle between two analyzer directions:
//   cos(gamma) = cos(ta)cos(tb) + cos(pa - pb)sin(ta)sin(tb).
double spin_gamma(const Direction& a, const Direction& b);

// Spin-pair product means along two directions.
double spin_pair_uncorr(const SpinScenario& spin);
double spin_pair_corr(const SpinScenario& spin, Statistics stats);
double spin_pair_total(const SpinScenario& spin, Statistics stats);

// Coincidence rate of two detectors at separation R fed by two plane-wave
// modes p and p': [1 +/- cos((p - p') . R)] * 2 * F_p * F_p'.
double hbt_correlation(const std::array<double, 3>& p, const std::array<double, 3>& p_prime,
                       const std::array<double, 3>& r, double f_p, double f_p_prime,
                       Statistics stats);

// Tensor-product expectations in the unnormalized two-spin singlet
// |ud> - |du>.  The product mean equals the fermion spin-pair total at unit
// occupancies; each single-analyzer mean vanishes.
double singlet_expectation(const Direction& a, const Direction& b);
double singlet_single_expectation(const Direction& a);

// Mean reading of one analyzer at angle theta from the quantization axis fed
// by the up/down pair: cos(theta) * (F_up - F_down).
double spin_flow_mean(double theta, double f_up, double f_down);

// Probability that an analyzer at polar angle theta reads +1 on an up
// wavicle: cos(theta / 2)^2.
double spin_flip_probability(double theta);

// Variance of one detector's exchange reading before exchange calibration.
// Expectation mode: |<u|Op|v>|^2 / 2 (phase average of a cosine).
// Eigenvalue mode:  N * sum_j m_j * value_j^2 / 2 (adds term sampling noise).
double mixed_noise_variance(const StateVector& u, const StateVector& v,
                            const HermitianOperator& op, SamplingMode mode);

}  // namespace oracle
}  // namespace wavicle
