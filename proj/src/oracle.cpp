#include "wavicle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wavicle {
namespace oracle {

namespace {

// The exchange bracket and the tensor expectations are real analytically;
// a leaked imaginary part this large means an algebra bug, not rounding.
constexpr double kImagTol = 1e-14;

double real_checked(const Complex& z, const char* what) {
  if (std::abs(z.imag()) > kImagTol * std::max(1.0, std::abs(z.real())))
    throw std::logic_error(std::string(what) + ": imaginary part beyond tolerance");
  return z.real();
}

}  // namespace

TwoSourceScenario to_two_source(const SpinScenario& spin, Statistics stats) {
  return TwoSourceScenario{SourceSpec{"up", spin_up(), spin.occupancy_up, 0.0},
                           SourceSpec{"down", spin_down(), spin.occupancy_down, 0.0},
                           spin_operator(spin.dir_a), spin_operator(spin.dir_b), stats};
}

double expected_single(const SourceSpec& source, const HermitianOperator& op) {
  return matrix_element(source.state, op, source.state).real() * source.occupancy;
}

std::pair<double, double> expected_separate(const TwoSourceScenario& scn) {
  const double a = expected_single(scn.source_u, scn.op_a) + expected_single(scn.source_v, scn.op_a);
  const double b = expected_single(scn.source_u, scn.op_b) + expected_single(scn.source_v, scn.op_b);
  return {a, b};
}

double expected_joint_uncorr(const TwoSourceScenario& scn) {
  const StateVector& u = scn.source_u.state;
  const StateVector& v = scn.source_v.state;
  const double auu = matrix_element(u, scn.op_a, u).real();
  const double avv = matrix_element(v, scn.op_a, v).real();
  const double buu = matrix_element(u, scn.op_b, u).real();
  const double bvv = matrix_element(v, scn.op_b, v).real();
  return (auu * bvv + avv * buu) * scn.source_u.occupancy * scn.source_v.occupancy;
}

double expected_joint_corr(const TwoSourceScenario& scn) {
  const StateVector& u = scn.source_u.state;
  const StateVector& v = scn.source_v.state;
  const Complex bracket = matrix_element(u, scn.op_a, v) * matrix_element(v, scn.op_b, u) +
                          matrix_element(u, scn.op_b, v) * matrix_element(v, scn.op_a, u);
  const double re = real_checked(bracket, "expected_joint_corr");
  return scn.stats.sign() * re * scn.source_u.occupancy * scn.source_v.occupancy;
}

double expected_joint_total(const TwoSourceScenario& scn) {
  return expected_joint_uncorr(scn) + expected_joint_corr(scn);
}

double two_particle_expectation(const TwoSourceScenario& scn) {
  const auto u = scn.source_u.state.components();
  const auto v = scn.source_v.state.components();
  const int d = scn.source_u.state.dim();
  if (scn.op_a.dim() != d || scn.op_b.dim() != d)
    throw std::invalid_argument("two_particle_expectation: dimension mismatch");

  std::vector<Complex> psi = kron_vector(u, v);
  const std::vector<Complex> swapped = kron_vector(v, u);
  const double s = scn.stats.sign();
  for (size_t i = 0; i < psi.size(); ++i) psi[i] += s * swapped[i];

  const std::vector<Complex> m = kron_matrix(scn.op_a.entries(), d, scn.op_b.entries(), d);
  const std::vector<Complex> mpsi = apply_matrix(m, d * d, psi);
  const double val = real_checked(inner_product(psi, mpsi), "two_particle_expectation");
  return val * scn.source_u.occupancy * scn.source_v.occupancy;
}

double spin_gamma(const Direction& a, const Direction& b) {
  const double c = std::cos(a.theta) * std::cos(b.theta) +
                   std::cos(a.phi - b.phi) * std::sin(a.theta) * std::sin(b.theta);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

double spin_pair_uncorr(const SpinScenario& spin) {
  return expected_joint_uncorr(to_two_source(spin, Statistics::fermion()));
}

double spin_pair_corr(const SpinScenario& spin, Statistics stats) {
  return expected_joint_corr(to_two_source(spin, stats));
}

double spin_pair_total(const SpinScenario& spin, Statistics stats) {
  return expected_joint_total(to_two_source(spin, stats));
}

double hbt_correlation(const std::array<double, 3>& p, const std::array<double, 3>& p_prime,
                       const std::array<double, 3>& r, double f_p, double f_p_prime,
                       Statistics stats) {
  if (!(f_p >= 0.0) || !(f_p_prime >= 0.0))
    throw std::invalid_argument("hbt_correlation: occupancies must be >= 0");
  double dot = 0.0;
  for (int i = 0; i < 3; ++i) dot += (p[i] - p_prime[i]) * r[i];
  return (1.0 + stats.sign() * std::cos(dot)) * 2.0 * f_p * f_p_prime;
}

namespace {

double singlet_tensor_mean(const HermitianOperator& op_a, const HermitianOperator& op_b) {
  const StateVector up = spin_up();
  const StateVector down = spin_down();
  std::vector<Complex> psi = kron_vector(up.components(), down.components());
  const std::vector<Complex> swapped = kron_vector(down.components(), up.components());
  for (size_t i = 0; i < psi.size(); ++i) psi[i] -= swapped[i];
  const std::vector<Complex> m = kron_matrix(op_a.entries(), 2, op_b.entries(), 2);
  return real_checked(inner_product(psi, apply_matrix(m, 4, psi)), "singlet_expectation");
}

}  // namespace

double singlet_expectation(const Direction& a, const Direction& b) {
  return singlet_tensor_mean(spin_operator(a), spin_operator(b));
}

double singlet_single_expectation(const Direction& a) {
  return singlet_tensor_mean(spin_operator(a), HermitianOperator::identity(2));
}

double spin_flow_mean(double theta, double f_up, double f_down) {
  return std::cos(theta) * (f_up - f_down);
}

double spin_flip_probability(double theta) {
  const double c = std::cos(theta / 2.0);
  return c * c;
}

double mixed_noise_variance(const StateVector& u, const StateVector& v,
                            const HermitianOperator& op, SamplingMode mode) {
  const MixedTermTable table = build_mixed_table(u, v, spectral_decompose(op));
  if (mode == SamplingMode::Expectation) return std::norm(table.bra_op_ket) / 2.0;
  double second = 0.0;
  for (size_t j = 0; j < table.magnitude.size(); ++j)
    second += table.magnitude[j] * table.value[j] * table.value[j];
  return table.normalization * second / 2.0;
}

}  // namespace oracle
}  // namespace wavicle
