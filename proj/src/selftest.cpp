#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "wavicle/cli.hpp"
#include "wavicle/oracle.hpp"
#include "wavicle/version.hpp"

namespace wavicle {
namespace cli {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Gate {
  std::ostream& out;
  int failures = 0;

  void report(const std::string& name, bool pass, double value, double limit) {
    std::ostringstream detail;
    detail.setf(std::ios::scientific);
    detail << std::setprecision(3) << value << " vs limit " << limit;
    out << (pass ? "[PASS] " : "[FAIL] ") << name << "  " << detail.str() << "\n";
    if (!pass) ++failures;
  }
};

StateVector random_state(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<Complex> c(static_cast<size_t>(dim));
  for (Complex& z : c) z = Complex(n(rng), n(rng));
  return StateVector::normalized(std::move(c));
}

HermitianOperator random_operator(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<Complex> a(static_cast<size_t>(dim) * dim);
  for (int i = 0; i < dim; ++i) {
    a[static_cast<size_t>(i) * dim + i] = Complex(n(rng), 0.0);
    for (int j = i + 1; j < dim; ++j) {
      const Complex z(n(rng), n(rng));
      a[static_cast<size_t>(i) * dim + j] = z;
      a[static_cast<size_t>(j) * dim + i] = std::conj(z);
    }
  }
  return HermitianOperator(dim, std::move(a));
}

Direction random_direction(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return Direction(std::acos(2.0 * u(rng) - 1.0), 2.0 * kPi * u(rng));
}

double reconstruction_error(const HermitianOperator& op, const SpectralDecomposition& d) {
  double worst = 0.0;
  const int n = op.dim();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Complex s(0.0, 0.0);
      for (int k = 0; k < n; ++k)
        s += d.eigenvalues[static_cast<size_t>(k)] * d.eigenvectors[static_cast<size_t>(k)][i] *
             std::conj(d.eigenvectors[static_cast<size_t>(k)][j]);
      worst = std::max(worst, std::abs(s - op.at(i, j)));
    }
  }
  return worst;
}

}  // namespace

int selftest(std::uint64_t seed, double calibration_scale, std::ostream& out) {
  out << "wavicle selftest " << kVersion << " (seed " << seed << ", calibration scale "
      << calibration_scale << ")\n";
  Gate gate{out};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  {
    double worst = 0.0;
    for (int rep = 0; rep < 60; ++rep) {
      const int dim = 2 + static_cast<int>(rep % 7);
      const HermitianOperator op = random_operator(rng, dim);
      worst = std::max(worst, reconstruction_error(op, spectral_decompose(op)));
    }
    gate.report("spectral_reconstruction", worst < 1e-10, worst, 1e-10);
  }

  {
    bool exact = true;
    for (int rep = 0; rep < 100; ++rep) {
      const int dim = 2 + static_cast<int>(rep % 5);
      const HermitianOperator op = random_operator(rng, dim);
      const StateVector a = random_state(rng, dim);
      const StateVector b = random_state(rng, dim);
      const Complex x = matrix_element(a, op, b);
      const Complex y = matrix_element(b, op, a);
      exact = exact && x.real() == y.real() && x.imag() == -y.imag();
    }
    gate.report("matrix_element_conjugate_symmetry", exact, exact ? 0.0 : 1.0, 0.0);
  }

  {
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      const int dim = 2 + static_cast<int>(rep % 5);
      const HermitianOperator op = random_operator(rng, dim);
      const SpectralDecomposition d = spectral_decompose(op);
      const StateVector a = random_state(rng, dim);
      const StateVector b = random_state(rng, dim);
      const MixedTermTable t = build_mixed_table(a, b, d);
      const double phase = 2.0 * kPi * u01(rng) - kPi;
      double by_terms = 0.0;
      for (size_t j = 0; j < t.magnitude.size(); ++j)
        by_terms += t.magnitude[j] * t.value[j] * std::cos(t.alpha[j] + phase);
      worst = std::max(worst, std::abs(by_terms - t.expectation_reading(phase)));
      const Complex direct = matrix_element(a, op, b);
      worst = std::max(worst, std::abs(t.bra_op_ket - direct));
    }
    gate.report("mixed_table_identity", worst < 1e-10, worst, 1e-10);
  }

  {
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      const oracle::TwoSourceScenario scn{
          SourceSpec{"u", random_state(rng, 2), 0.2 + u01(rng), 0.0},
          SourceSpec{"v", random_state(rng, 2), 0.2 + u01(rng), 0.0},
          random_operator(rng, 2),
          random_operator(rng, 2),
          rep % 2 ? Statistics::boson() : Statistics::fermion()};
      worst = std::max(worst, std::abs(oracle::expected_joint_total(scn) -
                                       oracle::two_particle_expectation(scn)));
    }
    gate.report("two_particle_equivalence", worst < 1e-12, worst, 1e-12);
  }

  {
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      const Direction a = random_direction(rng);
      const Direction b = random_direction(rng);
      const oracle::SpinScenario spin{a, b, 1.0, 1.0};
      worst = std::max(worst, std::abs(oracle::spin_pair_total(spin, Statistics::fermion()) -
                                       oracle::singlet_expectation(a, b)));
      worst = std::max(worst, std::abs(oracle::singlet_single_expectation(a)));
    }
    gate.report("singlet_equivalence", worst < 1e-12, worst, 1e-12);
  }

  {
    double worst = 0.0;
    for (int rep = 0; rep < 500; ++rep) {
      const Direction a = random_direction(rng);
      const Direction b = random_direction(rng);
      const oracle::SpinScenario spin{a, b, 1.0, 1.0};
      const double gamma = oracle::spin_gamma(a, b);
      worst = std::max(worst, std::abs(oracle::spin_pair_total(spin, Statistics::fermion()) +
                                       2.0 * std::cos(gamma)));
    }
    gate.report("spin_pair_closed_form", worst < 1e-12, worst, 1e-12);
  }

  {
    double worst = 0.0;
    const std::array<double, 3> p{1.0, 0.0, 0.0};
    const std::array<double, 3> pp{0.0, 0.0, 0.0};
    for (int rep = 0; rep < 200; ++rep) {
      const double x = 8.0 * kPi * (u01(rng) - 0.5);
      const std::array<double, 3> r{x, u01(rng), u01(rng)};
      for (Statistics st : {Statistics::boson(), Statistics::fermion()}) {
        const double got = oracle::hbt_correlation(p, pp, r, 1.0, 1.0, st);
        const double want = (1.0 + st.sign() * std::cos(x)) * 2.0;
        worst = std::max(worst, std::abs(got - want));
      }
    }
    gate.report("hbt_closed_form", worst < 1e-12, worst, 1e-12);
  }

  // Short Monte Carlo run, judged against the references at 5 standard
  // errors.  An injected calibration_scale far enough from 1 shifts the
  // correlated part by tens of standard errors and must trip this gate.
  {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::Epr;
    cfg.trials = 10000;
    cfg.seed = seed;
    cfg.workers = 2;
    cfg.stats = Statistics::fermion();
    cfg.exchange_scale = kExchangeCalibration * calibration_scale;
    cfg.epr_angles = {{kPi / 2.0, 0.0, kPi / 2.0, 0.0},
                      {kPi / 2.0, 0.0, kPi / 2.0, kPi / 3.0}};
    const std::vector<ResultRow> rows = run_epr_scan(cfg);
    double worst_z = 0.0;
    double worst_sep = 0.0;
    for (const ResultRow& row : rows) {
      worst_z = std::max(worst_z, row.z_score);
      worst_sep = std::max({worst_sep, std::abs(row.mc_mean_a) / row.stderr_a,
                            std::abs(row.mc_mean_b) / row.stderr_b});
    }
    gate.report("mc_joint_smoke", worst_z < 5.0, worst_z, 5.0);
    gate.report("mc_separate_smoke", worst_sep < 5.0, worst_sep, 5.0);
  }

  {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::Epr;
    cfg.trials = 2000;
    cfg.seed = seed;
    cfg.stats = Statistics::fermion();
    cfg.epr_angles = {{kPi / 2.0, 0.0, kPi / 2.0, kPi / 3.0}};
    cfg.workers = 1;
    const ResultRow one = run_epr_scan(cfg).front();
    cfg.workers = 4;
    const ResultRow four = run_epr_scan(cfg).front();
    double worst = 0.0;
    const auto rel = [](double a, double b) {
      return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-30});
    };
    worst = std::max(worst, rel(one.mc_mean_ab, four.mc_mean_ab));
    worst = std::max(worst, rel(one.mc_mean_a, four.mc_mean_a));
    worst = std::max(worst, rel(one.mc_corr, four.mc_corr));
    gate.report("worker_invariance", worst <= 1e-9, worst, 1e-9);
  }

  out << (gate.failures == 0 ? "selftest: all gates passed\n"
                             : "selftest: " + std::to_string(gate.failures) + " gate(s) failed\n");
  return gate.failures;
}

}  // namespace cli
}  // namespace wavicle
