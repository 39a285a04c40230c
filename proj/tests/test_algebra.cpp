#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "testutil.hpp"
#include "wavicle/algebra.hpp"

using namespace wavicle;
using testutil::kPi;

namespace {

// max |entry| of (sum_j lambda_j f_j f_j^dagger) - op
double reconstruction_error(const HermitianOperator& op, const SpectralDecomposition& d) {
  const int n = op.dim();
  double worst = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      Complex sum(0.0, 0.0);
      for (size_t j = 0; j < d.eigenvalues.size(); ++j)
        sum += d.eigenvalues[j] * d.eigenvectors[j][r] * std::conj(d.eigenvectors[j][c]);
      worst = std::max(worst, std::abs(sum - op.at(r, c)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("Direction validates and canonicalizes") {
  const Direction d(kPi / 3.0, kPi / 4.0);
  CHECK(d.theta == doctest::Approx(kPi / 3.0));
  CHECK(d.phi == doctest::Approx(kPi / 4.0));

  SUBCASE("phi wraps into [0, 2pi)") {
    CHECK(Direction(1.0, -kPi / 2.0).phi == doctest::Approx(3.0 * kPi / 2.0));
    CHECK(Direction(1.0, 2.0 * kPi + 0.5).phi == doctest::Approx(0.5));
  }
  SUBCASE("poles force phi = 0") {
    CHECK(Direction(0.0, 1.25).phi == 0.0);
    CHECK(Direction(kPi, 5.0).phi == 0.0);
  }
  SUBCASE("tiny overshoot clamps, real overshoot throws") {
    CHECK(Direction(-1e-12, 0.0).theta == 0.0);
    CHECK(Direction(kPi + 1e-12, 0.0).theta == kPi);
    CHECK_THROWS_AS(Direction(-0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Direction(kPi + 0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Direction(std::nan(""), 0.0), std::invalid_argument);
  }
}

TEST_CASE("StateVector enforces unit norm") {
  CHECK_NOTHROW(StateVector({Complex(1.0, 0.0), Complex(0.0, 0.0)}));
  CHECK_THROWS_AS(StateVector({Complex(2.0, 0.0)}), std::invalid_argument);
  CHECK_THROWS_AS(StateVector(std::vector<Complex>{}), std::invalid_argument);
  CHECK_THROWS_AS(StateVector({Complex(std::nan(""), 0.0)}), std::invalid_argument);

  SUBCASE("normalized rescales anything but zero") {
    const StateVector s = StateVector::normalized({Complex(3.0, 0.0), Complex(0.0, 4.0)});
    CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s[0].real() == doctest::Approx(0.6));
    CHECK(s[1].imag() == doctest::Approx(0.8));
    CHECK_THROWS_AS(StateVector::normalized({Complex(0.0, 0.0), Complex(0.0, 0.0)}),
                    std::invalid_argument);
  }
}

TEST_CASE("HermitianOperator symmetrizes exactly and rejects non-hermitian input") {
  // Asymmetry below tolerance is symmetrized away.
  const double eps = 1e-14;
  const HermitianOperator h(2, {Complex(1.0, 0.0), Complex(0.5, 0.25 + eps),
                                Complex(0.5, -0.25 + eps), Complex(-1.0, 0.0)});
  CHECK(h.at(0, 1) == std::conj(h.at(1, 0)));
  CHECK(h.at(0, 0).imag() == 0.0);

  CHECK_THROWS_AS(HermitianOperator(2, {Complex(1.0, 0.0), Complex(1.0, 0.0),
                                        Complex(0.0, 0.0), Complex(0.0, 0.0)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(HermitianOperator(2, {Complex(0.0, 1.0), Complex(0.0, 0.0),
                                        Complex(0.0, 0.0), Complex(0.0, 0.0)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(HermitianOperator(2, {Complex(1.0, 0.0)}), std::invalid_argument);

  const HermitianOperator id = HermitianOperator::identity(3);
  CHECK(id.at(0, 0) == Complex(1.0, 0.0));
  CHECK(id.at(0, 1) == Complex(0.0, 0.0));
}

TEST_CASE("spin_operator hits the Pauli matrices on the axes") {
  SUBCASE("polar axis gives sigma_z") {
    const HermitianOperator s = spin_operator(Direction(0.0, 0.0));
    CHECK(s.at(0, 0) == Complex(1.0, 0.0));
    CHECK(s.at(0, 1) == Complex(0.0, 0.0));
    CHECK(s.at(1, 0) == Complex(0.0, 0.0));
    CHECK(s.at(1, 1) == Complex(-1.0, 0.0));
  }
  SUBCASE("x axis gives sigma_x") {
    const HermitianOperator s = spin_operator(Direction(kPi / 2.0, 0.0));
    CHECK(s.at(0, 0).real() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(s.at(0, 1).real() == doctest::Approx(1.0));
    CHECK(s.at(0, 1).imag() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(s.at(1, 1).real() == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("general direction: traceless, hermitian, eigenvalues +/-1") {
    const HermitianOperator s = spin_operator(Direction(kPi / 3.0, kPi / 4.0));
    CHECK(std::abs(s.at(0, 0) + s.at(1, 1)) < 1e-15);
    CHECK(s.at(0, 1) == std::conj(s.at(1, 0)));
    const SpectralDecomposition d = spectral_decompose(s);
    REQUIRE(d.eigenvalues.size() == 2);
    CHECK(d.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(d.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("matrix_element reproduces the closed-form spin elements") {
  const double theta = 1.1, phi = 0.7;
  const HermitianOperator s = spin_operator(Direction(theta, phi));
  const StateVector up = spin_up(), down = spin_down();

  const Complex uu = matrix_element(up, s, up);
  CHECK(uu.real() == doctest::Approx(std::cos(theta)).epsilon(1e-14));
  CHECK(uu.imag() == 0.0);

  // <up|S|down> = exp(+i*phi) * sin(theta)
  const Complex ud = matrix_element(up, s, down);
  CHECK(ud.real() == doctest::Approx(std::cos(phi) * std::sin(theta)).epsilon(1e-14));
  CHECK(ud.imag() == doctest::Approx(std::sin(phi) * std::sin(theta)).epsilon(1e-14));

  const Complex dd = matrix_element(down, s, down);
  CHECK(dd.real() == doctest::Approx(-std::cos(theta)).epsilon(1e-14));
  CHECK(dd.imag() == 0.0);
}

TEST_CASE("matrix_element is conjugate-symmetric bitwise") {
  std::mt19937_64 rng(101);
  for (int dim : {2, 3, 4, 7}) {
    for (int rep = 0; rep < 50; ++rep) {
      const StateVector u = testutil::random_state(rng, dim);
      const StateVector v = testutil::random_state(rng, dim);
      const HermitianOperator op = testutil::random_operator(rng, dim);
      const Complex uv = matrix_element(u, op, v);
      const Complex vu = matrix_element(v, op, u);
      // Exact equality, not approximate: the term grouping guarantees it.
      CHECK(uv.real() == vu.real());
      CHECK(uv.imag() == -vu.imag());
    }
  }
}

TEST_CASE("matrix_element agrees with the naive double sum") {
  std::mt19937_64 rng(102);
  for (int rep = 0; rep < 100; ++rep) {
    const int dim = 2 + static_cast<int>(rng() % 3);
    const StateVector u = testutil::random_state(rng, dim);
    const StateVector v = testutil::random_state(rng, dim);
    const HermitianOperator op = testutil::random_operator(rng, dim);
    Complex naive(0.0, 0.0);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) naive += std::conj(u[i]) * op.at(i, j) * v[j];
    CHECK(std::abs(matrix_element(u, op, v) - naive) < 1e-12);
  }
}

TEST_CASE("matrix_element rejects dimension mismatch") {
  const HermitianOperator id3 = HermitianOperator::identity(3);
  CHECK_THROWS_AS(matrix_element(spin_up(), id3, spin_up()), std::invalid_argument);
}

TEST_CASE("spectral_decompose on sigma_z: ascending eigenvalues, phase-fixed vectors") {
  const SpectralDecomposition d = spectral_decompose(spin_operator(Direction(0.0, 0.0)));
  REQUIRE(d.eigenvalues.size() == 2);
  CHECK(d.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(d.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
  // Eigenvector of -1 is |down>, of +1 is |up>, each with its big component
  // made real positive.
  CHECK(std::abs(d.eigenvectors[0][0]) < 1e-14);
  CHECK(d.eigenvectors[0][1].real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.eigenvectors[0][1].imag() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(d.eigenvectors[1][0].real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(d.eigenvectors[1][1]) < 1e-14);
}

TEST_CASE("spectral_decompose handles the zero matrix") {
  const HermitianOperator zero(2, std::vector<Complex>(4, Complex(0.0, 0.0)));
  const SpectralDecomposition d = spectral_decompose(zero);
  CHECK(d.eigenvalues[0] == 0.0);
  CHECK(d.eigenvalues[1] == 0.0);
  CHECK(reconstruction_error(zero, d) == 0.0);
}

TEST_CASE("spectral_decompose reconstruction over random matrices") {
  std::mt19937_64 rng(103);
  for (int dim : {2, 4}) {
    for (int rep = 0; rep < 1000; ++rep) {
      const HermitianOperator op = testutil::random_operator(rng, dim);
      const SpectralDecomposition d = spectral_decompose(op);
      CHECK(reconstruction_error(op, d) < 1e-10);
      // Ascending order.
      for (size_t j = 1; j < d.eigenvalues.size(); ++j)
        CHECK(d.eigenvalues[j] >= d.eigenvalues[j - 1]);
      // Orthonormality.
      for (size_t j = 0; j < d.eigenvectors.size(); ++j) {
        for (size_t k = j; k < d.eigenvectors.size(); ++k) {
          const Complex g = inner_product(d.eigenvectors[j].components(),
                                          d.eigenvectors[k].components());
          CHECK(std::abs(g - (j == k ? Complex(1.0, 0.0) : Complex(0.0, 0.0))) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("spectral_decompose rejects oversized operators") {
  CHECK_THROWS_AS(spectral_decompose(HermitianOperator::identity(17)), std::invalid_argument);
  CHECK_NOTHROW(spectral_decompose(HermitianOperator::identity(16)));
}

TEST_CASE("overlap_coefficients in the sigma_z basis") {
  const SpectralDecomposition d = spectral_decompose(spin_operator(Direction(0.0, 0.0)));
  // |up> has no weight on the -1 eigenvector and full weight on +1.
  const std::vector<Complex> c = overlap_coefficients(spin_up(), d);
  REQUIRE(c.size() == 2);
  CHECK(std::abs(c[0]) < 1e-14);
  CHECK(std::abs(c[1] - Complex(1.0, 0.0)) < 1e-14);
}

TEST_CASE("overlap weights of up/down in a tilted analyzer basis") {
  const double theta = 0.9;
  const SpectralDecomposition d = spectral_decompose(spin_operator(Direction(theta, 0.0)));
  const double c2 = std::cos(theta / 2.0) * std::cos(theta / 2.0);
  const double s2 = std::sin(theta / 2.0) * std::sin(theta / 2.0);

  // Ascending order puts the -1 eigenvector first: |up> carries sin^2(theta/2)
  // there and cos^2(theta/2) on +1; |down> is the reverse.
  const std::vector<Complex> cu = overlap_coefficients(spin_up(), d);
  CHECK(std::norm(cu[0]) == doctest::Approx(s2).epsilon(1e-12));
  CHECK(std::norm(cu[1]) == doctest::Approx(c2).epsilon(1e-12));

  const std::vector<Complex> cd = overlap_coefficients(spin_down(), d);
  CHECK(std::norm(cd[0]) == doctest::Approx(c2).epsilon(1e-12));
  CHECK(std::norm(cd[1]) == doctest::Approx(s2).epsilon(1e-12));
}

TEST_CASE("overlap_coefficients are complete for random states") {
  std::mt19937_64 rng(104);
  for (int rep = 0; rep < 200; ++rep) {
    const int dim = 2 + static_cast<int>(rng() % 5);
    const HermitianOperator op = testutil::random_operator(rng, dim);
    const SpectralDecomposition d = spectral_decompose(op);
    const StateVector s = testutil::random_state(rng, dim);
    double total = 0.0;
    for (const Complex& c : overlap_coefficients(s, d)) total += std::norm(c);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("tensor helpers factorize expectations") {
  std::mt19937_64 rng(105);
  const StateVector a = testutil::random_state(rng, 2);
  const StateVector b = testutil::random_state(rng, 3);
  const HermitianOperator ma = testutil::random_operator(rng, 2);
  const HermitianOperator mb = testutil::random_operator(rng, 3);

  const std::vector<Complex> ab = kron_vector(a.components(), b.components());
  REQUIRE(ab.size() == 6);
  const std::vector<Complex> mm = kron_matrix(ma.entries(), 2, mb.entries(), 3);
  REQUIRE(mm.size() == 36);

  // <a(x)b| Ma(x)Mb |a(x)b> = <a|Ma|a> * <b|Mb|b>
  const Complex lhs = inner_product(ab, apply_matrix(mm, 6, ab));
  const Complex rhs = matrix_element(a, ma, a) * matrix_element(b, mb, b);
  CHECK(std::abs(lhs - rhs) < 1e-12);
}
