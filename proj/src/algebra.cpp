#include "wavicle/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace wavicle {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool finite(const Complex& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

Direction::Direction(double theta_in, double phi_in) : theta(theta_in), phi(phi_in) {
  require(std::isfinite(theta) && std::isfinite(phi), "Direction: angles must be finite");
  // Allow tiny overshoot from angle arithmetic, then clamp to the domain.
  require(theta >= -1e-9 && theta <= kPi + 1e-9,
          "Direction: theta must lie in [0, pi]");
  theta = std::clamp(theta, 0.0, kPi);
  phi = std::fmod(phi, 2.0 * kPi);
  if (phi < 0.0) phi += 2.0 * kPi;
  // Poles have no azimuth.
  if (theta == 0.0 || theta == kPi) phi = 0.0;
}

StateVector::StateVector(std::vector<Complex> components) : c_(std::move(components)) {
  require(!c_.empty(), "StateVector: dimension must be positive");
  for (const Complex& z : c_) require(finite(z), "StateVector: non-finite component");
  require(std::abs(norm_squared() - 1.0) <= kAlgebraTol,
          "StateVector: norm deviates from 1 beyond tolerance");
}

StateVector StateVector::normalized(std::vector<Complex> components) {
  require(!components.empty(), "StateVector: dimension must be positive");
  double n2 = 0.0;
  for (const Complex& z : components) {
    require(finite(z), "StateVector: non-finite component");
    n2 += std::norm(z);
  }
  require(n2 > 0.0, "StateVector: cannot normalize the zero vector");
  const double inv = 1.0 / std::sqrt(n2);
  for (Complex& z : components) z *= inv;
  return StateVector(std::move(components), Unchecked{});
}

double StateVector::norm_squared() const {
  double n2 = 0.0;
  for (const Complex& z : c_) n2 += std::norm(z);
  return n2;
}

HermitianOperator::HermitianOperator(int dim, std::vector<Complex> row_major)
    : dim_(dim), a_(std::move(row_major)) {
  require(dim_ >= 1, "HermitianOperator: dimension must be positive");
  require(a_.size() == static_cast<size_t>(dim_) * dim_,
          "HermitianOperator: entry count does not match dimension");
  for (const Complex& z : a_) require(finite(z), "HermitianOperator: non-finite entry");
  double scale = 0.0;
  for (const Complex& z : a_) scale = std::max(scale, std::abs(z));
  const double tol = kAlgebraTol * std::max(1.0, scale);
  for (int i = 0; i < dim_; ++i) {
    for (int j = i; j < dim_; ++j) {
      Complex& ij = a_[static_cast<size_t>(i) * dim_ + j];
      Complex& ji = a_[static_cast<size_t>(j) * dim_ + i];
      require(std::abs(ij - std::conj(ji)) <= tol,
              "HermitianOperator: input is not hermitian within tolerance");
      // Exact symmetrization; for already-hermitian input this is the identity.
      const Complex m = (ij + std::conj(ji)) * 0.5;
      ij = (i == j) ? Complex(m.real(), 0.0) : m;
      if (i != j) ji = std::conj(ij);
    }
  }
}

HermitianOperator HermitianOperator::identity(int dim) {
  require(dim >= 1, "HermitianOperator: dimension must be positive");
  std::vector<Complex> a(static_cast<size_t>(dim) * dim, Complex(0.0, 0.0));
  for (int i = 0; i < dim; ++i) a[static_cast<size_t>(i) * dim + i] = 1.0;
  return HermitianOperator(dim, std::move(a));
}

StateVector spin_up() { return StateVector({Complex(1.0, 0.0), Complex(0.0, 0.0)}); }
StateVector spin_down() { return StateVector({Complex(0.0, 0.0), Complex(1.0, 0.0)}); }

HermitianOperator spin_operator(const Direction& n) {
  const double ct = std::cos(n.theta);
  const double st = std::sin(n.theta);
  const Complex off(st * std::cos(n.phi), st * std::sin(n.phi));
  return HermitianOperator(2, {Complex(ct, 0.0), off, std::conj(off), Complex(-ct, 0.0)});
}

Complex matrix_element(const StateVector& bra, const HermitianOperator& op,
                       const StateVector& ket) {
  const int d = op.dim();
  require(bra.dim() == d && ket.dim() == d, "matrix_element: dimension mismatch");
  // Group (i,j) with (j,i) so that swapping bra and ket maps every summand to
  // its exact conjugate; complex add/mul commute bitwise, so the swapped call
  // returns the bitwise conjugate.
  Complex s(0.0, 0.0);
  for (int i = 0; i < d; ++i) {
    s += op.at(i, i).real() * (std::conj(bra[i]) * ket[i]);
    for (int j = i + 1; j < d; ++j) {
      s += op.at(i, j) * (std::conj(bra[i]) * ket[j]) +
           std::conj(op.at(i, j) * (std::conj(ket[i]) * bra[j]));
    }
  }
  return s;
}

namespace {

// One cyclic Jacobi sweep target: zero a(p,q) by the two-sided rotation
//   U = | c            s          |
//       | -s*conj(ph)  c*conj(ph) |   with ph = a(p,q)/|a(p,q)|,
// the complex-phase extension of the classic symmetric Jacobi rotation.
struct JacobiWorkspace {
  int d;
  std::vector<Complex> a;  // row-major, mutated toward diagonal
  std::vector<Complex> v;  // accumulated eigenvector columns

  Complex& at(std::vector<Complex>& m, int i, int j) {
    return m[static_cast<size_t>(i) * d + j];
  }

  void rotate(int p, int q) {
    const Complex w = at(a, p, q);
    const double aw = std::abs(w);
    if (aw < 1e-300) {
      at(a, p, q) = at(a, q, p) = Complex(0.0, 0.0);
      return;
    }
    const Complex ph = w / aw;
    const double app = at(a, p, p).real();
    const double aqq = at(a, q, q).real();
    const double tau = (aqq - app) / (2.0 * aw);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const Complex cph = std::conj(ph);
    for (int k = 0; k < d; ++k) {  // A <- A*U
      const Complex akp = at(a, k, p), akq = at(a, k, q);
      at(a, k, p) = c * akp - s * (cph * akq);
      at(a, k, q) = s * akp + c * (cph * akq);
    }
    for (int k = 0; k < d; ++k) {  // A <- U^H * A
      const Complex apk = at(a, p, k), aqk = at(a, q, k);
      at(a, p, k) = c * apk - s * (ph * aqk);
      at(a, q, k) = s * apk + c * (ph * aqk);
    }
    for (int k = 0; k < d; ++k) {  // V <- V*U
      const Complex vkp = at(v, k, p), vkq = at(v, k, q);
      at(v, k, p) = c * vkp - s * (cph * vkq);
      at(v, k, q) = s * vkp + c * (cph * vkq);
    }
    at(a, p, q) = at(a, q, p) = Complex(0.0, 0.0);
    at(a, p, p) = Complex(at(a, p, p).real(), 0.0);
    at(a, q, q) = Complex(at(a, q, q).real(), 0.0);
  }

  double off_norm() const {
    double s2 = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (i != j) s2 += std::norm(a[static_cast<size_t>(i) * d + j]);
    return std::sqrt(s2);
  }
};

}  // namespace

SpectralDecomposition spectral_decompose(const HermitianOperator& op) {
  const int d = op.dim();
  require(d <= 16, "spectral_decompose: dimension above supported limit 16");

  JacobiWorkspace ws;
  ws.d = d;
  ws.a.assign(op.entries().begin(), op.entries().end());
  ws.v.assign(static_cast<size_t>(d) * d, Complex(0.0, 0.0));
  for (int i = 0; i < d; ++i) ws.at(ws.v, i, i) = 1.0;

  double scale = 1.0;
  for (const Complex& z : ws.a) scale = std::max(scale, std::abs(z));
  const double stop = 1e-14 * scale;
  for (int sweep = 0; sweep < 30 && ws.off_norm() > stop; ++sweep) {
    for (int p = 0; p < d - 1; ++p)
      for (int q = p + 1; q < d; ++q) ws.rotate(p, q);
  }

  std::vector<int> order(static_cast<size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return ws.at(ws.a, i, i).real() < ws.at(ws.a, j, j).real();
  });

  SpectralDecomposition out;
  out.eigenvalues.reserve(static_cast<size_t>(d));
  out.eigenvectors.reserve(static_cast<size_t>(d));
  for (int rank = 0; rank < d; ++rank) {
    const int col = order[static_cast<size_t>(rank)];
    out.eigenvalues.push_back(ws.at(ws.a, col, col).real());
    std::vector<Complex> vec(static_cast<size_t>(d));
    for (int k = 0; k < d; ++k) vec[static_cast<size_t>(k)] = ws.at(ws.v, k, col);
    // Pin the global phase: largest-magnitude component becomes real positive,
    // first index winning ties.
    int lead = 0;
    double best = -1.0;
    for (int k = 0; k < d; ++k) {
      const double m = std::abs(vec[static_cast<size_t>(k)]);
      if (m > best) {
        best = m;
        lead = k;
      }
    }
    const Complex z = vec[static_cast<size_t>(lead)];
    if (std::abs(z) > 0.0) {
      const Complex fix = std::conj(z) / std::abs(z);
      for (Complex& x : vec) x *= fix;
      vec[static_cast<size_t>(lead)] = Complex(std::abs(z), 0.0);
    }
    out.eigenvectors.push_back(StateVector::normalized(std::move(vec)));
  }
  return out;
}

std::vector<Complex> overlap_coefficients(const StateVector& state,
                                          const SpectralDecomposition& basis) {
  const size_t d = static_cast<size_t>(state.dim());
  require(basis.eigenvectors.size() == d, "overlap_coefficients: basis size mismatch");
  std::vector<Complex> c(d);
  for (size_t j = 0; j < d; ++j) {
    require(basis.eigenvectors[j].dim() == state.dim(),
            "overlap_coefficients: dimension mismatch");
    c[j] = inner_product(basis.eigenvectors[j].components(), state.components());
  }
  return c;
}

std::vector<Complex> kron_vector(std::span<const Complex> a, std::span<const Complex> b) {
  std::vector<Complex> out(a.size() * b.size());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

std::vector<Complex> kron_matrix(std::span<const Complex> a, int dim_a,
                                 std::span<const Complex> b, int dim_b) {
  require(a.size() == static_cast<size_t>(dim_a) * dim_a &&
              b.size() == static_cast<size_t>(dim_b) * dim_b,
          "kron_matrix: entry count does not match dimension");
  const size_t d = static_cast<size_t>(dim_a) * dim_b;
  std::vector<Complex> out(d * d);
  for (int i1 = 0; i1 < dim_a; ++i1)
    for (int j1 = 0; j1 < dim_a; ++j1)
      for (int i2 = 0; i2 < dim_b; ++i2)
        for (int j2 = 0; j2 < dim_b; ++j2)
          out[(static_cast<size_t>(i1) * dim_b + i2) * d + static_cast<size_t>(j1) * dim_b + j2] =
              a[static_cast<size_t>(i1) * dim_a + j1] * b[static_cast<size_t>(i2) * dim_b + j2];
  return out;
}

std::vector<Complex> apply_matrix(std::span<const Complex> m, int dim,
                                  std::span<const Complex> v) {
  require(m.size() == static_cast<size_t>(dim) * dim && v.size() == static_cast<size_t>(dim),
          "apply_matrix: dimension mismatch");
  std::vector<Complex> out(static_cast<size_t>(dim), Complex(0.0, 0.0));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      out[static_cast<size_t>(i)] += m[static_cast<size_t>(i) * dim + j] * v[static_cast<size_t>(j)];
  return out;
}

Complex inner_product(std::span<const Complex> bra, std::span<const Complex> ket) {
  require(bra.size() == ket.size(), "inner_product: dimension mismatch");
  Complex s(0.0, 0.0);
  for (size_t i = 0; i < bra.size(); ++i) s += std::conj(bra[i]) * ket[i];
  return s;
}

}  // namespace wavicle
