#pragma once

#include <complex>
#include <span>
#include <vector>

namespace wavicle {

using Complex = std::complex<double>;

// Tolerance for structural checks (unit norm, hermiticity, reconstruction).
inline constexpr double kAlgebraTol = 1e-12;

// Detector orientation as polar angles of a unit vector.
// theta in [0, pi], phi in [0, 2*pi).  theta == 0 or pi forces phi = 0 so a
// pole has a unique representation.
struct Direction {
  double theta;
  double phi;
  Direction(double theta, double phi);
};

// Unit-norm complex amplitude vector.  The canonical constructor rejects
// non-finite entries and vectors whose norm deviates from 1 by more than
// kAlgebraTol; normalized() rescales first and rejects only the zero vector.
class StateVector {
 public:
  explicit StateVector(std::vector<Complex> components);
  static StateVector normalized(std::vector<Complex> components);

  int dim() const { return static_cast<int>(c_.size()); }
  const Complex& operator[](int i) const { return c_[static_cast<size_t>(i)]; }
  std::span<const Complex> components() const { return c_; }
  double norm_squared() const;

 private:
  struct Unchecked {};
  StateVector(std::vector<Complex> components, Unchecked) : c_(std::move(components)) {}
  std::vector<Complex> c_;
};

// Hermitian matrix in row-major storage.  Construction symmetrizes the input
// exactly, a_ij <- (a_ij + conj(a_ji)) / 2, after checking that the asymmetry
// is below kAlgebraTol, so conjugate symmetry holds entrywise afterwards.
class HermitianOperator {
 public:
  HermitianOperator(int dim, std::vector<Complex> row_major);
  static HermitianOperator identity(int dim);

  int dim() const { return dim_; }
  const Complex& at(int row, int col) const {
    return a_[static_cast<size_t>(row) * dim_ + col];
  }
  std::span<const Complex> entries() const { return a_; }

 private:
  int dim_;
  std::vector<Complex> a_;
};

// Eigensystem of a HermitianOperator.  Eigenvalues ascend; eigenvectors are
// orthonormal and ordered to match.  Each eigenvector is phase-fixed: its
// largest-magnitude component (lowest index on ties within 1e-9) is made
// real and positive, which pins an otherwise arbitrary global phase.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  std::vector<StateVector> eigenvectors;
};

// Basis kets of the fixed quantization axis.
StateVector spin_up();
StateVector spin_down();

// Spin projection along a direction, in the convention where
// <up|S|down> = exp(+i*phi) * sin(theta).  Eigenvalues are exactly +1/-1.
HermitianOperator spin_operator(const Direction& n);

// <bra|op|ket>.  Terms are grouped so that swapping bra and ket conjugates
// the result bitwise, not merely up to rounding.
Complex matrix_element(const StateVector& bra, const HermitianOperator& op,
                       const StateVector& ket);

// Cyclic Jacobi diagonalization.  Reconstruction error is far below
// kAlgebraTol for the small dimensions used here (d <= 16 is enforced).
SpectralDecomposition spectral_decompose(const HermitianOperator& op);

// Coefficients c_j = <f_j|state> of a state in a decomposition's eigenbasis.
std::vector<Complex> overlap_coefficients(const StateVector& state,
                                          const SpectralDecomposition& basis);

// Dense helpers on raw vectors / row-major matrices.  These serve the
// tensor-product reference path, which works with unnormalized vectors that
// StateVector on purpose cannot represent.
std::vector<Complex> kron_vector(std::span<const Complex> a, std::span<const Complex> b);
std::vector<Complex> kron_matrix(std::span<const Complex> a, int dim_a,
                                 std::span<const Complex> b, int dim_b);
std::vector<Complex> apply_matrix(std::span<const Complex> m, int dim,
                                  std::span<const Complex> v);
Complex inner_product(std::span<const Complex> bra, std::span<const Complex> ket);

}  // namespace wavicle
