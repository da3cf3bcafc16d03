#pragma once

#include <complex>
#include <vector>

#include "steerkit/dense.hpp"
#include "steerkit/tolerances.hpp"

namespace steerkit {

using cplx = std::complex<double>;

// Dense complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

  static ComplexMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  cplx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  cplx operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  ComplexMatrix adjoint() const;
  cplx trace() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<cplx> a_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
double max_abs(const ComplexMatrix& a);

// Hermitian operator; construction symmetrizes (H + H^dag)/2 so the stored
// matrix is Hermitian to working precision regardless of input noise.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(const ComplexMatrix& m);
  static HermitianOperator zero(int dim);
  static HermitianOperator identity(int dim);

  int dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  cplx at(int i, int j) const { return m_(i, j); }
  void set(int i, int j, cplx v);  // assigns (i,j) and the conjugate at (j,i)

  double trace() const;
  HermitianOperator& operator+=(const HermitianOperator& o);
  HermitianOperator& operator-=(const HermitianOperator& o);
  HermitianOperator scaled(double s) const;

 private:
  ComplexMatrix m_;
};

// Frobenius pairing tr(a b); real for Hermitian arguments.
double herm_inner(const HermitianOperator& a, const HermitianOperator& b);
double herm_max_abs(const HermitianOperator& a);

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);

enum class Side { first, second };
// Trace out one tensor factor of an operator on C^{dims0} (x) C^{dims1}.
// Side::first integrates out the first factor and returns a dims1-dim operator.
HermitianOperator partial_trace(const HermitianOperator& op, int dim_first,
                                int dim_second, Side traced);

// Smallest eigenvalue, computed on the realified symmetric embedding.
double min_eigenvalue(const HermitianOperator& h);
std::vector<double> eigenvalues(const HermitianOperator& h);

// Real symmetric embedding [[Re, -Im], [Im, Re]] (2n x 2n). Its spectrum is
// the complex spectrum with every eigenvalue doubled.
RealMatrix realify(const HermitianOperator& h);
// Inverse of realify for matrices with the embedding symmetry; averages the
// redundant copies so small asymmetries cancel.
HermitianOperator unrealify(const RealMatrix& r);

// Orthonormal coordinates of a Hermitian matrix: d diagonal entries, then for
// each pair i<j (row-major) sqrt2*Re H_ij and sqrt2*Im H_ij. The map is an
// isometry: dot(coords(a), coords(b)) == tr(a b).
std::vector<double> herm_coords(const HermitianOperator& h);
HermitianOperator herm_from_coords(int dim, const std::vector<double>& c);

// Validated quantum state: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(const HermitianOperator& op,
                         double trace_tol = tol::density_trace,
                         double psd_tol = tol::density_psd);
  int dim() const { return op_.dim(); }
  const HermitianOperator& op() const { return op_; }

 private:
  HermitianOperator op_;
};

}
