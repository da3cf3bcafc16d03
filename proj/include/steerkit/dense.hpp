#pragma once

#include <cstddef>
#include <vector>

namespace steerkit {

// Dense real matrix, row-major.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  static RealMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }
  double* row(int i) { return a_.data() + static_cast<std::size_t>(i) * cols_; }
  const double* row(int i) const { return a_.data() + static_cast<std::size_t>(i) * cols_; }
  std::size_t size() const { return a_.size(); }

  void fill(double v);
  void symmetrize();  // A <- (A + A^T)/2, square only

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

// c = a * b through the active kernel set.
RealMatrix matmul(const RealMatrix& a, const RealMatrix& b);
void matmul_into(RealMatrix& c, const RealMatrix& a, const RealMatrix& b);
RealMatrix transpose(const RealMatrix& a);
// Frobenius inner product; for symmetric arguments this equals tr(a*b).
double frob_inner(const RealMatrix& a, const RealMatrix& b);
double frob_norm(const RealMatrix& a);
double max_abs(const RealMatrix& a);

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// values come back ascending; when vectors is non-null, its row i is the
// eigenvector of values[i], i.e. A = V^T diag(values) V. Throws NumericError
// if the sweep cap is hit.
void eigh(const RealMatrix& a, std::vector<double>& values, RealMatrix* vectors);
double min_eig_sym(const RealMatrix& a);

// In-place lower Cholesky A = L L^T. Returns false on a non-positive pivot.
bool cholesky(RealMatrix& a);

// LU with partial pivoting for square systems; solve overwrites rhs columns.
struct LuFactors {
  RealMatrix lu;
  std::vector<int> perm;
  bool singular = false;
};
LuFactors lu_factor(RealMatrix a);
void lu_solve(const LuFactors& f, double* rhs);  // single column, length n

}
