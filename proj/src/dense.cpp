#include "steerkit/dense.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "steerkit/errors.hpp"
#include "steerkit/kernels.hpp"

namespace steerkit {

RealMatrix RealMatrix::identity(int n) {
  RealMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void RealMatrix::fill(double v) { std::fill(a_.begin(), a_.end(), v); }

void RealMatrix::symmetrize() {
  for (int i = 0; i < rows_; ++i)
    for (int j = i + 1; j < cols_; ++j) {
      const double v = 0.5 * ((*this)(i, j) + (*this)(j, i));
      (*this)(i, j) = v;
      (*this)(j, i) = v;
    }
}

RealMatrix matmul(const RealMatrix& a, const RealMatrix& b) {
  RealMatrix c(a.rows(), b.cols());
  matmul_into(c, a, b);
  return c;
}

void matmul_into(RealMatrix& c, const RealMatrix& a, const RealMatrix& b) {
  kernels::active().gemm(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
}

RealMatrix transpose(const RealMatrix& a) {
  RealMatrix t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

double frob_inner(const RealMatrix& a, const RealMatrix& b) {
  return kernels::active().dot(a.data(), b.data(), a.size());
}

double frob_norm(const RealMatrix& a) { return std::sqrt(frob_inner(a, a)); }

double max_abs(const RealMatrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i]));
  return m;
}

namespace {

double off_diag_norm(const RealMatrix& a) {
  double s = 0.0;
  const int n = a.rows();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
  return std::sqrt(2.0 * s);
}

}  // namespace

void eigh(const RealMatrix& a_in, std::vector<double>& values, RealMatrix* vectors) {
  const int n = a_in.rows();
  RealMatrix a = a_in;
  a.symmetrize();
  RealMatrix v;
  if (vectors != nullptr) v = RealMatrix::identity(n);

  const auto& ops = kernels::active();
  const double norm = std::max(frob_norm(a), 1e-300);
  const int max_sweeps = 64;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (off_diag_norm(a) <= 1e-14 * norm) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-18 * norm) continue;
        const double app = a(p, p), aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // rows p and q, then columns p and q (A <- J^T A J)
        ops.rot(a.row(p), a.row(q), c, s, n);
        for (int i = 0; i < n; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        if (vectors != nullptr) ops.rot(v.row(p), v.row(q), c, s, n);
      }
    }
  }
  if (sweep == max_sweeps && off_diag_norm(a) > 1e-10 * norm)
    throw NumericError("jacobi eigensolver did not converge");

  values.resize(n);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = a(i, i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return diag[x] < diag[y]; });
  for (int i = 0; i < n; ++i) values[i] = diag[order[i]];
  if (vectors != nullptr) {
    vectors->operator=(RealMatrix(n, n));
    for (int i = 0; i < n; ++i)
      std::memcpy(vectors->row(i), v.row(order[i]), n * sizeof(double));
  }
}

double min_eig_sym(const RealMatrix& a) {
  std::vector<double> vals;
  eigh(a, vals, nullptr);
  return vals.front();
}

bool cholesky(RealMatrix& a) {
  const int n = a.rows();
  const auto& ops = kernels::active();
  for (int j = 0; j < n; ++j) {
    double d = a(j, j) - ops.dot(a.row(j), a.row(j), j);
    if (d <= 0.0 || !std::isfinite(d)) return false;
    d = std::sqrt(d);
    a(j, j) = d;
    for (int i = j + 1; i < n; ++i)
      a(i, j) = (a(i, j) - ops.dot(a.row(i), a.row(j), j)) / d;
  }
  // zero the strict upper triangle so a holds L
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a(i, j) = 0.0;
  return true;
}

LuFactors lu_factor(RealMatrix a) {
  const int n = a.rows();
  LuFactors f;
  f.perm.resize(n);
  std::iota(f.perm.begin(), f.perm.end(), 0);
  const auto& ops = kernels::active();
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    // an exactly empty pivot column is structural rank deficiency; merely tiny
    // pivots are left to the caller, who validates the solve it performs
    if (best == 0.0) {
      f.singular = true;
    }
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
    }
    const double akk = a(k, k);
    if (akk == 0.0) continue;
    for (int i = k + 1; i < n; ++i) {
      const double l = a(i, k) / akk;
      a(i, k) = l;
      if (l != 0.0) ops.axpy(-l, a.row(k) + k + 1, a.row(i) + k + 1, n - k - 1);
    }
  }
  f.lu = std::move(a);
  return f;
}

void lu_solve(const LuFactors& f, double* rhs) {
  const int n = f.lu.rows();
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = rhs[f.perm[i]];
  for (int i = 0; i < n; ++i)
    x[i] -= kernels::active().dot(f.lu.row(i), x.data(), i);
  for (int i = n - 1; i >= 0; --i) {
    double acc = x[i];
    const double* row = f.lu.row(i);
    for (int j = i + 1; j < n; ++j) acc -= row[j] * x[j];
    x[i] = acc / row[i];
  }
  std::memcpy(rhs, x.data(), n * sizeof(double));
}

}
