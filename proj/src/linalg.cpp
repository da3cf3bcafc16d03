#include "steerkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "steerkit/errors.hpp"

namespace steerkit {

ComplexMatrix ComplexMatrix::identity(int n) {
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = std::conj((*this)(i, j));
  return t;
}

cplx ComplexMatrix::trace() const {
  cplx t = 0.0;
  for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& v : a_) v *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul shape mismatch");
  ComplexMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx{}) continue;
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l)
          c(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return c;
}

double max_abs(const ComplexMatrix& a) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

HermitianOperator::HermitianOperator(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("hermitian operator must be square");
  const int n = m.rows();
  m_ = ComplexMatrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m_(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
}

HermitianOperator HermitianOperator::zero(int dim) {
  return HermitianOperator(ComplexMatrix(dim, dim));
}

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(ComplexMatrix::identity(dim));
}

void HermitianOperator::set(int i, int j, cplx v) {
  if (i == j) {
    m_(i, i) = v.real();
  } else {
    m_(i, j) = v;
    m_(j, i) = std::conj(v);
  }
}

double HermitianOperator::trace() const { return m_.trace().real(); }

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& o) {
  m_ += o.m_;
  return *this;
}

HermitianOperator& HermitianOperator::operator-=(const HermitianOperator& o) {
  m_ -= o.m_;
  return *this;
}

HermitianOperator HermitianOperator::scaled(double s) const {
  HermitianOperator h = *this;
  h.m_ *= s;
  return h;
}

double herm_inner(const HermitianOperator& a, const HermitianOperator& b) {
  // tr(a b) = sum_ij a_ij conj(b_ij) for Hermitian a, b
  double acc = 0.0;
  const int n = a.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx x = a.at(i, j), y = b.at(i, j);
      acc += x.real() * y.real() + x.imag() * y.imag();
    }
  return acc;
}

double herm_max_abs(const HermitianOperator& a) { return max_abs(a.matrix()); }

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(kron(a.matrix(), b.matrix()));
}

HermitianOperator partial_trace(const HermitianOperator& op, int dim_first,
                                int dim_second, Side traced) {
  if (op.dim() != dim_first * dim_second)
    throw std::invalid_argument("partial_trace: dimension mismatch");
  if (traced == Side::first) {
    ComplexMatrix out(dim_second, dim_second);
    for (int j = 0; j < dim_second; ++j)
      for (int l = 0; l < dim_second; ++l) {
        cplx s = 0.0;
        for (int i = 0; i < dim_first; ++i)
          s += op.at(i * dim_second + j, i * dim_second + l);
        out(j, l) = s;
      }
    return HermitianOperator(out);
  }
  ComplexMatrix out(dim_first, dim_first);
  for (int i = 0; i < dim_first; ++i)
    for (int k = 0; k < dim_first; ++k) {
      cplx s = 0.0;
      for (int j = 0; j < dim_second; ++j)
        s += op.at(i * dim_second + j, k * dim_second + j);
      out(i, k) = s;
    }
  return HermitianOperator(out);
}

RealMatrix realify(const HermitianOperator& h) {
  const int n = h.dim();
  RealMatrix r(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx v = h.at(i, j);
      r(i, j) = v.real();
      r(i, j + n) = -v.imag();
      r(i + n, j) = v.imag();
      r(i + n, j + n) = v.real();
    }
  return r;
}

HermitianOperator unrealify(const RealMatrix& r) {
  const int n = r.rows() / 2;
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double re = 0.5 * (r(i, j) + r(i + n, j + n));
      const double im = 0.5 * (r(i + n, j) - r(i, j + n));
      m(i, j) = {re, im};
    }
  return HermitianOperator(m);
}

std::vector<double> eigenvalues(const HermitianOperator& h) {
  const RealMatrix r = realify(h);
  std::vector<double> vals;
  eigh(r, vals, nullptr);
  // the embedding doubles each eigenvalue; keep every other one
  std::vector<double> out;
  out.reserve(h.dim());
  for (std::size_t i = 0; i < vals.size(); i += 2) out.push_back(vals[i]);
  return out;
}

double min_eigenvalue(const HermitianOperator& h) {
  if (h.dim() == 0) throw std::invalid_argument("min_eigenvalue: empty operator");
  const RealMatrix r = realify(h);
  std::vector<double> vals;
  eigh(r, vals, nullptr);
  return vals.front();
}

std::vector<double> herm_coords(const HermitianOperator& h) {
  const int d = h.dim();
  static const double rt2 = std::sqrt(2.0);
  std::vector<double> c;
  c.reserve(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i) c.push_back(h.at(i, i).real());
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      c.push_back(rt2 * h.at(i, j).real());
      c.push_back(rt2 * h.at(i, j).imag());
    }
  return c;
}

HermitianOperator herm_from_coords(int dim, const std::vector<double>& c) {
  if (static_cast<int>(c.size()) != dim * dim)
    throw std::invalid_argument("herm_from_coords: wrong length");
  static const double rt2 = std::sqrt(2.0);
  ComplexMatrix m(dim, dim);
  std::size_t k = 0;
  for (int i = 0; i < dim; ++i) m(i, i) = c[k++];
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      const double re = c[k++] / rt2;
      const double im = c[k++] / rt2;
      m(i, j) = {re, im};
      m(j, i) = {re, -im};
    }
  return HermitianOperator(m);
}

DensityMatrix::DensityMatrix(const HermitianOperator& op, double trace_tol,
                             double psd_tol)
    : op_(op) {
  const double tr = op.trace();
  if (std::abs(tr - 1.0) > trace_tol) {
    std::ostringstream msg;
    msg << "density matrix trace " << tr << " deviates from 1 beyond " << trace_tol;
    throw std::invalid_argument(msg.str());
  }
  const double me = min_eigenvalue(op);
  if (me < -psd_tol) {
    std::ostringstream msg;
    msg << "density matrix has negative eigenvalue " << me;
    throw std::invalid_argument(msg.str());
  }
}

}
