#include "steerkit/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace steerkit::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void rot_scalar(double* x, double* y, double c, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i], yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

void gemm_scalar(const double* a, const double* b, double* c,
                 std::size_t n, std::size_t m, std::size_t p) {
  std::memset(c, 0, n * p * sizeof(double));
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = a + i * m;
    double* crow = c + i * p;
    for (std::size_t k = 0; k < m; ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b + k * p;
      for (std::size_t j = 0; j < p; ++j) crow[j] += aik * brow[j];
    }
  }
}

constexpr Ops scalar_table = {
    "scalar", dot_scalar, axpy_scalar, scal_scalar, rot_scalar, gemm_scalar,
};

const Ops* select() {
  const char* env = std::getenv("STEERKIT_SIMD");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_table;
    if (std::strcmp(env, "avx2") == 0) {
      const Ops* v = avx2_ops();
      return v != nullptr ? v : &scalar_table;
    }
  }
  const Ops* v = avx2_ops();
  return v != nullptr ? v : &scalar_table;
}

}  // namespace

const Ops& scalar_ops() { return scalar_table; }

const Ops& active() {
  static const Ops* chosen = select();
  return *chosen;
}

}
