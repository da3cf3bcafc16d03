#pragma once

#include <cstddef>

// Low-level dense kernels behind the solver's inner loops. Two implementations
// exist: a portable scalar one and an AVX2+FMA one compiled only on x86-64.
// The active set is chosen once at startup from cpu support, overridable with
// STEERKIT_SIMD=scalar|avx2|auto (useful for the equivalence tests).
namespace steerkit::kernels {

struct Ops {
  const char* name;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x *= alpha
  void (*scal)(double alpha, double* x, std::size_t n);
  // plane rotation on two rows: (x, y) <- (c*x - s*y, s*x + c*y)
  void (*rot)(double* x, double* y, double c, double s, std::size_t n);
  // c(n x p) = a(n x m) * b(m x p), all row-major, c overwritten
  void (*gemm)(const double* a, const double* b, double* c,
               std::size_t n, std::size_t m, std::size_t p);
};

const Ops& scalar_ops();
// Null when this build or this machine cannot run AVX2.
const Ops* avx2_ops();
// Runtime-selected implementation.
const Ops& active();

}
