#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "steerkit/dense.hpp"
#include "steerkit/errors.hpp"

using namespace steerkit;

namespace {

RealMatrix random_sym(int n, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RealMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = u(rng);
  a.symmetrize();
  return a;
}

}  // namespace

TEST_CASE("matmul and transpose basics") {
  RealMatrix a(2, 3), b(3, 2);
  int v = 1;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = v++;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) b(i, j) = v++;
  auto c = matmul(a, b);
  REQUIRE(c.rows() == 2);
  REQUIRE(c.cols() == 2);
  // a = [1 2 3; 4 5 6], b = [7 8; 9 10; 11 12]
  CHECK(c(0, 0) == doctest::Approx(58));
  CHECK(c(0, 1) == doctest::Approx(64));
  CHECK(c(1, 0) == doctest::Approx(139));
  CHECK(c(1, 1) == doctest::Approx(154));

  auto at = transpose(a);
  REQUIRE(at.rows() == 3);
  REQUIRE(at.cols() == 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) CHECK(at(j, i) == a(i, j));

  auto id = RealMatrix::identity(3);
  auto ab = matmul(id, b);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) CHECK(ab(i, j) == doctest::Approx(b(i, j)));
}

TEST_CASE("frobenius inner product equals trace of product for symmetric args") {
  auto a = random_sym(4, 7);
  auto b = random_sym(4, 8);
  auto ab = matmul(a, b);
  double tr = 0.0;
  for (int i = 0; i < 4; ++i) tr += ab(i, i);
  CHECK(frob_inner(a, b) == doctest::Approx(tr).epsilon(1e-12));
  CHECK(frob_norm(a) == doctest::Approx(std::sqrt(frob_inner(a, a))).epsilon(1e-12));
}

TEST_CASE("eigh recovers a known spectrum") {
  // diag(3, 1, 2) conjugated by a rotation in the (0,2) plane
  const double c = std::cos(0.4), s = std::sin(0.4);
  RealMatrix d(3, 3);
  d(0, 0) = 3;
  d(1, 1) = 1;
  d(2, 2) = 2;
  RealMatrix q(3, 3);
  q(0, 0) = c;
  q(0, 2) = -s;
  q(1, 1) = 1;
  q(2, 0) = s;
  q(2, 2) = c;
  auto a = matmul(q, matmul(d, transpose(q)));

  std::vector<double> w;
  RealMatrix vecs;
  eigh(a, w, &vecs);
  REQUIRE(w.size() == 3);
  CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(w[2] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(min_eig_sym(a) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigh reconstruction and orthogonality") {
  for (int n : {2, 5, 9}) {
    auto a = random_sym(n, 100 + n);
    std::vector<double> w;
    RealMatrix v;
    eigh(a, w, &v);
    REQUIRE(static_cast<int>(w.size()) == n);
    for (int i = 0; i + 1 < n; ++i) CHECK(w[i] <= w[i + 1] + 1e-14);

    // rows are eigenvectors: A = V^T diag(w) V
    RealMatrix dw(n, n);
    for (int i = 0; i < n; ++i) dw(i, i) = w[i];
    auto rec = matmul(transpose(v), matmul(dw, v));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) CHECK(rec(i, j) == doctest::Approx(a(i, j)).epsilon(1e-10));

    auto vvt = matmul(v, transpose(v));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(vvt(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-11));
  }
}

TEST_CASE("cholesky succeeds on spd and rejects indefinite") {
  // spd: A^T A + I
  auto r = random_sym(4, 41);
  auto spd = matmul(transpose(r), r);
  for (int i = 0; i < 4; ++i) spd(i, i) += 1.0;
  auto l = spd;
  REQUIRE(cholesky(l));
  // the factor overwrites its input with L; L L^T reproduces the matrix
  auto llt = matmul(l, transpose(l));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(llt(i, j) == doctest::Approx(spd(i, j)).epsilon(1e-12));

  RealMatrix indef(2, 2);
  indef(0, 0) = 1;
  indef(1, 1) = -1;
  CHECK_FALSE(cholesky(indef));
}

TEST_CASE("lu solves a general square system") {
  std::mt19937 rng(55);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 6;
  RealMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = u(rng);
  std::vector<double> x_true(n);
  for (auto& x : x_true) x = u(rng);
  std::vector<double> rhs(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rhs[i] += a(i, j) * x_true[j];

  auto f = lu_factor(a);
  REQUIRE_FALSE(f.singular);
  lu_solve(f, rhs.data());
  for (int i = 0; i < n; ++i) CHECK(rhs[i] == doctest::Approx(x_true[i]).epsilon(1e-10));
}

TEST_CASE("lu flags an exactly singular matrix") {
  RealMatrix a(3, 3);
  // column 1 identically zero
  a(0, 0) = 1;
  a(0, 2) = 2;
  a(1, 0) = -1;
  a(1, 2) = 0.5;
  a(2, 0) = 3;
  a(2, 2) = 1;
  auto f = lu_factor(a);
  CHECK(f.singular);
}

TEST_CASE("fill and symmetrize") {
  RealMatrix a(3, 3);
  a.fill(2.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(a(i, j) == 2.0);
  a(0, 1) = 4.0;
  a(1, 0) = 0.0;
  a.symmetrize();
  CHECK(a(0, 1) == doctest::Approx(2.0));
  CHECK(a(1, 0) == doctest::Approx(2.0));
  CHECK(max_abs(a) == doctest::Approx(2.0));
}
