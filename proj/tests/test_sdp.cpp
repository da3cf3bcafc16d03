#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "steerkit/linalg.hpp"
#include "steerkit/sdp.hpp"

using namespace steerkit;

namespace {

HermitianOperator unit(int d, int i, int j) {
  ComplexMatrix m(d, d);
  m(i, j) = 1.0;
  return HermitianOperator(m);  // symmetrized: off-diagonal units carry weight 1/2
}

BlockSdpProblem diag_pin_problem() {
  // max tr X s.t. X00 = 1, X11 = 2 over psd X; optimum diag(1,2) with value 3
  BlockSdpProblem p;
  p.blocks = {{2, Cone::psd}};
  p.objective = {HermitianOperator::identity(2)};
  SdpConstraint c1;
  c1.terms = {{0, unit(2, 0, 0)}};
  c1.rhs = 1.0;
  SdpConstraint c2;
  c2.terms = {{0, unit(2, 1, 1)}};
  c2.rhs = 2.0;
  p.constraints = {c1, c2};
  return p;
}

}  // namespace

TEST_CASE("maximize trace under diagonal pins") {
  auto p = diag_pin_problem();
  auto s = solve(p);
  REQUIRE(s.status == SdpStatus::optimal);
  CHECK(s.objective_value == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(s.gap <= 1e-8);
  CHECK(s.primal_residual <= 1e-8);
  CHECK(s.dual_residual <= 1e-8);
  REQUIRE(s.blocks.size() == 1);
  CHECK(s.blocks[0].at(0, 0).real() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s.blocks[0].at(1, 1).real() == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(std::abs(s.blocks[0].at(0, 1)) < 1e-5);
  CHECK(min_eigenvalue(s.blocks[0]) > -1e-7);
}

TEST_CASE("largest eigenvalue as an sdp") {
  // max <C, X> s.t. tr X = 1 equals lambda_max(C)
  BlockSdpProblem p;
  p.blocks = {{2, Cone::psd}};
  ComplexMatrix cm(2, 2);
  cm(0, 0) = 1.0;
  cm(1, 1) = -1.0;
  p.objective = {HermitianOperator(cm)};
  SdpConstraint c1;
  c1.terms = {{0, HermitianOperator::identity(2)}};
  c1.rhs = 1.0;
  p.constraints = {c1};
  auto s = solve(p);
  REQUIRE(s.status == SdpStatus::optimal);
  CHECK(s.objective_value == doctest::Approx(1.0).epsilon(1e-7));

  // same program with a complex objective: lambda_max of pauli y is 1
  BlockSdpProblem q = p;
  HermitianOperator y = HermitianOperator::zero(2);
  y.set(0, 1, cplx(0.0, -1.0));
  q.objective = {y};
  auto sy = solve(q);
  REQUIRE(sy.status == SdpStatus::optimal);
  CHECK(sy.objective_value == doctest::Approx(1.0).epsilon(1e-7));
  // optimizer is the pauli-y eigenprojector, necessarily complex
  CHECK(sy.blocks[0].at(0, 1).imag() == doctest::Approx(-0.5).epsilon(1e-5));
}

TEST_CASE("contradictory equalities are caught in presolve") {
  BlockSdpProblem p;
  p.blocks = {{2, Cone::psd}};
  p.objective = {HermitianOperator::zero(2)};
  SdpConstraint c1;
  c1.terms = {{0, HermitianOperator::identity(2)}};
  c1.rhs = 1.0;
  SdpConstraint c2;
  c2.terms = {{0, HermitianOperator::identity(2)}};
  c2.rhs = 2.0;
  p.constraints = {c1, c2};
  auto s = solve(p);
  REQUIRE(s.status == SdpStatus::primal_infeasible);
  CHECK(s.iterations == 0);  // no interior-point work needed
  CHECK(s.certificate.margin > 1e-8);
  REQUIRE(s.certificate.farkas_y.size() == 2);
  // farkas multipliers certify: sum y_j A_j = 0 with sum y_j b_j > 0
  CHECK(s.certificate.farkas_y[0] + s.certificate.farkas_y[1] ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(s.certificate.farkas_y[0] * 1.0 + s.certificate.farkas_y[1] * 2.0 > 0.0);
}

TEST_CASE("negative trace requirement is conically infeasible") {
  BlockSdpProblem p;
  p.blocks = {{2, Cone::psd}};
  p.objective = {HermitianOperator::zero(2)};
  SdpConstraint c1;
  c1.terms = {{0, HermitianOperator::identity(2)}};
  c1.rhs = -1.0;
  p.constraints = {c1};
  auto s = solve(p);
  REQUIRE(s.status == SdpStatus::primal_infeasible);
  CHECK(s.certificate.margin > 1e-8);
  REQUIRE(s.certificate.farkas_y.size() == 1);
  // y < 0 makes y * I dual-feasible (here -y I >= 0) while y * b = -y > 0
  CHECK(s.certificate.farkas_y[0] * -1.0 > 0.0);
}

TEST_CASE("unbounded objective reports dual infeasibility") {
  BlockSdpProblem p;
  p.blocks = {{2, Cone::psd}};
  p.objective = {HermitianOperator::identity(2)};
  SdpConstraint c1;
  c1.terms = {{0, unit(2, 0, 0)}};
  c1.rhs = 1.0;
  p.constraints = {c1};
  auto s = solve(p);
  REQUIRE(s.status == SdpStatus::dual_infeasible);
  REQUIRE(s.certificate.ray.size() == 1);
  // the improving ray gains objective while staying psd and annihilating the pins
  const auto& r = s.certificate.ray[0];
  CHECK(min_eigenvalue(r) > -1e-7);
  CHECK(herm_inner(HermitianOperator::identity(2), r) > 1e-8);
  CHECK(std::abs(herm_inner(unit(2, 0, 0), r)) < 1e-6);
}

TEST_CASE("free block tied to a psd block by equalities") {
  // max X00 with psd X equal to a free H of unit trace: optimum 1 at X = e00
  BlockSdpProblem p;
  p.blocks = {{2, Cone::psd}, {2, Cone::free_herm}};
  p.objective = {unit(2, 0, 0), HermitianOperator::zero(2)};
  const double r = 1.0 / std::sqrt(2.0);
  for (int e = 0; e < 4; ++e) {
    ComplexMatrix bm(2, 2);
    if (e == 0) bm(0, 0) = 1.0;
    else if (e == 1) bm(1, 1) = 1.0;
    else if (e == 2) { bm(0, 1) = r; bm(1, 0) = r; }
    else { bm(0, 1) = cplx(0.0, r); bm(1, 0) = cplx(0.0, -r); }
    HermitianOperator be(bm);
    SdpConstraint c;
    c.terms = {{0, be}, {1, be.scaled(-1.0)}};
    c.rhs = 0.0;
    p.constraints.push_back(c);
  }
  SdpConstraint ct;
  ct.terms = {{1, HermitianOperator::identity(2)}};
  ct.rhs = 1.0;
  p.constraints.push_back(ct);

  auto s = solve(p);
  REQUIRE(s.status == SdpStatus::optimal);
  CHECK(s.objective_value == doctest::Approx(1.0).epsilon(1e-6));
  REQUIRE(s.blocks.size() == 2);
  // both recovered blocks agree and sit at the rank-one optimizer
  CHECK(s.blocks[0].at(0, 0).real() == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(max_abs(s.blocks[0].matrix() - s.blocks[1].matrix()) < 1e-5);
}

TEST_CASE("structural validation rejects malformed problems") {
  BlockSdpProblem p;
  CHECK_THROWS_AS(solve(p), std::invalid_argument);  // no blocks

  p.blocks = {{2, Cone::psd}};
  CHECK_THROWS_AS(solve(p), std::invalid_argument);  // missing objective

  p.objective = {HermitianOperator::identity(3)};
  CHECK_THROWS_AS(solve(p), std::invalid_argument);  // objective dim mismatch

  p.objective = {HermitianOperator::identity(2)};
  SdpConstraint bad_index;
  bad_index.terms = {{1, HermitianOperator::identity(2)}};
  bad_index.rhs = 0.0;
  p.constraints = {bad_index};
  CHECK_THROWS_AS(solve(p), std::invalid_argument);  // block index out of range

  SdpConstraint bad_dim;
  bad_dim.terms = {{0, HermitianOperator::identity(3)}};
  bad_dim.rhs = 0.0;
  p.constraints = {bad_dim};
  CHECK_THROWS_AS(solve(p), std::invalid_argument);  // coefficient dim mismatch

  SdpConstraint bad_rhs;
  bad_rhs.terms = {{0, HermitianOperator::identity(2)}};
  bad_rhs.rhs = std::nan("");
  p.constraints = {bad_rhs};
  CHECK_THROWS_AS(solve(p), std::invalid_argument);  // nonfinite rhs
}

TEST_CASE("solves are deterministic") {
  auto p = diag_pin_problem();
  auto s1 = solve(p);
  auto s2 = solve(p);
  CHECK(s1.status == s2.status);
  CHECK(s1.iterations == s2.iterations);
  CHECK(s1.objective_value == s2.objective_value);  // bitwise: same path both runs
  CHECK(s1.gap == s2.gap);
}

TEST_CASE("iterate history brackets the optimum once nearly feasible") {
  auto p = diag_pin_problem();
  SdpOptions opts;
  opts.record_history = true;
  auto s = solve(p, opts);
  REQUIRE(s.status == SdpStatus::optimal);
  REQUIRE_FALSE(s.history.empty());
  // one record per pass, including the pass that detects optimality at entry
  CHECK(static_cast<int>(s.history.size()) == s.iterations + 1);
  for (const auto& it : s.history) {
    // weak duality holds up to the iterate's own infeasibility; only judge
    // records that are already nearly feasible
    if (it.primal_residual <= 1e-6 && it.dual_residual <= 1e-6)
      CHECK(it.primal_value <= it.dual_bound + 1e-5);
  }
  // gaps close monotonically in the tail of the run
  const auto& last = s.history.back();
  CHECK(last.gap <= 1e-8);
}

TEST_CASE("tight iteration cap yields numeric_failure not a wrong answer") {
  auto p = diag_pin_problem();
  SdpOptions opts;
  opts.max_iter = 1;
  auto s = solve(p, opts);
  // one iteration cannot reach 1e-8; the solver must not claim optimality
  CHECK(s.status == SdpStatus::numeric_failure);
}

TEST_CASE("json round trip preserves the problem") {
  auto p = diag_pin_problem();
  auto text = problem_to_json(p);
  auto q = problem_from_json(text);
  REQUIRE(q.blocks.size() == 1);
  CHECK(q.blocks[0].size == 2);
  CHECK(q.blocks[0].cone == Cone::psd);
  REQUIRE(q.constraints.size() == 2);
  CHECK(q.constraints[1].rhs == 2.0);
  auto s = solve(q);
  REQUIRE(s.status == SdpStatus::optimal);
  CHECK(s.objective_value == doctest::Approx(3.0).epsilon(1e-7));

  // solution serialization carries the verdict and the numbers
  auto stext = solution_to_json(s);
  CHECK(stext.find("\"optimal\"") != std::string::npos);
  CHECK(stext.find("objective") != std::string::npos);
}
