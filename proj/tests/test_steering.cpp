#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "steerkit/assemblage.hpp"
#include "steerkit/errors.hpp"
#include "steerkit/measurements.hpp"
#include "steerkit/states.hpp"
#include "steerkit/steering.hpp"

using namespace steerkit;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const double kInvSqrt3 = 1.0 / std::sqrt(3.0);
const double kPi = 3.14159265358979323846;
const double kPhiEqual = std::atan(std::sqrt(2.0));  // equal-amplitude point

SteeringVerdict sw_of(const DensityMatrix& rho, int m_settings, Direction dir) {
  auto ms = take_settings(mub(rho.dim() == 4 ? 2 : 3), m_settings);
  return steering_weight(make_assemblage(rho, ms, dir));
}

std::optional<double> iso_threshold(int d, int m_settings) {
  auto ms = take_settings(mub(d), m_settings);
  return critical_p([&](double p) {
    return steering_weight(make_assemblage(isotropic_state(d, p), ms, Direction::AtoB))
        .steerable;
  });
}

}  // namespace

TEST_CASE("pure entangled qubits carry full steering weight") {
  auto v = sw_of(isotropic_state(2, 1.0), 2, Direction::AtoB);
  CHECK(v.sw == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(v.mu == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
  CHECK(v.steerable);
  CHECK(v.solver.status == SdpStatus::optimal);
  REQUIRE(v.lhs_blocks.size() == 4);  // one model member per strategy
}

TEST_CASE("partly mixed qubits match the independently computed weight") {
  auto v = sw_of(isotropic_state(2, 0.9), 2, Direction::AtoB);
  CHECK(v.sw == doctest::Approx(0.6585786).epsilon(2e-6));
  CHECK(v.steerable);
}

TEST_CASE("below the two-setting visibility threshold nothing is steerable") {
  auto v = sw_of(isotropic_state(2, 0.5), 2, Direction::AtoB);
  CHECK(v.sw < 1e-7);
  CHECK_FALSE(v.steerable);
  CHECK(v.mu == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("optimal model members reconstruct the unsteerable assemblage") {
  auto ms = take_settings(mub(2), 2);
  auto a = make_assemblage(isotropic_state(2, 0.5), ms, Direction::AtoB);
  auto v = steering_weight(a);
  REQUIRE(v.lhs_blocks.size() == 4);
  // with sw = 0 the model must reproduce each member exactly:
  // sigma_{a|x} = sum_lambda D(a|x,lambda) sigma_lambda
  for (int x = 0; x < 2; ++x)
    for (int o = 0; o < 2; ++o) {
      auto rebuilt = HermitianOperator::zero(2);
      for (int l = 0; l < 4; ++l) {
        DeterministicStrategy s{static_cast<std::uint64_t>(l), 2, 2};
        if (s.outcome(x) == o) rebuilt += v.lhs_blocks[l];
      }
      CHECK(max_abs(rebuilt.matrix() - a.members[x][o].matrix()) < 1e-5);
    }
  // total model mass is the simulable fraction
  double mass = 0.0;
  for (const auto& b : v.lhs_blocks) mass += b.trace();
  CHECK(mass == doctest::Approx(v.mu).epsilon(1e-6));
}

TEST_CASE("steering weight rejects oversized strategy spaces") {
  Assemblage a;
  a.steered_dim = 2;
  a.settings = 18;
  a.outcomes = 2;  // 2^18 strategies exceed the cap
  a.efficiency.assign(18, 1.0);
  a.members.assign(18, std::vector<HermitianOperator>(2, HermitianOperator::zero(2)));
  CHECK_THROWS_AS(steering_weight(a), std::invalid_argument);
  CHECK_THROWS_AS(steering_weight(Assemblage{}), std::invalid_argument);
}

TEST_CASE("isotropic qubit thresholds sit at the known visibilities") {
  auto t2 = iso_threshold(2, 2);
  REQUIRE(t2.has_value());
  CHECK(*t2 == doctest::Approx(kInvSqrt2).epsilon(1e-3));

  auto t3 = iso_threshold(2, 3);
  REQUIRE(t3.has_value());
  CHECK(*t3 == doctest::Approx(kInvSqrt3).epsilon(1e-3));
}

TEST_CASE("equal-amplitude qutrit threshold agrees in both directions") {
  auto ms = mub(3);
  for (Direction dir : {Direction::AtoB, Direction::BtoA}) {
    auto t = critical_p([&](double p) {
      return steering_weight(make_assemblage(qutrit_pes(p, kPi / 4, kPhiEqual), ms, dir))
          .steerable;
    });
    REQUIRE(t.has_value());
    CHECK(*t == doctest::Approx(0.481781).epsilon(4e-3));
  }
}

TEST_CASE("a skewed qutrit opens a one-way steering window") {
  auto ms = mub(3);
  std::optional<double> ta, tb;
  auto fam = [](double p) { return qutrit_pes(p, 0.3, 0.5); };
  ta = critical_p([&](double p) {
    return steering_weight(make_assemblage(fam(p), ms, Direction::AtoB)).steerable;
  });
  tb = critical_p([&](double p) {
    return steering_weight(make_assemblage(fam(p), ms, Direction::BtoA)).steerable;
  });
  REQUIRE(ta.has_value());
  REQUIRE(tb.has_value());
  CHECK(*tb == doctest::Approx(0.481781).epsilon(4e-3));
  CHECK(*ta == doctest::Approx(0.658600).epsilon(4e-3));
  // the window between the thresholds steers one way only
  const double mid = (*ta + *tb) / 2.0;
  auto a2b = steering_weight(make_assemblage(fam(mid), ms, Direction::AtoB));
  auto b2a = steering_weight(make_assemblage(fam(mid), ms, Direction::BtoA));
  CHECK_FALSE(a2b.steerable);
  CHECK(b2a.steerable);
}

TEST_CASE("loss counting shifts the qubit threshold") {
  auto ms = take_settings(mub(2), 2);
  auto with_eps = [&](double eps) {
    return critical_p([&, eps](double p) {
      auto rho = isotropic_state(2, p);
      auto a = make_assemblage(rho, ms, Direction::AtoB);
      auto red = partial_trace(rho.op(), 2, 2, Side::first);
      return steering_weight(make_priori(a, red, eps)).steerable;
    });
  };
  auto t = with_eps(0.8);
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(0.780304).epsilon(2e-3));

  // at efficiency 1/m the inconclusive outcome lets a local model cheat
  // perfectly, so no visibility is steerable
  CHECK_FALSE(with_eps(0.5).has_value());
}

TEST_CASE("the cheating model at efficiency 1/m is locally constructible") {
  // guess a setting x^ and outcome a^; declare conclusive only when the guess
  // matches, else declare null. That reproduces the lossy assemblage exactly.
  auto ms = take_settings(mub(2), 2);
  const double m = 2.0;
  auto rho = isotropic_state(2, 0.95);
  auto a = make_assemblage(rho, ms, Direction::AtoB);
  auto red = partial_trace(rho.op(), 2, 2, Side::first);
  auto lossy = make_priori(a, red, 1.0 / m);

  for (int x = 0; x < 2; ++x)
    for (int o = 0; o < 2; ++o) {
      auto conclusive = HermitianOperator::zero(2);
      auto null_member = HermitianOperator::zero(2);
      // hidden states indexed by the guess (xh, oh): on setting xh the model
      // declares oh, on any other setting it declares null
      for (int xh = 0; xh < 2; ++xh)
        for (int oh = 0; oh < 2; ++oh) {
          const auto& hidden = a.members[xh][oh];  // weight folded in
          if (xh == x && oh == o) conclusive += hidden.scaled(1.0 / m);
          if (xh != x) null_member += hidden.scaled(1.0 / m);
        }
      CHECK(max_abs(conclusive.matrix() - lossy.members[x][o].matrix()) < 1e-12);
      CHECK(max_abs(null_member.matrix() - lossy.members[x][2].matrix()) < 1e-12);
    }
}

TEST_CASE("shrinking factor ties dimension to the mub set") {
  CHECK(shrinking_factor_mub(2) == doctest::Approx(kInvSqrt3).epsilon(1e-12));
  CHECK(shrinking_factor_mub(3) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(shrinking_factor_mub(1), std::invalid_argument);
}

TEST_CASE("closed-form all-projective threshold") {
  CHECK(analytic_pstar_bta(2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(analytic_pstar_bta(3) == doctest::Approx(5.0 / 12.0).epsilon(1e-12));
  CHECK(analytic_pstar_bta(5) == doctest::Approx(77.0 / 240.0).epsilon(1e-12));
  CHECK_THROWS_AS(analytic_pstar_bta(1), std::invalid_argument);
}

TEST_CASE("general-measurement certificate on the equal-amplitude qutrit") {
  auto ms = mub(3);
  const double eta = shrinking_factor_mub(3);
  auto at = [&](double p) {
    return unsteerability_q(qutrit_pes(p, kPi / 4, kPhiEqual), ms, Direction::AtoB, eta);
  };

  auto low = at(0.10);
  CHECK(low.certified);
  REQUIRE(low.q.has_value());
  CHECK(*low.q == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(low.solver.status == SdpStatus::optimal);

  auto edge = at(0.12);
  CHECK(edge.certified);

  auto high = at(0.15);
  CHECK_FALSE(high.certified);
  CHECK_FALSE(high.q.has_value());
  CHECK(high.solver.status == SdpStatus::primal_infeasible);
}

TEST_CASE("general-measurement threshold is symmetric at the equal point") {
  auto ms = mub(3);
  const double eta = shrinking_factor_mub(3);
  for (Direction dir : {Direction::AtoB, Direction::BtoA}) {
    auto t = critical_p(
        [&](double p) {
          return !unsteerability_q(qutrit_pes(p, kPi / 4, kPhiEqual), ms, dir, eta).certified;
        },
        {1e-3, 0});
    REQUIRE(t.has_value());
    CHECK(*t == doctest::Approx(0.120605).epsilon(2e-2));
  }
}

TEST_CASE("full shrinking reduces the certificate to the projective model") {
  // at eta = 1 the certificate asks for a local model of rho itself, so it
  // must agree with the steering-weight verdict on the mub assemblage
  auto ms = mub(3);
  auto rho_low = qutrit_pes(0.40, kPi / 4, kPhiEqual);
  auto r1 = unsteerability_q(rho_low, ms, Direction::AtoB, 1.0);
  CHECK(r1.certified);
  CHECK_FALSE(steering_weight(make_assemblage(rho_low, ms, Direction::AtoB)).steerable);

  auto rho_high = qutrit_pes(0.55, kPi / 4, kPhiEqual);
  auto r2 = unsteerability_q(rho_high, ms, Direction::AtoB, 1.0);
  CHECK_FALSE(r2.certified);
  CHECK(steering_weight(make_assemblage(rho_high, ms, Direction::AtoB)).steerable);
}

TEST_CASE("general certificate input validation") {
  auto ms = mub(3);
  auto rho2 = isotropic_state(2, 0.5);
  CHECK_THROWS_AS(unsteerability_q(rho2, ms, Direction::AtoB, 0.25), std::invalid_argument);
  auto rho3 = isotropic_state(3, 0.5);
  CHECK_THROWS_AS(unsteerability_q(rho3, ms, Direction::AtoB, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(unsteerability_q(rho3, ms, Direction::AtoB, 1.1), std::invalid_argument);
}

TEST_CASE("threshold search edge cases") {
  ThresholdOptions topts;
  topts.tol_p = 1e-6;

  // a clean step function lands on its edge
  auto t = critical_p([](double p) { return p >= 0.3; }, topts);
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(0.3).epsilon(1e-4));

  // never steerable
  CHECK_FALSE(critical_p([](double) { return false; }, topts).has_value());

  // already steerable at zero
  auto z = critical_p([](double) { return true; }, topts);
  REQUIRE(z.has_value());
  CHECK(*z == 0.0);

  CHECK_THROWS_AS(critical_p([](double) { return true; }, {0.0, 0}), std::invalid_argument);
}

TEST_CASE("threshold scan flags non-monotone predicates") {
  ThresholdOptions topts;
  topts.tol_p = 1e-4;
  topts.scan = 9;
  // steerable only inside a band: two flips on the grid
  auto band = [](double p) { return p > 0.3 && p < 0.7; };
  CHECK_THROWS_AS(critical_p([&](double p) { return band(p) || p > 0.99; }, topts),
                  AmbiguousThreshold);
  try {
    critical_p([&](double p) { return band(p) || p > 0.99; }, topts);
  } catch (const AmbiguousThreshold& e) {
    REQUIRE(e.samples.size() == 11);  // endpoints plus nine interior points
    CHECK(e.samples.front().first == 0.0);
    CHECK(e.samples.back().first == 1.0);
    CHECK(e.samples.back().second);
  }

  // a monotone predicate passes the same audit and still bisects
  auto mono = critical_p([](double p) { return p >= 0.42; }, topts);
  REQUIRE(mono.has_value());
  CHECK(*mono == doctest::Approx(0.42).epsilon(1e-3));
}
