#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "steerkit/assemblage.hpp"
#include "steerkit/sdp.hpp"

namespace steerkit {

struct SolverSummary {
  SdpStatus status = SdpStatus::numeric_failure;
  int iterations = 0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

// Steering-weight verdict. sw is the minimal fraction of the assemblage that
// cannot be simulated by any local-hidden-state model built from the
// deterministic response strategies; mu = 1 - sw is the simulable mass.
struct SteeringVerdict {
  double sw = 0.0;
  double mu = 1.0;
  bool steerable = false;
  std::vector<HermitianOperator> lhs_blocks;  // optimal model members, one per strategy
  SolverSummary solver;
};

// Solves max sum_lambda tr(sigma_lambda) subject to
//   sigma_{a|x} - sum_lambda D(a|x,lambda) sigma_lambda >= 0,  sigma_lambda >= 0.
// Throws NumericError when the embedded solver cannot close the problem.
SteeringVerdict steering_weight(const Assemblage& a, const SdpOptions& opts = {});

// Search for an operator O_AB whose projective assemblage admits a local
// model and whose eta-shrunk combination with a free marginal reproduces
// rho exactly; success certifies rho unsteerable for every generalized
// measurement on the steering side at that shrinking factor. q carries the
// recovered model mass when the solve reaches an optimum and is absent when
// the program is infeasible.
struct GeneralUnsteerability {
  bool certified = false;
  std::optional<double> q;
  SolverSummary solver;
};

GeneralUnsteerability unsteerability_q(const DensityMatrix& rho, const MeasurementSet& ms,
                                       Direction dir, double eta, const SdpOptions& opts = {});

// Shrinking factor 1/sqrt((d^2-1)(d-1)) tying the full mub set to the
// generalized-measurement certificate.
double shrinking_factor_mub(int dim);

// Closed-form visibility threshold (H_d - 1)/(d - 1) for steering the
// maximally entangled d-level state with every projective measurement.
double analytic_pstar_bta(int dim);

struct ThresholdOptions {
  double tol_p = 1e-4;  // final bracket width on p
  int scan = 0;         // when > 0, audit monotonicity on a scan-point grid first
};

// Bisects for the visibility where steerable_at flips from false to true.
// Returns nullopt when even p = 1 is not steerable, 0 when p = 0 already is.
// With scan > 0 the predicate is sampled first and a non-monotone pattern
// raises AmbiguousThreshold carrying the samples.
std::optional<double> critical_p(const std::function<bool(double)>& steerable_at,
                                 const ThresholdOptions& topts = {});

}
