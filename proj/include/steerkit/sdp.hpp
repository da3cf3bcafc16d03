#pragma once

#include <string>
#include <utility>
#include <vector>

#include "steerkit/linalg.hpp"
#include "steerkit/tolerances.hpp"

namespace steerkit {

// Block-structured semidefinite program over complex Hermitian variables:
//
//   maximize    sum_k tr(C_k X_k)
//   subject to  sum_k tr(A_{j,k} X_k) = b_j        for each constraint j
//               X_k >= 0 for psd blocks; X_k only Hermitian for free blocks
//
// Solved by a homogeneous self-dual interior-point method after realifying
// each Hermitian block to a real symmetric block of doubled size (free blocks
// instead become coordinate vectors that live only in the equality system).

enum class Cone { psd, free_herm };

struct BlockSpec {
  int size = 0;
  Cone cone = Cone::psd;
};

struct SdpConstraint {
  // Sparse list of (block index, Hermitian coefficient); omitted blocks are zero.
  std::vector<std::pair<int, HermitianOperator>> terms;
  double rhs = 0.0;
};

struct SdpOptions {
  double tol = tol::solver;
  int max_iter = 200;
  bool record_history = false;
};

enum class SdpStatus { optimal, primal_infeasible, dual_infeasible, numeric_failure };

const char* to_string(SdpStatus s);

struct IterateRecord {
  double primal_value = 0.0;  // feasibility-uncorrected objective at the iterate
  double dual_bound = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
};

struct SdpCertificate {
  // primal infeasibility: Farkas multipliers on the constraints
  std::vector<double> farkas_y;
  // dual infeasibility: normalized improving ray for the blocks
  std::vector<HermitianOperator> ray;
  double margin = 0.0;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::numeric_failure;
  double objective_value = 0.0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  std::vector<HermitianOperator> blocks;
  SdpCertificate certificate;
  std::vector<IterateRecord> history;
};

struct BlockSdpProblem {
  std::vector<BlockSpec> blocks;
  std::vector<HermitianOperator> objective;  // one per block, zero allowed
  std::vector<SdpConstraint> constraints;

  void check() const;  // throws invalid_argument on structural problems
};

SdpSolution solve(const BlockSdpProblem& prob, const SdpOptions& opts = {});

// JSON round-trip; this is also the on-disk fixture format.
std::string problem_to_json(const BlockSdpProblem& prob);
BlockSdpProblem problem_from_json(const std::string& text);
std::string solution_to_json(const SdpSolution& sol);

}
