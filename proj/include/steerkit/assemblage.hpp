#pragma once

#include <vector>

#include "steerkit/linalg.hpp"
#include "steerkit/measurements.hpp"

namespace steerkit {

// Which party measures: AtoB means party A steers, so the conditional states
// live on B's space; BtoA is the mirror.
enum class Direction { AtoB, BtoA };

// Conditional-state collection sigma_{a|x} held by the steered party.
struct Assemblage {
  int steered_dim = 0;
  int settings = 0;
  int outcomes = 0;
  Direction direction = Direction::AtoB;
  // Per-setting heralding efficiency; all ones for a lossless assemblage.
  std::vector<double> efficiency;
  // members[x][a]
  std::vector<std::vector<HermitianOperator>> members;
};

// sigma_{a|x} = Tr_measuring((M_{a|x} (x) I) rho) for a bipartite state of two
// d-dimensional parties and measurements on the steering side.
Assemblage make_assemblage(const DensityMatrix& rho, const MeasurementSet& ms,
                           Direction dir);

// Loss-counted extension: keeps a fraction eps_x of every conclusive member
// and adds a null outcome (1 - eps_x) * rho_steered. rho_steered is passed
// explicitly so tests can probe adversarial values; the steering module feeds
// the reduced state of rho.
Assemblage make_priori(const Assemblage& asm_in, const HermitianOperator& rho_steered,
                       const std::vector<double>& eps);
Assemblage make_priori(const Assemblage& asm_in, const HermitianOperator& rho_steered,
                       double eps);

struct AssemblageReport {
  double psd_margin = 0.0;     // min over members of the smallest eigenvalue
  double ns_residual = 0.0;    // max deviation between per-setting totals
  double norm_residual = 0.0;  // |tr(total) - 1|
  bool psd_ok = false;
  bool ns_ok = false;
  bool norm_ok = false;
  bool pass() const { return psd_ok && ns_ok && norm_ok; }
};

AssemblageReport validate(const Assemblage& a,
                          double psd_tol = tol::density_psd,
                          double ns_tol = tol::no_signalling,
                          double norm_tol = tol::normalization);

}
