#include "steerkit/assemblage.hpp"

#include <cmath>
#include <stdexcept>

namespace steerkit {

Assemblage make_assemblage(const DensityMatrix& rho, const MeasurementSet& ms,
                           Direction dir) {
  const int d = ms.dim;
  if (rho.dim() != d * d)
    throw std::invalid_argument("make_assemblage: state and measurement dimensions differ");

  Assemblage out;
  out.steered_dim = d;
  out.settings = ms.settings;
  out.outcomes = ms.outcomes();
  out.direction = dir;
  out.efficiency.assign(ms.settings, 1.0);
  out.members.resize(ms.settings);

  const HermitianOperator eye = HermitianOperator::identity(d);
  for (int x = 0; x < ms.settings; ++x) {
    for (int a = 0; a < out.outcomes; ++a) {
      HermitianOperator full =
          dir == Direction::AtoB ? kron(ms.effects[x][a], eye) : kron(eye, ms.effects[x][a]);
      // sigma = Tr_steering((M (x) I) rho). The product itself is not
      // Hermitian, so trace the raw product; the result is Hermitian up to
      // roundoff and gets symmetrized on construction.
      ComplexMatrix prod = full.matrix() * rho.op().matrix();
      ComplexMatrix sig(d, d);
      if (dir == Direction::AtoB) {
        for (int j = 0; j < d; ++j)
          for (int l = 0; l < d; ++l) {
            cplx s = 0.0;
            for (int i = 0; i < d; ++i) s += prod(i * d + j, i * d + l);
            sig(j, l) = s;
          }
      } else {
        for (int i = 0; i < d; ++i)
          for (int k = 0; k < d; ++k) {
            cplx s = 0.0;
            for (int j = 0; j < d; ++j) s += prod(i * d + j, k * d + j);
            sig(i, k) = s;
          }
      }
      out.members[x].push_back(HermitianOperator(sig));
    }
  }
  return out;
}

Assemblage make_priori(const Assemblage& asm_in, const HermitianOperator& rho_steered,
                       const std::vector<double>& eps) {
  if (static_cast<int>(eps.size()) != asm_in.settings)
    throw std::invalid_argument("make_priori: one efficiency per setting required");
  for (double e : eps)
    if (!(e > 0.0 && e <= 1.0))
      throw std::invalid_argument("make_priori: efficiencies must lie in (0,1]");
  if (rho_steered.dim() != asm_in.steered_dim)
    throw std::invalid_argument("make_priori: reduced-state dimension mismatch");

  Assemblage out;
  out.steered_dim = asm_in.steered_dim;
  out.settings = asm_in.settings;
  out.outcomes = asm_in.outcomes + 1;
  out.direction = asm_in.direction;
  out.efficiency = eps;
  out.members.resize(out.settings);
  for (int x = 0; x < out.settings; ++x) {
    for (int a = 0; a < asm_in.outcomes; ++a)
      out.members[x].push_back(asm_in.members[x][a].scaled(eps[x]));
    out.members[x].push_back(rho_steered.scaled(1.0 - eps[x]));
  }
  return out;
}

Assemblage make_priori(const Assemblage& asm_in, const HermitianOperator& rho_steered,
                       double eps) {
  return make_priori(asm_in, rho_steered, std::vector<double>(asm_in.settings, eps));
}

AssemblageReport validate(const Assemblage& a, double psd_tol, double ns_tol,
                          double norm_tol) {
  AssemblageReport rep;
  rep.psd_margin = 1.0;
  for (const auto& row : a.members)
    for (const auto& s : row)
      rep.psd_margin = std::min(rep.psd_margin, min_eigenvalue(s));

  std::vector<HermitianOperator> totals;
  for (const auto& row : a.members) {
    HermitianOperator t = HermitianOperator::zero(a.steered_dim);
    for (const auto& s : row) t += s;
    totals.push_back(t);
  }
  rep.ns_residual = 0.0;
  for (std::size_t x = 1; x < totals.size(); ++x) {
    HermitianOperator d = totals[x];
    d -= totals[0];
    rep.ns_residual = std::max(rep.ns_residual, herm_max_abs(d));
  }
  rep.norm_residual = std::abs(totals.empty() ? 1.0 : totals[0].trace() - 1.0);

  rep.psd_ok = rep.psd_margin >= -psd_tol;
  rep.ns_ok = rep.ns_residual <= ns_tol;
  rep.norm_ok = rep.norm_residual <= norm_tol;
  return rep;
}

}
