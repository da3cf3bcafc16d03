#include "steerkit/steering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "steerkit/errors.hpp"

namespace steerkit {

namespace {

// Orthonormal Hermitian basis in herm_coords order: diagonal units first,
// then sqrt(1/2)-weighted real and imaginary pair elements row-major.
std::vector<HermitianOperator> herm_basis(int d) {
  std::vector<HermitianOperator> basis;
  basis.reserve(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i) {
    ComplexMatrix m(d, d);
    m(i, i) = 1.0;
    basis.emplace_back(m);
  }
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      ComplexMatrix re(d, d);
      re(i, j) = r;
      re(j, i) = r;
      basis.emplace_back(re);
      ComplexMatrix im(d, d);
      im(i, j) = cplx(0.0, r);
      im(j, i) = cplx(0.0, -r);
      basis.emplace_back(im);
    }
  }
  return basis;
}

SolverSummary summarize(const SdpSolution& sol) {
  SolverSummary s;
  s.status = sol.status;
  s.iterations = sol.iterations;
  s.gap = sol.gap;
  s.primal_residual = sol.primal_residual;
  s.dual_residual = sol.dual_residual;
  return s;
}

ComplexMatrix ptrace_first(const ComplexMatrix& m, int da, int db) {
  ComplexMatrix out(db, db);
  for (int i = 0; i < db; ++i)
    for (int j = 0; j < db; ++j)
      for (int k = 0; k < da; ++k) out(i, j) += m(k * db + i, k * db + j);
  return out;
}

ComplexMatrix ptrace_second(const ComplexMatrix& m, int da, int db) {
  ComplexMatrix out(da, da);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j)
      for (int k = 0; k < db; ++k) out(i, j) += m(i * db + k, j * db + k);
  return out;
}

}  // namespace

SteeringVerdict steering_weight(const Assemblage& a, const SdpOptions& opts) {
  if (a.settings <= 0 || a.outcomes <= 0 || a.steered_dim <= 0)
    throw std::invalid_argument("steering_weight: empty assemblage");
  const int d = a.steered_dim;
  const std::uint64_t nl = strategy_count(a.outcomes, a.settings);
  if (nl > 200000) throw std::invalid_argument("steering_weight: strategy space too large");
  const int L = static_cast<int>(nl);

  BlockSdpProblem prob;
  for (int l = 0; l < L; ++l) {
    prob.blocks.push_back({d, Cone::psd});
    prob.objective.push_back(HermitianOperator::identity(d));
  }
  for (int i = 0; i < a.settings * a.outcomes; ++i) {
    prob.blocks.push_back({d, Cone::psd});
    prob.objective.push_back(HermitianOperator::zero(d));
  }
  const std::vector<HermitianOperator> basis = herm_basis(d);
  for (int x = 0; x < a.settings; ++x) {
    for (int o = 0; o < a.outcomes; ++o) {
      if (a.members[x][o].dim() != d)
        throw std::invalid_argument("steering_weight: member dimension mismatch");
      const std::vector<double> rhs = herm_coords(a.members[x][o]);
      const int slack = L + x * a.outcomes + o;
      for (std::size_t e = 0; e < basis.size(); ++e) {
        SdpConstraint con;
        con.rhs = rhs[e];
        for (int l = 0; l < L; ++l) {
          DeterministicStrategy st{static_cast<std::uint64_t>(l), a.settings, a.outcomes};
          if (st.outcome(x) == o) con.terms.emplace_back(l, basis[e]);
        }
        con.terms.emplace_back(slack, basis[e]);
        prob.constraints.push_back(std::move(con));
      }
    }
  }

  SdpSolution sol = solve(prob, opts);
  if (sol.status != SdpStatus::optimal)
    throw NumericError(std::string("steering_weight: solver returned ") + to_string(sol.status));

  SteeringVerdict v;
  v.solver = summarize(sol);
  double sw = 1.0 - sol.objective_value;
  if (std::abs(sw) <= tol::tiny_clamp) sw = 0.0;
  v.sw = std::clamp(sw, 0.0, 1.0);
  v.mu = std::clamp(sol.objective_value, 0.0, 1.0);
  v.steerable = v.sw > tol::steerable;
  v.lhs_blocks.assign(sol.blocks.begin(), sol.blocks.begin() + L);
  return v;
}

GeneralUnsteerability unsteerability_q(const DensityMatrix& rho, const MeasurementSet& ms,
                                       Direction dir, double eta, const SdpOptions& opts) {
  const int d = ms.dim;
  if (rho.dim() != d * d)
    throw std::invalid_argument("unsteerability_q: state must join two parties of the measurement dimension");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("unsteerability_q: eta outside (0, 1]");
  const int m = ms.settings;
  const int o = ms.outcomes();
  const std::uint64_t nl = strategy_count(o, m);
  if (nl > 200000) throw std::invalid_argument("unsteerability_q: strategy space too large");
  const int L = static_cast<int>(nl);

  // reduced state of the measuring party
  const HermitianOperator marg =
      dir == Direction::AtoB ? partial_trace(rho.op(), d, d, Side::second)
                             : partial_trace(rho.op(), d, d, Side::first);

  // at eta == 1 the free marginal has an all-zero coefficient column, so the
  // block is omitted entirely and the program reduces to a plain local-model
  // feasibility test on rho itself
  const bool has_loc = eta < 1.0;
  const int sig0 = has_loc ? 2 : 1;
  BlockSdpProblem prob;
  prob.blocks.push_back({d * d, Cone::free_herm});  // O_AB
  prob.objective.push_back(HermitianOperator::zero(d * d));
  if (has_loc) {
    prob.blocks.push_back({d, Cone::free_herm});  // free marginal of the steered party
    prob.objective.push_back(HermitianOperator::zero(d));
  }
  for (int l = 0; l < L; ++l) {
    prob.blocks.push_back({d, Cone::psd});
    prob.objective.push_back(HermitianOperator::identity(d));
  }

  // normalization pins the model mass: any feasible point has q exactly 1
  {
    SdpConstraint con;
    con.rhs = 1.0;
    con.terms.emplace_back(0, HermitianOperator::identity(d * d));
    prob.constraints.push_back(std::move(con));
  }

  const std::vector<HermitianOperator> basis_d = herm_basis(d);
  // projective assemblage of O_AB decomposes over the response strategies
  for (int x = 0; x < m; ++x) {
    for (int a = 0; a < o; ++a) {
      for (const HermitianOperator& e : basis_d) {
        SdpConstraint con;
        con.rhs = 0.0;
        con.terms.emplace_back(0, dir == Direction::AtoB ? kron(ms.effects[x][a], e)
                                                         : kron(e, ms.effects[x][a]));
        for (int l = 0; l < L; ++l) {
          DeterministicStrategy st{static_cast<std::uint64_t>(l), m, o};
          if (st.outcome(x) == a) con.terms.emplace_back(sig0 + l, e.scaled(-1.0));
        }
        prob.constraints.push_back(std::move(con));
      }
    }
  }

  // eta-shrunk reconstruction of the state from O_AB and the free marginal
  const std::vector<HermitianOperator> basis_dd = herm_basis(d * d);
  const std::vector<double> rho_coords = herm_coords(rho.op());
  const HermitianOperator margin_kron =
      dir == Direction::AtoB ? kron(marg, HermitianOperator::identity(d))
                             : kron(HermitianOperator::identity(d), marg);
  for (std::size_t f = 0; f < basis_dd.size(); ++f) {
    SdpConstraint con;
    con.rhs = rho_coords[f];
    con.terms.emplace_back(0, basis_dd[f].scaled(eta));
    if (has_loc) {
      const ComplexMatrix prod = margin_kron.matrix() * basis_dd[f].matrix();
      const ComplexMatrix reduced =
          dir == Direction::AtoB ? ptrace_first(prod, d, d) : ptrace_second(prod, d, d);
      con.terms.emplace_back(1, HermitianOperator(reduced).scaled(1.0 - eta));
    }
    prob.constraints.push_back(std::move(con));
  }

  SdpSolution sol = solve(prob, opts);
  GeneralUnsteerability g;
  g.solver = summarize(sol);
  if (sol.status == SdpStatus::optimal) {
    g.q = sol.objective_value;
    g.certified = sol.objective_value >= 1.0 - tol::certified_q;
  }
  return g;
}

double shrinking_factor_mub(int dim) {
  if (dim < 2) throw std::invalid_argument("shrinking_factor_mub: dim must be at least 2");
  return 1.0 / std::sqrt(static_cast<double>(dim * dim - 1) * (dim - 1));
}

double analytic_pstar_bta(int dim) {
  if (dim < 2) throw std::invalid_argument("analytic_pstar_bta: dim must be at least 2");
  double harmonic = 0.0;
  for (int k = 1; k <= dim; ++k) harmonic += 1.0 / k;
  return (harmonic - 1.0) / (dim - 1);
}

std::optional<double> critical_p(const std::function<bool(double)>& steerable_at,
                                 const ThresholdOptions& topts) {
  if (!(topts.tol_p > 0.0)) throw std::invalid_argument("critical_p: tol_p must be positive");
  if (!steerable_at(1.0)) return std::nullopt;
  if (steerable_at(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  if (topts.scan > 1) {
    std::vector<std::pair<double, bool>> samples;
    samples.emplace_back(0.0, false);
    for (int k = 1; k <= topts.scan; ++k) {
      double p = static_cast<double>(k) / (topts.scan + 1);
      samples.emplace_back(p, steerable_at(p));
    }
    samples.emplace_back(1.0, true);
    int flips = 0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
      if (samples[i].second != samples[i - 1].second) ++flips;
    }
    if (flips != 1) throw AmbiguousThreshold("critical_p: predicate is not monotone on the scan grid", samples);
    for (std::size_t i = 1; i < samples.size(); ++i) {
      if (samples[i].second) {
        lo = samples[i - 1].first;
        hi = samples[i].first;
        break;
      }
    }
  }
  while (hi - lo > topts.tol_p) {
    const double mid = 0.5 * (lo + hi);
    if (steerable_at(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace steerkit
