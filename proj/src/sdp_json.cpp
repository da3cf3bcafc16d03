#include <stdexcept>
#include <string>

#include "json.hpp"
#include "steerkit/sdp.hpp"

// JSON encoding of block SDPs and their solutions. Hermitian matrices are
// stored as flat row-major lists of [re, im] pairs; block sizes fix the shape.

namespace steerkit {

namespace {

using nlohmann::json;

json herm_to_json(const HermitianOperator& h) {
  json out = json::array();
  const int n = h.dim();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      cplx v = h.at(i, j);
      out.push_back(json::array({v.real(), v.imag()}));
    }
  }
  return out;
}

HermitianOperator herm_from_json(const json& j, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim * dim)
    throw std::invalid_argument("sdp json: matrix entry count mismatch");
  ComplexMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int k = 0; k < dim; ++k) {
      const json& e = j[static_cast<std::size_t>(i) * dim + k];
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument("sdp json: matrix entries must be [re, im]");
      m(i, k) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  }
  return HermitianOperator(m);
}

}  // namespace

std::string problem_to_json(const BlockSdpProblem& prob) {
  json out;
  out["blocks"] = json::array();
  for (const BlockSpec& bs : prob.blocks) {
    out["blocks"].push_back({{"size", bs.size}, {"cone", bs.cone == Cone::psd ? "psd" : "free"}});
  }
  out["objective"] = json::array();
  for (std::size_t k = 0; k < prob.objective.size(); ++k) {
    if (herm_max_abs(prob.objective[k]) == 0.0) {
      out["objective"].push_back(nullptr);
    } else {
      out["objective"].push_back(herm_to_json(prob.objective[k]));
    }
  }
  out["constraints"] = json::array();
  for (const SdpConstraint& con : prob.constraints) {
    json terms = json::array();
    for (const auto& [k, coeff] : con.terms) {
      terms.push_back({{"block", k}, {"matrix", herm_to_json(coeff)}});
    }
    out["constraints"].push_back({{"rhs", con.rhs}, {"terms", std::move(terms)}});
  }
  return out.dump(2);
}

BlockSdpProblem problem_from_json(const std::string& text) {
  json j = json::parse(text);
  BlockSdpProblem prob;
  for (const json& bs : j.at("blocks")) {
    BlockSpec spec;
    spec.size = bs.at("size").get<int>();
    std::string cone = bs.at("cone").get<std::string>();
    if (cone == "psd") {
      spec.cone = Cone::psd;
    } else if (cone == "free") {
      spec.cone = Cone::free_herm;
    } else {
      throw std::invalid_argument("sdp json: unknown cone '" + cone + "'");
    }
    prob.blocks.push_back(spec);
  }
  const json& obj = j.at("objective");
  if (obj.size() != prob.blocks.size())
    throw std::invalid_argument("sdp json: objective length mismatch");
  for (std::size_t k = 0; k < prob.blocks.size(); ++k) {
    if (obj[k].is_null()) {
      prob.objective.push_back(HermitianOperator::zero(prob.blocks[k].size));
    } else {
      prob.objective.push_back(herm_from_json(obj[k], prob.blocks[k].size));
    }
  }
  for (const json& cj : j.at("constraints")) {
    SdpConstraint con;
    con.rhs = cj.at("rhs").get<double>();
    for (const json& tj : cj.at("terms")) {
      int blk = tj.at("block").get<int>();
      if (blk < 0 || blk >= static_cast<int>(prob.blocks.size()))
        throw std::invalid_argument("sdp json: term block index out of range");
      con.terms.emplace_back(blk, herm_from_json(tj.at("matrix"), prob.blocks[blk].size));
    }
    prob.constraints.push_back(std::move(con));
  }
  prob.check();
  return prob;
}

std::string solution_to_json(const SdpSolution& sol) {
  json out;
  out["status"] = to_string(sol.status);
  out["objective_value"] = sol.objective_value;
  out["gap"] = sol.gap;
  out["primal_residual"] = sol.primal_residual;
  out["dual_residual"] = sol.dual_residual;
  out["iterations"] = sol.iterations;
  out["blocks"] = json::array();
  for (const HermitianOperator& h : sol.blocks) out["blocks"].push_back(herm_to_json(h));
  if (sol.status == SdpStatus::primal_infeasible || sol.status == SdpStatus::dual_infeasible) {
    json cert;
    cert["margin"] = sol.certificate.margin;
    if (!sol.certificate.farkas_y.empty()) cert["farkas_y"] = sol.certificate.farkas_y;
    if (!sol.certificate.ray.empty()) {
      cert["ray"] = json::array();
      for (const HermitianOperator& h : sol.certificate.ray) cert["ray"].push_back(herm_to_json(h));
    }
    out["certificate"] = std::move(cert);
  }
  return out.dump(2);
}

}  // namespace steerkit
