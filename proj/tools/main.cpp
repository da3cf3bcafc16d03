#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "steerkit/assemblage.hpp"
#include "steerkit/errors.hpp"
#include "steerkit/measurements.hpp"
#include "steerkit/sdp.hpp"
#include "steerkit/states.hpp"
#include "steerkit/steering.hpp"
#include "steerkit/sweep.hpp"
#include "steerkit/version.hpp"

namespace {

using namespace steerkit;

constexpr double kPi = 3.14159265358979323846;

// exit codes: 0 success, 2 bad arguments or unsupported request,
// 3 numerical/solver failure, 4 ambiguous threshold scan
constexpr int kExitBadArgs = 2;
constexpr int kExitSolver = 3;
constexpr int kExitAmbiguous = 4;

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument(std::string(what) + ": bad number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (double v : parse_double_list(text, what)) {
    if (v != std::floor(v)) throw std::invalid_argument(std::string(what) + ": expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// Shared state-family flags. The default pes state is the maximally
// entangled qutrit point theta = pi/4, phi = atan(sqrt 2).
struct StateFlags {
  std::string state = "pes";
  int dim = 3;
  double theta = kPi / 4.0;
  double phi = std::atan(std::sqrt(2.0));
  std::string amps_text;

  void attach(CLI::App* cmd) {
    cmd->add_option("--state", state, "state family: pes or iso")
        ->check(CLI::IsMember({"pes", "iso"}));
    cmd->add_option("--dim", dim, "local dimension");
    cmd->add_option("--theta", theta, "qutrit amplitude angle theta in [0, pi/4]");
    cmd->add_option("--phi", phi, "qutrit amplitude angle phi in [0, pi/2]");
    cmd->add_option("--amps", amps_text, "comma list of Schmidt amplitudes (overrides theta/phi)");
  }

  std::function<DensityMatrix(double)> family() const {
    if (state == "iso") {
      const int d = dim;
      return [d](double p) { return isotropic_state(d, p); };
    }
    if (!amps_text.empty()) {
      const std::vector<double> amps = parse_double_list(amps_text, "--amps");
      if (static_cast<int>(amps.size()) != dim)
        throw std::invalid_argument("--amps length must equal --dim");
      const int d = dim;
      return [d, amps](double p) { return pes_state(d, p, amps); };
    }
    if (dim != 3)
      throw std::invalid_argument("theta/phi parametrization is for dim 3; pass --amps for other dims");
    const double t = theta, f = phi;
    return [t, f](double p) { return qutrit_pes(p, t, f); };
  }
};

Direction parse_direction(const std::string& s) {
  if (s == "a2b") return Direction::AtoB;
  if (s == "b2a") return Direction::BtoA;
  throw std::invalid_argument("direction must be a2b or b2a");
}

MeasurementSet build_measurements(int dim, int settings, const std::string& order_text) {
  MeasurementSet ms = mub(dim);
  if (settings > 0) ms = take_settings(ms, settings);
  if (!order_text.empty()) ms = reorder_settings(ms, parse_int_list(order_text, "--setting-order"));
  return ms;
}

HermitianOperator steered_marginal(const DensityMatrix& rho, int d, Direction dir) {
  return dir == Direction::AtoB ? partial_trace(rho.op(), d, d, Side::first)
                                : partial_trace(rho.op(), d, d, Side::second);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(int argc, char** argv) {
  CLI::App app{"quantum steering certification toolkit"};
  app.set_version_flag("--version", version_string);
  app.require_subcommand(1);

  // ---- sw: steering weight of one assemblage ----
  StateFlags sw_state;
  double sw_p = 1.0;
  std::string sw_dir = "a2b", sw_eff, sw_order;
  int sw_settings = -1;
  double sw_tol = tol::solver;
  auto* sw_cmd = app.add_subcommand("sw", "steering weight of a state under mub measurements");
  sw_state.attach(sw_cmd);
  sw_cmd->add_option("--p", sw_p, "visibility")->check(CLI::Range(0.0, 1.0));
  sw_cmd->add_option("--direction", sw_dir, "a2b or b2a");
  sw_cmd->add_option("--settings", sw_settings, "number of mub settings (default all d+1)");
  sw_cmd->add_option("--efficiency", sw_eff, "heralding efficiency, scalar or one per setting");
  sw_cmd->add_option("--setting-order", sw_order, "permutation applied to the kept settings");
  sw_cmd->add_option("--tol", sw_tol, "solver tolerance");

  // ---- pstar: critical visibility of a family ----
  StateFlags ps_state;
  std::string ps_dir = "a2b", ps_eff, ps_order, ps_mode = "sw";
  int ps_settings = -1, ps_scan = 0;
  double ps_tolp = 1e-4, ps_tol = tol::solver;
  auto* ps_cmd = app.add_subcommand("pstar", "critical visibility by bisection");
  ps_state.attach(ps_cmd);
  ps_cmd->add_option("--direction", ps_dir, "a2b or b2a");
  ps_cmd->add_option("--settings", ps_settings, "number of mub settings (default all d+1)");
  ps_cmd->add_option("--efficiency", ps_eff, "heralding efficiency, scalar or one per setting");
  ps_cmd->add_option("--setting-order", ps_order, "permutation applied to the kept settings");
  ps_cmd->add_option("--mode", ps_mode, "sw (projective witness) or general (all-measurement certificate)")
      ->check(CLI::IsMember({"sw", "general"}));
  ps_cmd->add_option("--tol-p", ps_tolp, "bisection width on p");
  ps_cmd->add_option("--scan", ps_scan, "monotonicity audit points before bisecting");
  ps_cmd->add_option("--tol", ps_tol, "solver tolerance");

  // ---- surface: qutrit threshold surface to csv ----
  SweepSpec surf;
  surf.threads = default_threads();
  int surf_dim = 3;
  std::string surf_dir = "both", surf_eff, surf_order, surf_mode = "sw", surf_out;
  auto* surf_cmd = app.add_subcommand("surface", "threshold surface over the qutrit amplitude grid");
  surf_cmd->add_option("--dim", surf_dim, "local dimension (3 is the supported surface)");
  surf_cmd->add_option("--n-theta", surf.n_theta, "grid points along theta");
  surf_cmd->add_option("--n-phi", surf.n_phi, "grid points along phi");
  surf_cmd->add_option("--delta,--margin", surf.delta,
                       "margin keeping the grid off the parameter edges");
  surf_cmd->add_option("--settings", surf.settings, "number of mub settings");
  surf_cmd->add_option("--efficiency", surf_eff, "heralding efficiency, scalar or one per setting");
  surf_cmd->add_option("--setting-order", surf_order, "permutation applied to the kept settings");
  surf_cmd->add_option("--direction", surf_dir, "a2b, b2a or both");
  surf_cmd->add_option("--mode", surf_mode, "sw or general")->check(CLI::IsMember({"sw", "general"}));
  surf_cmd->add_option("--tol-p", surf.tol_p, "bisection width on p");
  surf_cmd->add_option("--scan", surf.scan, "monotonicity audit points per cell");
  surf_cmd->add_option("--threads", surf.threads, "worker threads");
  surf_cmd->add_option("--out", surf_out, "output csv path")->required();

  // ---- analytic: closed-form b2a threshold ----
  int an_dim = 3;
  auto* an_cmd = app.add_subcommand("analytic", "closed-form all-projective threshold (harmonic form)");
  an_cmd->add_option("--dim", an_dim, "local dimension");

  // ---- losscurve: threshold vs heralding efficiency ----
  StateFlags lc_state;
  lc_state.state = "iso";
  lc_state.dim = 2;
  std::string lc_dir = "a2b", lc_eps_text, lc_order, lc_out;
  int lc_settings = -1, lc_scan = 0, lc_threads = default_threads();
  double lc_tolp = 1e-4, lc_eps_min = 0.5, lc_eps_max = 1.0;
  int lc_eps_steps = 6;
  auto* lc_cmd = app.add_subcommand("losscurve", "critical visibility as a function of efficiency");
  lc_state.attach(lc_cmd);
  lc_cmd->add_option("--direction", lc_dir, "a2b or b2a");
  lc_cmd->add_option("--settings", lc_settings, "number of mub settings (default all d+1)");
  lc_cmd->add_option("--setting-order", lc_order, "permutation applied to the kept settings");
  lc_cmd->add_option("--eps", lc_eps_text, "explicit comma list of efficiencies");
  lc_cmd->add_option("--eps-min", lc_eps_min, "grid start when --eps is absent");
  lc_cmd->add_option("--eps-max", lc_eps_max, "grid end when --eps is absent");
  lc_cmd->add_option("--eps-steps", lc_eps_steps, "grid size when --eps is absent");
  lc_cmd->add_option("--tol-p", lc_tolp, "bisection width on p");
  lc_cmd->add_option("--scan", lc_scan, "monotonicity audit points per efficiency");
  lc_cmd->add_option("--threads", lc_threads, "worker threads");
  lc_cmd->add_option("--out", lc_out, "output csv path")->required();

  // ---- solve-sdp: run the embedded solver on a problem file ----
  std::string sdp_in, sdp_out;
  double sdp_tol = tol::solver;
  int sdp_max_iter = 200;
  auto* sdp_cmd = app.add_subcommand("solve-sdp", "solve a block sdp stored as json");
  sdp_cmd->add_option("--in", sdp_in, "problem json path")->required();
  sdp_cmd->add_option("--out", sdp_out, "solution json path (stdout when omitted)");
  sdp_cmd->add_option("--tol", sdp_tol, "solver tolerance");
  sdp_cmd->add_option("--max-iter", sdp_max_iter, "iteration cap");

  // ---- mub: basis construction report ----
  int mub_dim = 3;
  bool mub_verify = false;
  auto* mub_cmd = app.add_subcommand("mub", "mutually unbiased basis construction");
  mub_cmd->add_option("--dim", mub_dim, "prime local dimension");
  mub_cmd->add_flag("--verify", mub_verify, "print residuals of the defining properties");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadArgs;
  }

  if (sw_cmd->parsed()) {
    const auto family = sw_state.family();
    const DensityMatrix rho = family(sw_p);
    const int d = sw_state.dim;
    const MeasurementSet ms =
        build_measurements(d, sw_settings > 0 ? sw_settings : d + 1, sw_order);
    const Direction dir = parse_direction(sw_dir);
    Assemblage a = make_assemblage(rho, ms, dir);
    if (!sw_eff.empty()) {
      std::vector<double> eps = parse_double_list(sw_eff, "--efficiency");
      if (eps.size() == 1) eps.assign(ms.settings, eps[0]);
      a = make_priori(a, steered_marginal(rho, d, dir), eps);
    }
    SdpOptions opts;
    opts.tol = sw_tol;
    const SteeringVerdict v = steering_weight(a, opts);
    std::printf("sw %.12f\n", v.sw);
    std::printf("mu %.12f\n", v.mu);
    std::printf("steerable %s\n", v.steerable ? "yes" : "no");
    std::printf("iterations %d\n", v.solver.iterations);
    std::printf("gap %.3e\n", v.solver.gap);
    return 0;
  }

  if (ps_cmd->parsed()) {
    const auto family = ps_state.family();
    const int d = ps_state.dim;
    const MeasurementSet ms =
        build_measurements(d, ps_settings > 0 ? ps_settings : d + 1, ps_order);
    const Direction dir = parse_direction(ps_dir);
    std::vector<double> eps;
    if (!ps_eff.empty()) {
      eps = parse_double_list(ps_eff, "--efficiency");
      if (eps.size() == 1) eps.assign(ms.settings, eps[0]);
    }
    SdpOptions opts;
    opts.tol = ps_tol;
    const auto mode = ps_mode == "sw" ? SweepSpec::Mode::sw : SweepSpec::Mode::general;
    const std::optional<double> p =
        family_threshold(family, d, ms, dir, eps, mode, ps_tolp, ps_scan, opts);
    if (p) {
      std::printf("p_star %.6f\n", *p);
    } else {
      std::printf("p_star none\n");
    }
    return 0;
  }

  if (surf_cmd->parsed()) {
    if (surf_dim != 3) throw UnsupportedDimension("surface supports dim 3");
    surf.do_a2b = surf_dir == "both" || surf_dir == "a2b";
    surf.do_b2a = surf_dir == "both" || surf_dir == "b2a";
    if (!surf.do_a2b && !surf.do_b2a) throw std::invalid_argument("direction must be a2b, b2a or both");
    if (!surf_eff.empty()) surf.efficiency = parse_double_list(surf_eff, "--efficiency");
    if (!surf_order.empty()) surf.setting_order = parse_int_list(surf_order, "--setting-order");
    surf.mode = surf_mode == "sw" ? SweepSpec::Mode::sw : SweepSpec::Mode::general;
    const std::vector<SurfaceCell> cells = run_surface(surf);
    write_surface_csv(surf_out, cells);
    nlohmann::json params;
    params["subcommand"] = "surface";
    params["n_theta"] = surf.n_theta;
    params["n_phi"] = surf.n_phi;
    params["delta"] = surf.delta;
    params["settings"] = surf.settings;
    params["efficiency"] = surf.efficiency;
    params["setting_order"] = surf.setting_order;
    params["direction"] = surf_dir;
    params["mode"] = surf_mode;
    params["tol_p"] = surf.tol_p;
    params["scan"] = surf.scan;
    write_sidecar(surf_out, params.dump());
    std::printf("wrote %s (%zu cells)\n", surf_out.c_str(), cells.size());
    return 0;
  }

  if (an_cmd->parsed()) {
    double harmonic = 0.0;
    if (an_dim >= 1)
      for (int k = 1; k <= an_dim; ++k) harmonic += 1.0 / k;
    nlohmann::json out;
    out["pstar_bta_general"] = analytic_pstar_bta(an_dim);
    out["eta_mub"] = shrinking_factor_mub(an_dim);
    out["harmonic"] = harmonic;
    std::printf("%s\n", out.dump(2).c_str());
    return 0;
  }

  if (lc_cmd->parsed()) {
    const auto family = lc_state.family();
    const int d = lc_state.dim;
    const MeasurementSet ms =
        build_measurements(d, lc_settings > 0 ? lc_settings : d + 1, lc_order);
    const Direction dir = parse_direction(lc_dir);
    std::vector<double> eps_values;
    if (!lc_eps_text.empty()) {
      eps_values = parse_double_list(lc_eps_text, "--eps");
    } else {
      if (lc_eps_steps < 1) throw std::invalid_argument("--eps-steps must be positive");
      eps_values = grid_points(lc_eps_min, lc_eps_max, lc_eps_steps);
    }
    const std::vector<LossPoint> pts =
        run_loss_curve(family, ms, dir, eps_values, lc_tolp, lc_scan, lc_threads);
    write_loss_csv(lc_out, pts);
    nlohmann::json params;
    params["subcommand"] = "losscurve";
    params["state"] = lc_state.state;
    params["dim"] = d;
    params["settings"] = ms.settings;
    params["direction"] = lc_dir;
    params["eps"] = eps_values;
    params["tol_p"] = lc_tolp;
    params["scan"] = lc_scan;
    write_sidecar(lc_out, params.dump());
    std::printf("wrote %s (%zu points)\n", lc_out.c_str(), pts.size());
    return 0;
  }

  if (sdp_cmd->parsed()) {
    const BlockSdpProblem prob = problem_from_json(read_file(sdp_in));
    SdpOptions opts;
    opts.tol = sdp_tol;
    opts.max_iter = sdp_max_iter;
    const SdpSolution sol = solve(prob, opts);
    const std::string text = solution_to_json(sol);
    if (sdp_out.empty()) {
      std::printf("%s\n", text.c_str());
    } else {
      std::ofstream out(sdp_out, std::ios::binary | std::ios::trunc);
      if (!out) throw std::invalid_argument("cannot write " + sdp_out);
      out << text << "\n";
    }
    if (sol.status == SdpStatus::numeric_failure) {
      std::fprintf(stderr, "solver did not reach a conclusive status\n");
      return kExitSolver;
    }
    return 0;
  }

  if (mub_cmd->parsed()) {
    const MeasurementSet ms = mub(mub_dim);
    std::printf("dim %d\n", ms.dim);
    std::printf("settings %d\n", ms.settings);
    if (mub_verify) {
      double proj = 0.0, complete = 0.0, unbiased = 0.0;
      for (int x = 0; x < ms.settings; ++x) {
        HermitianOperator sum = HermitianOperator::zero(ms.dim);
        for (int a = 0; a < ms.dim; ++a) {
          const HermitianOperator& e = ms.effects[x][a];
          HermitianOperator sq(e.matrix() * e.matrix());
          sq -= e;
          proj = std::max(proj, herm_max_abs(sq));
          sum += e;
        }
        sum -= HermitianOperator::identity(ms.dim);
        complete = std::max(complete, herm_max_abs(sum));
      }
      for (int x = 0; x < ms.settings; ++x) {
        for (int y = x + 1; y < ms.settings; ++y) {
          for (int a = 0; a < ms.dim; ++a) {
            for (int b = 0; b < ms.dim; ++b) {
              const double ov = herm_inner(ms.effects[x][a], ms.effects[y][b]);
              unbiased = std::max(unbiased, std::abs(ov - 1.0 / ms.dim));
            }
          }
        }
      }
      std::printf("projector_residual %.3e\n", proj);
      std::printf("completeness_residual %.3e\n", complete);
      std::printf("unbiasedness_residual %.3e\n", unbiased);
      const bool ok = proj < 1e-10 && complete < 1e-10 && unbiased < 1e-10;
      std::printf("%s\n", ok ? "PASS" : "FAIL");
      if (!ok) return kExitSolver;
    }
    return 0;
  }

  return kExitBadArgs;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const AmbiguousThreshold& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    for (const auto& [p, s] : e.samples)
      std::fprintf(stderr, "  p=%.6f steerable=%s\n", p, s ? "yes" : "no");
    return kExitAmbiguous;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadArgs;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  }
}
