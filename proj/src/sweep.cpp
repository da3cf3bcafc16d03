#include "steerkit/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "steerkit/errors.hpp"
#include "steerkit/measurements.hpp"
#include "steerkit/states.hpp"
#include "steerkit/version.hpp"

namespace steerkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Runs jobs 0..count-1 on the requested number of threads; the first worker
// exception is rethrown after everyone has stopped.
void parallel_for(int count, int threads, const std::function<void(int)>& job) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<double> efficiency_vector(const SweepSpec& spec) {
  if (spec.efficiency.empty()) return {};
  if (spec.efficiency.size() == 1) return std::vector<double>(spec.settings, spec.efficiency[0]);
  if (static_cast<int>(spec.efficiency.size()) != spec.settings)
    throw std::invalid_argument("sweep: efficiency must be scalar or one value per setting");
  return spec.efficiency;
}

bool is_lossless(const std::vector<double>& eps) {
  for (double e : eps) {
    if (e != 1.0) return false;
  }
  return true;
}

HermitianOperator steered_marginal(const DensityMatrix& rho, int d, Direction dir) {
  return dir == Direction::AtoB ? partial_trace(rho.op(), d, d, Side::first)
                                : partial_trace(rho.op(), d, d, Side::second);
}

}  // namespace

std::optional<double> family_threshold(const std::function<DensityMatrix(double)>& family, int d,
                                       const MeasurementSet& ms, Direction dir,
                                       const std::vector<double>& eps, SweepSpec::Mode mode,
                                       double tol_p, int scan, const SdpOptions& sdp) {
  std::function<bool(double)> pred;
  if (mode == SweepSpec::Mode::sw) {
    pred = [&](double p) {
      const DensityMatrix rho = family(p);
      Assemblage a = make_assemblage(rho, ms, dir);
      if (!eps.empty() && !is_lossless(eps)) a = make_priori(a, steered_marginal(rho, d, dir), eps);
      return steering_weight(a, sdp).steerable;
    };
  } else {
    if (!eps.empty() && !is_lossless(eps))
      throw std::invalid_argument("sweep: loss counting applies to sw mode only");
    const double eta = shrinking_factor_mub(d);
    pred = [&, eta](double p) {
      const GeneralUnsteerability g = unsteerability_q(family(p), ms, dir, eta, sdp);
      if (g.solver.status == SdpStatus::dual_infeasible)
        throw NumericError("unsteerability solve failed inside threshold search");
      // right on the feasibility boundary the embedding can fail to reach a
      // verdict; counting that as uncertified only shrinks the certified
      // region, so the reported threshold stays a valid lower bound
      if (g.solver.status == SdpStatus::numeric_failure) return true;
      return !g.certified;
    };
  }
  return critical_p(pred, {tol_p, scan});
}

namespace {

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failed: " + path);
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string sidecar_path(const std::string& csv_path) {
  const std::size_t slash = csv_path.find_last_of('/');
  const std::size_t dot = csv_path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return csv_path + ".json";
  return csv_path.substr(0, dot) + ".json";
}

}  // namespace

std::vector<double> grid_points(double lo, double hi, int n) {
  if (n <= 0) throw std::invalid_argument("grid_points: need at least one point");
  if (!(hi >= lo)) throw std::invalid_argument("grid_points: empty interval");
  std::vector<double> pts(n);
  if (n == 1) {
    pts[0] = 0.5 * (lo + hi);
  } else {
    for (int i = 0; i < n; ++i) pts[i] = lo + (hi - lo) * i / (n - 1);
  }
  return pts;
}

std::vector<SurfaceCell> run_surface(const SweepSpec& spec) {
  if (spec.n_theta <= 0 || spec.n_phi <= 0) throw std::invalid_argument("sweep: empty grid");
  if (!(spec.delta >= 0.0) || 2.0 * spec.delta >= kPi / 4.0)
    throw std::invalid_argument("sweep: delta leaves no interior");
  MeasurementSet ms = take_settings(mub(3), spec.settings);
  if (!spec.setting_order.empty()) ms = reorder_settings(ms, spec.setting_order);
  const std::vector<double> eps = efficiency_vector(spec);
  const std::vector<double> thetas = grid_points(spec.delta, kPi / 4.0 - spec.delta, spec.n_theta);
  const std::vector<double> phis = grid_points(spec.delta, kPi / 2.0 - spec.delta, spec.n_phi);

  std::vector<SurfaceCell> cells(static_cast<std::size_t>(spec.n_theta) * spec.n_phi);
  for (int i = 0; i < spec.n_theta; ++i) {
    for (int j = 0; j < spec.n_phi; ++j) {
      cells[static_cast<std::size_t>(i) * spec.n_phi + j].theta = thetas[i];
      cells[static_cast<std::size_t>(i) * spec.n_phi + j].phi = phis[j];
    }
  }

  struct Job {
    std::size_t cell;
    Direction dir;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (spec.do_a2b) jobs.push_back({c, Direction::AtoB});
    if (spec.do_b2a) jobs.push_back({c, Direction::BtoA});
  }
  parallel_for(static_cast<int>(jobs.size()), spec.threads, [&](int idx) {
    const Job& jb = jobs[idx];
    SurfaceCell& cell = cells[jb.cell];
    const double theta = cell.theta, phi = cell.phi;
    auto family = [theta, phi](double p) { return qutrit_pes(p, theta, phi); };
    auto r = family_threshold(family, 3, ms, jb.dir, eps, spec.mode, spec.tol_p, spec.scan, spec.sdp);
    if (jb.dir == Direction::AtoB) {
      cell.a2b = r;
    } else {
      cell.b2a = r;
    }
  });
  return cells;
}

std::vector<LossPoint> run_loss_curve(const std::function<DensityMatrix(double)>& family,
                                      const MeasurementSet& ms, Direction dir,
                                      const std::vector<double>& eps_values, double tol_p,
                                      int scan, int threads, const SdpOptions& sdp) {
  std::vector<LossPoint> points(eps_values.size());
  for (std::size_t i = 0; i < eps_values.size(); ++i) points[i].epsilon = eps_values[i];
  parallel_for(static_cast<int>(points.size()), threads, [&](int idx) {
    const double e = eps_values[idx];
    if (!(e > 0.0 && e <= 1.0)) throw std::invalid_argument("loss curve: efficiency outside (0, 1]");
    const std::vector<double> eps(ms.settings, e);
    points[idx].p_star =
        family_threshold(family, ms.dim, ms, dir, eps, SweepSpec::Mode::sw, tol_p, scan, sdp);
  });
  return points;
}

void write_surface_csv(const std::string& path, const std::vector<SurfaceCell>& cells) {
  std::string out = "theta,phi,pstar_a2b,pstar_b2a\n";
  for (const SurfaceCell& c : cells) {
    out += fmt6(c.theta);
    out += ',';
    out += fmt6(c.phi);
    out += ',';
    if (c.a2b) out += fmt6(*c.a2b);
    out += ',';
    if (c.b2a) out += fmt6(*c.b2a);
    out += '\n';
  }
  atomic_write(path, out);
}

void write_loss_csv(const std::string& path, const std::vector<LossPoint>& points) {
  std::string out = "epsilon,p_star\n";
  for (const LossPoint& pt : points) {
    out += fmt6(pt.epsilon);
    out += ',';
    if (pt.p_star) out += fmt6(*pt.p_star);
    out += '\n';
  }
  atomic_write(path, out);
}

void write_sidecar(const std::string& csv_path, const std::string& params_json) {
  nlohmann::json doc;
  doc["params"] = nlohmann::json::parse(params_json);
  doc["version"] = version_string;
  char stamp[32];
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  doc["generated_at"] = stamp;
  atomic_write(sidecar_path(csv_path), doc.dump(2) + "\n");
}

int default_threads() {
  const char* env = std::getenv("STEERKIT_THREADS");
  if (env != nullptr) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

}  // namespace steerkit
