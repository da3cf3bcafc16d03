#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "steerkit/sdp.hpp"
#include "steerkit/steering.hpp"

namespace steerkit {

// Threshold-surface sweep over the qutrit amplitude rectangle. The grid stays
// strictly inside the parameter box: theta runs over [delta, pi/4 - delta] and
// phi over [delta, pi/2 - delta], both endpoints included, theta-major order.
struct SweepSpec {
  int n_theta = 5;
  int n_phi = 5;
  double delta = 0.02;
  int settings = 4;
  std::vector<double> efficiency;   // empty = lossless; else scalar or one per setting
  std::vector<int> setting_order;   // optional permutation of the kept settings
  bool do_a2b = true;
  bool do_b2a = true;
  enum class Mode { sw, general } mode = Mode::sw;
  double tol_p = 1e-4;
  int scan = 0;
  int threads = 1;
  SdpOptions sdp;
};

struct SurfaceCell {
  double theta = 0.0;
  double phi = 0.0;
  std::optional<double> a2b;
  std::optional<double> b2a;
};

// n evenly spaced points on [lo, hi] inclusive (midpoint when n == 1).
std::vector<double> grid_points(double lo, double hi, int n);

// Critical visibility of one state family under the given measurements and
// direction. eps empty means lossless; otherwise one efficiency per setting.
// Mode general certifies against every measurement and rejects loss counting.
std::optional<double> family_threshold(const std::function<DensityMatrix(double)>& family, int dim,
                                       const MeasurementSet& ms, Direction dir,
                                       const std::vector<double>& eps, SweepSpec::Mode mode,
                                       double tol_p, int scan, const SdpOptions& sdp = {});

std::vector<SurfaceCell> run_surface(const SweepSpec& spec);

// Loss-counted threshold curve for one state family: for each efficiency the
// critical visibility of the priori assemblage built from family(p).
struct LossPoint {
  double epsilon = 1.0;
  std::optional<double> p_star;
};

std::vector<LossPoint> run_loss_curve(const std::function<DensityMatrix(double)>& family,
                                      const MeasurementSet& ms, Direction dir,
                                      const std::vector<double>& eps_values, double tol_p,
                                      int scan, int threads, const SdpOptions& sdp = {});

// CSV emitters; both write to a temp file and rename so readers never observe
// a partial file, and produce byte-identical output for identical inputs.
void write_surface_csv(const std::string& path, const std::vector<SurfaceCell>& cells);
void write_loss_csv(const std::string& path, const std::vector<LossPoint>& points);

// Drops a provenance file next to the csv (extension swapped to .json) with
// the echoed parameters, the library version and a UTC timestamp.
void write_sidecar(const std::string& csv_path, const std::string& params_json);

// STEERKIT_THREADS override, else 1.
int default_threads();

}
