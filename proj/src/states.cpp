#include "steerkit/states.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace steerkit {

namespace {

void check_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
}

}  // namespace

DensityMatrix pes_state(int d, double p, const std::vector<double>& amps) {
  if (d < 2) throw std::invalid_argument("pes_state: dimension must be at least 2");
  check_p(p);
  if (static_cast<int>(amps.size()) != d)
    throw std::invalid_argument("pes_state: need d amplitudes");
  double norm = 0.0;
  for (double a : amps) {
    if (a < 0.0) throw std::invalid_argument("pes_state: amplitudes must be nonnegative");
    norm += a * a;
  }
  if (std::abs(norm - 1.0) > 1e-10)
    throw std::invalid_argument("pes_state: amplitudes must be normalized");

  ComplexMatrix rho(d * d, d * d);
  // entangled part: (i,i) x (j,j) entries a_i a_j
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      rho(i * d + i, j * d + j) += p * amps[i] * amps[j];
  // separable part: diag(a_i^2) (x) I/d
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      rho(i * d + j, i * d + j) += (1.0 - p) * amps[i] * amps[i] / d;
  return DensityMatrix(HermitianOperator(rho));
}

std::vector<double> qutrit_amps(double theta, double phi) {
  constexpr double pi = std::numbers::pi;
  if (!(theta >= 0.0 && theta <= pi / 4 + 1e-12))
    throw std::invalid_argument("qutrit_pes: theta outside [0, pi/4]");
  if (!(phi >= 0.0 && phi <= pi / 2 + 1e-12))
    throw std::invalid_argument("qutrit_pes: phi outside [0, pi/2]");
  return {std::cos(theta) * std::sin(phi), std::sin(theta) * std::sin(phi),
          std::cos(phi)};
}

DensityMatrix qutrit_pes(double p, double theta, double phi) {
  return pes_state(3, p, qutrit_amps(theta, phi));
}

DensityMatrix isotropic_state(int d, double p) {
  if (d < 2) throw std::invalid_argument("isotropic_state: dimension must be at least 2");
  check_p(p);
  ComplexMatrix rho(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      rho(i * d + i, j * d + j) += p / d;
  for (int k = 0; k < d * d; ++k) rho(k, k) += (1.0 - p) / (d * d);
  return DensityMatrix(HermitianOperator(rho));
}

}
