#include "steerkit/measurements.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "steerkit/errors.hpp"

namespace steerkit {

bool is_prime(int n) {
  if (n < 2) return false;
  for (int k = 2; k * k <= n; ++k)
    if (n % k == 0) return false;
  return true;
}

namespace {

HermitianOperator projector(const std::vector<cplx>& v) {
  const int d = static_cast<int>(v.size());
  ComplexMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = v[i] * std::conj(v[j]);
  return HermitianOperator(m);
}

}  // namespace

MeasurementSet mub(int d) {
  if (!is_prime(d)) {
    std::ostringstream msg;
    msg << "unsupported dimension: " << d << " is not prime";
    throw UnsupportedDimension(msg.str());
  }
  MeasurementSet ms;
  ms.dim = d;
  ms.settings = d + 1;
  ms.effects.resize(d + 1);

  // setting 0: computational basis
  for (int k = 0; k < d; ++k) {
    std::vector<cplx> v(d, 0.0);
    v[k] = 1.0;
    ms.effects[0].push_back(projector(v));
  }

  if (d == 2) {
    const double r = 1.0 / std::sqrt(2.0);
    ms.effects[1].push_back(projector({r, r}));
    ms.effects[1].push_back(projector({r, -r}));
    ms.effects[2].push_back(projector({r, cplx(0.0, r)}));
    ms.effects[2].push_back(projector({r, cplx(0.0, -r)}));
    return ms;
  }

  const double w = 2.0 * std::numbers::pi / d;
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 1; j <= d; ++j) {
    for (int k = 0; k < d; ++k) {
      std::vector<cplx> v(d);
      for (int l = 0; l < d; ++l) {
        const int phase = (j * l * l + k * l) % d;
        v[l] = norm * cplx(std::cos(w * phase), std::sin(w * phase));
      }
      ms.effects[j].push_back(projector(v));
    }
  }
  return ms;
}

MeasurementSet take_settings(const MeasurementSet& ms, int m) {
  if (m < 1 || m > ms.settings)
    throw std::invalid_argument("take_settings: count out of range");
  MeasurementSet out;
  out.dim = ms.dim;
  out.settings = m;
  out.effects.assign(ms.effects.begin(), ms.effects.begin() + m);
  return out;
}

MeasurementSet reorder_settings(const MeasurementSet& ms, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != ms.settings)
    throw std::invalid_argument("reorder_settings: permutation length mismatch");
  std::vector<bool> seen(ms.settings, false);
  for (int p : perm) {
    if (p < 0 || p >= ms.settings || seen[p])
      throw std::invalid_argument("reorder_settings: not a permutation");
    seen[p] = true;
  }
  MeasurementSet out;
  out.dim = ms.dim;
  out.settings = ms.settings;
  for (int p : perm) out.effects.push_back(ms.effects[p]);
  return out;
}

int DeterministicStrategy::outcome(int x) const {
  if (x < 0 || x >= settings)
    throw std::invalid_argument("strategy outcome: setting out of range");
  std::uint64_t v = lambda;
  for (int i = 0; i < x; ++i) v /= outcomes;
  return static_cast<int>(v % outcomes);
}

std::uint64_t strategy_count(int outcomes, int settings) {
  if (outcomes < 1 || settings < 1)
    throw std::invalid_argument("strategy_count: need positive counts");
  std::uint64_t n = 1;
  for (int i = 0; i < settings; ++i) {
    if (n > (1ull << 40) / static_cast<std::uint64_t>(outcomes))
      throw std::invalid_argument("strategy_count: strategy space too large");
    n *= outcomes;
  }
  return n;
}

}
