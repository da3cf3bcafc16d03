#pragma once

#include <cstdint>
#include <vector>

#include "steerkit/linalg.hpp"

namespace steerkit {

// A collection of projective measurements on C^dim: effects[x][a] is outcome
// a of setting x. Every setting's effects sum to the identity.
struct MeasurementSet {
  int dim = 0;
  int settings = 0;
  std::vector<std::vector<HermitianOperator>> effects;

  int outcomes() const { return effects.empty() ? 0 : static_cast<int>(effects[0].size()); }
};

// The d+1 mutually unbiased bases of a prime dimension as rank-1 projective
// measurements. Setting 0 is the computational basis. For odd prime d,
// setting j in 1..d has vectors <l|e_k> = d^{-1/2} w^{j l^2 + k l} with
// w = exp(2 pi i / d). For d = 2 the order is Z, X, Y. Throws
// UnsupportedDimension for non-prime d.
MeasurementSet mub(int d);

// First m settings of ms, order preserved.
MeasurementSet take_settings(const MeasurementSet& ms, int m);

// Reorder settings by perm (a permutation of 0..settings-1).
MeasurementSet reorder_settings(const MeasurementSet& ms, const std::vector<int>& perm);

// Local deterministic response: lambda encodes one outcome per setting in
// little-endian base-outcomes digits.
struct DeterministicStrategy {
  std::uint64_t lambda = 0;
  int settings = 0;
  int outcomes = 0;

  int outcome(int x) const;
};

// Number of deterministic strategies outcomes^settings; guards overflow.
std::uint64_t strategy_count(int outcomes, int settings);

bool is_prime(int n);

}
