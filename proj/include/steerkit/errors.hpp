#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace steerkit {

// Dimension outside what a construction supports (e.g. non-prime basis dimension).
struct UnsupportedDimension : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical routine failed to converge or produced an unusable result.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A threshold scan found a non-monotone predicate; carries the offending samples.
struct AmbiguousThreshold : std::runtime_error {
  std::vector<std::pair<double, bool>> samples;
  AmbiguousThreshold(const std::string& what, std::vector<std::pair<double, bool>> s)
      : std::runtime_error(what), samples(std::move(s)) {}
};

}
