#pragma once

// Central numeric tolerances. Functions that check one of these accept an
// override parameter defaulting to the constant here.
namespace steerkit::tol {

inline constexpr double hermitian_symmetry = 1e-12;
inline constexpr double density_trace = 1e-10;
inline constexpr double density_psd = 1e-10;
inline constexpr double no_signalling = 1e-9;
inline constexpr double normalization = 1e-9;
inline constexpr double solver = 1e-8;
inline constexpr double steerable = 1e-5;     // sw above this counts as steerable
inline constexpr double certified_q = 1e-6;   // |q - 1| below this certifies
inline constexpr double tiny_clamp = 1e-9;    // magnitudes below this clamp to zero

}
