#pragma once

#include <vector>

#include "steerkit/linalg.hpp"

namespace steerkit {

// Two-qudit family p * |psi_a><psi_a| + (1-p) * diag(a_i^2) (x) I/d with
// |psi_a> = sum_i a_i |ii>, a_i >= 0, sum a_i^2 = 1.
DensityMatrix pes_state(int d, double p, const std::vector<double>& amps);

// Qutrit parametrization amps = (cos(theta) sin(phi), sin(theta) sin(phi),
// cos(phi)) with theta in [0, pi/4] and phi in [0, pi/2].
DensityMatrix qutrit_pes(double p, double theta, double phi);
std::vector<double> qutrit_amps(double theta, double phi);

// p * |Phi_d><Phi_d| + (1-p) I/d^2 with |Phi_d> the maximally entangled state.
DensityMatrix isotropic_state(int d, double p);

}
