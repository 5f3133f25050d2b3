#pragma once

// Internal helpers shared by the wavefunction code. u is y / sigma0 and tau is
// t / (2 m sigma0^2 / hbar).

#include "physics.hpp"

namespace bohm::reduced {

/// exp(i a b), with a*b split into an exact hi + lo pair so that phases of
/// order 1e10 rad (kx x at the detector) keep their low-order bits.
Complex unit_phase_product(double a, double b);

/// Plane-wave part of psi_A: exp(i [kx x - hbar kx^2 t / (2m)]).
Complex x_factor(double x, double tau, const PhysicalParams& p);

/// Transverse part of psi_A (including the (2 pi sigma_t^2)^(-1/4) prefactor, SI).
Complex y_factor(double u, double tau, const PhysicalParams& p);

}  // namespace bohm::reduced
