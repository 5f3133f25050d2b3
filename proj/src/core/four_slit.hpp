#pragma once

// Two-double-slit setup: slits A, B at x > d and their mirror images A', B'
// at x < -d.

#include <span>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "physics.hpp"

namespace bohm {

/// right_left: x1 > d and x2 < -d. left_right: x1 < -d and x2 > d.
enum class SlitRegion { right_left, left_right };

const char* to_string(SlitRegion r);
bool in_region(SlitRegion region, const PairConfiguration& c, const PhysicalParams& p);

/// Unnormalized four-term wavefunction over infinitely extended slit waves:
/// psi_A(1) psi_B'(2) +- psi_A(2) psi_B'(1) + psi_A'(2) psi_B(1) +- psi_A'(1) psi_B(2).
Complex naive_four_slit_psi(Spin spin, const PairConfiguration& c, const PhysicalParams& p);

struct XVelocity {
    double vx1 = 0.0;
    double vx2 = 0.0;
};

/// (hbar/m) d(arg Psi)/dx_i of the naive four-term wavefunction by central
/// differences with step min(h, 1e-3 / kx). Throws Error(node_proximity)
/// within about 1e-2 rad of a zero of the cos/sin factor.
XVelocity naive_x_velocity(const PairConfiguration& c, Spin spin, const PhysicalParams& p, double h = 1e-10);

/// Guidance velocities of the naive wavefunction, all four components, by the
/// same central differences (transverse step h).
PairVelocity naive_velocity(const PairConfiguration& c, Spin spin, const PhysicalParams& p, double h = 1e-10);

/// Piecewise wavefunction restricted to one region (N' = 1). The left_right
/// branch carries the exchange sign. Throws Error(region_violation) outside.
Complex corrected_four_slit_psi(SlitRegion region, Spin spin, const PairConfiguration& c, const PhysicalParams& p);

/// Guidance velocities of the corrected wavefunction by central differences
/// of its phase (transverse step h, longitudinal min(h, 0.25 / kx)).
PairVelocity corrected_four_slit_velocity(SlitRegion region, Spin spin, const PairConfiguration& c,
                                          const PhysicalParams& p, double h = 1e-10, bool richardson = false);

/// Reflects x2 (right_left) or x1 (left_right) and the matching x velocity.
/// y components are untouched. An involution.
Trajectory map_trajectory_to_double_slit(const Trajectory& traj, SlitRegion region);

struct PropertyCheck {
    std::string name;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct FourSlitReport {
    std::vector<PropertyCheck> checks;
    bool all_pass() const;
};

/// Runs the three four-slit property families: factorization of the naive
/// wavefunction (and its vanishing x velocities), correspondence of the
/// corrected wavefunction with the double-slit boson state, and agreement of
/// x2-reflected double-slit trajectories with the corrected velocity field.
/// `initial` supplies the (y1, y2) starting heights for the trajectories;
/// their x coordinates are replaced by 2d.
FourSlitReport four_slit_check(const PhysicalParams& p, const IntegratorConfig& integrator,
                               std::span<const PairConfiguration> initial, std::size_t samples_per_trajectory = 11);

/// |a - b| / max(|b|, floor): relative velocity mismatch with an absolute
/// floor for components that pass through zero.
double velocity_mismatch(double a, double b, double floor);

}  // namespace bohm
