#pragma once

// Bohmian velocity fields for the double-slit pair state and their
// integration into trajectories.

#include <cstddef>
#include <optional>
#include <vector>

#include "physics.hpp"

namespace bohm {

struct PairVelocity {
    double vx1 = 0.0;
    double vy1 = 0.0;
    double vx2 = 0.0;
    double vy2 = 0.0;

    bool operator==(const PairVelocity&) const = default;
};

/// Intermediate quantities of the closed-form y velocities.
///
/// f and g are the complex exponents in Psi ~ exp(-f) [exp(-g) +- exp(g)];
/// alpha = 2 Y m (y1 - y2) / (hbar^2 t^2 + 4 m^2 sigma0^4) in SI. term1 is the
/// interference contribution (equal and opposite for the two particles),
/// term2 the free-spreading contribution hbar^2 t y_i / (hbar^2 t^2 + 4 m^2 sigma0^4).
struct VelocityFieldTerms {
    double alpha = 0.0;
    Complex f;
    Complex g;
    double term1_y1 = 0.0;
    double term2_y1 = 0.0;
    double term1_y2 = 0.0;
    double term2_y2 = 0.0;
};

/// Fermion denominators |cos(hbar t alpha) - cosh(2 m sigma0^2 alpha)| below
/// this fraction of cosh(2 m sigma0^2 alpha) are treated as node contact.
inline constexpr double default_node_guard = 1e-14;

VelocityFieldTerms velocity_terms(const PairConfiguration& c, Spin spin, const PhysicalParams& p,
                                  double node_guard = default_node_guard);

/// Exact guidance velocities. Requires ky = 0. Throws Error(node_proximity)
/// for fermions on (or within node_guard of) the node y1 = y2.
PairVelocity velocity_closed_form(const PairConfiguration& c, Spin spin, const PhysicalParams& p,
                                  double node_guard = default_node_guard);

/// Guidance velocities from central differences of the phase of psi_pair,
/// v_i = (hbar / m) d(arg Psi)/d r_i = (hbar / m) Im(grad_i Psi / Psi).
///
/// h is the transverse step (m). The longitudinal step is min(h, 0.25 / kx)
/// so that it stays below the de Broglie wavelength. With richardson set the
/// h and h/2 differences are combined to cancel the O(h^2) term.
/// Throws Error(node_proximity) when relative_density(c) < density_floor.
PairVelocity velocity_oracle(const PairConfiguration& c, Spin spin, const PhysicalParams& p, double h,
                             bool richardson = false, double density_floor = 1e-12);

/// Centre-of-mass height y(t) = y(0) |sigma_t| / sigma0.
double com_closed_form(double y0, double t, const PhysicalParams& p);

struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-9;  // in units of sigma0
    double h_init = 1e-11;  // s
    double h_min = 1e-22;   // s
    double h_max = 1e-8;    // s
    double density_floor = 1e-12;
    std::size_t max_steps = 1'000'000;

    void validate() const;
    bool operator==(const IntegratorConfig&) const = default;
};

enum class TrajectoryStatus { completed, node_proximity_abort, step_underflow };

const char* to_string(TrajectoryStatus s);

struct TrajectorySample {
    PairConfiguration config;
    PairVelocity velocity;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    TrajectoryStatus status = TrajectoryStatus::completed;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;

    bool completed() const { return status == TrajectoryStatus::completed; }
};

/// Uniform sample times t0, ..., t_end (count >= 2).
std::vector<double> uniform_times(double t0, double t_end, std::size_t count);

/// Integrates the pair from `initial` to t_end with adaptive Dormand-Prince
/// 5(4). x advances analytically at hbar kx / m; (y1, y2) are integrated in
/// reduced units. Step control is per unit step: rel_tol and abs_tol bound the
/// error accumulated over [initial.t, t_end], not just each step's. Samples are produced by dense output at `sample_times`
/// (sorted, within [initial.t, t_end]); empty means just the two endpoints.
/// Node contact and step underflow end the run early with the matching
/// status; samples up to that point are kept.
Trajectory integrate_trajectory(const PairConfiguration& initial, double t_end, const IntegratorConfig& cfg,
                                Spin spin, const PhysicalParams& p, const std::vector<double>& sample_times = {});

}  // namespace bohm
