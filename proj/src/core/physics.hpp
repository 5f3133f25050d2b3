#pragma once

// Analytic one- and two-particle wavefunctions for the double-slit setup.
//
// Public arguments and results are SI. Internally every evaluation works in
// reduced units: lengths in sigma0, times in 2 m sigma0^2 / hbar. In those
// units sigma_t / sigma0 = 1 + i tau, which keeps intermediate values O(1).

#include <complex>

namespace bohm {

using Complex = std::complex<double>;

enum class Spin { boson, fermion };

/// +1 for bosons, -1 for fermions: the sign of the exchange term.
constexpr double exchange_sign(Spin s) { return s == Spin::boson ? 1.0 : -1.0; }

const char* to_string(Spin s);
Spin spin_from_string(const char* name);

enum class Slit { A, B, A_prime, B_prime };

namespace constants {
inline constexpr double electron_mass = 9.1093837015e-31;  // kg, CODATA 2018
inline constexpr double hbar = 1.054571817e-34;            // J s, CODATA 2018
}  // namespace constants

struct PhysicalParams {
    double mass = constants::electron_mass;
    double hbar = constants::hbar;
    double sigma0 = 1e-6;
    double slit_offset = 5e-6;      // Y
    double kx = 0.0;                // set by baseline()
    double ky = 0.0;
    double half_separation = 1e-3;  // d, four-slit setup only
    double flight_length = 0.2;     // L

    /// Electron, sigma0 = 1 um, Y = 5 sigma0, ky = 0, L = 0.2 m and the given
    /// longitudinal speed hbar kx / m.
    static PhysicalParams baseline(double x_speed = 2e7);

    /// Throws Error(invalid_argument) naming the first offending field.
    void validate() const;

    /// 2 m sigma0^2 / hbar.
    double time_scale() const { return 2.0 * mass * sigma0 * sigma0 / hbar; }
    /// hbar / (2 m sigma0): sigma0 per time_scale.
    double velocity_scale() const { return hbar / (2.0 * mass * sigma0); }
    double x_speed() const { return hbar * kx / mass; }
    double flight_time() const { return flight_length / x_speed(); }
    void set_x_speed(double v) { kx = v * mass / hbar; }

    bool operator==(const PhysicalParams&) const = default;
};

struct PairConfiguration {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;
    double t = 0.0;

    bool operator==(const PairConfiguration&) const = default;
};

/// Transverse heights of the two particles.
struct YPair {
    double y1 = 0.0;
    double y2 = 0.0;

    bool operator==(const YPair&) const = default;
};

/// Complex packet width sigma0 (1 + i hbar t / (2 m sigma0^2)).
Complex sigma_t(double t, const PhysicalParams& p);

/// Freely propagated Gaussian slit wave. B, A', B' are reflections of A.
Complex psi_slit(Slit slit, double x, double y, double t, const PhysicalParams& p);

/// |N|^2 for the symmetrized pair state (ky = 0 normalization).
double normalization_n2(Spin spin, const PhysicalParams& p);

/// Normalized symmetrized pair wavefunction, N real and positive.
Complex psi_pair(Spin spin, const PairConfiguration& c, const PhysicalParams& p);

/// |N|^2 (2 pi sigma0^2)^-1 (F + G +- 2H). Rejects ky != 0.
double initial_density(double y1, double y2, Spin spin, const PhysicalParams& p);

/// |psi_pair|^2 (per m^2).
double joint_density(const PairConfiguration& c, Spin spin, const PhysicalParams& p);

/// |Psi|^2 divided by the peak value |N|^2 / (2 pi |sigma_t|^2) of a single
/// product term. O(1) on the packets at every time; tiny near nodes.
double relative_density(const PairConfiguration& c, Spin spin, const PhysicalParams& p);

}  // namespace bohm
