#include "physics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include "error.hpp"
#include "reduced.hpp"

namespace bohm {

const char* to_string(Spin s) { return s == Spin::boson ? "boson" : "fermion"; }

Spin spin_from_string(const char* name)
{
    if (std::strcmp(name, "boson") == 0) return Spin::boson;
    if (std::strcmp(name, "fermion") == 0) return Spin::fermion;
    fail(ErrorCode::invalid_argument, std::string("unknown statistics '") + name + "' (expected boson or fermion)");
}

PhysicalParams PhysicalParams::baseline(double x_speed)
{
    PhysicalParams p;
    p.set_x_speed(x_speed);
    return p;
}

void PhysicalParams::validate() const
{
    auto positive = [](double v, const char* field) {
        if (!(std::isfinite(v) && v > 0.0)) fail(ErrorCode::invalid_argument, std::string(field) + " must be finite and > 0");
    };
    positive(mass, "mass");
    positive(hbar, "hbar");
    positive(sigma0, "sigma0");
    positive(slit_offset, "slit_offset");
    positive(kx, "kx");
    positive(flight_length, "flight_length");
    if (!std::isfinite(ky)) fail(ErrorCode::invalid_argument, "ky must be finite");
    if (!(std::isfinite(half_separation) && half_separation >= 0.0))
        fail(ErrorCode::invalid_argument, "half_separation must be finite and >= 0");
}

namespace reduced {

Complex unit_phase_product(double a, double b)
{
    const double hi = a * b;
    const double lo = std::fma(a, b, -hi);
    return std::polar(1.0, hi) * std::polar(1.0, lo);
}

Complex x_factor(double x, double tau, const PhysicalParams& p)
{
    const double kxd = p.kx * p.sigma0;
    return unit_phase_product(p.kx, x) * unit_phase_product(-kxd * kxd, tau);
}

Complex y_factor(double u, double tau, const PhysicalParams& p)
{
    const double a = p.slit_offset / p.sigma0;
    const double kyd = p.ky * p.sigma0;
    const Complex width(1.0, tau);  // sigma_t / sigma0
    const double shifted = u - a - 2.0 * tau * kyd;
    const Complex envelope = std::exp(-shifted * shifted / (4.0 * width));
    const Complex prefactor = 1.0 / (std::pow(2.0 * std::numbers::pi, 0.25) * std::sqrt(p.sigma0) * std::sqrt(width));
    const Complex drift = std::polar(1.0, kyd * (u - a - tau * kyd));
    return prefactor * envelope * drift;
}

}  // namespace reduced

Complex sigma_t(double t, const PhysicalParams& p)
{
    require(t >= 0.0, "sigma_t: t must be >= 0");
    return p.sigma0 * Complex(1.0, t / p.time_scale());
}

Complex psi_slit(Slit slit, double x, double y, double t, const PhysicalParams& p)
{
    require(t >= 0.0, "psi_slit: t must be >= 0");
    const double tau = t / p.time_scale();
    switch (slit) {
    case Slit::B: y = -y; break;
    case Slit::A_prime: x = -x; break;
    case Slit::B_prime: x = -x; y = -y; break;
    case Slit::A: break;
    }
    return reduced::x_factor(x, tau, p) * reduced::y_factor(y / p.sigma0, tau, p);
}

double normalization_n2(Spin spin, const PhysicalParams& p)
{
    const double a = p.slit_offset / p.sigma0;
    return 0.5 / (1.0 + exchange_sign(spin) * std::exp(-a * a));
}

Complex psi_pair(Spin spin, const PairConfiguration& c, const PhysicalParams& p)
{
    require(c.t >= 0.0, "psi_pair: t must be >= 0");
    const double tau = c.t / p.time_scale();
    const double u1 = c.y1 / p.sigma0;
    const double u2 = c.y2 / p.sigma0;
    // psi_A(x, y) psi_B(x', y') separates into x and y parts, so the
    // exchange acts only on the y part and the (anti)symmetry is exact.
    const Complex direct = reduced::y_factor(u1, tau, p) * reduced::y_factor(-u2, tau, p);
    const Complex exchanged = reduced::y_factor(u2, tau, p) * reduced::y_factor(-u1, tau, p);
    const Complex x_part = reduced::x_factor(c.x1, tau, p) * reduced::x_factor(c.x2, tau, p);
    const double n = std::sqrt(normalization_n2(spin, p));
    return n * x_part * (spin == Spin::boson ? direct + exchanged : direct - exchanged);
}

double initial_density(double y1, double y2, Spin spin, const PhysicalParams& p)
{
    if (p.ky != 0.0) fail(ErrorCode::invalid_argument, "initial_density: closed form requires ky = 0");
    const double u1 = y1 / p.sigma0;
    const double u2 = y2 / p.sigma0;
    const double a = p.slit_offset / p.sigma0;
    // F = H e^b, G = H e^-b with b = a (u1 - u2), so F + G +- 2H =
    // H e^|b| (1 +- e^-|b|)^2, exact zero on the fermion node.
    const double b = std::abs(a * (u1 - u2));
    const double factor = spin == Spin::boson ? 1.0 + std::exp(-b) : -std::expm1(-b);
    return normalization_n2(spin, p) / (2.0 * std::numbers::pi * p.sigma0 * p.sigma0)
                         * std::exp(-(u1 * u1 + u2 * u2 + 2.0 * a * a) / 2.0 + b) * factor * factor;
}

double joint_density(const PairConfiguration& c, Spin spin, const PhysicalParams& p)
{
    return std::norm(psi_pair(spin, c, p));
}

double relative_density(const PairConfiguration& c, Spin spin, const PhysicalParams& p)
{
    const double tau = c.t / p.time_scale();
    const double width2 = p.sigma0 * p.sigma0 * (1.0 + tau * tau);
    return joint_density(c, spin, p) * 2.0 * std::numbers::pi * width2 / normalization_n2(spin, p);
}

}  // namespace bohm
