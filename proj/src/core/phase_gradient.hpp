#pragma once

#include <algorithm>
#include <complex>

#include "dynamics.hpp"
#include "physics.hpp"

namespace bohm {

/// Guidance velocities (hbar/m) grad(arg Psi) of an arbitrary pair
/// wavefunction by central differences of its phase. Transverse step h,
/// longitudinal step min(h, x_phase_step / kx). Richardson combines h and h/2.
template <class Wavefunction>
PairVelocity phase_gradient(const Wavefunction& psi, const PairConfiguration& c, const PhysicalParams& p, double h,
                            bool richardson, double x_phase_step = 0.25)
{
    auto slope = [&](double PairConfiguration::*coord, double step) {
        PairConfiguration plus = c;
        PairConfiguration minus = c;
        plus.*coord = c.*coord + step;
        minus.*coord = c.*coord - step;
        // Actual (representable) width, not 2 * step.
        const double width = plus.*coord - minus.*coord;
        return std::arg(psi(plus) / psi(minus)) / width;
    };
    auto derivative = [&](double PairConfiguration::*coord, double step) {
        const double coarse = slope(coord, step);
        if (!richardson) return coarse;
        return (4.0 * slope(coord, 0.5 * step) - coarse) / 3.0;
    };
    const double hx = std::min(h, x_phase_step / p.kx);
    const double scale = p.hbar / p.mass;
    return {scale * derivative(&PairConfiguration::x1, hx), scale * derivative(&PairConfiguration::y1, h),
            scale * derivative(&PairConfiguration::x2, hx), scale * derivative(&PairConfiguration::y2, h)};
}

}  // namespace bohm
