#include "four_slit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"
#include "phase_gradient.hpp"

namespace bohm {

const char* to_string(SlitRegion r) { return r == SlitRegion::right_left ? "right_left" : "left_right"; }

bool in_region(SlitRegion region, const PairConfiguration& c, const PhysicalParams& p)
{
    const double d = p.half_separation;
    if (region == SlitRegion::right_left) return c.x1 > d && c.x2 < -d;
    return c.x1 < -d && c.x2 > d;
}

namespace {

Complex psi(Slit s, double x, double y, double t, const PhysicalParams& p) { return psi_slit(s, x, y, t, p); }

struct NaiveTerms {
    Complex sum;
    double magnitude = 0.0;  // sum of |term|
};

NaiveTerms naive_terms(Spin spin, const PairConfiguration& c, const PhysicalParams& p)
{
    const double sign = exchange_sign(spin);
    const double t = c.t;
    const Complex t1 = psi(Slit::A, c.x1, c.y1, t, p) * psi(Slit::B_prime, c.x2, c.y2, t, p);
    const Complex t2 = sign * psi(Slit::A, c.x2, c.y2, t, p) * psi(Slit::B_prime, c.x1, c.y1, t, p);
    const Complex t3 = psi(Slit::A_prime, c.x2, c.y2, t, p) * psi(Slit::B, c.x1, c.y1, t, p);
    const Complex t4 = sign * psi(Slit::A_prime, c.x1, c.y1, t, p) * psi(Slit::B, c.x2, c.y2, t, p);
    return {t1 + t2 + t3 + t4, std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4)};
}

void require_off_node(Spin spin, const PairConfiguration& c, const PhysicalParams& p)
{
    const NaiveTerms n = naive_terms(spin, c, p);
    // The real cos/sin factor changes sign across a node plane; keep the
    // stencil (kx h = 1e-3) well clear of it.
    if (!(std::abs(n.sum) > 1e-2 * n.magnitude))
        fail(ErrorCode::node_proximity, "naive four-slit wavefunction vanishes at this configuration");
}

}  // namespace

Complex naive_four_slit_psi(Spin spin, const PairConfiguration& c, const PhysicalParams& p)
{
    require(c.t >= 0.0, "naive_four_slit_psi: t must be >= 0");
    return naive_terms(spin, c, p).sum;
}

PairVelocity naive_velocity(const PairConfiguration& c, Spin spin, const PhysicalParams& p, double h)
{
    require(h > 0.0, "naive_velocity: step must be > 0");
    require_off_node(spin, c, p);
    return phase_gradient([&](const PairConfiguration& q) { return naive_four_slit_psi(spin, q, p); }, c, p, h, false,
                          1e-3);
}

XVelocity naive_x_velocity(const PairConfiguration& c, Spin spin, const PhysicalParams& p, double h)
{
    const PairVelocity v = naive_velocity(c, spin, p, h);
    return {v.vx1, v.vx2};
}

Complex corrected_four_slit_psi(SlitRegion region, Spin spin, const PairConfiguration& c, const PhysicalParams& p)
{
    require(c.t >= 0.0, "corrected_four_slit_psi: t must be >= 0");
    if (!in_region(region, c, p))
        fail(ErrorCode::region_violation, std::string("configuration outside region ") + to_string(region));
    const double t = c.t;
    if (region == SlitRegion::right_left)
        return psi(Slit::A, c.x1, c.y1, t, p) * psi(Slit::B_prime, c.x2, c.y2, t, p)
               + psi(Slit::A_prime, c.x2, c.y2, t, p) * psi(Slit::B, c.x1, c.y1, t, p);
    return exchange_sign(spin)
           * (psi(Slit::A, c.x2, c.y2, t, p) * psi(Slit::B_prime, c.x1, c.y1, t, p)
              + psi(Slit::A_prime, c.x1, c.y1, t, p) * psi(Slit::B, c.x2, c.y2, t, p));
}

PairVelocity corrected_four_slit_velocity(SlitRegion region, Spin spin, const PairConfiguration& c,
                                          const PhysicalParams& p, double h, bool richardson)
{
    require(h > 0.0, "corrected_four_slit_velocity: step must be > 0");
    if (!in_region(region, c, p))
        fail(ErrorCode::region_violation, std::string("configuration outside region ") + to_string(region));
    return phase_gradient([&](const PairConfiguration& q) { return corrected_four_slit_psi(region, spin, q, p); }, c, p,
                          h, richardson);
}

Trajectory map_trajectory_to_double_slit(const Trajectory& traj, SlitRegion region)
{
    Trajectory out = traj;
    for (TrajectorySample& s : out.samples) {
        if (region == SlitRegion::right_left) {
            s.config.x2 = -s.config.x2;
            s.velocity.vx2 = -s.velocity.vx2;
        } else {
            s.config.x1 = -s.config.x1;
            s.velocity.vx1 = -s.velocity.vx1;
        }
    }
    return out;
}

}  // namespace bohm

namespace bohm {

bool FourSlitReport::all_pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.pass; });
}

double velocity_mismatch(double a, double b, double floor) { return std::abs(a - b) / std::max(std::abs(b), floor); }

FourSlitReport four_slit_check(const PhysicalParams& p, const IntegratorConfig& integrator,
                               std::span<const PairConfiguration> initial, std::size_t samples_per_trajectory)
{
    p.validate();
    const double s0 = p.sigma0;
    const double y_off = p.slit_offset;
    const double t_end = p.flight_time();
    const double vx = p.x_speed();
    const double d = p.half_separation;
    const double h = 1e-4 * s0;
    FourSlitReport report;
    auto add = [&](std::string name, double err, double tol) {
        report.checks.push_back({std::move(name), err, tol, err <= tol});
    };

    const std::vector<double> xs{-3e-7, -1e-7, 0.0, 4e-8, 2.5e-7};
    const std::vector<YPair> ys{{y_off, -y_off}, {y_off + 0.4 * s0, -y_off + 1.1 * s0}, {-y_off, y_off - 0.7 * s0}};
    const std::vector<double> ts{0.0, 0.3 * t_end, t_end};

    // Factorization: Psi(x1, x2) cos[kx(x1' - x2')] = Psi(x1', x2') cos[kx(x1 - x2)]
    // (sin for the minus sign), against a reference x pair.
    for (Spin spin : {Spin::boson, Spin::fermion}) {
        double err = 0.0;
        auto factor = [&](double x1, double x2) {
            const double arg = p.kx * (x1 - x2);
            return spin == Spin::boson ? std::cos(arg) : std::sin(arg);
        };
        for (const YPair& y : ys)
            for (double t : ts) {
                const double rx1 = 1.3e-7, rx2 = -0.2e-7;
                const Complex ref = naive_four_slit_psi(spin, {rx1, y.y1, rx2, y.y2, t}, p);
                for (double x1 : xs)
                    for (double x2 : xs) {
                        const Complex lhs = naive_four_slit_psi(spin, {x1, y.y1, x2, y.y2, t}, p) * factor(rx1, rx2);
                        const Complex rhs = ref * factor(x1, x2);
                        err = std::max(err, std::abs(lhs - rhs) / std::abs(ref));
                    }
            }
        add(std::string("naive_factorization_") + to_string(spin), err, 1e-9);
    }

    // Naive x velocities vanish.
    for (Spin spin : {Spin::boson, Spin::fermion}) {
        double err = 0.0;
        for (const YPair& y : ys)
            for (double t : ts)
                for (double x1 : {1.1e-7, -0.7e-7})
                    for (double x2 : {0.35e-7, -2.2e-7}) {
                        const XVelocity v = naive_x_velocity({x1, y.y1, x2, y.y2, t}, spin, p, h);
                        err = std::max({err, std::abs(v.vx1) / vx, std::abs(v.vx2) / vx});
                    }
        add(std::string("naive_x_velocity_zero_") + to_string(spin), err, 1e-6);
    }

    // Substituting x2 -> -x2 in the right_left branch gives the double-slit
    // boson state up to a constant factor.
    {
        double err = 0.0;
        const PairConfiguration ref_c{2 * d, y_off, -2 * d, -y_off, 0.5 * t_end};
        const Complex ratio_ref = corrected_four_slit_psi(SlitRegion::right_left, Spin::boson, ref_c, p)
                                  / psi_pair(Spin::boson, {ref_c.x1, ref_c.y1, -ref_c.x2, ref_c.y2, ref_c.t}, p);
        for (const YPair& y : ys)
            for (double t : ts)
                for (double x1 : {1.5 * d, 3.0 * d})
                    for (double x2 : {-1.2 * d, -4.0 * d}) {
                        const PairConfiguration c{x1, y.y1, x2, y.y2, t};
                        const Complex ratio = corrected_four_slit_psi(SlitRegion::right_left, Spin::boson, c, p)
                                              / psi_pair(Spin::boson, {x1, y.y1, -x2, y.y2, t}, p);
                        err = std::max(err, std::abs(ratio - ratio_ref) / std::abs(ratio_ref));
                    }
        add("reflection_correspondence", err, 1e-9);
    }

    // Particle permutation maps one branch onto the other with the exchange sign.
    for (Spin spin : {Spin::boson, Spin::fermion}) {
        double err = 0.0;
        for (const YPair& y : ys)
            for (double t : ts) {
                const PairConfiguration c{2.0 * d, y.y1, -3.0 * d, y.y2, t};
                const PairConfiguration swapped{c.x2, c.y2, c.x1, c.y1, t};
                const Complex a = corrected_four_slit_psi(SlitRegion::right_left, spin, c, p);
                const Complex b = corrected_four_slit_psi(SlitRegion::left_right, spin, swapped, p);
                err = std::max(err, std::abs(b - exchange_sign(spin) * a) / std::abs(a));
            }
        add(std::string("permutation_") + to_string(spin), err, 1e-12);
    }

    // Reflected double-slit trajectories follow the corrected velocity field.
    {
        double err = 0.0;
        const std::vector<double> times = uniform_times(0.0, t_end, std::max<std::size_t>(samples_per_trajectory, 2));
        for (const PairConfiguration& c0 : initial) {
            const PairConfiguration start{2.0 * d, c0.y1, 2.0 * d, c0.y2, 0.0};
            const Trajectory traj = integrate_trajectory(start, t_end, integrator, Spin::boson, p, times);
            if (!traj.completed()) {
                err = std::numeric_limits<double>::infinity();
                continue;
            }
            const Trajectory mapped = map_trajectory_to_double_slit(traj, SlitRegion::right_left);
            for (const TrajectorySample& s : mapped.samples) {
                const PairVelocity v = corrected_four_slit_velocity(SlitRegion::right_left, Spin::boson, s.config, p, h);
                const double floor = p.velocity_scale();
                err = std::max({err, velocity_mismatch(v.vx1, s.velocity.vx1, floor),
                                velocity_mismatch(v.vx2, s.velocity.vx2, floor),
                                velocity_mismatch(v.vy1, s.velocity.vy1, floor),
                                velocity_mismatch(v.vy2, s.velocity.vy2, floor)});
            }
        }
        add("mapped_trajectory_velocities", err, 1e-6);
    }
    return report;
}

}  // namespace bohm
