#include "dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <string>
#include <utility>

#include "error.hpp"
#include "phase_gradient.hpp"

namespace bohm {

namespace {

struct ReducedField {
    double beta = 0.0;  // a (u1 - u2) / (1 + tau^2) = 2 m sigma0^2 alpha
    Complex f;
    Complex g;
    double term1 = 0.0;  // interference part of du1/dtau; du2/dtau gets -term1
};

// cosh(beta) - cos(tau beta) relative to cosh(beta), written without
// cancellation for small beta.
double fermion_denominator_ratio(double beta, double tau)
{
    if (std::abs(beta) > 1.0) return 1.0;
    const double sh = std::sinh(0.5 * beta);
    const double sn = std::sin(0.5 * tau * beta);
    return 2.0 * (sh * sh + sn * sn) / std::cosh(beta);
}

// Interference part of the reduced velocity field, in units of sigma0 per
// 2 m sigma0^2 / hbar. Uses tanh(g) (bosons) or coth(g) (fermions) instead of
// the explicit sin/sinh over cos/cosh ratio, so |beta| of several hundred is fine.
ReducedField reduced_field(double tau, double u1, double u2, double a, Spin spin, double node_guard)
{
    ReducedField r;
    const double spread = 1.0 + tau * tau;
    const Complex conj_width(1.0, -tau);
    r.beta = a * (u1 - u2) / spread;
    r.f = conj_width * (u1 * u1 + u2 * u2) / (4.0 * spread);
    r.g = conj_width * (2.0 * a * (u2 - u1)) / (4.0 * spread);
    Complex ratio;
    if (spin == Spin::boson) {
        ratio = std::tanh(r.g);
    } else {
        if (fermion_denominator_ratio(r.beta, tau) <= node_guard)
            fail(ErrorCode::node_proximity, "fermion configuration on the node y1 = y2");
        ratio = 1.0 / std::tanh(r.g);
    }
    r.term1 = -a / spread * std::imag(conj_width * ratio);
    return r;
}

using State = std::array<double, 2>;

}  // namespace

VelocityFieldTerms velocity_terms(const PairConfiguration& c, Spin spin, const PhysicalParams& p, double node_guard)
{
    require(c.t >= 0.0, "velocity: t must be >= 0");
    if (p.ky != 0.0) fail(ErrorCode::invalid_argument, "closed-form velocities require ky = 0");
    const double tau = c.t / p.time_scale();
    const double u1 = c.y1 / p.sigma0;
    const double u2 = c.y2 / p.sigma0;
    const ReducedField r = reduced_field(tau, u1, u2, p.slit_offset / p.sigma0, spin, node_guard);
    const double v0 = p.velocity_scale();
    const double spread = 1.0 + tau * tau;

    VelocityFieldTerms out;
    out.alpha = r.beta / (2.0 * p.mass * p.sigma0 * p.sigma0);
    out.f = r.f;
    out.g = r.g;
    out.term1_y1 = v0 * r.term1;
    out.term1_y2 = -out.term1_y1;
    out.term2_y1 = v0 * tau * u1 / spread;
    out.term2_y2 = v0 * tau * u2 / spread;
    return out;
}

PairVelocity velocity_closed_form(const PairConfiguration& c, Spin spin, const PhysicalParams& p, double node_guard)
{
    const VelocityFieldTerms terms = velocity_terms(c, spin, p, node_guard);
    const double vx = p.x_speed();
    return {vx, terms.term1_y1 + terms.term2_y1, vx, terms.term1_y2 + terms.term2_y2};
}

PairVelocity velocity_oracle(const PairConfiguration& c, Spin spin, const PhysicalParams& p, double h, bool richardson,
                             double density_floor)
{
    require(h > 0.0, "velocity_oracle: step must be > 0");
    if (relative_density(c, spin, p) < density_floor)
        fail(ErrorCode::node_proximity, "velocity_oracle: |Psi|^2 below density floor");

    return phase_gradient([&](const PairConfiguration& q) { return psi_pair(spin, q, p); }, c, p, h, richardson);
}

double com_closed_form(double y0, double t, const PhysicalParams& p)
{
    require(t >= 0.0, "com_closed_form: t must be >= 0");
    const double tau = t / p.time_scale();
    return y0 * std::sqrt(1.0 + tau * tau);
}

void IntegratorConfig::validate() const
{
    auto positive = [](double v, const char* field) {
        if (!(std::isfinite(v) && v > 0.0)) fail(ErrorCode::invalid_argument, std::string(field) + " must be finite and > 0");
    };
    positive(rel_tol, "rel_tol");
    positive(abs_tol, "abs_tol");
    positive(h_init, "h_init");
    positive(h_min, "h_min");
    positive(h_max, "h_max");
    positive(density_floor, "density_floor");
    if (!(h_min <= h_init && h_init <= h_max)) fail(ErrorCode::invalid_argument, "step bounds must satisfy h_min <= h_init <= h_max");
    if (max_steps == 0) fail(ErrorCode::invalid_argument, "max_steps must be >= 1");
}

const char* to_string(TrajectoryStatus s)
{
    switch (s) {
    case TrajectoryStatus::completed: return "completed";
    case TrajectoryStatus::node_proximity_abort: return "node_proximity_abort";
    case TrajectoryStatus::step_underflow: return "step_underflow";
    }
    return "unknown";
}

std::vector<double> uniform_times(double t0, double t_end, std::size_t count)
{
    require(count >= 2, "uniform_times: need at least two samples");
    require(t_end > t0, "uniform_times: t_end must exceed t0");
    std::vector<double> times(count);
    for (std::size_t i = 0; i < count; ++i)
        times[i] = t0 + (t_end - t0) * static_cast<double>(i) / static_cast<double>(count - 1);
    times.back() = t_end;
    return times;
}

namespace {

// Dormand-Prince 5(4) tableau with Hairer's continuous extension.
namespace dp {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
}  // namespace dp

class PairFlow {
public:
    PairFlow(Spin spin, const PhysicalParams& p)
        : spin_(spin), a_(p.slit_offset / p.sigma0) {}

    State operator()(double tau, const State& u) const
    {
        const ReducedField r = reduced_field(tau, u[0], u[1], a_, spin_, default_node_guard);
        const double spread = 1.0 + tau * tau;
        return {r.term1 + tau * u[0] / spread, -r.term1 + tau * u[1] / spread};
    }

private:
    Spin spin_;
    double a_;
};

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms)
{
    State out = y;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double acc = 0.0;
        for (const auto& [coef, k] : terms) acc += coef * (*k)[i];
        out[i] += h * acc;
    }
    return out;
}

}  // namespace

Trajectory integrate_trajectory(const PairConfiguration& initial, double t_end, const IntegratorConfig& cfg, Spin spin,
                                const PhysicalParams& p, const std::vector<double>& sample_times)
{
    cfg.validate();
    p.validate();
    require(initial.t >= 0.0 && initial.t < t_end, "integrate_trajectory: need 0 <= t0 < t_end");
    if (p.ky != 0.0) fail(ErrorCode::invalid_argument, "integrate_trajectory: requires ky = 0");

    std::vector<double> times = sample_times.empty() ? std::vector<double>{initial.t, t_end} : sample_times;
    require(std::is_sorted(times.begin(), times.end()), "integrate_trajectory: sample times must be sorted");
    require(times.front() >= initial.t && times.back() <= t_end, "integrate_trajectory: sample times out of range");

    const double time_scale = p.time_scale();
    const double sigma0 = p.sigma0;
    const double vx = p.x_speed();
    const PairFlow flow(spin, p);

    Trajectory traj;
    traj.samples.reserve(times.size());

    auto node_contact = [&](double t, const State& u) {
        if (spin != Spin::fermion) return false;
        const PairConfiguration probe{0.0, u[0] * sigma0, 0.0, u[1] * sigma0, t};
        return relative_density(probe, spin, p) < cfg.density_floor;
    };
    // Returns false when the velocity cannot be evaluated (node contact).
    auto emit = [&](double t, const State& u) {
        const double dt = t - initial.t;
        TrajectorySample s;
        s.config = {initial.x1 + vx * dt, u[0] * sigma0, initial.x2 + vx * dt, u[1] * sigma0, t};
        try {
            s.velocity = velocity_closed_form(s.config, spin, p);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::node_proximity) throw;
            return false;
        }
        traj.samples.push_back(s);
        return true;
    };

    State u{initial.y1 / sigma0, initial.y2 / sigma0};
    double tau = initial.t / time_scale;
    const double tau_end = t_end / time_scale;
    const double h_min = cfg.h_min / time_scale;
    const double h_max = cfg.h_max / time_scale;
    double h = std::min(cfg.h_init / time_scale, h_max);

    std::size_t next = 0;
    if (node_contact(initial.t, u)) {
        traj.status = TrajectoryStatus::node_proximity_abort;
        return traj;
    }
    while (next < times.size() && times[next] <= initial.t) {
        if (!emit(times[next], u)) {
            traj.status = TrajectoryStatus::node_proximity_abort;
            return traj;
        }
        ++next;
    }

    // Error per unit step: each step's local error estimate is held to
    // tol * step / span, so the accumulated error over the whole interval
    // stays within tol. The scaled estimate is O(step^4), hence 1/4 below.
    const double span = tau_end - tau;
    constexpr double safety = 0.9;
    constexpr double beta = 0.04;
    constexpr double expo = 0.25 - 0.75 * beta;
    double err_old = 1e-4;
    bool last_rejected = false;

    try {
        State k1 = flow(tau, u);
        while (tau < tau_end) {
            if (traj.accepted_steps + traj.rejected_steps >= cfg.max_steps) {
                traj.status = TrajectoryStatus::step_underflow;
                return traj;
            }
            if (h < h_min) {
                traj.status = TrajectoryStatus::step_underflow;
                return traj;
            }
            const bool final_step = tau + h >= tau_end;
            const double step = final_step ? tau_end - tau : h;

            using namespace dp;
            const State k2 = flow(tau + c2 * step, axpy(u, step, {{a21, &k1}}));
            const State k3 = flow(tau + c3 * step, axpy(u, step, {{a31, &k1}, {a32, &k2}}));
            const State k4 = flow(tau + c4 * step, axpy(u, step, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
            const State k5 = flow(tau + c5 * step, axpy(u, step, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
            const State k6 = flow(tau + step, axpy(u, step, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
            const State u_new = axpy(u, step, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
            const State k7 = flow(tau + step, u_new);

            double err = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                const double e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(u[i]), std::abs(u_new[i]));
                err += (e / scale) * (e / scale);
            }
            err = std::sqrt(err / static_cast<double>(u.size())) * span / step;
            if (!std::isfinite(err)) err = 1e10;

            const double fac11 = std::pow(err, expo);
            if (err <= 1.0) {
                const double tau_new = final_step ? tau_end : tau + step;
                const double t_new = final_step ? t_end : tau_new * time_scale;
                // Dense output on [tau, tau_new].
                State ydiff, bspl, r4, r5;
                for (std::size_t i = 0; i < u.size(); ++i) {
                    ydiff[i] = u_new[i] - u[i];
                    bspl[i] = step * k1[i] - ydiff[i];
                    r4[i] = ydiff[i] - step * k7[i] - bspl[i];
                    r5[i] = step * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
                }
                while (next < times.size() && (times[next] <= t_new)) {
                    State us = u_new;
                    if (times[next] < t_new) {
                        const double theta = (times[next] / time_scale - tau) / step;
                        const double theta1 = 1.0 - theta;
                        for (std::size_t i = 0; i < u.size(); ++i)
                            us[i] = u[i] + theta * (ydiff[i] + theta1 * (bspl[i] + theta * (r4[i] + theta1 * r5[i])));
                    }
                    if (!emit(times[next], us)) {
                        traj.status = TrajectoryStatus::node_proximity_abort;
                        return traj;
                    }
                    ++next;
                }

                ++traj.accepted_steps;
                u = u_new;
                k1 = k7;
                tau = tau_new;
                if (node_contact(t_new, u)) {
                    traj.status = TrajectoryStatus::node_proximity_abort;
                    return traj;
                }

                double fac = fac11 / std::pow(err_old, beta);
                fac = std::clamp(fac / safety, 0.1, 5.0);
                double h_next = step / fac;
                if (last_rejected) h_next = std::min(h_next, step);
                h = std::min(h_next, h_max);
                err_old = std::max(err, 1e-4);
                last_rejected = false;
            } else {
                ++traj.rejected_steps;
                h = step / std::min(5.0, fac11 / safety);
                last_rejected = true;
            }
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::node_proximity) throw;
        traj.status = TrajectoryStatus::node_proximity_abort;
    }
    return traj;
}

}  // namespace bohm
