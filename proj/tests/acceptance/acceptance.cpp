// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "core/dynamics.hpp"
#include "core/ensemble.hpp"
#include "core/error.hpp"
#include "core/four_slit.hpp"
#include "core/physics.hpp"
#include "core/scenario.hpp"

using namespace bohm;

namespace {

constexpr double slow = 2e6;  // hbar kx / m, |sigma_t| = 5.88 sigma0 at the screen
constexpr double fast = 2e7;  // |sigma_t| = 1.16 sigma0

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail, double seconds)
{
    std::printf("criterion %d %s: %s | %s | %.1f s\n", id, title, pass ? "PASS" : "FAIL", detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

template <class F>
void criterion(int id, const char* title, F&& body)
{
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(id, title, pass, detail, s);
}

bool spreading(std::string& detail)
{
    const auto p = PhysicalParams::baseline();
    const double a = std::abs(sigma_t(1e-8, p)) / p.sigma0;
    const double b = std::abs(sigma_t(1e-7, p)) / p.sigma0;
    detail = fmt("|sigma_t|/sigma0 = %.5f at 1e-8 s (1.16 +- 0.01), %.5f at 1e-7 s (5.88 +- 0.01)", a, b);
    return std::abs(a - 1.16) <= 0.01 && std::abs(b - 5.88) <= 0.01;
}

bool initial_spread(std::string& detail)
{
    const auto p = PhysicalParams::baseline();
    const double target = p.sigma0 / std::sqrt(2.0);
    bool pass = true;
    for (Spin spin : {Spin::boson, Spin::fermion}) {
        const auto init = sample_initial({SamplerMethod::exact_rejection, 100000, 1, {}}, spin, p);
        double mean = 0.0, sq = 0.0;
        for (const auto& c : init) mean += 0.5 * (c.y1 + c.y2);
        mean /= init.size();
        for (const auto& c : init) sq += std::pow(0.5 * (c.y1 + c.y2) - mean, 2);
        const double dy = std::sqrt(sq / (init.size() - 1));
        const double rel = dy / target - 1.0;
        detail += fmt("%s dy(0) = %.5f sigma0 (rel %+.2e)  ", to_string(spin), dy / p.sigma0, rel);
        pass = pass && std::abs(rel) < 0.01;
    }
    detail += "target 0.70711 sigma0 within 1%";
    return pass;
}

bool oracle_equivalence(std::string& detail)
{
    // 10 x 10 y grid x 5 times per regime; fermion points within 0.05 sigma0
    // of the node y1 = y2 are skipped. The oracle's density floor is off so
    // the far tails of the grid are compared too.
    bool pass = true;
    std::size_t points = 0;
    double worst = 0.0;
    for (Spin spin : {Spin::boson, Spin::fermion}) {
        for (double speed : {fast, slow}) {
            const auto p = PhysicalParams::baseline(speed);
            const double s = p.sigma0;
            for (int i = 0; i < 10; ++i)
                for (int j = 0; j < 10; ++j)
                    for (int k = 1; k <= 5; ++k) {
                        const double y1 = (-8.7 + 1.9 * i) * s;
                        const double y2 = (-8.3 + 1.9 * j + 0.37) * s;
                        if (spin == Spin::fermion && std::abs(y1 - y2) < 0.05 * s) continue;
                        const PairConfiguration c{0.0, y1, 0.0, y2, 0.2 * k * p.flight_time()};
                        const auto a = velocity_closed_form(c, spin, p);
                        const auto b = velocity_oracle(c, spin, p, 1e-4 * s, false, 0.0);
                        const double floor = p.velocity_scale();
                        worst = std::max({worst, velocity_mismatch(a.vy1, b.vy1, floor), velocity_mismatch(a.vy2, b.vy2, floor),
                                          velocity_mismatch(a.vx1, b.vx1, floor), velocity_mismatch(a.vx2, b.vx2, floor)});
                        ++points;
                    }
        }
    }
    pass = worst < 1e-6;
    detail = fmt("%zu points (both statistics, both kx), max relative mismatch %.2e (< 1e-6)", points, worst);
    return pass;
}

bool centre_of_mass(std::string& detail)
{
    double worst = 0.0;
    std::size_t runs = 0;
    bool completed = true;
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> jitter(-1.5, 1.5);
    for (double speed : {fast, slow}) {
        const auto p = PhysicalParams::baseline(speed);
        const double s = p.sigma0, Y = p.slit_offset;
        const double t_end = p.flight_time();
        const auto times = uniform_times(0.0, t_end, 101);
        for (int k = 0; k < 10; ++k) {
            const PairConfiguration start{0, Y + jitter(gen) * s, 0, -Y + jitter(gen) * s, 0};
            const double y0 = 0.5 * (start.y1 + start.y2);
            for (Spin spin : {Spin::boson, Spin::fermion}) {
                const auto traj = integrate_trajectory(start, t_end, {}, spin, p, times);
                completed = completed && traj.completed();
                for (const auto& smp : traj.samples) {
                    const double com = 0.5 * (smp.config.y1 + smp.config.y2);
                    worst = std::max(worst, std::abs(com - com_closed_form(y0, smp.config.t, p)) / s);
                }
                ++runs;
            }
        }
    }
    detail = fmt("%zu trajectories, 101 samples each, max |y_com - y0 |sigma_t|/sigma0| = %.2e sigma0 (< 1e-6)", runs, worst);
    return completed && worst < 1e-6;
}

bool symmetry(std::string& detail)
{
    const auto p = PhysicalParams::baseline(slow);
    const double vs = p.velocity_scale();
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> y(-10 * p.sigma0, 10 * p.sigma0);
    std::uniform_real_distribution<double> t(0.0, 2e-7);
    double worst = 0.0;  // in units of the local velocity magnitude
    int points = 0;
    while (points < 1000) {
        const PairConfiguration c{0, y(gen), 0, y(gen), t(gen)};
        if (std::abs(c.y1 - c.y2) < 1e-3 * p.sigma0) continue;
        for (Spin spin : {Spin::boson, Spin::fermion}) {
            const auto v = velocity_closed_form(c, spin, p);
            const auto par = velocity_closed_form({0, -c.y1, 0, -c.y2, c.t}, spin, p);
            const auto ex = velocity_closed_form({0, -c.y2, 0, -c.y1, c.t}, spin, p);
            const double scale = std::abs(v.vy1) + std::abs(v.vy2) + 1e-3 * vs;
            worst = std::max({worst, std::abs(v.vy1 + par.vy1) / scale, std::abs(v.vy2 + par.vy2) / scale,
                              std::abs(v.vy1 + ex.vy2) / scale});
        }
        ++points;
    }
    const auto fig4a = scenario_defaults(ScenarioKind::fig4a);
    double asym = 0.0;
    bool completed = true;
    for (const auto& q : fig4a.sampler.pairs) {
        const auto traj = integrate_trajectory({0, q.y1, 0, q.y2, 0}, fig4a.params.flight_time(), {}, fig4a.spin, fig4a.params,
                                               uniform_times(0.0, fig4a.params.flight_time(), 201));
        completed = completed && traj.completed();
        for (const auto& s : traj.samples) asym = std::max(asym, std::abs(s.config.y1 + s.config.y2) / p.sigma0);
    }
    detail = fmt("%d random points, max relative violation %.2e (< 1e-12); symmetric pairs max |y1 + y2| = %.2e sigma0 (<= 1e-6)",
                 points, worst, asym);
    return worst < 1e-12 && completed && asym <= 1e-6;
}

bool same_side(std::string& detail)
{
    auto fig4b = scenario_defaults(ScenarioKind::fig4b);
    const auto& q = fig4b.sampler.pairs.front();
    const auto traj = integrate_trajectory({0, q.y1, 0, q.y2, 0}, fig4b.params.flight_time(), {}, Spin::boson, fig4b.params);
    const double y2_end = traj.samples.back().config.y2 / fig4b.params.sigma0;
    bool pass = traj.completed() && y2_end > 0.0;
    detail = fmt("fig4b lower particle ends at %+.3f sigma0; ", y2_end);

    for (double speed : {slow, fast}) {
        const auto p = PhysicalParams::baseline(speed);
        const double t_end = p.flight_time();
        for (Spin spin : {Spin::boson, Spin::fermion}) {
            const auto r = run_ensemble({SamplerMethod::exact_rejection, 1000, 1, {}}, {}, spin, p, t_end);
            const double expected = sqm_same_side_probability(spin, p, t_end);
            const double n = static_cast<double>(r.endpoints.size());
            const double sigma = std::sqrt(expected * (1 - expected) / n);
            const bool ok = std::abs(r.same_side_fraction - expected) <= 3 * sigma;
            detail += fmt("%s %.0e m/s: %.4f vs SQM %.4f (3 sigma %.4f)%s; ", to_string(spin), speed, r.same_side_fraction,
                          expected, 3 * sigma, ok ? "" : " OUT");
            pass = pass && ok && r.aborted_count == 0;
        }
    }
    return pass;
}

bool equivariance(std::string& detail)
{
    bool pass = true;
    for (double speed : {slow, fast}) {
        const auto p = PhysicalParams::baseline(speed);
        const double t_end = p.flight_time();
        const double stretch = std::abs(sigma_t(t_end, p)) / p.sigma0;
        for (Spin spin : {Spin::boson, Spin::fermion}) {
            const SamplerConfig sampler{SamplerMethod::exact_rejection, 10000, 1, {}};
            const auto r = run_ensemble(sampler, {}, spin, p, t_end);
            std::vector<YPair> frozen;
            for (const auto& c : r.initial) frozen.push_back({c.y1 * stretch, c.y2 * stretch});
            const auto control = density_distance(frozen, spin, p, t_end, sampler.seed);
            const bool ok = r.density_distance <= 1.5 * r.density_distance_baseline && control.bohmian > control.baseline;
            detail += fmt("%s %.0e m/s: TV %.4f vs baseline %.4f, control %.4f; ", to_string(spin), speed, r.density_distance,
                          r.density_distance_baseline, control.bohmian);
            pass = pass && ok;
        }
    }
    return pass;
}

bool four_slit(std::string& detail)
{
    const auto c = scenario_defaults(ScenarioKind::four_slit_check);
    const auto init = sample_initial(c.sampler, c.spin, c.params);
    const auto report = four_slit_check(c.params, c.integrator, init, c.output.samples);
    for (const auto& pc : report.checks) {
        detail += fmt("%s %.1e/%.0e%s; ", pc.name.c_str(), pc.max_error, pc.tolerance, pc.pass ? "" : " FAIL");
    }
    return report.all_pass();
}

bool robustness(std::string& detail)
{
    bool pass = true;
    for (double speed : {slow, fast}) {
        const auto p = PhysicalParams::baseline(speed);
        const auto r = run_ensemble({SamplerMethod::exact_rejection, 10000, 2, {}}, {}, Spin::fermion, p, p.flight_time());
        const double fraction = static_cast<double>(r.aborted_count) / r.n_pairs;
        detail += fmt("fermion %.0e m/s aborts %zu/%zu; ", speed, r.aborted_count, r.n_pairs);
        pass = pass && fraction < 1e-3;
    }

    IntegratorConfig coarse;
    IntegratorConfig fine;
    fine.rel_tol = coarse.rel_tol / 2;
    fine.abs_tol = coarse.abs_tol / 2;
    double worst = 0.0;  // endpoint shift over the coarse tolerance bound
    for (double speed : {slow, fast}) {
        const auto p = PhysicalParams::baseline(speed);
        for (Spin spin : {Spin::boson, Spin::fermion}) {
            const auto init = sample_initial({SamplerMethod::exact_rejection, 50, 3, {}}, spin, p);
            for (const auto& c : init) {
                const auto a = integrate_trajectory(c, p.flight_time(), coarse, spin, p);
                const auto b = integrate_trajectory(c, p.flight_time(), fine, spin, p);
                if (!a.completed() || !b.completed()) {
                    pass = false;
                    continue;
                }
                const auto& ea = a.samples.back().config;
                const auto& eb = b.samples.back().config;
                for (auto [ya, yb] : {std::pair{ea.y1, eb.y1}, std::pair{ea.y2, eb.y2}}) {
                    const double bound = coarse.rel_tol * std::abs(ya) + coarse.abs_tol * p.sigma0;
                    worst = std::max(worst, std::abs(ya - yb) / bound);
                }
            }
        }
    }
    detail += fmt("halving tolerances: max endpoint shift %.3f x coarse tolerance (< 1)", worst);
    return pass && worst < 1.0;
}

}  // namespace

int main()
{
    criterion(1, "packet spreading", spreading);
    criterion(2, "initial spread", initial_spread);
    criterion(3, "oracle equivalence", oracle_equivalence);
    criterion(4, "centre-of-mass law", centre_of_mass);
    criterion(5, "symmetry suite", symmetry);
    criterion(6, "same-side detection", same_side);
    criterion(7, "equivariance", equivariance);
    criterion(8, "four-slit reductions", four_slit);
    criterion(9, "robustness", robustness);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures;
}
