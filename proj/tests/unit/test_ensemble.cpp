#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "core/ensemble.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

using namespace bohm;

namespace {

std::vector<YPair> heights(const std::vector<PairConfiguration>& cs)
{
    std::vector<YPair> out;
    for (const auto& c : cs) out.push_back({c.y1, c.y2});
    return out;
}

double com(const YPair& q) { return 0.5 * (q.y1 + q.y2); }

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

// Same-side probability by composite Simpson on [0, L]^2, doubled.
double simpson_same_side(Spin spin, const PhysicalParams& p, double t)
{
    const int n = 1200;
    const double L = p.slit_offset + 15.0 * std::abs(sigma_t(t, p));
    const double h = L / n;
    auto w = [&](int k) { return (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0); };
    double sum = 0.0;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) sum += w(i) * w(j) * joint_density({0, i * h, 0, j * h, t}, spin, p);
    return 2.0 * sum * h * h / 9.0;
}

}  // namespace

TEST_CASE("rng is reproducible and versioned")
{
    CHECK(rng_algorithm_version == 1);
    Rng a(42, 3), b(42, 3), c(42, 4);
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
    CHECK(a.uniform() != c.uniform());
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFull);
}

TEST_CASE("sampler method names")
{
    for (auto m : {SamplerMethod::exact_rejection, SamplerMethod::independent_gaussian, SamplerMethod::symmetric_gaussian,
                   SamplerMethod::explicit_pairs})
        CHECK(sampler_method_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(sampler_method_from_string("uniform"), Error);
    SamplerConfig cfg;
    cfg.n_pairs = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("sample_initial is deterministic and starts at x = 0, t = 0")
{
    const auto p = PhysicalParams::baseline();
    for (auto method : {SamplerMethod::exact_rejection, SamplerMethod::independent_gaussian, SamplerMethod::symmetric_gaussian}) {
        SamplerConfig cfg{method, 500, 7, {}};
        const auto a = sample_initial(cfg, Spin::fermion, p);
        const auto b = sample_initial(cfg, Spin::fermion, p);
        cfg.seed = 8;
        const auto c = sample_initial(cfg, Spin::fermion, p);
        REQUIRE(a.size() == 500);
        CHECK(a == b);
        CHECK(a != c);
        for (const auto& q : a) {
            CHECK(q.x1 == 0.0);
            CHECK(q.x2 == 0.0);
            CHECK(q.t == 0.0);
            if (method == SamplerMethod::symmetric_gaussian) CHECK(q.y2 == -q.y1);
        }
    }
    SamplerConfig pairs{SamplerMethod::explicit_pairs, 2, 1, {{1e-6, -2e-6}, {3e-6, 4e-6}}};
    const auto e = sample_initial(pairs, Spin::boson, p);
    REQUIRE(e.size() == 2);
    CHECK(e[1].y1 == 3e-6);
    CHECK(e[1].y2 == 4e-6);
}

TEST_CASE("exact rejection: centre-of-mass moments")
{
    const auto p = PhysicalParams::baseline();
    for (Spin spin : {Spin::boson, Spin::fermion}) {
        const auto ys = heights(sample_initial({SamplerMethod::exact_rejection, 100000, 3, {}}, spin, p));
        double mean = 0.0;
        for (const auto& q : ys) mean += com(q);
        mean /= ys.size();
        double var = 0.0;
        for (const auto& q : ys) var += (com(q) - mean) * (com(q) - mean);
        const double sd = std::sqrt(var / (ys.size() - 1));
        const double target = p.sigma0 / std::sqrt(2.0);
        INFO(std::string(to_string(spin)));
        CHECK(std::abs(mean) < 3.0 * target / std::sqrt(static_cast<double>(ys.size())));
        CHECK(std::abs(sd / target - 1.0) < 0.01);
    }
}

TEST_CASE("exact rejection and independent Gaussians agree at Y = 5 sigma0")
{
    const auto p = PhysicalParams::baseline();
    const std::size_t n = 20000;
    const auto exact = heights(sample_initial({SamplerMethod::exact_rejection, n, 11, {}}, Spin::boson, p));
    const auto indep = heights(sample_initial({SamplerMethod::independent_gaussian, n, 12, {}}, Spin::boson, p));
    // exact_rejection does not fix which particle is on top; compare
    // label-symmetric statistics.
    auto upper = [](const std::vector<YPair>& v) {
        std::vector<double> out;
        for (const auto& q : v) out.push_back(std::max(q.y1, q.y2));
        return out;
    };
    auto centre = [](const std::vector<YPair>& v) {
        std::vector<double> out;
        for (const auto& q : v) out.push_back(com(q));
        return out;
    };
    const double critical = 1.358 * std::sqrt(2.0 / n);  // 5% level
    CHECK(ks_statistic(upper(exact), upper(indep)) < critical);
    CHECK(ks_statistic(centre(exact), centre(indep)) < critical);
}

TEST_CASE("fermion rejection stalls when the slits merge")
{
    auto p = PhysicalParams::baseline();
    p.slit_offset = 1e-3 * p.sigma0;
    try {
        sample_initial({SamplerMethod::exact_rejection, 100, 1, {}}, Spin::fermion, p);
        FAIL("expected rejection_stall");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::rejection_stall);
    }
    CHECK_NOTHROW(sample_initial({SamplerMethod::exact_rejection, 100, 1, {}}, Spin::boson, p));
}

TEST_CASE("selection by small centre of mass has erf weight")
{
    const auto p = PhysicalParams::baseline(2e6);
    const std::size_t n = 100000;
    const auto init = sample_initial({SamplerMethod::exact_rejection, n, 5, {}}, Spin::boson, p);
    std::vector<PairConfiguration> selected;
    for (const auto& c : init)
        if (std::abs(0.5 * (c.y1 + c.y2)) < 0.1 * p.sigma0) selected.push_back(c);
    const double fraction = static_cast<double>(selected.size()) / n;
    const double expected = std::erf(0.1);  // P(|N(0, sigma0/sqrt2)| < 0.1 sigma0)
    CHECK(std::abs(fraction - expected) < 3.0 * std::sqrt(expected * (1 - expected) / n));
    CHECK(fraction < 0.2);

    // Conditioning changes the endpoint centre-of-mass spread.
    const double t_end = p.flight_time();
    std::vector<PairConfiguration> whole(init.begin(), init.begin() + 500);
    selected.resize(500);
    auto mean_abs_com = [&](const std::vector<PairConfiguration>& cs) {
        const auto r = run_pairs(cs, {}, Spin::boson, p, t_end);
        double m = 0.0;
        for (const auto& e : r.endpoints) m += std::abs(com(e));
        return m / r.endpoints.size() / p.sigma0;
    };
    const double conditioned = mean_abs_com(selected);
    const double unconditioned = mean_abs_com(whole);
    CHECK(conditioned < 0.1 * std::abs(sigma_t(t_end, p)) / p.sigma0);
    CHECK(unconditioned > 5.0 * conditioned);
}

TEST_CASE("sqm same-side probability against Simpson")
{
    for (double speed : {2e6, 2e7}) {
        const auto p = PhysicalParams::baseline(speed);
        const double t = p.flight_time();
        for (Spin spin : {Spin::boson, Spin::fermion}) {
            const double q = sqm_same_side_probability(spin, p, t);
            const double ref = simpson_same_side(spin, p, t);
            INFO(std::string(to_string(spin)) << " " << speed);
            CHECK(q == doctest::Approx(ref).epsilon(1e-6).scale(1e-12));
        }
    }
    CHECK(sqm_same_side_probability(Spin::boson, PhysicalParams::baseline(2e7), 1e-8) < 1e-2);
}

TEST_CASE("joint sampler at t > 0 and the density distance")
{
    const auto p = PhysicalParams::baseline(2e6);
    const double t = 1e-7;
    const auto grid = DensityGrid::for_time(t, p);
    CHECK(grid.bins == 40);
    CHECK(grid.half_width == doctest::Approx(10.0 * std::abs(sigma_t(t, p))));
    for (Spin spin : {Spin::boson, Spin::fermion}) {
        const auto exact = binned_density(grid, spin, p, t);
        REQUIRE(exact.size() == grid.cells() + 1);
        CHECK(std::accumulate(exact.begin(), exact.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));

        const std::size_t n = 10000;
        const auto a = sample_joint_density(t, n, 21, 0, spin, p);
        const auto b = sample_joint_density(t, n, 22, 0, spin, p);
        const double tv_a = tv_distance(a, grid, exact);
        const double tv_b = tv_distance(b, grid, exact);
        // Multinomial noise: E[TV] is about sum sqrt(p_i / (2 pi n)).
        double noise = 0.0;
        for (double q : exact) noise += std::sqrt(q / (2.0 * 3.141592653589793 * n));
        INFO(std::string(to_string(spin)) << " tv " << tv_a << " " << tv_b << " noise " << noise);
        CHECK(tv_a < 1.3 * noise);
        CHECK(tv_b < 1.3 * noise);
        CHECK(tv_a > 0.7 * noise);

        // Negative control: t = 0 positions each scaled by |sigma_t| / sigma0.
        const double stretch = std::abs(sigma_t(t, p)) / p.sigma0;
        std::vector<YPair> frozen;
        for (const auto& c : sample_initial({SamplerMethod::exact_rejection, n, 23, {}}, spin, p))
            frozen.push_back({c.y1 * stretch, c.y2 * stretch});
        const auto dd = density_distance(frozen, spin, p, t, 23);
        CHECK(dd.bohmian > 3.0 * dd.baseline);
    }
    CHECK_THROWS_AS(density_distance(std::vector<YPair>(50), Spin::boson, p, t, 1), Error);
}

TEST_CASE("symmetric sampler gives no same-side pairs")
{
    const auto p = PhysicalParams::baseline(2e6);
    const auto r = run_ensemble({SamplerMethod::symmetric_gaussian, 200, 4, {}}, {}, Spin::boson, p, p.flight_time());
    CHECK(r.aborted_count == 0);
    CHECK(r.same_side_fraction == 0.0);
    for (const auto& e : r.endpoints) CHECK(std::abs(e.y1 + e.y2) <= 1e-6 * p.sigma0);
    const auto small = run_ensemble({SamplerMethod::symmetric_gaussian, 50, 4, {}}, {}, Spin::boson, p, p.flight_time());
    CHECK(std::isnan(small.density_distance));
    CHECK(std::isnan(small.density_distance_baseline));
}

TEST_CASE("ensemble runs are deterministic and mirror exactly")
{
    const auto p = PhysicalParams::baseline(2e6);
    const double t_end = p.flight_time();
    const SamplerConfig sampler{SamplerMethod::exact_rejection, 300, 9, {}};
    for (Spin spin : {Spin::boson, Spin::fermion}) {
        RunOptions two_threads;
        two_threads.threads = 2;
        const auto a = run_ensemble(sampler, {}, spin, p, t_end);
        const auto b = run_ensemble(sampler, {}, spin, p, t_end, two_threads);
        CHECK(a.endpoints == b.endpoints);
        CHECK(a.initial == b.initial);
        CHECK(a.same_side_fraction == b.same_side_fraction);
        CHECK(a.delta_y0_estimate == b.delta_y0_estimate);
        CHECK(a.density_distance == b.density_distance);
        CHECK(a.aborted_count == b.aborted_count);

        auto mirrored = sample_initial(sampler, spin, p);
        for (auto& c : mirrored) {
            c.y1 = -c.y1;
            c.y2 = -c.y2;
        }
        const auto m = run_pairs(mirrored, {}, spin, p, t_end);
        REQUIRE(m.endpoints.size() == a.endpoints.size());
        for (std::size_t i = 0; i < m.endpoints.size(); ++i) {
            CHECK(m.endpoints[i].y1 == -a.endpoints[i].y1);
            CHECK(m.endpoints[i].y2 == -a.endpoints[i].y2);
        }
        CHECK(a.n_pairs == 300);
        CHECK(a.same_side_fraction >= 0.0);
        CHECK(a.same_side_fraction <= 1.0);
        CHECK(a.aborted_count <= a.n_pairs);
    }
}

TEST_CASE("aborted pairs are counted, not thrown")
{
    const auto p = PhysicalParams::baseline();
    const std::vector<PairConfiguration> starts{{0, 1e-6, 0, 1e-6, 0}, {0, 5e-6, 0, -5e-6, 0}};
    const auto r = run_pairs(starts, {}, Spin::fermion, p, p.flight_time());
    CHECK(r.aborted_count == 1);
    CHECK(r.endpoints.size() == 1);
    CHECK(r.status[0] == TrajectoryStatus::node_proximity_abort);
    CHECK(r.status[1] == TrajectoryStatus::completed);
}
