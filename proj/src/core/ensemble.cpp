#include "ensemble.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "error.hpp"
#include "reduced.hpp"
#include "rng.hpp"

namespace bohm {

const char* to_string(SamplerMethod m)
{
    switch (m) {
    case SamplerMethod::exact_rejection: return "exact_rejection";
    case SamplerMethod::independent_gaussian: return "independent_gaussian";
    case SamplerMethod::symmetric_gaussian: return "symmetric_gaussian";
    case SamplerMethod::explicit_pairs: return "explicit_pairs";
    }
    return "unknown";
}

SamplerMethod sampler_method_from_string(const char* name)
{
    for (SamplerMethod m : {SamplerMethod::exact_rejection, SamplerMethod::independent_gaussian,
                            SamplerMethod::symmetric_gaussian, SamplerMethod::explicit_pairs})
        if (std::strcmp(name, to_string(m)) == 0) return m;
    fail(ErrorCode::invalid_argument, std::string("unknown sampler method '") + name + "'");
}

void SamplerConfig::validate() const
{
    if (method == SamplerMethod::explicit_pairs) {
        if (pairs.empty()) fail(ErrorCode::invalid_argument, "explicit_pairs sampler needs at least one pair");
        if (n_pairs != pairs.size()) fail(ErrorCode::invalid_argument, "n_pairs must equal the number of explicit pairs");
        for (const YPair& q : pairs)
            if (!std::isfinite(q.y1) || !std::isfinite(q.y2)) fail(ErrorCode::invalid_argument, "explicit pairs must be finite");
    } else if (n_pairs < 1) {
        fail(ErrorCode::invalid_argument, "n_pairs must be >= 1");
    }
}

std::vector<YPair> sample_joint_density(double t, std::size_t n, std::uint64_t seed, std::uint64_t stream, Spin spin,
                                        const PhysicalParams& p)
{
    require(t >= 0.0, "sample_joint_density: t must be >= 0");
    if (p.ky != 0.0) fail(ErrorCode::invalid_argument, "exact sampling requires ky = 0");
    const double tau = t / p.time_scale();
    const double width = std::sqrt(1.0 + tau * tau);  // |sigma_t| / sigma0
    const double a = p.slit_offset / p.sigma0;
    const double sign = exchange_sign(spin);

    Rng rng(seed, stream);
    std::vector<YPair> out;
    out.reserve(n);
    std::size_t attempts = 0;
    while (out.size() < n) {
        ++attempts;
        const bool swapped = rng.uniform() < 0.5;
        double u1 = rng.normal(a, width);
        double u2 = rng.normal(-a, width);
        if (swapped) std::swap(u1, u2);
        const double accept_draw = rng.uniform();

        const Complex direct = reduced::y_factor(u1, tau, p) * reduced::y_factor(-u2, tau, p);
        const Complex exchanged = reduced::y_factor(u2, tau, p) * reduced::y_factor(-u1, tau, p);
        const double envelope = 2.0 * (std::norm(direct) + std::norm(exchanged));
        const double target = std::norm(direct + sign * exchanged);
        if (envelope > 0.0 && accept_draw * envelope < target) out.push_back({u1 * p.sigma0, u2 * p.sigma0});

        if (attempts >= 10000 && static_cast<double>(out.size()) < 1e-3 * static_cast<double>(attempts))
            fail(ErrorCode::rejection_stall, "rejection sampler acceptance below 1e-3");
    }
    return out;
}

std::vector<PairConfiguration> sample_initial(const SamplerConfig& cfg, Spin spin, const PhysicalParams& p)
{
    cfg.validate();
    std::vector<YPair> ys;
    switch (cfg.method) {
    case SamplerMethod::exact_rejection:
        ys = sample_joint_density(0.0, cfg.n_pairs, cfg.seed, 0, spin, p);
        break;
    case SamplerMethod::independent_gaussian:
    case SamplerMethod::symmetric_gaussian: {
        Rng rng(cfg.seed, 0);
        ys.reserve(cfg.n_pairs);
        for (std::size_t i = 0; i < cfg.n_pairs; ++i) {
            const double y1 = rng.normal(p.slit_offset, p.sigma0);
            const double y2 = cfg.method == SamplerMethod::symmetric_gaussian ? -y1 : rng.normal(-p.slit_offset, p.sigma0);
            ys.push_back({y1, y2});
        }
        break;
    }
    case SamplerMethod::explicit_pairs:
        ys = cfg.pairs;
        break;
    }
    std::vector<PairConfiguration> out;
    out.reserve(ys.size());
    for (const YPair& q : ys) out.push_back({0.0, q.y1, 0.0, q.y2, 0.0});
    return out;
}

double sqm_same_side_probability(Spin spin, const PhysicalParams& p, double t)
{
    using boost::math::quadrature::gauss_kronrod;
    const double tau = t / p.time_scale();
    const double width = std::sqrt(1.0 + tau * tau);
    const double reach = p.slit_offset / p.sigma0 + 12.0 * width;
    const double s0 = p.sigma0;
    // Upper-right quadrant in reduced units; the lower-left one is its mirror.
    auto inner = [&](double u1) {
        auto row = [&](double u2) { return joint_density({0.0, u1 * s0, 0.0, u2 * s0, t}, spin, p) * s0 * s0; };
        return gauss_kronrod<double, 31>::integrate(row, 0.0, reach, 12, 1e-11);
    };
    return 2.0 * gauss_kronrod<double, 31>::integrate(inner, 0.0, reach, 12, 1e-10);
}

DensityGrid DensityGrid::for_time(double t, const PhysicalParams& p, std::size_t bins)
{
    const double tau = t / p.time_scale();
    return {bins, 10.0 * p.sigma0 * std::sqrt(1.0 + tau * tau)};
}

namespace {

// 5-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> gl_nodes{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                         0.9061798459386640};
constexpr std::array<double, 5> gl_weights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                           0.4786286704993665, 0.2369268850561891};

// Bin index of v, or bins when outside [-half, half).
std::size_t bin_of(double v, const DensityGrid& grid)
{
    const double pos = (v + grid.half_width) / (2.0 * grid.half_width) * static_cast<double>(grid.bins);
    if (!(pos >= 0.0) || pos >= static_cast<double>(grid.bins)) return grid.bins;
    return static_cast<std::size_t>(pos);
}

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn)
{
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
            try {
                fn(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
            }
        }
    };
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
    pool.clear();
    if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<double> binned_density(const DensityGrid& grid, Spin spin, const PhysicalParams& p, double t)
{
    require(grid.bins >= 1 && grid.half_width > 0.0, "binned_density: invalid grid");
    const double width = 2.0 * grid.half_width / static_cast<double>(grid.bins);
    std::vector<double> probs(grid.cells() + 1, 0.0);
    double inside = 0.0;
    for (std::size_t i = 0; i < grid.bins; ++i) {
        const double lo1 = -grid.half_width + width * static_cast<double>(i);
        for (std::size_t j = 0; j < grid.bins; ++j) {
            const double lo2 = -grid.half_width + width * static_cast<double>(j);
            double acc = 0.0;
            for (std::size_t a = 0; a < gl_nodes.size(); ++a) {
                const double y1 = lo1 + 0.5 * width * (gl_nodes[a] + 1.0);
                for (std::size_t b = 0; b < gl_nodes.size(); ++b) {
                    const double y2 = lo2 + 0.5 * width * (gl_nodes[b] + 1.0);
                    acc += gl_weights[a] * gl_weights[b] * joint_density({0.0, y1, 0.0, y2, t}, spin, p);
                }
            }
            probs[i * grid.bins + j] = acc * 0.25 * width * width;
            inside += probs[i * grid.bins + j];
        }
    }
    probs.back() = std::max(0.0, 1.0 - inside);
    return probs;
}

double tv_distance(std::span<const YPair> points, const DensityGrid& grid, std::span<const double> exact)
{
    require(exact.size() == grid.cells() + 1, "tv_distance: exact probabilities do not match grid");
    require(!points.empty(), "tv_distance: no points");
    std::vector<double> counts(grid.cells() + 1, 0.0);
    for (const YPair& q : points) {
        const std::size_t i = bin_of(q.y1, grid);
        const std::size_t j = bin_of(q.y2, grid);
        if (i == grid.bins || j == grid.bins)
            counts.back() += 1.0;
        else
            counts[i * grid.bins + j] += 1.0;
    }
    const double n = static_cast<double>(points.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) sum += std::abs(counts[k] / n - exact[k]);
    return 0.5 * sum;
}

DensityDistance density_distance(std::span<const YPair> endpoints, Spin spin, const PhysicalParams& p, double t_end,
                                 std::uint64_t seed)
{
    require(endpoints.size() >= 100, "density_distance: need at least 100 endpoints");
    const DensityGrid grid = DensityGrid::for_time(t_end, p);
    const std::vector<double> exact = binned_density(grid, spin, p, t_end);
    const std::vector<YPair> direct = sample_joint_density(t_end, endpoints.size(), seed, 1, spin, p);
    return {tv_distance(endpoints, grid, exact), tv_distance(direct, grid, exact)};
}

double same_side_fraction(std::span<const YPair> points)
{
    if (points.empty()) return 0.0;
    std::size_t same = 0;
    for (const YPair& q : points)
        if (q.y1 * q.y2 > 0.0) ++same;
    return static_cast<double>(same) / static_cast<double>(points.size());
}

EnsembleResult run_pairs(std::span<const PairConfiguration> initial, const IntegratorConfig& integrator, Spin spin,
                         const PhysicalParams& p, double t_end, const RunOptions& options)
{
    integrator.validate();
    p.validate();
    const std::size_t n = initial.size();
    require(n >= 1, "run_pairs: no initial configurations");

    std::vector<Trajectory> trajectories(n);
    parallel_for(n, options.threads, [&](std::size_t i) {
        trajectories[i] = integrate_trajectory(initial[i], t_end, integrator, spin, p, options.sample_times);
    });

    EnsembleResult r;
    r.n_pairs = n;
    r.initial.reserve(n);
    r.status.reserve(n);
    double com_sum = 0.0;
    for (const PairConfiguration& c : initial) {
        r.initial.push_back({c.y1, c.y2});
        com_sum += 0.5 * (c.y1 + c.y2);
    }
    const double com_mean = com_sum / static_cast<double>(n);
    double com_var = 0.0;
    for (const PairConfiguration& c : initial) {
        const double d = 0.5 * (c.y1 + c.y2) - com_mean;
        com_var += d * d;
    }
    r.delta_y0_estimate = n > 1 ? std::sqrt(com_var / static_cast<double>(n - 1)) : 0.0;

    for (const Trajectory& traj : trajectories) {
        r.status.push_back(traj.status);
        if (!traj.completed() || traj.samples.empty() || traj.samples.back().config.t != t_end) {
            ++r.aborted_count;
            continue;
        }
        const PairConfiguration& end = traj.samples.back().config;
        r.endpoints.push_back({end.y1, end.y2});
    }
    r.same_side_fraction = same_side_fraction(r.endpoints);
    if (r.endpoints.size() >= 100 && p.ky == 0.0) {
        const DensityDistance dd = density_distance(r.endpoints, spin, p, t_end, options.baseline_seed);
        r.density_distance = dd.bohmian;
        r.density_distance_baseline = dd.baseline;
    } else {
        r.density_distance = std::numeric_limits<double>::quiet_NaN();
        r.density_distance_baseline = std::numeric_limits<double>::quiet_NaN();
    }
    if (options.keep_trajectories) r.trajectories = std::move(trajectories);
    return r;
}

EnsembleResult run_ensemble(const SamplerConfig& sampler, const IntegratorConfig& integrator, Spin spin,
                            const PhysicalParams& p, double t_end, RunOptions options)
{
    const std::vector<PairConfiguration> initial = sample_initial(sampler, spin, p);
    options.baseline_seed = sampler.seed;
    return run_pairs(initial, integrator, spin, p, t_end, options);
}

}  // namespace bohm
