#pragma once

// Initial-condition sampling, trajectory batches and the statistics that
// compare Bohmian endpoint ensembles with |Psi(t)|^2.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dynamics.hpp"
#include "physics.hpp"

namespace bohm {

enum class SamplerMethod {
    exact_rejection,       // |Psi(0)|^2
    independent_gaussian,  // y1 ~ N(Y, sigma0), y2 ~ N(-Y, sigma0)
    symmetric_gaussian,    // y1 ~ N(Y, sigma0), y2 = -y1
    explicit_pairs,        // SamplerConfig::pairs verbatim
};

const char* to_string(SamplerMethod m);
SamplerMethod sampler_method_from_string(const char* name);

struct SamplerConfig {
    SamplerMethod method = SamplerMethod::exact_rejection;
    std::size_t n_pairs = 1000;
    std::uint64_t seed = 1;
    std::vector<YPair> pairs;  // explicit_pairs only (m)

    void validate() const;
    bool operator==(const SamplerConfig&) const = default;
};

/// Rejection sampler for |Psi(t)|^2 (ky = 0). The envelope is the equal
/// mixture of the two normalized Gaussian product terms, which bounds the
/// density by 4|N|^2 times the envelope. Throws Error(rejection_stall) if the
/// acceptance rate drops below 1e-3.
std::vector<YPair> sample_joint_density(double t, std::size_t n, std::uint64_t seed, std::uint64_t stream, Spin spin,
                                        const PhysicalParams& p);

/// Initial pair configurations at t = 0 with x1 = x2 = 0. Deterministic in
/// cfg.seed.
std::vector<PairConfiguration> sample_initial(const SamplerConfig& cfg, Spin spin, const PhysicalParams& p);

/// Probability that both particles are found on the same side of y = 0 at
/// time t, by adaptive Gauss-Kronrod quadrature of |Psi(t)|^2.
double sqm_same_side_probability(Spin spin, const PhysicalParams& p, double t);

struct DensityDistance {
    double bohmian = 0.0;   // endpoints vs binned |Psi(t)|^2
    double baseline = 0.0;  // equal-size direct sample vs binned |Psi(t)|^2
};

/// Fixed histogram grid: bins x bins over [-half, half]^2 with half =
/// 10 sigma0 |sigma_t| / sigma0.
struct DensityGrid {
    std::size_t bins = 40;
    double half_width = 0.0;  // m

    static DensityGrid for_time(double t, const PhysicalParams& p, std::size_t bins = 40);
    std::size_t cells() const { return bins * bins; }
};

/// Exact bin probabilities of |Psi(t)|^2 (Gauss-Legendre per bin). The extra
/// final entry is the mass outside the grid.
std::vector<double> binned_density(const DensityGrid& grid, Spin spin, const PhysicalParams& p, double t);

/// Total variation distance between the histogram of `points` and `exact`
/// (as returned by binned_density, including the overflow entry).
double tv_distance(std::span<const YPair> points, const DensityGrid& grid, std::span<const double> exact);

/// TV distance of the endpoints and of a fresh |Psi(t)|^2 sample (stream 1
/// of `seed`) to the binned exact density. Requires at least 100 endpoints.
DensityDistance density_distance(std::span<const YPair> endpoints, Spin spin, const PhysicalParams& p, double t_end,
                                 std::uint64_t seed);

/// Fraction of pairs with y1 * y2 > 0.
double same_side_fraction(std::span<const YPair> points);

struct EnsembleResult {
    std::size_t n_pairs = 0;
    std::vector<YPair> initial;
    std::vector<YPair> endpoints;  // completed trajectories, in input order
    std::vector<TrajectoryStatus> status;
    double same_side_fraction = 0.0;
    double delta_y0_estimate = 0.0;  // m
    double density_distance = 0.0;   // NaN when fewer than 100 endpoints
    double density_distance_baseline = 0.0;
    std::size_t aborted_count = 0;
    std::vector<Trajectory> trajectories;  // only with RunOptions::keep_trajectories
};

struct RunOptions {
    std::vector<double> sample_times;  // passed to integrate_trajectory
    bool keep_trajectories = false;
    unsigned threads = 0;  // 0: hardware concurrency
    std::uint64_t baseline_seed = 0;
};

/// Integrates every pair to t_end (concurrently) and reduces the statistics.
/// Aborted integrations are counted, never thrown.
EnsembleResult run_pairs(std::span<const PairConfiguration> initial, const IntegratorConfig& integrator, Spin spin,
                         const PhysicalParams& p, double t_end, const RunOptions& options = {});

EnsembleResult run_ensemble(const SamplerConfig& sampler, const IntegratorConfig& integrator, Spin spin,
                            const PhysicalParams& p, double t_end, RunOptions options = {});

}  // namespace bohm
