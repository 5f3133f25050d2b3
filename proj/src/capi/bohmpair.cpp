#include "bohmpair/bohmpair.h"

#include <cstring>
#include <memory>
#include <optional>
#include <vector>
#include <new>
#include <string>

#include "core/dynamics.hpp"
#include "core/ensemble.hpp"
#include "core/error.hpp"
#include "core/four_slit.hpp"
#include "core/physics.hpp"
#include "core/scenario.hpp"

struct bp_trajectory {
    bohm::Trajectory value;
};

struct bp_ensemble {
    bohm::EnsembleResult value;
};

struct bp_scenario {
    bohm::ScenarioConfig value;
};

namespace {

thread_local std::string last_error;

bp_status set_error(bp_status status, const char* what)
{
    try {
        last_error = what;
    } catch (...) {
        last_error.clear();
    }
    return status;
}

bp_status map_code(bohm::ErrorCode code)
{
    switch (code) {
    case bohm::ErrorCode::invalid_argument: return BP_INVALID_ARGUMENT;
    case bohm::ErrorCode::node_proximity: return BP_NODE_PROXIMITY;
    case bohm::ErrorCode::step_underflow: return BP_STEP_UNDERFLOW;
    case bohm::ErrorCode::region_violation: return BP_REGION_VIOLATION;
    case bohm::ErrorCode::rejection_stall: return BP_REJECTION_STALL;
    case bohm::ErrorCode::config: return BP_CONFIG_ERROR;
    case bohm::ErrorCode::io: return BP_IO_ERROR;
    }
    return BP_INTERNAL_ERROR;
}

// Runs body, translating exceptions into status codes.
template <class Body>
bp_status guarded(Body&& body) noexcept
{
    try {
        body();
        last_error.clear();
        return BP_OK;
    } catch (const bohm::Error& e) {
        return set_error(map_code(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(BP_OUT_OF_MEMORY, "out of memory");
    } catch (const std::exception& e) {
        return set_error(BP_INTERNAL_ERROR, e.what());
    } catch (...) {
        return set_error(BP_INTERNAL_ERROR, "unknown error");
    }
}

void need(const void* ptr, const char* name)
{
    if (ptr == nullptr) bohm::fail(bohm::ErrorCode::invalid_argument, std::string(name) + " must not be NULL");
}

bohm::PhysicalParams to_core(const bp_params* p)
{
    need(p, "params");
    bohm::PhysicalParams out;
    out.mass = p->mass;
    out.hbar = p->hbar;
    out.sigma0 = p->sigma0;
    out.slit_offset = p->slit_offset;
    out.kx = p->kx;
    out.ky = p->ky;
    out.half_separation = p->half_separation;
    out.flight_length = p->flight_length;
    out.validate();
    return out;
}

bohm::Spin to_core(bp_spin s)
{
    if (s == BP_BOSON) return bohm::Spin::boson;
    if (s == BP_FERMION) return bohm::Spin::fermion;
    bohm::fail(bohm::ErrorCode::invalid_argument, "unknown spin statistics");
}

bohm::PairConfiguration to_core(const bp_configuration* c)
{
    need(c, "configuration");
    return {c->x1, c->y1, c->x2, c->y2, c->t};
}

bohm::IntegratorConfig to_core(const bp_integrator_config* cfg)
{
    bohm::IntegratorConfig out;
    if (cfg == nullptr) return out;
    out.rel_tol = cfg->rel_tol;
    out.abs_tol = cfg->abs_tol;
    out.h_init = cfg->h_init;
    out.h_min = cfg->h_min;
    out.h_max = cfg->h_max;
    out.density_floor = cfg->density_floor;
    out.max_steps = static_cast<std::size_t>(cfg->max_steps);
    return out;
}

bohm::SlitRegion to_core(bp_region r)
{
    if (r == BP_REGION_RIGHT_LEFT) return bohm::SlitRegion::right_left;
    if (r == BP_REGION_LEFT_RIGHT) return bohm::SlitRegion::left_right;
    bohm::fail(bohm::ErrorCode::invalid_argument, "unknown slit region");
}

bohm::SamplerConfig to_core(const bp_sampler_config* s)
{
    need(s, "sampler");
    bohm::SamplerConfig out;
    switch (s->method) {
    case BP_SAMPLER_EXACT_REJECTION: out.method = bohm::SamplerMethod::exact_rejection; break;
    case BP_SAMPLER_INDEPENDENT_GAUSSIAN: out.method = bohm::SamplerMethod::independent_gaussian; break;
    case BP_SAMPLER_SYMMETRIC_GAUSSIAN: out.method = bohm::SamplerMethod::symmetric_gaussian; break;
    case BP_SAMPLER_EXPLICIT_PAIRS: out.method = bohm::SamplerMethod::explicit_pairs; break;
    default: bohm::fail(bohm::ErrorCode::invalid_argument, "unknown sampler method");
    }
    out.n_pairs = static_cast<std::size_t>(s->n_pairs);
    out.seed = s->seed;
    if (out.method == bohm::SamplerMethod::explicit_pairs) {
        need(s->pairs, "sampler.pairs");
        for (std::size_t i = 0; i < out.n_pairs; ++i) out.pairs.push_back({s->pairs[2 * i], s->pairs[2 * i + 1]});
    }
    return out;
}

bp_complex to_c(bohm::Complex z) { return {z.real(), z.imag()}; }

bp_velocity to_c(const bohm::PairVelocity& v) { return {v.vx1, v.vy1, v.vx2, v.vy2}; }

bp_configuration to_c(const bohm::PairConfiguration& c) { return {c.x1, c.y1, c.x2, c.y2, c.t}; }

bohm::ScenarioKind scenario_kind(const char* name)
{
    need(name, "scenario name");
    const auto kind = bohm::scenario_from_string(name);
    if (!kind) bohm::fail(bohm::ErrorCode::config, std::string("unknown scenario '") + name + "'");
    return *kind;
}

template <class Fill>
bp_status override_scenario(bp_scenario* s, Fill&& fill)
{
    return guarded([&] {
        need(s, "scenario");
        bohm::Overrides o;
        fill(o);
        bohm::ScenarioConfig updated = s->value;
        bohm::apply_overrides(updated, o);
        s->value = std::move(updated);
    });
}

}  // namespace

extern "C" {

const char* bp_version(void) { return bohm::tool_version; }

const char* bp_last_error(void) { return last_error.c_str(); }

void bp_params_baseline(double x_speed, bp_params* out)
{
    if (out == nullptr) return;
    const bohm::PhysicalParams p = bohm::PhysicalParams::baseline(x_speed);
    *out = {p.mass, p.hbar, p.sigma0, p.slit_offset, p.kx, p.ky, p.half_separation, p.flight_length};
}

bp_status bp_params_validate(const bp_params* p)
{
    return guarded([&] { to_core(p); });
}

double bp_params_flight_time(const bp_params* p)
{
    if (p == nullptr || p->kx <= 0.0) return 0.0;
    return p->flight_length * p->mass / (p->hbar * p->kx);
}

void bp_integrator_defaults(bp_integrator_config* out)
{
    if (out == nullptr) return;
    const bohm::IntegratorConfig d;
    *out = {d.rel_tol, d.abs_tol, d.h_init, d.h_min, d.h_max, d.density_floor, static_cast<uint64_t>(d.max_steps)};
}

bp_status bp_sigma_t(const bp_params* p, double t, bp_complex* out)
{
    return guarded([&] {
        need(out, "out");
        *out = to_c(bohm::sigma_t(t, to_core(p)));
    });
}

bp_status bp_psi_slit(const bp_params* p, bp_slit slit, double x, double y, double t, bp_complex* out)
{
    return guarded([&] {
        need(out, "out");
        bohm::Slit s;
        switch (slit) {
        case BP_SLIT_A: s = bohm::Slit::A; break;
        case BP_SLIT_B: s = bohm::Slit::B; break;
        case BP_SLIT_A_PRIME: s = bohm::Slit::A_prime; break;
        case BP_SLIT_B_PRIME: s = bohm::Slit::B_prime; break;
        default: bohm::fail(bohm::ErrorCode::invalid_argument, "unknown slit");
        }
        *out = to_c(bohm::psi_slit(s, x, y, t, to_core(p)));
    });
}

bp_status bp_psi_pair(const bp_params* p, bp_spin spin, const bp_configuration* c, bp_complex* out)
{
    return guarded([&] {
        need(out, "out");
        *out = to_c(bohm::psi_pair(to_core(spin), to_core(c), to_core(p)));
    });
}

bp_status bp_normalization_n2(const bp_params* p, bp_spin spin, double* out)
{
    return guarded([&] {
        need(out, "out");
        *out = bohm::normalization_n2(to_core(spin), to_core(p));
    });
}

bp_status bp_initial_density(const bp_params* p, bp_spin spin, double y1, double y2, double* out)
{
    return guarded([&] {
        need(out, "out");
        *out = bohm::initial_density(y1, y2, to_core(spin), to_core(p));
    });
}

bp_status bp_joint_density(const bp_params* p, bp_spin spin, const bp_configuration* c, double* out)
{
    return guarded([&] {
        need(out, "out");
        *out = bohm::joint_density(to_core(c), to_core(spin), to_core(p));
    });
}

bp_status bp_velocity_closed_form(const bp_params* p, bp_spin spin, const bp_configuration* c, bp_velocity* out)
{
    return guarded([&] {
        need(out, "out");
        *out = to_c(bohm::velocity_closed_form(to_core(c), to_core(spin), to_core(p)));
    });
}

bp_status bp_velocity_oracle(const bp_params* p, bp_spin spin, const bp_configuration* c, double h, int richardson,
                             bp_velocity* out)
{
    return guarded([&] {
        need(out, "out");
        *out = to_c(bohm::velocity_oracle(to_core(c), to_core(spin), to_core(p), h, richardson != 0));
    });
}

bp_status bp_com_closed_form(const bp_params* p, double y0, double t, double* out)
{
    return guarded([&] {
        need(out, "out");
        *out = bohm::com_closed_form(y0, t, to_core(p));
    });
}

bp_status bp_integrate(const bp_params* p, bp_spin spin, const bp_configuration* initial, double t_end,
                       const bp_integrator_config* cfg, const double* sample_times, size_t n_times, bp_trajectory** out)
{
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        std::vector<double> times;
        if (n_times > 0) {
            need(sample_times, "sample_times");
            times.assign(sample_times, sample_times + n_times);
        }
        auto traj = std::make_unique<bp_trajectory>();
        traj->value = bohm::integrate_trajectory(to_core(initial), t_end, to_core(cfg), to_core(spin), to_core(p), times);
        *out = traj.release();
    });
}

size_t bp_trajectory_size(const bp_trajectory* traj) { return traj ? traj->value.samples.size() : 0; }

bp_trajectory_status bp_trajectory_get_status(const bp_trajectory* traj)
{
    if (traj == nullptr) return BP_TRAJECTORY_COMPLETED;
    switch (traj->value.status) {
    case bohm::TrajectoryStatus::completed: return BP_TRAJECTORY_COMPLETED;
    case bohm::TrajectoryStatus::node_proximity_abort: return BP_TRAJECTORY_NODE_PROXIMITY_ABORT;
    case bohm::TrajectoryStatus::step_underflow: return BP_TRAJECTORY_STEP_UNDERFLOW;
    }
    return BP_TRAJECTORY_COMPLETED;
}

bp_status bp_trajectory_sample(const bp_trajectory* traj, size_t index, bp_configuration* c, bp_velocity* v)
{
    return guarded([&] {
        need(traj, "trajectory");
        if (index >= traj->value.samples.size()) bohm::fail(bohm::ErrorCode::invalid_argument, "sample index out of range");
        const bohm::TrajectorySample& s = traj->value.samples[index];
        if (c) *c = to_c(s.config);
        if (v) *v = to_c(s.velocity);
    });
}

bp_status bp_trajectory_map_to_double_slit(const bp_trajectory* traj, bp_region region, bp_trajectory** out)
{
    return guarded([&] {
        need(traj, "trajectory");
        need(out, "out");
        *out = nullptr;
        auto mapped = std::make_unique<bp_trajectory>();
        mapped->value = bohm::map_trajectory_to_double_slit(traj->value, to_core(region));
        *out = mapped.release();
    });
}

void bp_trajectory_free(bp_trajectory* traj) { delete traj; }

bp_status bp_naive_four_slit_psi(const bp_params* p, bp_spin spin, const bp_configuration* c, bp_complex* out)
{
    return guarded([&] {
        need(out, "out");
        *out = to_c(bohm::naive_four_slit_psi(to_core(spin), to_core(c), to_core(p)));
    });
}

bp_status bp_naive_x_velocity(const bp_params* p, bp_spin spin, const bp_configuration* c, double h, double* vx1,
                              double* vx2)
{
    return guarded([&] {
        need(vx1, "vx1");
        need(vx2, "vx2");
        const bohm::XVelocity v = bohm::naive_x_velocity(to_core(c), to_core(spin), to_core(p), h);
        *vx1 = v.vx1;
        *vx2 = v.vx2;
    });
}

bp_status bp_corrected_four_slit_psi(const bp_params* p, bp_region region, bp_spin spin, const bp_configuration* c,
                                     bp_complex* out)
{
    return guarded([&] {
        need(out, "out");
        *out = to_c(bohm::corrected_four_slit_psi(to_core(region), to_core(spin), to_core(c), to_core(p)));
    });
}

bp_status bp_sample_initial(const bp_params* p, bp_spin spin, const bp_sampler_config* sampler, double* y_out,
                            size_t capacity_pairs)
{
    return guarded([&] {
        need(y_out, "y_out");
        const bohm::SamplerConfig cfg = to_core(sampler);
        if (capacity_pairs < cfg.n_pairs) bohm::fail(bohm::ErrorCode::invalid_argument, "y_out too small for n_pairs");
        const auto configs = bohm::sample_initial(cfg, to_core(spin), to_core(p));
        for (std::size_t i = 0; i < configs.size(); ++i) {
            y_out[2 * i] = configs[i].y1;
            y_out[2 * i + 1] = configs[i].y2;
        }
    });
}

bp_status bp_sqm_same_side_probability(const bp_params* p, bp_spin spin, double t, double* out)
{
    return guarded([&] {
        need(out, "out");
        *out = bohm::sqm_same_side_probability(to_core(spin), to_core(p), t);
    });
}

bp_status bp_density_distance(const bp_params* p, bp_spin spin, const double* endpoints, size_t n_pairs, double t_end,
                              uint64_t seed, double* bohmian, double* baseline)
{
    return guarded([&] {
        need(endpoints, "endpoints");
        need(bohmian, "bohmian");
        need(baseline, "baseline");
        std::vector<bohm::YPair> pts(n_pairs);
        for (std::size_t i = 0; i < n_pairs; ++i) pts[i] = {endpoints[2 * i], endpoints[2 * i + 1]};
        const bohm::DensityDistance d = bohm::density_distance(pts, to_core(spin), to_core(p), t_end, seed);
        *bohmian = d.bohmian;
        *baseline = d.baseline;
    });
}

bp_status bp_run_ensemble(const bp_params* p, bp_spin spin, const bp_sampler_config* sampler,
                          const bp_integrator_config* cfg, double t_end, bp_ensemble** out)
{
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        auto e = std::make_unique<bp_ensemble>();
        e->value = bohm::run_ensemble(to_core(sampler), to_core(cfg), to_core(spin), to_core(p), t_end);
        *out = e.release();
    });
}

bp_status bp_ensemble_get_summary(const bp_ensemble* e, bp_ensemble_summary* out)
{
    return guarded([&] {
        need(e, "ensemble");
        need(out, "out");
        const bohm::EnsembleResult& r = e->value;
        *out = {r.n_pairs, r.endpoints.size(), r.aborted_count, r.same_side_fraction, r.delta_y0_estimate,
                r.density_distance, r.density_distance_baseline};
    });
}

bp_status bp_ensemble_endpoint(const bp_ensemble* e, size_t index, double* y1, double* y2)
{
    return guarded([&] {
        need(e, "ensemble");
        if (index >= e->value.endpoints.size()) bohm::fail(bohm::ErrorCode::invalid_argument, "endpoint index out of range");
        if (y1) *y1 = e->value.endpoints[index].y1;
        if (y2) *y2 = e->value.endpoints[index].y2;
    });
}

void bp_ensemble_free(bp_ensemble* e) { delete e; }

bp_status bp_scenario_create(const char* name, bp_scenario** out)
{
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        auto s = std::make_unique<bp_scenario>();
        s->value = bohm::scenario_defaults(scenario_kind(name));
        *out = s.release();
    });
}

bp_status bp_scenario_load(const char* path, const char* expected_name, bp_scenario** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = nullptr;
        std::optional<bohm::ScenarioKind> expected;
        if (expected_name) expected = scenario_kind(expected_name);
        auto s = std::make_unique<bp_scenario>();
        s->value = bohm::load_config(path, expected);
        *out = s.release();
    });
}


bp_status bp_scenario_set_seed(bp_scenario* s, uint64_t seed)
{
    return override_scenario(s, [&](bohm::Overrides& o) { o.seed = seed; });
}

bp_status bp_scenario_set_n_pairs(bp_scenario* s, uint64_t n_pairs)
{
    return override_scenario(s, [&](bohm::Overrides& o) { o.n_pairs = static_cast<std::size_t>(n_pairs); });
}

bp_status bp_scenario_set_output_dir(bp_scenario* s, const char* dir)
{
    return override_scenario(s, [&](bohm::Overrides& o) {
        need(dir, "dir");
        o.out = std::string(dir);
    });
}

bp_status bp_scenario_set_tolerance(bp_scenario* s, double tolerance)
{
    return override_scenario(s, [&](bohm::Overrides& o) { o.tolerance = tolerance; });
}

bp_status bp_scenario_set_spin(bp_scenario* s, bp_spin spin)
{
    return override_scenario(s, [&](bohm::Overrides& o) { o.spin = to_core(spin); });
}

bp_status bp_scenario_to_yaml(const bp_scenario* s, char* buf, size_t cap, size_t* needed)
{
    return guarded([&] {
        need(s, "scenario");
        const std::string text = bohm::to_yaml(s->value);
        if (needed) *needed = text.size() + 1;
        if (buf != nullptr && cap >= text.size() + 1) std::memcpy(buf, text.c_str(), text.size() + 1);
        else if (buf != nullptr) bohm::fail(bohm::ErrorCode::invalid_argument, "buffer too small");
    });
}

bp_status bp_scenario_run(const bp_scenario* s, int* exit_code)
{
    return guarded([&] {
        need(s, "scenario");
        need(exit_code, "exit_code");
        *exit_code = bohm::run_scenario(s->value).exit_code;
    });
}

void bp_scenario_free(bp_scenario* s) { delete s; }

}  // extern "C"
