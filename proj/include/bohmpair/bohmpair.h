/*
 * bohmpair: two-particle Bohmian trajectories in double-slit and
 * two-double-slit interference.
 *
 * C interface. All quantities are SI. Functions returning bp_status report
 * failures through the status code; bp_last_error() then holds a message for
 * the calling thread. Opaque handles are released with their *_free function;
 * passing NULL to a free function is a no-op.
 */
#ifndef BOHMPAIR_H
#define BOHMPAIR_H

#include <stddef.h>
#include <stdint.h>

#if defined(BOHMPAIR_BUILDING)
#define BOHMPAIR_API __attribute__((visibility("default")))
#else
#define BOHMPAIR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bp_status {
    BP_OK = 0,
    BP_INVALID_ARGUMENT = 1,
    BP_NODE_PROXIMITY = 2,
    BP_STEP_UNDERFLOW = 3,
    BP_REGION_VIOLATION = 4,
    BP_REJECTION_STALL = 5,
    BP_CONFIG_ERROR = 6,
    BP_IO_ERROR = 7,
    BP_OUT_OF_MEMORY = 8,
    BP_INTERNAL_ERROR = 9
} bp_status;

typedef enum bp_spin { BP_BOSON = 0, BP_FERMION = 1 } bp_spin;

typedef enum bp_slit { BP_SLIT_A = 0, BP_SLIT_B = 1, BP_SLIT_A_PRIME = 2, BP_SLIT_B_PRIME = 3 } bp_slit;

/* RIGHT_LEFT: x1 > d, x2 < -d.  LEFT_RIGHT: x1 < -d, x2 > d. */
typedef enum bp_region { BP_REGION_RIGHT_LEFT = 0, BP_REGION_LEFT_RIGHT = 1 } bp_region;

typedef enum bp_sampler_method {
    BP_SAMPLER_EXACT_REJECTION = 0,
    BP_SAMPLER_INDEPENDENT_GAUSSIAN = 1,
    BP_SAMPLER_SYMMETRIC_GAUSSIAN = 2,
    BP_SAMPLER_EXPLICIT_PAIRS = 3
} bp_sampler_method;

typedef enum bp_trajectory_status {
    BP_TRAJECTORY_COMPLETED = 0,
    BP_TRAJECTORY_NODE_PROXIMITY_ABORT = 1,
    BP_TRAJECTORY_STEP_UNDERFLOW = 2
} bp_trajectory_status;

typedef struct bp_params {
    double mass;            /* kg */
    double hbar;            /* J s */
    double sigma0;          /* m, initial packet half-width */
    double slit_offset;     /* m, Y */
    double kx;              /* 1/m */
    double ky;              /* 1/m, must be 0 for velocities and sampling */
    double half_separation; /* m, d of the two-double-slit setup */
    double flight_length;   /* m, slit-to-detector distance L */
} bp_params;

typedef struct bp_configuration {
    double x1, y1, x2, y2; /* m */
    double t;              /* s */
} bp_configuration;

typedef struct bp_velocity {
    double vx1, vy1, vx2, vy2; /* m/s */
} bp_velocity;

typedef struct bp_complex {
    double re, im;
} bp_complex;

typedef struct bp_integrator_config {
    double rel_tol;
    double abs_tol;       /* in units of sigma0 */
    double h_init;        /* s */
    double h_min;         /* s */
    double h_max;         /* s */
    double density_floor; /* relative |Psi|^2 below which fermion runs abort */
    uint64_t max_steps;
} bp_integrator_config;

typedef struct bp_sampler_config {
    bp_sampler_method method;
    uint64_t n_pairs;
    uint64_t seed;
    const double* pairs; /* EXPLICIT_PAIRS only: n_pairs (y1, y2) pairs, interleaved */
} bp_sampler_config;

typedef struct bp_ensemble_summary {
    uint64_t n_pairs;
    uint64_t completed;
    uint64_t aborted_count;
    double same_side_fraction;
    double delta_y0_estimate;         /* m */
    double density_distance;          /* NaN with fewer than 100 endpoints */
    double density_distance_baseline; /* NaN with fewer than 100 endpoints */
} bp_ensemble_summary;

typedef struct bp_trajectory bp_trajectory;
typedef struct bp_ensemble bp_ensemble;
typedef struct bp_scenario bp_scenario;

BOHMPAIR_API const char* bp_version(void);
BOHMPAIR_API const char* bp_last_error(void);

/* Parameters and defaults. */
BOHMPAIR_API void bp_params_baseline(double x_speed, bp_params* out);
BOHMPAIR_API bp_status bp_params_validate(const bp_params* p);
BOHMPAIR_API double bp_params_flight_time(const bp_params* p);
BOHMPAIR_API void bp_integrator_defaults(bp_integrator_config* out);

/* Wavefunctions and densities. */
BOHMPAIR_API bp_status bp_sigma_t(const bp_params* p, double t, bp_complex* out);
BOHMPAIR_API bp_status bp_psi_slit(const bp_params* p, bp_slit slit, double x, double y, double t, bp_complex* out);
BOHMPAIR_API bp_status bp_psi_pair(const bp_params* p, bp_spin spin, const bp_configuration* c, bp_complex* out);
BOHMPAIR_API bp_status bp_normalization_n2(const bp_params* p, bp_spin spin, double* out);
BOHMPAIR_API bp_status bp_initial_density(const bp_params* p, bp_spin spin, double y1, double y2, double* out);
BOHMPAIR_API bp_status bp_joint_density(const bp_params* p, bp_spin spin, const bp_configuration* c, double* out);

/* Velocity fields. */
BOHMPAIR_API bp_status bp_velocity_closed_form(const bp_params* p, bp_spin spin, const bp_configuration* c,
                                               bp_velocity* out);
BOHMPAIR_API bp_status bp_velocity_oracle(const bp_params* p, bp_spin spin, const bp_configuration* c, double h,
                                          int richardson, bp_velocity* out);
BOHMPAIR_API bp_status bp_com_closed_form(const bp_params* p, double y0, double t, double* out);

/* Trajectories. sample_times may be NULL (endpoints only). */
BOHMPAIR_API bp_status bp_integrate(const bp_params* p, bp_spin spin, const bp_configuration* initial, double t_end,
                                    const bp_integrator_config* cfg, const double* sample_times, size_t n_times,
                                    bp_trajectory** out);
BOHMPAIR_API size_t bp_trajectory_size(const bp_trajectory* traj);
BOHMPAIR_API bp_trajectory_status bp_trajectory_get_status(const bp_trajectory* traj);
BOHMPAIR_API bp_status bp_trajectory_sample(const bp_trajectory* traj, size_t index, bp_configuration* c,
                                            bp_velocity* v);
BOHMPAIR_API bp_status bp_trajectory_map_to_double_slit(const bp_trajectory* traj, bp_region region,
                                                        bp_trajectory** out);
BOHMPAIR_API void bp_trajectory_free(bp_trajectory* traj);

/* Two-double-slit wavefunctions. */
BOHMPAIR_API bp_status bp_naive_four_slit_psi(const bp_params* p, bp_spin spin, const bp_configuration* c,
                                              bp_complex* out);
BOHMPAIR_API bp_status bp_naive_x_velocity(const bp_params* p, bp_spin spin, const bp_configuration* c, double h,
                                           double* vx1, double* vx2);
BOHMPAIR_API bp_status bp_corrected_four_slit_psi(const bp_params* p, bp_region region, bp_spin spin,
                                                  const bp_configuration* c, bp_complex* out);

/* Ensembles. y_out receives 2 * n_pairs doubles (y1, y2 interleaved). */
BOHMPAIR_API bp_status bp_sample_initial(const bp_params* p, bp_spin spin, const bp_sampler_config* sampler,
                                         double* y_out, size_t capacity_pairs);
BOHMPAIR_API bp_status bp_sqm_same_side_probability(const bp_params* p, bp_spin spin, double t, double* out);
BOHMPAIR_API bp_status bp_density_distance(const bp_params* p, bp_spin spin, const double* endpoints,
                                           size_t n_pairs, double t_end, uint64_t seed, double* bohmian,
                                           double* baseline);
BOHMPAIR_API bp_status bp_run_ensemble(const bp_params* p, bp_spin spin, const bp_sampler_config* sampler,
                                       const bp_integrator_config* cfg, double t_end, bp_ensemble** out);
BOHMPAIR_API bp_status bp_ensemble_get_summary(const bp_ensemble* e, bp_ensemble_summary* out);
BOHMPAIR_API bp_status bp_ensemble_endpoint(const bp_ensemble* e, size_t index, double* y1, double* y2);
BOHMPAIR_API void bp_ensemble_free(bp_ensemble* e);

/* Scenarios. Names: fig3a fig3b fig4a fig4b four-slit-check equivariance custom.
 * expected_name may be NULL when loading. Setters apply command-line
 * overrides, which win over file values. */
BOHMPAIR_API bp_status bp_scenario_create(const char* name, bp_scenario** out);
BOHMPAIR_API bp_status bp_scenario_load(const char* path, const char* expected_name, bp_scenario** out);
BOHMPAIR_API bp_status bp_scenario_set_seed(bp_scenario* s, uint64_t seed);
BOHMPAIR_API bp_status bp_scenario_set_n_pairs(bp_scenario* s, uint64_t n_pairs);
BOHMPAIR_API bp_status bp_scenario_set_output_dir(bp_scenario* s, const char* dir);
BOHMPAIR_API bp_status bp_scenario_set_tolerance(bp_scenario* s, double tolerance);
BOHMPAIR_API bp_status bp_scenario_set_spin(bp_scenario* s, bp_spin spin);
/* Writes the canonical config text (NUL-terminated) if it fits in cap bytes;
 * *needed always receives the required size including the terminator. */
BOHMPAIR_API bp_status bp_scenario_to_yaml(const bp_scenario* s, char* buf, size_t cap, size_t* needed);
/* Runs the scenario and writes its artifacts. *exit_code is 0 on success and 2
 * when the abort threshold (or a four-slit property) failed. */
BOHMPAIR_API bp_status bp_scenario_run(const bp_scenario* s, int* exit_code);
BOHMPAIR_API void bp_scenario_free(bp_scenario* s);

#ifdef __cplusplus
}
#endif

#endif /* BOHMPAIR_H */
