#pragma once

// Named scenarios, the scenario config file and the artifact writers.
//
// Config file format version 1 (YAML):
//
//   format_version: 1
//   scenario: fig3b            # fig3a fig3b fig4a fig4b four-slit-check equivariance custom
//   statistics: boson          # or fermion
//   params:                    # custom scenario only; SI units
//     mass: 9.1093837015e-31
//     hbar: 1.054571817e-34
//     sigma0: 1.0e-6
//     slit_offset: 5.0e-6
//     x_speed: 2.0e7           # hbar kx / m; or give kx directly, not both
//     ky: 0
//     half_separation: 1.0e-3
//     flight_length: 0.2
//   sampler:
//     method: exact_rejection  # custom only; independent_gaussian symmetric_gaussian explicit_pairs
//     n_pairs: 1000
//     seed: 1
//     pairs: [[5.0e-6, -5.0e-6]]   # custom + explicit_pairs only; (y1, y2) in m
//   integrator: {rel_tol, abs_tol, h_init, h_min, h_max, density_floor, max_steps}
//   output: {dir, samples, trajectory_csv}
//
// Every key is optional; unknown keys are errors.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "ensemble.hpp"
#include "physics.hpp"

namespace bohm {

inline constexpr int config_format_version = 1;
inline constexpr const char* tool_version = "1.0.0";

enum class ScenarioKind { fig3a, fig3b, fig4a, fig4b, four_slit_check, equivariance, custom };

const char* to_string(ScenarioKind k);
std::optional<ScenarioKind> scenario_from_string(const std::string& name);

struct OutputConfig {
    std::string dir = "out";
    std::size_t samples = 201;
    bool trajectory_csv = true;

    bool operator==(const OutputConfig&) const = default;
};

struct ScenarioConfig {
    ScenarioKind scenario = ScenarioKind::custom;
    PhysicalParams params = PhysicalParams::baseline();
    SamplerConfig sampler;
    IntegratorConfig integrator;
    Spin spin = Spin::boson;
    OutputConfig output;

    void validate() const;
    bool operator==(const ScenarioConfig&) const = default;
};

/// Pinned physics and default batch for a scenario.
ScenarioConfig scenario_defaults(ScenarioKind k);

/// Parses config text. `expected`, when set, is the scenario chosen on the
/// command line; a file naming a different scenario is an error. Throws
/// Error(config) whose message lists one "line N: field: problem" per issue.
ScenarioConfig parse_config(const std::string& text, std::optional<ScenarioKind> expected = std::nullopt);
ScenarioConfig load_config(const std::string& path, std::optional<ScenarioKind> expected = std::nullopt);

/// Canonical YAML; parse_config(to_yaml(c)) == c.
std::string to_yaml(const ScenarioConfig& c);

struct Overrides {
    std::optional<std::uint64_t> seed{};
    std::optional<std::size_t> n_pairs{};
    std::optional<std::string> out{};
    std::optional<double> tolerance{};  // sets rel_tol and abs_tol
    std::optional<Spin> spin{};
};

/// Flags win over file values. Throws Error(config) for overrides a scenario
/// does not accept (n_pairs on explicit pairs).
void apply_overrides(ScenarioConfig& c, const Overrides& o);

struct ScenarioOutcome {
    // 0 ok; 2 when more than 0.1% of the pairs aborted or a four-slit
    // property failed. Figure checks are reported in the summary only.
    int exit_code = 0;
    std::string summary_json;
    std::size_t trajectory_files = 0;
};

/// Runs the scenario, writes trajectory CSVs and summary.json to
/// c.output.dir. Throws Error(io) on file errors.
ScenarioOutcome run_scenario(const ScenarioConfig& c);

/// CSV header and row writer shared with tests.
inline constexpr const char* trajectory_csv_header = "t,x1,y1,x2,y2,vy1,vy2";
std::string trajectory_csv(const Trajectory& traj);

}  // namespace bohm
