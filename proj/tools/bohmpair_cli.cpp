// bohmpair command-line front end. Links only the C API.
//
//   bohmpair fig3a|fig3b|fig4a|fig4b|four-slit-check|equivariance|custom
//            [--config FILE] [--seed N] [--n-pairs N] [--out DIR]
//            [--tolerance T] [--statistics boson|fermion]
//   bohmpair validate FILE [--scenario NAME]
//
// Exit codes: 0 success, 1 config error, 2 abort threshold exceeded (or a
// failed four-slit property), 3 other runtime errors such as I/O.

#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bohmpair/bohmpair.h"

namespace {

constexpr int exit_config = 1;
constexpr int exit_runtime = 3;

struct ScenarioDeleter {
    void operator()(bp_scenario* s) const { bp_scenario_free(s); }
};
using ScenarioHandle = std::unique_ptr<bp_scenario, ScenarioDeleter>;

int report(bp_status status, const char* context)
{
    std::fprintf(stderr, "bohmpair: %s: %s\n", context, bp_last_error());
    return status == BP_CONFIG_ERROR || status == BP_INVALID_ARGUMENT ? exit_config : exit_runtime;
}

struct RunFlags {
    std::string config;
    std::optional<uint64_t> seed;
    std::optional<uint64_t> n_pairs;
    std::optional<std::string> out;
    std::optional<double> tolerance;
    std::optional<std::string> statistics;
};

int run(const std::string& name, const RunFlags& flags)
{
    bp_scenario* raw = nullptr;
    bp_status st = flags.config.empty() ? bp_scenario_create(name.c_str(), &raw)
                                        : bp_scenario_load(flags.config.c_str(), name.c_str(), &raw);
    if (st != BP_OK) return report(st, "config");
    ScenarioHandle scenario(raw);

    if (flags.seed && (st = bp_scenario_set_seed(scenario.get(), *flags.seed)) != BP_OK) return report(st, "--seed");
    if (flags.n_pairs && (st = bp_scenario_set_n_pairs(scenario.get(), *flags.n_pairs)) != BP_OK)
        return report(st, "--n-pairs");
    if (flags.out && (st = bp_scenario_set_output_dir(scenario.get(), flags.out->c_str())) != BP_OK)
        return report(st, "--out");
    if (flags.tolerance && (st = bp_scenario_set_tolerance(scenario.get(), *flags.tolerance)) != BP_OK)
        return report(st, "--tolerance");
    if (flags.statistics) {
        const bp_spin spin = *flags.statistics == "fermion" ? BP_FERMION : BP_BOSON;
        if ((st = bp_scenario_set_spin(scenario.get(), spin)) != BP_OK) return report(st, "--statistics");
    }

    int exit_code = 0;
    st = bp_scenario_run(scenario.get(), &exit_code);
    if (st != BP_OK) return report(st, name.c_str());
    if (exit_code != 0) std::fprintf(stderr, "bohmpair: %s: abort threshold exceeded or check failed\n", name.c_str());
    return exit_code;
}

int validate(const std::string& path, const std::string& scenario)
{
    bp_scenario* raw = nullptr;
    const bp_status st = bp_scenario_load(path.c_str(), scenario.empty() ? nullptr : scenario.c_str(), &raw);
    if (st != BP_OK) return report(st, "config");
    ScenarioHandle handle(raw);
    size_t needed = 0;
    bp_scenario_to_yaml(handle.get(), nullptr, 0, &needed);
    std::vector<char> text(needed);
    bp_scenario_to_yaml(handle.get(), text.data(), text.size(), &needed);
    std::fputs(text.data(), stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-particle Bohmian trajectories in double-slit interference"};
    app.set_version_flag("--version", std::string(bp_version()));
    app.require_subcommand(1);

    RunFlags flags;
    const std::vector<std::pair<std::string, std::string>> scenarios{
        {"fig3a", "25 pairs, hbar kx/m = 2e7 m/s (little spreading)"},
        {"fig3b", "25 pairs, hbar kx/m = 2e6 m/s (strong spreading)"},
        {"fig4a", "three symmetric pairs"},
        {"fig4b", "upper particle at Y, lower at -Y + 1.5, 0, -1.5 sigma0"},
        {"four-slit-check", "two-double-slit property checks"},
        {"equivariance", "Born-sampled batch compared with |Psi(t)|^2"},
        {"custom", "everything from the config file"},
    };
    std::string chosen;
    for (const auto& [name, help] : scenarios) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config, "Scenario config file (YAML, format_version 1)")->check(CLI::ExistingFile);
        sub->add_option("--seed", flags.seed, "Sampler seed");
        sub->add_option("--n-pairs", flags.n_pairs, "Number of pairs")->check(CLI::PositiveNumber);
        sub->add_option("--out", flags.out, "Output directory");
        sub->add_option("--tolerance", flags.tolerance, "Integrator rel_tol and abs_tol")->check(CLI::PositiveNumber);
        sub->add_option("--statistics", flags.statistics, "boson or fermion")
            ->check(CLI::IsMember({"boson", "fermion"}));
        sub->callback([&chosen, name = name] { chosen = name; });
    }

    std::string validate_path;
    std::string validate_scenario;
    CLI::App* val = app.add_subcommand("validate", "Check a config file and print it in canonical form");
    val->add_option("file", validate_path, "Config file")->required()->check(CLI::ExistingFile);
    val->add_option("--scenario", validate_scenario, "Scenario the file must describe");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    if (val->parsed()) return validate(validate_path, validate_scenario);
    return run(chosen, flags);
}
