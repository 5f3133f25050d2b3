#include "scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "error.hpp"
#include "four_slit.hpp"
#include "rng.hpp"

namespace bohm {

namespace {

constexpr ScenarioKind all_scenarios[] = {ScenarioKind::fig3a,           ScenarioKind::fig3b,
                                          ScenarioKind::fig4a,           ScenarioKind::fig4b,
                                          ScenarioKind::four_slit_check, ScenarioKind::equivariance,
                                          ScenarioKind::custom};

bool pins_physics(ScenarioKind k) { return k != ScenarioKind::custom; }

bool explicit_batch(ScenarioKind k) { return k == ScenarioKind::fig4a || k == ScenarioKind::fig4b; }

}  // namespace

const char* to_string(ScenarioKind k)
{
    switch (k) {
    case ScenarioKind::fig3a: return "fig3a";
    case ScenarioKind::fig3b: return "fig3b";
    case ScenarioKind::fig4a: return "fig4a";
    case ScenarioKind::fig4b: return "fig4b";
    case ScenarioKind::four_slit_check: return "four-slit-check";
    case ScenarioKind::equivariance: return "equivariance";
    case ScenarioKind::custom: return "custom";
    }
    return "unknown";
}

std::optional<ScenarioKind> scenario_from_string(const std::string& name)
{
    for (ScenarioKind k : all_scenarios)
        if (name == to_string(k)) return k;
    return std::nullopt;
}

ScenarioConfig scenario_defaults(ScenarioKind k)
{
    ScenarioConfig c;
    c.scenario = k;
    const double slow = 2e6;  // hbar kx / m giving |sigma_t| = 5.88 sigma0 over 0.2 m
    const double fast = 2e7;  // |sigma_t| = 1.16 sigma0
    c.sampler.method = SamplerMethod::independent_gaussian;
    c.sampler.n_pairs = 25;
    c.sampler.seed = 1;
    switch (k) {
    case ScenarioKind::fig3a:
    case ScenarioKind::custom:
        c.params = PhysicalParams::baseline(fast);
        break;
    case ScenarioKind::fig3b:
        c.params = PhysicalParams::baseline(slow);
        break;
    case ScenarioKind::fig4a:
    case ScenarioKind::fig4b: {
        c.params = PhysicalParams::baseline(slow);
        const double y = c.params.slit_offset;
        const double s = c.params.sigma0;
        c.sampler.method = SamplerMethod::explicit_pairs;
        if (k == ScenarioKind::fig4a)
            c.sampler.pairs = {{y + 1.5 * s, -y - 1.5 * s}, {y, -y}, {y - 1.5 * s, -y + 1.5 * s}};
        else
            c.sampler.pairs = {{y, -y + 1.5 * s}, {y, -y}, {y, -y - 1.5 * s}};
        c.sampler.n_pairs = c.sampler.pairs.size();
        break;
    }
    case ScenarioKind::four_slit_check:
        c.params = PhysicalParams::baseline(slow);
        c.sampler.n_pairs = 5;
        c.output.samples = 21;
        c.output.trajectory_csv = false;
        break;
    case ScenarioKind::equivariance:
        c.params = PhysicalParams::baseline(slow);
        c.sampler.method = SamplerMethod::exact_rejection;
        c.sampler.n_pairs = 10000;
        c.output.trajectory_csv = false;
        break;
    }
    return c;
}

void ScenarioConfig::validate() const
{
    params.validate();
    sampler.validate();
    integrator.validate();
    if (output.samples < 2) fail(ErrorCode::invalid_argument, "output.samples must be >= 2");
    if (output.dir.empty()) fail(ErrorCode::invalid_argument, "output.dir must not be empty");
    if (params.ky != 0.0) fail(ErrorCode::invalid_argument, "params.ky: trajectories require ky = 0");
}

namespace {

class ConfigReader {
public:
    ConfigReader(const YAML::Node& root, std::optional<ScenarioKind> expected) : root_(root), expected_(expected) {}

    ScenarioConfig read()
    {
        if (!root_ || root_.IsNull()) return finish(scenario_defaults(expected_.value_or(ScenarioKind::custom)));
        if (!root_.IsMap()) {
            problem(root_, "(root)", "expected a mapping of keys");
            return finish({});
        }
        check_keys(root_, "", {"format_version", "scenario", "statistics", "params", "sampler", "integrator", "output"});

        if (const YAML::Node v = root_["format_version"]) {
            int version = 0;
            if (scalar(v, "format_version", version) && version != config_format_version)
                problem(v, "format_version", "unsupported version " + std::to_string(version) + " (expected 1)");
        }

        ScenarioKind kind = expected_.value_or(ScenarioKind::custom);
        if (const YAML::Node v = root_["scenario"]) {
            std::string name;
            if (scalar(v, "scenario", name)) {
                if (const auto k = scenario_from_string(name)) {
                    if (expected_ && *k != *expected_)
                        problem(v, "scenario", "file names '" + name + "' but the command runs '" + to_string(*expected_) + "'");
                    kind = *k;
                } else {
                    problem(v, "scenario", "unknown scenario '" + name + "'");
                }
            }
        }
        ScenarioConfig c = scenario_defaults(kind);

        if (const YAML::Node v = root_["statistics"]) {
            std::string name;
            if (scalar(v, "statistics", name)) {
                if (name == "boson")
                    c.spin = Spin::boson;
                else if (name == "fermion")
                    c.spin = Spin::fermion;
                else
                    problem(v, "statistics", "expected boson or fermion, got '" + name + "'");
            }
        }
        if (const YAML::Node v = root_["params"]) read_params(v, c);
        if (const YAML::Node v = root_["sampler"]) read_sampler(v, c);
        if (const YAML::Node v = root_["integrator"]) read_integrator(v, c);
        if (const YAML::Node v = root_["output"]) read_output(v, c);
        return finish(c);
    }

private:
    void problem(const YAML::Node& node, const std::string& field, const std::string& what)
    {
        std::ostringstream os;
        const YAML::Mark mark = node.Mark();
        if (mark.line >= 0)
            os << "line " << mark.line + 1 << ": ";
        os << field << ": " << what;
        issues_.push_back(os.str());
    }

    template <class T>
    bool scalar(const YAML::Node& node, const std::string& field, T& out)
    {
        if (!node.IsScalar()) {
            problem(node, field, "expected a scalar value");
            return false;
        }
        try {
            out = node.as<T>();
            return true;
        } catch (const YAML::Exception&) {
            problem(node, field, "cannot parse '" + node.Scalar() + "'");
            return false;
        }
    }

    bool map_node(const YAML::Node& node, const std::string& field)
    {
        if (node.IsMap()) return true;
        problem(node, field, "expected a mapping");
        return false;
    }

    void check_keys(const YAML::Node& node, const std::string& prefix, std::set<std::string> known)
    {
        for (const auto& kv : node) {
            const std::string key = kv.first.as<std::string>();
            if (!known.count(key)) problem(kv.first, prefix + key, "unknown key");
        }
    }

    void positive(const YAML::Node& node, const std::string& field, double& target)
    {
        double v = 0.0;
        if (!scalar(node, field, v)) return;
        if (!(std::isfinite(v) && v > 0.0))
            problem(node, field, "must be finite and > 0");
        else
            target = v;
    }

    void read_params(const YAML::Node& node, ScenarioConfig& c)
    {
        if (pins_physics(c.scenario)) {
            problem(node, "params", std::string("physics is pinned by scenario ") + to_string(c.scenario) + "; use scenario: custom");
            return;
        }
        if (!map_node(node, "params")) return;
        check_keys(node, "params.", {"mass", "hbar", "sigma0", "slit_offset", "kx", "x_speed", "ky", "half_separation",
                                     "flight_length"});
        PhysicalParams& p = c.params;
        if (const YAML::Node v = node["mass"]) positive(v, "params.mass", p.mass);
        if (const YAML::Node v = node["hbar"]) positive(v, "params.hbar", p.hbar);
        if (const YAML::Node v = node["sigma0"]) positive(v, "params.sigma0", p.sigma0);
        if (const YAML::Node v = node["slit_offset"]) positive(v, "params.slit_offset", p.slit_offset);
        if (const YAML::Node v = node["flight_length"]) positive(v, "params.flight_length", p.flight_length);
        if (const YAML::Node v = node["half_separation"]) {
            double d = 0.0;
            if (scalar(v, "params.half_separation", d)) {
                if (!(std::isfinite(d) && d >= 0.0))
                    problem(v, "params.half_separation", "must be finite and >= 0");
                else
                    p.half_separation = d;
            }
        }
        if (const YAML::Node v = node["ky"]) {
            double ky = 0.0;
            if (scalar(v, "params.ky", ky)) {
                if (ky != 0.0)
                    problem(v, "params.ky", "trajectories require ky = 0");
                else
                    p.ky = ky;
            }
        }
        const YAML::Node kx = node["kx"];
        const YAML::Node speed = node["x_speed"];
        if (kx && speed) {
            problem(speed, "params.x_speed", "give either kx or x_speed, not both");
        } else if (kx) {
            positive(kx, "params.kx", p.kx);
        } else {
            // Keep the longitudinal speed when mass or hbar change.
            double v = p.x_speed();
            if (speed) positive(speed, "params.x_speed", v);
            p.set_x_speed(v);
        }
    }

    void read_sampler(const YAML::Node& node, ScenarioConfig& c)
    {
        if (!map_node(node, "sampler")) return;
        check_keys(node, "sampler.", {"method", "n_pairs", "seed", "pairs"});
        const bool custom = !pins_physics(c.scenario);
        if (const YAML::Node v = node["method"]) {
            std::string name;
            if (scalar(v, "sampler.method", name)) {
                if (!custom) {
                    problem(v, "sampler.method", std::string("pinned by scenario ") + to_string(c.scenario));
                } else {
                    try {
                        c.sampler.method = sampler_method_from_string(name.c_str());
                    } catch (const Error& e) {
                        problem(v, "sampler.method", e.what());
                    }
                }
            }
        }
        if (const YAML::Node v = node["seed"]) scalar(v, "sampler.seed", c.sampler.seed);
        if (const YAML::Node v = node["pairs"]) {
            if (!custom) {
                problem(v, "sampler.pairs", std::string("pinned by scenario ") + to_string(c.scenario));
            } else if (!v.IsSequence()) {
                problem(v, "sampler.pairs", "expected a list of [y1, y2] pairs");
            } else {
                c.sampler.pairs.clear();
                for (const YAML::Node& item : v) {
                    if (!item.IsSequence() || item.size() != 2) {
                        problem(item, "sampler.pairs", "each entry must be [y1, y2]");
                        continue;
                    }
                    YPair q;
                    if (scalar(item[0], "sampler.pairs", q.y1) && scalar(item[1], "sampler.pairs", q.y2)) c.sampler.pairs.push_back(q);
                }
                c.sampler.n_pairs = c.sampler.pairs.size();
            }
        }
        if (const YAML::Node v = node["n_pairs"]) {
            long long n = 0;
            if (scalar(v, "sampler.n_pairs", n)) {
                if (n < 1)
                    problem(v, "sampler.n_pairs", "must be >= 1");
                else if (explicit_batch(c.scenario))
                    problem(v, "sampler.n_pairs", std::string("scenario ") + to_string(c.scenario) + " uses a fixed set of pairs");
                else
                    c.sampler.n_pairs = static_cast<std::size_t>(n);
            }
        }
        if (custom && c.sampler.method == SamplerMethod::explicit_pairs && c.sampler.n_pairs != c.sampler.pairs.size())
            problem(node, "sampler.n_pairs", "must equal the number of explicit pairs");
        if (custom && c.sampler.method != SamplerMethod::explicit_pairs && !c.sampler.pairs.empty())
            problem(node, "sampler.pairs", "only used with method explicit_pairs");
    }

    void read_integrator(const YAML::Node& node, ScenarioConfig& c)
    {
        if (!map_node(node, "integrator")) return;
        check_keys(node, "integrator.", {"rel_tol", "abs_tol", "h_init", "h_min", "h_max", "density_floor", "max_steps"});
        IntegratorConfig& g = c.integrator;
        if (const YAML::Node v = node["rel_tol"]) positive(v, "integrator.rel_tol", g.rel_tol);
        if (const YAML::Node v = node["abs_tol"]) positive(v, "integrator.abs_tol", g.abs_tol);
        if (const YAML::Node v = node["h_init"]) positive(v, "integrator.h_init", g.h_init);
        if (const YAML::Node v = node["h_min"]) positive(v, "integrator.h_min", g.h_min);
        if (const YAML::Node v = node["h_max"]) positive(v, "integrator.h_max", g.h_max);
        if (const YAML::Node v = node["density_floor"]) positive(v, "integrator.density_floor", g.density_floor);
        if (const YAML::Node v = node["max_steps"]) {
            long long n = 0;
            if (scalar(v, "integrator.max_steps", n)) {
                if (n < 1)
                    problem(v, "integrator.max_steps", "must be >= 1");
                else
                    g.max_steps = static_cast<std::size_t>(n);
            }
        }
        if (!(g.h_min <= g.h_init && g.h_init <= g.h_max))
            problem(node, "integrator", "step bounds must satisfy h_min <= h_init <= h_max");
    }

    void read_output(const YAML::Node& node, ScenarioConfig& c)
    {
        if (!map_node(node, "output")) return;
        check_keys(node, "output.", {"dir", "samples", "trajectory_csv"});
        if (const YAML::Node v = node["dir"]) {
            std::string dir;
            if (scalar(v, "output.dir", dir)) {
                if (dir.empty())
                    problem(v, "output.dir", "must not be empty");
                else
                    c.output.dir = dir;
            }
        }
        if (const YAML::Node v = node["samples"]) {
            long long n = 0;
            if (scalar(v, "output.samples", n)) {
                if (n < 2)
                    problem(v, "output.samples", "must be >= 2");
                else
                    c.output.samples = static_cast<std::size_t>(n);
            }
        }
        if (const YAML::Node v = node["trajectory_csv"]) scalar(v, "output.trajectory_csv", c.output.trajectory_csv);
    }

    ScenarioConfig finish(ScenarioConfig c)
    {
        if (issues_.empty()) {
            try {
                c.validate();
            } catch (const Error& e) {
                issues_.push_back(e.what());
            }
        }
        if (!issues_.empty()) {
            std::string msg;
            for (const std::string& s : issues_) msg += (msg.empty() ? "" : "\n") + s;
            fail(ErrorCode::config, msg);
        }
        return c;
    }

    YAML::Node root_;
    std::optional<ScenarioKind> expected_;
    std::vector<std::string> issues_;
};

}  // namespace

ScenarioConfig parse_config(const std::string& text, std::optional<ScenarioKind> expected)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        fail(ErrorCode::config, "line " + std::to_string(e.mark.line + 1) + ": (syntax): " + e.msg);
    }
    return ConfigReader(root, expected).read();
}

ScenarioConfig load_config(const std::string& path, std::optional<ScenarioKind> expected)
{
    std::ifstream in(path);
    if (!in) fail(ErrorCode::config, path + ": cannot open config file");
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_config(text.str(), expected);
    } catch (const Error& e) {
        fail(ErrorCode::config, path + ":\n" + e.what());
    }
}

namespace {

// Shortest text that parses back to the same double.
std::string shortest(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string to_yaml(const ScenarioConfig& c)
{
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "format_version" << YAML::Value << config_format_version;
    out << YAML::Key << "scenario" << YAML::Value << to_string(c.scenario);
    out << YAML::Key << "statistics" << YAML::Value << to_string(c.spin);
    const bool custom = !pins_physics(c.scenario);
    if (custom) {
        const PhysicalParams& p = c.params;
        out << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "mass" << YAML::Value << shortest(p.mass);
        out << YAML::Key << "hbar" << YAML::Value << shortest(p.hbar);
        out << YAML::Key << "sigma0" << YAML::Value << shortest(p.sigma0);
        out << YAML::Key << "slit_offset" << YAML::Value << shortest(p.slit_offset);
        out << YAML::Key << "kx" << YAML::Value << shortest(p.kx);
        out << YAML::Key << "ky" << YAML::Value << shortest(p.ky);
        out << YAML::Key << "half_separation" << YAML::Value << shortest(p.half_separation);
        out << YAML::Key << "flight_length" << YAML::Value << shortest(p.flight_length);
        out << YAML::EndMap;
    }
    out << YAML::Key << "sampler" << YAML::Value << YAML::BeginMap;
    if (custom) out << YAML::Key << "method" << YAML::Value << to_string(c.sampler.method);
    if (!explicit_batch(c.scenario) && c.sampler.method != SamplerMethod::explicit_pairs)
        out << YAML::Key << "n_pairs" << YAML::Value << c.sampler.n_pairs;
    out << YAML::Key << "seed" << YAML::Value << c.sampler.seed;
    if (custom && c.sampler.method == SamplerMethod::explicit_pairs) {
        out << YAML::Key << "pairs" << YAML::Value << YAML::BeginSeq;
        for (const YPair& q : c.sampler.pairs) out << YAML::Flow << YAML::BeginSeq << shortest(q.y1) << shortest(q.y2) << YAML::EndSeq;
        out << YAML::EndSeq;
    }
    out << YAML::EndMap;
    const IntegratorConfig& g = c.integrator;
    out << YAML::Key << "integrator" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "rel_tol" << YAML::Value << shortest(g.rel_tol);
    out << YAML::Key << "abs_tol" << YAML::Value << shortest(g.abs_tol);
    out << YAML::Key << "h_init" << YAML::Value << shortest(g.h_init);
    out << YAML::Key << "h_min" << YAML::Value << shortest(g.h_min);
    out << YAML::Key << "h_max" << YAML::Value << shortest(g.h_max);
    out << YAML::Key << "density_floor" << YAML::Value << shortest(g.density_floor);
    out << YAML::Key << "max_steps" << YAML::Value << g.max_steps;
    out << YAML::EndMap;
    out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "dir" << YAML::Value << YAML::DoubleQuoted << c.output.dir;
    out << YAML::Key << "samples" << YAML::Value << c.output.samples;
    out << YAML::Key << "trajectory_csv" << YAML::Value << c.output.trajectory_csv;
    out << YAML::EndMap;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

void apply_overrides(ScenarioConfig& c, const Overrides& o)
{
    if (o.seed) c.sampler.seed = *o.seed;
    if (o.n_pairs) {
        if (c.sampler.method == SamplerMethod::explicit_pairs)
            fail(ErrorCode::config, std::string("--n-pairs: scenario ") + to_string(c.scenario) + " uses a fixed set of pairs");
        if (*o.n_pairs < 1) fail(ErrorCode::config, "--n-pairs: must be >= 1");
        c.sampler.n_pairs = *o.n_pairs;
    }
    if (o.out) {
        if (o.out->empty()) fail(ErrorCode::config, "--out: must not be empty");
        c.output.dir = *o.out;
    }
    if (o.tolerance) {
        if (!(std::isfinite(*o.tolerance) && *o.tolerance > 0.0)) fail(ErrorCode::config, "--tolerance: must be > 0");
        c.integrator.rel_tol = *o.tolerance;
        c.integrator.abs_tol = *o.tolerance;
    }
    if (o.spin) c.spin = *o.spin;
}

std::string trajectory_csv(const Trajectory& traj)
{
    std::string out = std::string(trajectory_csv_header) + "\n";
    char line[256];
    for (const TrajectorySample& s : traj.samples) {
        std::snprintf(line, sizeof line, "%.15e,%.15e,%.15e,%.15e,%.15e,%.15e,%.15e\n", s.config.t, s.config.x1,
                      s.config.y1, s.config.x2, s.config.y2, s.velocity.vy1, s.velocity.vy2);
        out += line;
    }
    return out;
}

namespace {

using nlohmann::json;

json config_json(const ScenarioConfig& c)
{
    const PhysicalParams& p = c.params;
    json pairs = json::array();
    for (const YPair& q : c.sampler.pairs) pairs.push_back({q.y1, q.y2});
    return {
        {"scenario", to_string(c.scenario)},
        {"statistics", to_string(c.spin)},
        {"params",
         {{"mass", p.mass}, {"hbar", p.hbar}, {"sigma0", p.sigma0}, {"slit_offset", p.slit_offset}, {"kx", p.kx},
          {"x_speed", p.x_speed()}, {"ky", p.ky}, {"half_separation", p.half_separation},
          {"flight_length", p.flight_length}}},
        {"sampler",
         {{"method", to_string(c.sampler.method)}, {"n_pairs", c.sampler.n_pairs}, {"seed", c.sampler.seed},
          {"pairs", pairs}}},
        {"integrator",
         {{"rel_tol", c.integrator.rel_tol}, {"abs_tol", c.integrator.abs_tol}, {"h_init", c.integrator.h_init},
          {"h_min", c.integrator.h_min}, {"h_max", c.integrator.h_max},
          {"density_floor", c.integrator.density_floor}, {"max_steps", c.integrator.max_steps}}},
        {"output",
         {{"dir", c.output.dir}, {"samples", c.output.samples}, {"trajectory_csv", c.output.trajectory_csv}}},
    };
}

json ensemble_json(const EnsembleResult& r)
{
    json endpoints = json::array();
    for (const YPair& q : r.endpoints) endpoints.push_back({q.y1, q.y2});
    json status = json::array();
    for (TrajectoryStatus s : r.status) status.push_back(to_string(s));
    auto number = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return {{"n_pairs", r.n_pairs},
            {"same_side_fraction", r.same_side_fraction},
            {"delta_y0_estimate", r.delta_y0_estimate},
            {"density_distance", number(r.density_distance)},
            {"density_distance_baseline", number(r.density_distance_baseline)},
            {"aborted_count", r.aborted_count},
            {"endpoints", endpoints},
            {"status", status}};
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io, path.string() + ": cannot open for writing");
    out << content;
    if (!out) fail(ErrorCode::io, path.string() + ": write failed");
}

// Scenario-specific quantitative checks recorded in the summary.
json scenario_checks(const ScenarioConfig& c, const EnsembleResult& r, double t_end)
{
    const double s0 = c.params.sigma0;
    json checks = json::object();
    switch (c.scenario) {
    case ScenarioKind::fig3a: {
        double worst = 0.0;
        for (std::size_t i = 0, k = 0; i < r.n_pairs; ++i) {
            if (r.status[i] != TrajectoryStatus::completed) continue;
            worst = std::max({worst, std::abs(r.endpoints[k].y1 - r.initial[i].y1), std::abs(r.endpoints[k].y2 - r.initial[i].y2)});
            ++k;
        }
        checks["max_transverse_displacement_sigma0"] = worst / s0;
        checks["almost_straight"] = worst / s0 < 0.8;
        break;
    }
    case ScenarioKind::fig3b:
    case ScenarioKind::custom: {
        if (c.params.ky != 0.0) break;
        const double expected = sqm_same_side_probability(c.spin, c.params, t_end);
        const double n = static_cast<double>(std::max<std::size_t>(r.endpoints.size(), 1));
        const double sigma = std::sqrt(expected * (1.0 - expected) / n);
        checks["sqm_same_side_probability"] = expected;
        checks["same_side_within_3_sigma"] = std::abs(r.same_side_fraction - expected) <= 3.0 * sigma;
        break;
    }
    case ScenarioKind::fig4a: {
        double worst = 0.0;
        for (const Trajectory& traj : r.trajectories)
            for (const TrajectorySample& s : traj.samples) worst = std::max(worst, std::abs(s.config.y1 + s.config.y2));
        checks["max_asymmetry_sigma0"] = worst / s0;
        checks["symmetric"] = worst / s0 <= 1e-6;
        break;
    }
    case ScenarioKind::fig4b: {
        const bool done = !r.status.empty() && r.status[0] == TrajectoryStatus::completed;
        checks["first_lower_final_y_sigma0"] = done ? json(r.endpoints[0].y2 / s0) : json(nullptr);
        checks["lower_particle_crosses_axis"] = done && r.endpoints[0].y2 > 0.0;
        break;
    }
    case ScenarioKind::equivariance:
        checks["equivariant"] = std::isfinite(r.density_distance) && r.density_distance <= 1.5 * r.density_distance_baseline;
        break;
    case ScenarioKind::four_slit_check:
        break;
    }
    return checks;
}

}  // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& c)
{
    try {
        c.validate();
    } catch (const Error& e) {
        fail(ErrorCode::config, e.what());
    }
    const std::filesystem::path dir(c.output.dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorCode::io, c.output.dir + ": " + ec.message());

    const double t_end = c.params.flight_time();
    json summary = {{"tool", "bohmpair"},
                    {"version", tool_version},
                    {"rng_algorithm", rng_algorithm_version},
                    {"config_format_version", config_format_version},
                    {"config", config_json(c)},
                    {"seed", c.sampler.seed},
                    {"t_end", t_end}};

    ScenarioOutcome outcome;
    if (c.scenario == ScenarioKind::four_slit_check) {
        const std::vector<PairConfiguration> initial = sample_initial(c.sampler, c.spin, c.params);
        const FourSlitReport report = four_slit_check(c.params, c.integrator, initial, c.output.samples);
        json checks = json::array();
        for (const PropertyCheck& pc : report.checks)
            checks.push_back({{"name", pc.name}, {"max_error", pc.max_error}, {"tolerance", pc.tolerance}, {"pass", pc.pass}});
        summary["four_slit_checks"] = checks;
        summary["pass"] = report.all_pass();
        outcome.exit_code = report.all_pass() ? 0 : 2;
    } else {
        RunOptions options;
        options.keep_trajectories = c.output.trajectory_csv || c.scenario == ScenarioKind::fig4a;
        if (options.keep_trajectories) options.sample_times = uniform_times(0.0, t_end, c.output.samples);
        const EnsembleResult r = run_ensemble(c.sampler, c.integrator, c.spin, c.params, t_end, options);
        summary["result"] = ensemble_json(r);
        const json checks = scenario_checks(c, r, t_end);
        const double abort_fraction = static_cast<double>(r.aborted_count) / static_cast<double>(r.n_pairs);
        bool pass = abort_fraction <= 1e-3;
        for (const auto& [key, value] : checks.items())
            if (value.is_boolean()) pass = pass && value.get<bool>();
        summary["checks"] = checks;
        summary["abort_threshold_exceeded"] = abort_fraction > 1e-3;
        summary["pass"] = pass;
        outcome.exit_code = abort_fraction > 1e-3 ? 2 : 0;

        if (c.output.trajectory_csv) {
            char name[64];
            for (std::size_t i = 0; i < r.trajectories.size(); ++i) {
                std::snprintf(name, sizeof name, "traj_%05zu.csv", i);
                write_file(dir / name, trajectory_csv(r.trajectories[i]));
                ++outcome.trajectory_files;
            }
        }
    }
    outcome.summary_json = summary.dump(2) + "\n";
    write_file(dir / "summary.json", outcome.summary_json);
    return outcome;
}

}  // namespace bohm
