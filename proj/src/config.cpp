#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "moment_ensemble/errors.hpp"
#include "moment_ensemble/scenarios.hpp"

namespace moment_ensemble {

using nlohmann::json;

namespace {

constexpr double max_grid_nodes = 1e7;
constexpr unsigned max_moment_order = 200;
constexpr double max_steps = 1e9;

} // namespace

void ScenarioConfig::validate() const {
    auto positive = [](double v, const char* key) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw InvalidArgument(std::string(key) + " must be positive");
    };
    if (scenario != "bloch" && scenario != "nonlinear" && scenario != "output_moment_demo")
        throw InvalidArgument("unknown scenario '" + scenario + "' (expected bloch, nonlinear or output_moment_demo)");
    if (grid_points == 0)
        throw InvalidArgument("grid_points must be positive");
    if (param_bounds.empty())
        throw InvalidArgument("param_bounds must list at least one interval");
    for (const auto& b : param_bounds)
        if (!(b.upper > b.lower))
            throw InvalidArgument("param_bounds interval [" + std::to_string(b.lower) + ", " +
                                  std::to_string(b.upper) + "] is degenerate");
    double nodes = 1.0;
    for (std::size_t a = 0; a < param_bounds.size(); ++a)
        nodes *= static_cast<double>(grid_points);
    if (nodes > max_grid_nodes)
        throw InvalidArgument("grid_points gives " + std::to_string(nodes) + " nodes (limit " +
                              std::to_string(max_grid_nodes) + ")");
    if (moment_order == 0 || moment_order > max_moment_order)
        throw InvalidArgument("moment_order must lie in 1.." + std::to_string(max_moment_order));
    positive(dt, "dt");
    positive(T, "T");
    if (T / dt > max_steps)
        throw InvalidArgument("T / dt exceeds " + std::to_string(max_steps) + " steps");
    if (record_stride == 0)
        throw InvalidArgument("record_stride must be positive");
    for (const auto* spec : {&initial_profile, &target_profile}) {
        if (spec->kind != "constant" && spec->kind != "indicator" && spec->kind != "identity")
            throw InvalidArgument("unknown profile kind '" + spec->kind + "'");
        if (spec->kind == "constant" && spec->value.empty())
            throw InvalidArgument("constant profile needs a value");
        if (spec->kind == "indicator" && !(spec->support.upper > spec->support.lower))
            throw InvalidArgument("indicator support is degenerate");
    }
    (void)law_kind_from_string(controller.kind);
    if (!(controller.gain >= 0.0) || !std::isfinite(controller.gain))
        throw InvalidArgument("controller.gain must be non-negative");
    positive(controller.singularity_threshold, "controller.singularity_threshold");
    if (controller.u_max)
        positive(*controller.u_max, "controller.u_max");
    if (controller.order > moment_order)
        throw InvalidArgument("controller.order exceeds moment_order");
    if (controller.first_order > controller.order)
        throw InvalidArgument("controller.first_order exceeds controller.order");
    (void)closure_from_string(closure);
    if (target_moments != "analytic" && target_moments != "quadrature")
        throw InvalidArgument("target_moments must be analytic or quadrature");
}

std::vector<std::string> preset_names() { return {"bloch-paper", "nonlinear-paper", "output-moment-demo"}; }

ScenarioConfig preset(const std::string& name) {
    ScenarioConfig cfg;
    cfg.name = name;
    if (name == "bloch-paper") {
        cfg.scenario = "bloch";
        cfg.grid_points = 300;
        cfg.param_bounds = {{0.9, 1.1}};
        cfg.moment_order = 35;
        cfg.dt = 1e-3;
        cfg.T = 2.0;
        cfg.initial_profile = {"constant", {0.0, 0.0, 1.0}, {}};
        cfg.target_profile = {"constant", {1.0, 0.0, 0.0}, {}};
        cfg.controller.kind = "explicit_bloch";
        cfg.controller.order = 35;
        cfg.closure = "from_ensemble";
        cfg.record_stride = 10;
    } else if (name == "nonlinear-paper") {
        cfg.scenario = "nonlinear";
        cfg.grid_points = 500;
        cfg.param_bounds = {{0.5, 1.0}};
        cfg.moment_order = 50;
        cfg.dt = 1e-3;
        cfg.T = 15.0;
        cfg.initial_profile = {"constant", {2.0, 1.0}, {}};
        cfg.target_profile = {"constant", {1.0, 0.0}, {}};
        cfg.controller.kind = "explicit_nonlinear";
        cfg.controller.order = 50;
        cfg.controller.c1 = 5.0;
        cfg.controller.c2 = 1.0;
        cfg.record_stride = 50;
    } else if (name == "output-moment-demo") {
        cfg.scenario = "output_moment_demo";
        cfg.grid_points = 1000;
        cfg.param_bounds = {{0.0, 1.0}};
        cfg.moment_order = 10;
        cfg.dt = 1.0;
        cfg.T = 1.0;
        cfg.initial_profile = {"indicator", {}, {0.0, 0.5}};
        cfg.target_profile = {"indicator", {}, {0.5, 1.0}};
        cfg.controller.order = 10;
        cfg.record_stride = 1;
    } else {
        throw InvalidArgument("unknown preset '" + name + "'");
    }
    return cfg;
}

namespace {

json profile_to_json(const ProfileSpec& p) {
    return json{{"kind", p.kind}, {"value", p.value}, {"support", {p.support.lower, p.support.upper}}};
}

json to_json(const ScenarioConfig& cfg) {
    json bounds = json::array();
    for (const auto& b : cfg.param_bounds)
        bounds.push_back({b.lower, b.upper});
    json controller{{"kind", cfg.controller.kind},
                    {"gain", cfg.controller.gain},
                    {"order", cfg.controller.order},
                    {"first_order", cfg.controller.first_order},
                    {"u_max", cfg.controller.u_max ? json(*cfg.controller.u_max) : json(nullptr)},
                    {"singularity_threshold", cfg.controller.singularity_threshold},
                    {"c1", cfg.controller.c1},
                    {"c2", cfg.controller.c2}};
    return json{{"name", cfg.name},
                {"scenario", cfg.scenario},
                {"grid_points", cfg.grid_points},
                {"param_bounds", bounds},
                {"moment_order", cfg.moment_order},
                {"dt", cfg.dt},
                {"T", cfg.T},
                {"initial_profile", profile_to_json(cfg.initial_profile)},
                {"target_profile", profile_to_json(cfg.target_profile)},
                {"controller", controller},
                {"closure", cfg.closure},
                {"target_moments", cfg.target_moments},
                {"stop_on_stall", cfg.stop_on_stall},
                {"record_stride", cfg.record_stride},
                {"output_dir", cfg.output_dir}};
}

// nlohmann converts -3 to a huge size_t without complaint.
std::size_t count_from(const json& j, const std::string& key) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw ParseError("'" + key + "' must be a non-negative integer, got " + j.dump());
    return j.get<std::size_t>();
}

Interval interval_from(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 2)
        throw ParseError("'" + key + "' must be a two-element array [lower, upper]");
    return {j[0].get<double>(), j[1].get<double>()};
}

void apply_profile(const json& j, ProfileSpec& p, const std::string& key) {
    if (!j.is_object())
        throw ParseError("'" + key + "' must be an object");
    for (const auto& [k, v] : j.items()) {
        if (k == "kind")
            p.kind = v.get<std::string>();
        else if (k == "value")
            p.value = v.get<std::vector<double>>();
        else if (k == "support")
            p.support = interval_from(v, key + ".support");
        else
            throw ParseError("unknown config key '" + key + "." + k + "'");
    }
}

void apply_controller(const json& j, ControllerConfig& c) {
    if (!j.is_object())
        throw ParseError("'controller' must be an object");
    for (const auto& [k, v] : j.items()) {
        if (k == "kind")
            c.kind = v.get<std::string>();
        else if (k == "gain")
            c.gain = v.get<double>();
        else if (k == "order")
            c.order = static_cast<unsigned>(count_from(v, "controller.order"));
        else if (k == "first_order")
            c.first_order = static_cast<unsigned>(count_from(v, "controller.first_order"));
        else if (k == "u_max")
            c.u_max = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
        else if (k == "singularity_threshold")
            c.singularity_threshold = v.get<double>();
        else if (k == "c1")
            c.c1 = v.get<double>();
        else if (k == "c2")
            c.c2 = v.get<double>();
        else
            throw ParseError("unknown config key 'controller." + k + "'");
    }
}

void apply(const json& j, ScenarioConfig& cfg) {
    if (!j.is_object())
        throw ParseError("config must be a JSON object");
    for (const auto& [k, v] : j.items()) {
        if (k == "preset")
            continue;
        if (k == "name")
            cfg.name = v.get<std::string>();
        else if (k == "scenario")
            cfg.scenario = v.get<std::string>();
        else if (k == "grid_points")
            cfg.grid_points = count_from(v, k);
        else if (k == "param_bounds") {
            if (!v.is_array())
                throw ParseError("'param_bounds' must be an array of intervals");
            cfg.param_bounds.clear();
            for (const auto& b : v)
                cfg.param_bounds.push_back(interval_from(b, "param_bounds"));
        } else if (k == "moment_order")
            cfg.moment_order = static_cast<unsigned>(count_from(v, k));
        else if (k == "dt")
            cfg.dt = v.get<double>();
        else if (k == "T")
            cfg.T = v.get<double>();
        else if (k == "initial_profile")
            apply_profile(v, cfg.initial_profile, k);
        else if (k == "target_profile")
            apply_profile(v, cfg.target_profile, k);
        else if (k == "controller")
            apply_controller(v, cfg.controller);
        else if (k == "closure")
            cfg.closure = v.get<std::string>();
        else if (k == "target_moments")
            cfg.target_moments = v.get<std::string>();
        else if (k == "stop_on_stall")
            cfg.stop_on_stall = v.get<bool>();
        else if (k == "record_stride")
            cfg.record_stride = count_from(v, k);
        else if (k == "output_dir")
            cfg.output_dir = v.get<std::string>();
        else
            throw ParseError("unknown config key '" + k + "'");
    }
}

ScenarioConfig parse_json(const json& j, const ScenarioConfig& base) {
    ScenarioConfig cfg = base;
    try {
        apply(j, cfg);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config value has the wrong type: ") + e.what());
    }
    return cfg;
}

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed config: ") + e.what());
    }
}

} // namespace

std::string serialize_config(const ScenarioConfig& cfg) { return to_json(cfg).dump(2); }

ScenarioConfig parse_config(const std::string& text, const ScenarioConfig& base) {
    return parse_json(parse_text(text), base);
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const json j = parse_text(buffer.str());
    ScenarioConfig base;
    if (j.is_object() && j.contains("preset"))
        base = preset(j.at("preset").get<std::string>());
    return parse_json(j, base);
}

void set_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;
    }
    const std::string leaf = key.substr(key.rfind('.') + 1);
    static const std::set<std::string> string_keys{"name", "scenario", "output_dir", "closure", "target_moments", "kind"};
    if (!parsed.is_string() && string_keys.count(leaf))
        parsed = value;
    json patch = parsed;
    std::string rest = key;
    std::vector<std::string> parts;
    for (std::size_t pos; (pos = rest.find('.')) != std::string::npos; rest = rest.substr(pos + 1))
        parts.push_back(rest.substr(0, pos));
    parts.push_back(rest);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it)
        patch = json{{*it, patch}};
    cfg = parse_json(patch, cfg);
}

std::string get_config_value(const ScenarioConfig& cfg, const std::string& key) {
    const json all = to_json(cfg);
    const json* node = &all;
    std::string rest = key;
    while (true) {
        const auto pos = rest.find('.');
        const std::string part = rest.substr(0, pos);
        if (!node->is_object() || !node->contains(part))
            throw InvalidArgument("unknown config key '" + key + "'");
        node = &(*node)[part];
        if (pos == std::string::npos)
            break;
        rest = rest.substr(pos + 1);
    }
    return node->is_string() ? node->get<std::string>() : node->dump();
}

} // namespace moment_ensemble
