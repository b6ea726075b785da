#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "moment_ensemble/controller.hpp"
#include "moment_ensemble/ensemble.hpp"
#include "moment_ensemble/moment_dynamics.hpp"

namespace moment_ensemble {

/// A profile given by name: constant vector, interval indicator, or identity x = beta_1.
struct ProfileSpec {
    std::string kind = "constant"; ///< constant | indicator | identity
    std::vector<double> value;     ///< constant
    Interval support{0.0, 0.5};    ///< indicator

    friend bool operator==(const ProfileSpec&, const ProfileSpec&) = default;
};

struct ControllerConfig {
    std::string kind = "gradient_damping";
    double gain = 1.0;
    unsigned order = 0;
    unsigned first_order = 1;
    std::optional<double> u_max;
    double singularity_threshold = 1e-9;
    double c1 = 5.0;
    double c2 = 1.0;

    friend bool operator==(const ControllerConfig&, const ControllerConfig&) = default;
};

struct ScenarioConfig {
    std::string name;
    std::string scenario = "bloch"; ///< bloch | nonlinear | output_moment_demo
    std::size_t grid_points = 300;
    std::vector<Interval> param_bounds{{0.9, 1.1}};
    unsigned moment_order = 35;
    double dt = 1e-3;
    double T = 2.0;
    ProfileSpec initial_profile;
    ProfileSpec target_profile;
    ControllerConfig controller;
    std::string closure = "from_ensemble";
    std::string target_moments = "analytic"; ///< analytic | quadrature
    bool stop_on_stall = true;
    std::size_t record_stride = 10;
    std::string output_dir;

    void validate() const;
    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Names of the compiled-in presets.
[[nodiscard]] std::vector<std::string> preset_names();
/// Throws InvalidArgument for an unknown preset.
[[nodiscard]] ScenarioConfig preset(const std::string& name);

/// JSON text with every field spelled out.
[[nodiscard]] std::string serialize_config(const ScenarioConfig& cfg);
/// Parses a full config. Missing keys keep the values of `base`.
[[nodiscard]] ScenarioConfig parse_config(const std::string& text, const ScenarioConfig& base = {});
/// Reads a config file. A top-level "preset" key selects the base configuration;
/// the remaining keys override it key by key.
[[nodiscard]] ScenarioConfig load_config_file(const std::string& path);
/// Applies one override such as ("dt", "0.002") or ("controller.gain", "0").
void set_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value);
/// Current value of a dotted key: strings verbatim, anything else as JSON.
[[nodiscard]] std::string get_config_value(const ScenarioConfig& cfg, const std::string& key);

[[nodiscard]] EnsembleProfile sample_profile(const ProfileSpec& spec, const ParameterGrid& grid,
                                             std::size_t state_dim);

struct ScenarioResult {
    std::string name;
    std::string scenario;
    ParameterGrid grid;
    std::vector<std::string> control_names;
    std::vector<double> times;
    std::vector<EnsembleProfile> profiles;   ///< recorded states
    std::vector<std::vector<double>> controls;
    std::vector<double> lyapunov;            ///< V on the ensemble moments
    std::vector<MomentSequence> moments;     ///< ensemble moments (orders 0..N)
    std::vector<MomentSequence> model_moments; ///< moment-system state (chain / pushforward derivative)
    std::string model_moments_label;
    std::map<std::string, double> metrics;
    std::vector<std::string> report; ///< human-readable summary lines
};

/// Bloch ensemble co-simulated with its moment chain under moment feedback.
[[nodiscard]] ScenarioResult run_bloch(const ScenarioConfig& cfg);
/// Nonlinear ensemble under the fixed linear moment law.
[[nodiscard]] ScenarioResult run_nonlinear(const ScenarioConfig& cfg);
/// Output moments of two profiles, their radical distance and L2 distance.
[[nodiscard]] ScenarioResult run_output_moment_demo(const ScenarioConfig& cfg);
/// Dispatches on cfg.scenario.
[[nodiscard]] ScenarioResult run_scenario(const ScenarioConfig& cfg);

} // namespace moment_ensemble
