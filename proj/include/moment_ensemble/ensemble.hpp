#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "moment_ensemble/grid.hpp"
#include "moment_ensemble/moments.hpp"
#include "moment_ensemble/profile.hpp"

namespace moment_ensemble {

/// out = F(x, beta). `out` has the state dimension and is zeroed by the caller.
using VectorField = std::function<void(std::span<const double> x, std::span<const double> beta, std::span<double> out)>;

/// d/dt x(t, beta) = f(x, beta) + sum_i u_i(t) g_i(x, beta) over a parameter grid.
struct ControlAffineEnsemble {
    std::size_t state_dim = 0;
    VectorField drift;                 ///< empty means f == 0
    std::vector<VectorField> controls; ///< g_1 .. g_l
    ParameterGrid grid;

    [[nodiscard]] std::size_t control_dim() const noexcept { return controls.size(); }
};

/// Writes f(x_p, beta_p) + sum_i u_i g_i(x_p, beta_p) for every node into `rhs`.
void evaluate_rhs(const ControlAffineEnsemble& ens, const EnsembleProfile& profile, std::span<const double> u,
                  EnsembleProfile& rhs);

/// Profile of a single field g evaluated at every node (used for moment images of fields).
[[nodiscard]] EnsembleProfile evaluate_field(const ControlAffineEnsemble& ens, const VectorField& field,
                                             const EnsembleProfile& profile);

/// States with any |x_i| above this bound abort the integration.
inline constexpr double blow_up_bound = 1e6;

/// One classical RK4 step of every node with u held constant over [t, t + dt].
/// Throws NumericalFailure naming the node when a state becomes non-finite or exceeds blow_up_bound.
[[nodiscard]] EnsembleProfile step(const ControlAffineEnsemble& ens, const EnsembleProfile& profile,
                                   std::span<const double> u, double dt);

struct OpenLoopSignal {
    std::function<std::vector<double>(double time)> law;
};

/// Moment feedback: the simulator computes ensemble moments up to `order` on the
/// current profile and passes them to the law at every step.
struct FeedbackSignal {
    std::function<std::vector<double>(const MomentSequence& moments, double time)> law;
    unsigned order = 0;
};

using ControlSignal = std::variant<OpenLoopSignal, FeedbackSignal>;

/// Scalar quantity recorded alongside the trajectory.
struct Observer {
    std::string name;
    std::function<double(const EnsembleProfile& profile, const MomentSequence* moments, std::span<const double> u)>
        evaluate;
};

struct TrajectorySample {
    double time = 0.0;
    EnsembleProfile profile;
    std::vector<double> control;
    std::optional<MomentSequence> moments;
    std::vector<double> observed;
};

struct Trajectory {
    std::vector<std::string> observer_names;
    std::vector<TrajectorySample> samples;
};

struct SimulationOptions {
    std::size_t record_stride = 1; ///< record every stride-th step; the final state is always recorded
    bool record_profiles = true;
};

/// Integrates from profile0.time() to profile0.time() + horizon in steps of dt
/// (the last step is shortened to land on the horizon).
[[nodiscard]] Trajectory simulate(const ControlAffineEnsemble& ens, const EnsembleProfile& profile0,
                                  const ControlSignal& signal, double dt, double horizon,
                                  const std::vector<Observer>& observers = {}, SimulationOptions options = {});

/// Number of steps and the length of the final step for a horizon split into dt steps.
struct StepPlan {
    std::size_t steps = 0;
    double last_dt = 0.0;
};
[[nodiscard]] StepPlan plan_steps(double dt, double horizon);

inline constexpr double infinity_norm = -1.0;

/// Quadrature L^p distance between profiles, using the Euclidean norm of the
/// state difference at each node. Pass p = infinity_norm for the max over nodes.
[[nodiscard]] double lp_distance(const EnsembleProfile& a, const EnsembleProfile& b, const ParameterGrid& grid,
                                 double p);

} // namespace moment_ensemble
