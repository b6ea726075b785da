#pragma once

#include <optional>
#include <string>
#include <vector>

#include "moment_ensemble/moment_dynamics.hpp"
#include "moment_ensemble/moments.hpp"

namespace moment_ensemble {

/// V(m) = sum_{first_order <= |j| <= order} w_{|j|} |m_j - target_j|^2.
struct QuadraticLyapunov {
    MomentSequence target;
    unsigned order = 0;
    unsigned first_order = 0;
    std::vector<double> weights; ///< per order 0..order; empty means all ones

    [[nodiscard]] double weight(unsigned j) const { return weights.empty() ? 1.0 : weights.at(j); }
    void validate() const;
};

[[nodiscard]] double lyapunov_value(const QuadraticLyapunov& L, const MomentSequence& m);

/// Analytic gradient 2 w (m - target) on the Lyapunov window, zero elsewhere.
/// Same shape as the target.
[[nodiscard]] MomentSequence lyapunov_gradient(const QuadraticLyapunov& L, const MomentSequence& m);

/// Truncated inner product sum_{window} w_{|j|} e_j . field_j, i.e. half of <grad L, field>.
[[nodiscard]] Real damping_product(const QuadraticLyapunov& L, const MomentSequence& m, const MomentSequence& field);

enum class LawKind { gradient_damping, explicit_bloch, explicit_nonlinear };

[[nodiscard]] const char* to_string(LawKind k) noexcept;
[[nodiscard]] LawKind law_kind_from_string(const std::string& name);

struct FeedbackLaw {
    LawKind kind = LawKind::gradient_damping;
    double gain = 1.0;
    QuadraticLyapunov lyapunov;
    double c1 = 5.0; ///< explicit_nonlinear coefficient on the first state channel
    double c2 = 1.0; ///< explicit_nonlinear coefficient on the second state channel
    std::optional<double> u_max;
    double singularity_threshold = 1e-9;
};

/// u_i = -gain * sum_{window} w e_j . g-bar_{i,j}. With the Lyapunov function
/// V = sum w |e|^2 this is u = -(gain / 2) <grad V, g-bar_i>, so dV/dt along the
/// moment system equals grad V . f-bar - (2 / gain) |u|^2.
[[nodiscard]] std::vector<double> gradient_damping_control(const FeedbackLaw& law, const MomentSequence& m,
                                                           const MomentSequence& bar_f,
                                                           const std::vector<MomentSequence>& bar_g);

/// Verbatim Bloch law: u = -gain * sum_j (e_{1,j} m_{3,j+1} - e_{3,j} m_{1,j+1}), v = 0.
/// `m` must hold orders through lyapunov.order + 1.
[[nodiscard]] std::vector<double> explicit_bloch_control(const FeedbackLaw& law, const MomentSequence& m);

/// u = -gain * sum_j (c1 e_{1,j} + c2 e_{2,j}) over the Lyapunov window.
[[nodiscard]] double explicit_nonlinear_control(const FeedbackLaw& law, const MomentSequence& e);

/// Symmetric clamp |u_i| <= u_max when configured.
void clamp_controls(const FeedbackLaw& law, std::vector<double>& u);

/// dV/dt = grad V . (f-bar + sum_i u_i g-bar_i).
[[nodiscard]] double lyapunov_derivative(const QuadraticLyapunov& L, const MomentSequence& m,
                                         const MomentSequence& bar_f, const std::vector<MomentSequence>& bar_g,
                                         const std::vector<double>& u);

struct SingularityStatus {
    bool near_singular = false;
    double gradient_norm = 0.0; ///< |(<grad V, g-bar_1>, ..., <grad V, g-bar_l>)|
    double error_norm = 0.0;    ///< sqrt(V)
};

/// Flags a stall: the control directions are orthogonal to grad V while the
/// moment error is still above the threshold.
[[nodiscard]] SingularityStatus singularity_monitor(const QuadraticLyapunov& L, const MomentSequence& m,
                                                    const std::vector<MomentSequence>& bar_g, double threshold);

} // namespace moment_ensemble
