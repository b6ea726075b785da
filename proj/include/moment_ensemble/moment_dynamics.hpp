#pragma once

#include <array>
#include <optional>
#include <vector>

#include "moment_ensemble/ensemble.hpp"
#include "moment_ensemble/moments.hpp"

namespace moment_ensemble {

/// Rule supplying m_{N+2}, the moment just past the stored chain.
enum class Closure { from_ensemble, hold_last, zero };

[[nodiscard]] const char* to_string(Closure c) noexcept;
[[nodiscard]] Closure closure_from_string(const std::string& name);

using Vec3 = std::array<Real, 3>;

/// Truncated Bloch moment chain: orders 0 .. N+1 of the three magnetization
/// components over the rf-scaling interval [1 - delta, 1 + delta].
struct BlochMomentChain {
    unsigned order = 0; ///< N
    Interval interval{0.9, 1.1};
    MomentSequence moments; ///< d = 1, n = 3, max_order = N + 1
    Closure closure = Closure::hold_last;

    BlochMomentChain() = default;
    BlochMomentChain(unsigned order, Interval interval, MomentSequence moments, Closure closure);

    /// Chain initialized with the closed-form moments of a constant magnetization.
    static BlochMomentChain from_constant(unsigned order, Interval interval, const Vec3& state, Closure closure);
};

/// d/dt m_k = (u Omega_y + v Omega_x) m_{k+1} for k = 0 .. N+1.
/// m_{N+2} comes from the closure; from_ensemble requires `injected_top`.
[[nodiscard]] MomentSequence bloch_moment_rhs(const BlochMomentChain& chain, double u, double v,
                                              std::optional<Vec3> injected_top = std::nullopt);

/// Moment images of the ensemble fields on a profile: the generic (not closed)
/// moment system of a control-affine ensemble.
struct PushforwardMomentSystem {
    const ControlAffineEnsemble* ensemble = nullptr;
    unsigned order = 0;
};

struct MomentImages {
    MomentSequence drift;                 ///< moments of f(x(t, .), .)
    std::vector<MomentSequence> controls; ///< moments of g_i(x(t, .), .)
};

[[nodiscard]] MomentImages moment_images(const PushforwardMomentSystem& sys, const EnsembleProfile& profile);

/// dm/dt = moments(f) + sum_i u_i moments(g_i) evaluated on the current profile.
[[nodiscard]] MomentSequence pushforward_rhs(const PushforwardMomentSystem& sys, const EnsembleProfile& profile,
                                             std::span<const double> u);

/// Moments g-bar_u (Omega_y m_{j+1}) and g-bar_v (Omega_x m_{j+1}) for j = 0 .. order,
/// read from a Bloch moment sequence of order >= order + 1.
[[nodiscard]] MomentImages bloch_control_images(const MomentSequence& moments, unsigned order);

/// One RK4 step of the chain with (u, v) held. `top_at_stage[s]` supplies the
/// closure at stages t, t + dt/2, t + dt/2, t + dt when the closure is from_ensemble.
[[nodiscard]] BlochMomentChain step_chain(const BlochMomentChain& chain, double u, double v, double dt,
                                          const std::optional<std::array<Vec3, 3>>& top_at_stage = std::nullopt);

/// Bloch ensemble and its moment chain advanced in lockstep under one control.
///
/// With the from_ensemble closure the chain's m_{N+2} is read from the
/// ensemble trajectory: exact at step endpoints and cubic-Hermite interpolated
/// at the half step using the ensemble's moment derivative.
class BlochCoSimulation {
public:
    BlochCoSimulation(const ControlAffineEnsemble& ensemble, EnsembleProfile profile, BlochMomentChain chain);

    void advance(std::span<const double> u, double dt);

    [[nodiscard]] const EnsembleProfile& profile() const noexcept { return profile_; }
    [[nodiscard]] const BlochMomentChain& chain() const noexcept { return chain_; }
    [[nodiscard]] double time() const noexcept { return profile_.time(); }

    /// Ensemble moments of the current profile up to the chain's stored order N + 1.
    [[nodiscard]] MomentSequence ensemble_moments() const;

private:
    const ControlAffineEnsemble* ensemble_;
    EnsembleProfile profile_;
    BlochMomentChain chain_;
};

/// Moments of order exactly k (d = 1) of a profile, one value per component.
[[nodiscard]] std::vector<Real> single_order_moment(const EnsembleProfile& profile, const ParameterGrid& grid,
                                                    unsigned k);

struct MomentTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> controls;
    std::vector<MomentSequence> chain;
    std::vector<MomentSequence> ensemble; ///< filled when co-simulating
    std::optional<EnsembleProfile> final_profile;
};

/// A co-simulated Bloch ensemble for the from_ensemble closure.
struct CoEnsemble {
    const ControlAffineEnsemble* ensemble = nullptr;
    EnsembleProfile profile;
};

/// RK4 integration of the chain over [0, horizon]. Feedback signals see the
/// ensemble moments when co-simulating and the chain's own moments otherwise.
[[nodiscard]] MomentTrajectory integrate_moment_chain(const BlochMomentChain& chain, const ControlSignal& signal,
                                                      double dt, double horizon,
                                                      std::optional<CoEnsemble> co_ensemble = std::nullopt,
                                                      std::size_t record_stride = 1);

} // namespace moment_ensemble
