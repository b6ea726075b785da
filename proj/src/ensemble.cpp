#include "moment_ensemble/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "moment_ensemble/errors.hpp"

namespace moment_ensemble {

namespace {

void require_shape(const ControlAffineEnsemble& ens, const EnsembleProfile& profile) {
    if (profile.nodes() != ens.grid.size() || profile.state_dim() != ens.state_dim)
        throw InvalidArgument("profile shape " + std::to_string(profile.nodes()) + "x" +
                              std::to_string(profile.state_dim()) + " does not match ensemble " +
                              std::to_string(ens.grid.size()) + "x" + std::to_string(ens.state_dim));
}

} // namespace

void evaluate_rhs(const ControlAffineEnsemble& ens, const EnsembleProfile& profile, std::span<const double> u,
                  EnsembleProfile& rhs) {
    require_shape(ens, profile);
    if (u.size() != ens.control_dim())
        throw InvalidArgument("control vector has " + std::to_string(u.size()) + " entries, ensemble takes " +
                              std::to_string(ens.control_dim()));
    if (rhs.nodes() != profile.nodes() || rhs.state_dim() != profile.state_dim())
        rhs = EnsembleProfile(profile.nodes(), profile.state_dim());
    std::vector<double> scratch(ens.state_dim);
    for (std::size_t p = 0; p < profile.nodes(); ++p) {
        auto out = rhs.state(p);
        std::fill(out.begin(), out.end(), 0.0);
        const auto x = profile.state(p);
        const auto beta = ens.grid.node(p);
        if (ens.drift)
            ens.drift(x, beta, out);
        for (std::size_t i = 0; i < ens.controls.size(); ++i) {
            if (u[i] == 0.0)
                continue;
            std::fill(scratch.begin(), scratch.end(), 0.0);
            ens.controls[i](x, beta, scratch);
            for (std::size_t c = 0; c < ens.state_dim; ++c)
                out[c] += u[i] * scratch[c];
        }
    }
}

EnsembleProfile evaluate_field(const ControlAffineEnsemble& ens, const VectorField& field,
                               const EnsembleProfile& profile) {
    require_shape(ens, profile);
    EnsembleProfile out(profile.nodes(), profile.state_dim(), profile.time());
    if (!field)
        return out;
    for (std::size_t p = 0; p < profile.nodes(); ++p)
        field(profile.state(p), ens.grid.node(p), out.state(p));
    return out;
}

EnsembleProfile step(const ControlAffineEnsemble& ens, const EnsembleProfile& profile, std::span<const double> u,
                     double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw InvalidArgument("time step must be positive and finite");
    for (double ui : u)
        if (!std::isfinite(ui))
            throw NumericalFailure("non-finite control input at t = " + std::to_string(profile.time()));
    EnsembleProfile k1, k2, k3, k4;
    EnsembleProfile stage = profile;
    auto& y = stage.values();
    const auto& y0 = profile.values();

    evaluate_rhs(ens, profile, u, k1);
    for (std::size_t s = 0; s < y.size(); ++s)
        y[s] = y0[s] + 0.5 * dt * k1.values()[s];
    evaluate_rhs(ens, stage, u, k2);
    for (std::size_t s = 0; s < y.size(); ++s)
        y[s] = y0[s] + 0.5 * dt * k2.values()[s];
    evaluate_rhs(ens, stage, u, k3);
    for (std::size_t s = 0; s < y.size(); ++s)
        y[s] = y0[s] + dt * k3.values()[s];
    evaluate_rhs(ens, stage, u, k4);

    EnsembleProfile next(profile.nodes(), profile.state_dim(), profile.time() + dt);
    auto& out = next.values();
    for (std::size_t s = 0; s < out.size(); ++s) {
        out[s] = y0[s] + dt / 6.0 * (k1.values()[s] + 2.0 * k2.values()[s] + 2.0 * k3.values()[s] + k4.values()[s]);
        if (!std::isfinite(out[s]) || std::abs(out[s]) > blow_up_bound)
            throw NumericalFailure("integration blow-up at node " + std::to_string(s / profile.state_dim()) +
                                   " near t = " + std::to_string(next.time()));
    }
    return next;
}

StepPlan plan_steps(double dt, double horizon) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw InvalidArgument("time step must be positive and finite");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw InvalidArgument("horizon must be positive and finite");
    const double ratio = horizon / dt;
    auto steps = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(steps)) <= 1e-9 * std::max(1.0, ratio))
        return {std::max<std::size_t>(steps, 1), steps == 0 ? horizon : dt};
    steps = static_cast<std::size_t>(std::ceil(ratio));
    return {steps, horizon - dt * static_cast<double>(steps - 1)};
}

namespace {

struct Evaluation {
    std::vector<double> control;
    std::optional<MomentSequence> moments;
};

Evaluation evaluate_signal(const ControlAffineEnsemble& ens, const ControlSignal& signal,
                           const EnsembleProfile& profile) {
    Evaluation e;
    if (const auto* open = std::get_if<OpenLoopSignal>(&signal)) {
        e.control = open->law(profile.time());
    } else {
        const auto& fb = std::get<FeedbackSignal>(signal);
        e.moments = compute_ensemble_moments(profile, ens.grid, fb.order);
        e.control = fb.law(*e.moments, profile.time());
    }
    if (e.control.size() != ens.control_dim())
        throw InvalidArgument("control signal returned " + std::to_string(e.control.size()) + " inputs, expected " +
                              std::to_string(ens.control_dim()));
    for (double u : e.control)
        if (!std::isfinite(u))
            throw NumericalFailure("control signal returned a non-finite input at t = " +
                                   std::to_string(profile.time()));
    return e;
}

} // namespace

Trajectory simulate(const ControlAffineEnsemble& ens, const EnsembleProfile& profile0, const ControlSignal& signal,
                    double dt, double horizon, const std::vector<Observer>& observers, SimulationOptions options) {
    require_shape(ens, profile0);
    const StepPlan plan = plan_steps(dt, horizon);
    const std::size_t stride = std::max<std::size_t>(options.record_stride, 1);
    Trajectory traj;
    for (const auto& o : observers)
        traj.observer_names.push_back(o.name);

    auto record = [&](const EnsembleProfile& profile, Evaluation& eval) {
        TrajectorySample s;
        s.time = profile.time();
        if (options.record_profiles)
            s.profile = profile;
        s.control = eval.control;
        for (const auto& o : observers)
            s.observed.push_back(o.evaluate(profile, eval.moments ? &*eval.moments : nullptr, eval.control));
        s.moments = std::move(eval.moments);
        traj.samples.push_back(std::move(s));
    };

    EnsembleProfile current = profile0;
    for (std::size_t n = 0; n < plan.steps; ++n) {
        Evaluation eval = evaluate_signal(ens, signal, current);
        const std::vector<double> u = eval.control;
        if (n % stride == 0)
            record(current, eval);
        const double h = (n + 1 == plan.steps) ? plan.last_dt : dt;
        const double t_next = profile0.time() + (n + 1 == plan.steps ? horizon : dt * static_cast<double>(n + 1));
        current = step(ens, current, u, h);
        current.set_time(t_next);
    }
    Evaluation last = evaluate_signal(ens, signal, current);
    record(current, last);
    return traj;
}

double lp_distance(const EnsembleProfile& a, const EnsembleProfile& b, const ParameterGrid& grid, double p) {
    if (a.nodes() != b.nodes() || a.state_dim() != b.state_dim() || a.nodes() != grid.size())
        throw InvalidArgument("L^p distance needs profiles of matching shape on the grid");
    const bool sup = p == infinity_norm || std::isinf(p);
    if (!sup && !(p >= 1.0))
        throw InvalidArgument("L^p distance needs p >= 1 or p = infinity");
    std::vector<Real> terms(a.nodes());
    Real max_norm = 0;
    for (std::size_t q = 0; q < a.nodes(); ++q) {
        Real sq = 0;
        for (std::size_t i = 0; i < a.state_dim(); ++i) {
            const Real diff = Real(a(q, i)) - Real(b(q, i));
            sq += diff * diff;
        }
        const Real norm = std::sqrt(sq);
        max_norm = std::max(max_norm, norm);
        terms[q] = Real(grid.weights()[q]) * std::pow(norm, Real(p));
    }
    if (sup)
        return static_cast<double>(max_norm);
    return static_cast<double>(std::pow(pairwise_sum(terms), Real(1) / Real(p)));
}

} // namespace moment_ensemble
