#include "moment_ensemble/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "moment_ensemble/errors.hpp"
#include "moment_ensemble/models.hpp"

namespace moment_ensemble {

EnsembleProfile sample_profile(const ProfileSpec& spec, const ParameterGrid& grid, std::size_t state_dim) {
    EnsembleProfile out(grid.size(), state_dim);
    if (spec.kind == "constant") {
        if (spec.value.size() != state_dim)
            throw InvalidArgument("constant profile has " + std::to_string(spec.value.size()) +
                                  " components, the scenario state has " + std::to_string(state_dim));
        for (std::size_t p = 0; p < grid.size(); ++p)
            std::copy(spec.value.begin(), spec.value.end(), out.state(p).begin());
    } else if (spec.kind == "indicator" || spec.kind == "identity") {
        if (state_dim != 1)
            throw InvalidArgument("profile kind '" + spec.kind + "' is scalar");
        for (std::size_t p = 0; p < grid.size(); ++p) {
            const double b = grid.node(p)[0];
            out(p, 0) = spec.kind == "identity" ? b : (b >= spec.support.lower && b <= spec.support.upper ? 1.0 : 0.0);
        }
    } else {
        throw InvalidArgument("unknown profile kind '" + spec.kind + "'");
    }
    return out;
}

namespace {

FeedbackLaw make_law(const ScenarioConfig& cfg, MomentSequence target) {
    FeedbackLaw law;
    law.kind = law_kind_from_string(cfg.controller.kind);
    law.gain = cfg.controller.gain;
    law.c1 = cfg.controller.c1;
    law.c2 = cfg.controller.c2;
    law.u_max = cfg.controller.u_max;
    law.singularity_threshold = cfg.controller.singularity_threshold;
    law.lyapunov.target = std::move(target);
    law.lyapunov.order = cfg.controller.order;
    law.lyapunov.first_order = cfg.controller.first_order;
    law.lyapunov.validate();
    return law;
}

MomentSequence target_moments(const ScenarioConfig& cfg, const ParameterGrid& grid, const EnsembleProfile& target,
                              unsigned order) {
    if (cfg.target_moments == "analytic" && cfg.target_profile.kind == "constant")
        return constant_profile_moments(cfg.target_profile.value, cfg.param_bounds, order);
    return compute_ensemble_moments(target, grid, order);
}

double sup_error(const EnsembleProfile& a, const EnsembleProfile& b, const ParameterGrid& grid) {
    return lp_distance(a, b, grid, infinity_norm);
}

std::string format_metric(const std::string& key, double value) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s = %.17g", key.c_str(), value);
    return buf;
}

void summarize(ScenarioResult& r) {
    for (const auto& [k, v] : r.metrics)
        r.report.push_back(format_metric(k, v));
}

ScenarioResult begin_result(const ScenarioConfig& cfg, ParameterGrid grid) {
    return ScenarioResult{cfg.name, cfg.scenario, std::move(grid), {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
}

} // namespace

ScenarioResult run_bloch(const ScenarioConfig& cfg) {
    cfg.validate();
    if (cfg.param_bounds.size() != 1)
        throw InvalidArgument("the Bloch scenario has one parameter axis");
    const unsigned N = cfg.controller.order;
    const auto ens = make_bloch_ensemble(ParameterGrid::uniform_midpoint(cfg.param_bounds[0], cfg.grid_points));
    const auto& grid = ens.grid;
    const EnsembleProfile initial = sample_profile(cfg.initial_profile, grid, 3);
    const EnsembleProfile target = sample_profile(cfg.target_profile, grid, 3);
    FeedbackLaw law = make_law(cfg, target_moments(cfg, grid, target, N + 1));
    if (law.kind == LawKind::explicit_nonlinear)
        throw InvalidArgument("explicit_nonlinear control does not apply to the Bloch ensemble");

    BlochMomentChain chain(N, cfg.param_bounds[0], compute_ensemble_moments(initial, grid, N + 1),
                           closure_from_string(cfg.closure));
    BlochCoSimulation sim(ens, initial, std::move(chain));

    ScenarioResult r = begin_result(cfg, grid);
    r.control_names = {"u", "v"};
    r.model_moments_label = "moment_chain";

    std::vector<double> norms0(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const auto x = initial.state(p);
        norms0[p] = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    }

    // Distance between the analytic target moments and what the grid can represent;
    // errors at this level are not a stall away from the target.
    const double floor = std::sqrt(lyapunov_value(law.lyapunov, compute_ensemble_moments(target, grid, N + 1)));

    const StepPlan plan = plan_steps(cfg.dt, cfg.T);
    double prev_v = 0.0, max_increase = 0.0, max_drift = 0.0, max_gap = 0.0;
    double min_gradient = INFINITY, initial_v = 0.0, max_abs_u = 0.0;
    for (std::size_t n = 0;; ++n) {
        const double t = sim.time();
        const MomentSequence m = sim.ensemble_moments();
        const double v_now = lyapunov_value(law.lyapunov, m);
        if (n == 0)
            initial_v = v_now;
        else
            max_increase = std::max(max_increase, v_now - prev_v);
        prev_v = v_now;

        const MomentImages images = bloch_control_images(m, N);
        std::vector<double> u;
        std::vector<MomentSequence> active;
        if (law.kind == LawKind::explicit_bloch) {
            u = explicit_bloch_control(law, m);
            active = {images.controls[0]};
        } else {
            u = gradient_damping_control(law, m, images.drift, images.controls);
            active = images.controls;
        }
        clamp_controls(law, u);
        for (double x : u)
            max_abs_u = std::max(max_abs_u, std::abs(x));

        const auto status = singularity_monitor(law.lyapunov, m, active, law.singularity_threshold);
        min_gradient = std::min(min_gradient, status.gradient_norm);
        if (status.near_singular && status.error_norm > floor + law.singularity_threshold && cfg.stop_on_stall)
            throw NumericalFailure("singularity stall at t = " + std::to_string(t) + ": |grad V . g-bar| = " +
                                   std::to_string(status.gradient_norm) + " while |e| = " +
                                   std::to_string(status.error_norm));

        for (unsigned k = 0; k <= N; ++k)
            for (std::size_t c = 0; c < 3; ++c)
                max_gap = std::max(max_gap, static_cast<double>(std::abs(m.at(k, c) - sim.chain().moments.at(k, c))));
        for (std::size_t p = 0; p < grid.size(); ++p) {
            const auto x = sim.profile().state(p);
            max_drift = std::max(max_drift, std::abs(std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) - norms0[p]));
        }

        const bool last = n == plan.steps;
        if (n % cfg.record_stride == 0 || last) {
            r.times.push_back(t);
            r.profiles.push_back(sim.profile());
            r.controls.push_back(u);
            r.lyapunov.push_back(v_now);
            r.moments.push_back(m.truncated(N));
            r.model_moments.push_back(sim.chain().moments);
        }
        if (last)
            break;
        sim.advance(u, n + 1 == plan.steps ? plan.last_dt : cfg.dt);
    }

    const EnsembleProfile& final_profile = sim.profile();
    r.metrics["final_sup_error"] = sup_error(final_profile, target, grid);
    r.metrics["final_l2_error"] = lp_distance(final_profile, target, grid, 2.0);
    r.metrics["initial_V"] = initial_v;
    r.metrics["final_V"] = prev_v;
    r.metrics["final_chain_V"] = lyapunov_value(law.lyapunov, sim.chain().moments);
    r.metrics["max_lyapunov_increase"] = max_increase;
    r.metrics["max_norm_drift"] = max_drift;
    r.metrics["max_chain_gap"] = max_gap;
    r.metrics["min_gradient_norm"] = min_gradient;
    r.metrics["max_abs_control"] = max_abs_u;
    r.metrics["target_quadrature_floor"] = floor;
    r.metrics["steps"] = static_cast<double>(plan.steps);
    summarize(r);
    return r;
}

ScenarioResult run_nonlinear(const ScenarioConfig& cfg) {
    cfg.validate();
    if (cfg.param_bounds.size() != 1)
        throw InvalidArgument("the nonlinear scenario has one parameter axis");
    const unsigned N = cfg.controller.order;
    const auto ens = make_nonlinear_ensemble(ParameterGrid::uniform_midpoint(cfg.param_bounds[0], cfg.grid_points));
    const auto& grid = ens.grid;
    const EnsembleProfile initial = sample_profile(cfg.initial_profile, grid, 2);
    const EnsembleProfile target = sample_profile(cfg.target_profile, grid, 2);
    FeedbackLaw law = make_law(cfg, target_moments(cfg, grid, target, N));
    if (law.kind == LawKind::explicit_bloch)
        throw InvalidArgument("explicit_bloch control does not apply to the nonlinear ensemble");
    const PushforwardMomentSystem system{&ens, N};

    ScenarioResult r = begin_result(cfg, grid);
    r.control_names = {"u"};
    r.model_moments_label = "moment_derivative";

    const StepPlan plan = plan_steps(cfg.dt, cfg.T);
    EnsembleProfile profile = initial;
    double v_now = 0.0, initial_v = 0.0, max_abs_u = 0.0, min_sup = INFINITY;
    for (std::size_t n = 0;; ++n) {
        const MomentSequence m = compute_ensemble_moments(profile, grid, N);
        const MomentSequence e = m - law.lyapunov.target;
        v_now = lyapunov_value(law.lyapunov, m);
        if (n == 0)
            initial_v = v_now;
        std::vector<double> u;
        if (law.kind == LawKind::explicit_nonlinear) {
            u = {explicit_nonlinear_control(law, e)};
        } else {
            const MomentImages images = moment_images(system, profile);
            u = gradient_damping_control(law, m, images.drift, images.controls);
            const auto status = singularity_monitor(law.lyapunov, m, images.controls, law.singularity_threshold);
            if (status.near_singular && cfg.stop_on_stall)
                throw NumericalFailure("singularity stall at t = " + std::to_string(profile.time()));
        }
        clamp_controls(law, u);
        max_abs_u = std::max(max_abs_u, std::abs(u[0]));
        min_sup = std::min(min_sup, sup_error(profile, target, grid));

        const bool last = n == plan.steps;
        if (n % cfg.record_stride == 0 || last) {
            r.times.push_back(profile.time());
            r.profiles.push_back(profile);
            r.controls.push_back(u);
            r.lyapunov.push_back(v_now);
            r.moments.push_back(m);
            r.model_moments.push_back(pushforward_rhs(system, profile, u));
        }
        if (last)
            break;
        const double h = n + 1 == plan.steps ? plan.last_dt : cfg.dt;
        profile = step(ens, profile, u, h);
    }

    r.metrics["final_sup_error"] = sup_error(profile, target, grid);
    r.metrics["final_l2_error"] = lp_distance(profile, target, grid, 2.0);
    r.metrics["min_sup_error"] = min_sup;
    r.metrics["initial_V"] = initial_v;
    r.metrics["final_V"] = v_now;
    r.metrics["final_control"] = r.controls.back()[0];
    r.metrics["max_abs_control"] = max_abs_u;
    r.metrics["steps"] = static_cast<double>(plan.steps);
    summarize(r);
    return r;
}

ScenarioResult run_output_moment_demo(const ScenarioConfig& cfg) {
    cfg.validate();
    const auto grid = [&] {
        std::vector<std::size_t> points(cfg.param_bounds.size(), cfg.grid_points);
        return ParameterGrid::uniform_midpoint(cfg.param_bounds, points);
    }();
    const std::size_t dim = cfg.initial_profile.kind == "constant" ? cfg.initial_profile.value.size() : 1;
    const EnsembleProfile a = sample_profile(cfg.initial_profile, grid, dim);
    const EnsembleProfile b = sample_profile(cfg.target_profile, grid, dim);
    const MomentSequence ma = compute_output_moments(a, grid, cfg.moment_order);
    const MomentSequence mb = compute_output_moments(b, grid, cfg.moment_order);

    ScenarioResult r = begin_result(cfg, grid);
    r.times = {0.0, 0.0};
    r.profiles = {a, b};
    r.moments = {ma, mb};
    r.metrics["radical_distance"] = static_cast<double>(radical_distance(ma, mb));
    r.metrics["l2_distance"] = lp_distance(a, b, grid, 2.0);
    r.metrics["linf_distance"] = lp_distance(a, b, grid, infinity_norm);
    Real dev_a = 0, dev_b = 0;
    for (std::size_t k = 0; k < ma.index_count(); ++k)
        dev_a = std::max(dev_a, std::abs(ma.at_rank(k, 0) - mb.at_rank(k, 0)));
    r.metrics["max_moment_difference"] = static_cast<double>(dev_a);
    (void)dev_b;
    r.report.push_back("output moments (initial_profile vs target_profile):");
    for (std::size_t k = 0; k < ma.index_count(); ++k) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "  k = %s  %.17Lg  %.17Lg", ma.index_set().at(k).to_string().c_str(),
                      ma.at_rank(k, 0), mb.at_rank(k, 0));
        r.report.emplace_back(buf);
    }
    summarize(r);
    return r;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    if (cfg.scenario == "bloch")
        return run_bloch(cfg);
    if (cfg.scenario == "nonlinear")
        return run_nonlinear(cfg);
    return run_output_moment_demo(cfg);
}

} // namespace moment_ensemble
