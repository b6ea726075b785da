#include "moment_ensemble/moment_dynamics.hpp"

#include <cmath>
#include <string>

#include "moment_ensemble/errors.hpp"
#include "moment_ensemble/models.hpp"

namespace moment_ensemble {

const char* to_string(Closure c) noexcept {
    switch (c) {
    case Closure::from_ensemble:
        return "from_ensemble";
    case Closure::hold_last:
        return "hold_last";
    case Closure::zero:
        return "zero";
    }
    return "unknown";
}

Closure closure_from_string(const std::string& name) {
    if (name == "from_ensemble")
        return Closure::from_ensemble;
    if (name == "hold_last")
        return Closure::hold_last;
    if (name == "zero")
        return Closure::zero;
    throw InvalidArgument("unknown closure '" + name + "' (expected from_ensemble, hold_last or zero)");
}

BlochMomentChain::BlochMomentChain(unsigned order_, Interval interval_, MomentSequence moments_, Closure closure_)
    : order(order_), interval(interval_), moments(std::move(moments_)), closure(closure_) {
    if (moments.index_dim() != 1 || moments.state_dim() != 3 || moments.max_order() != order + 1)
        throw InvalidArgument("Bloch chain of order " + std::to_string(order) +
                              " needs a 1-D, 3-component moment sequence through order " +
                              std::to_string(order + 1));
    if (!moments.all_finite())
        throw InvalidArgument("Bloch chain moments must be finite");
}

BlochMomentChain BlochMomentChain::from_constant(unsigned order, Interval interval, const Vec3& state,
                                                 Closure closure) {
    const std::array<double, 3> value{static_cast<double>(state[0]), static_cast<double>(state[1]),
                                      static_cast<double>(state[2])};
    const std::array<Interval, 1> box{interval};
    return BlochMomentChain(order, interval, constant_profile_moments(value, box, order + 1), closure);
}

namespace {

Vec3 closure_value(const MomentSequence& m, unsigned top_order, Closure closure, const std::optional<Vec3>& injected) {
    switch (closure) {
    case Closure::hold_last:
        return {m.at(top_order, 0), m.at(top_order, 1), m.at(top_order, 2)};
    case Closure::zero:
        return {0, 0, 0};
    case Closure::from_ensemble:
        if (!injected)
            throw InvalidArgument("from_ensemble closure selected but no ensemble moment was injected");
        return *injected;
    }
    return {0, 0, 0};
}

MomentSequence chain_rhs(const MomentSequence& m, Closure closure, double u, double v,
                         const std::optional<Vec3>& injected) {
    const unsigned top = m.max_order();
    MomentSequence out(1, 3, top);
    const Vec3 beyond = closure_value(m, top, closure, injected);
    Real next[3], ry[3], rx[3];
    for (unsigned k = 0; k <= top; ++k) {
        for (std::size_t c = 0; c < 3; ++c)
            next[c] = k < top ? m.at(k + 1, c) : beyond[c];
        apply_omega_y(next, ry);
        apply_omega_x(next, rx);
        for (std::size_t c = 0; c < 3; ++c)
            out.at(k, c) = Real(u) * ry[c] + Real(v) * rx[c];
    }
    return out;
}

} // namespace

MomentSequence bloch_moment_rhs(const BlochMomentChain& chain, double u, double v, std::optional<Vec3> injected_top) {
    return chain_rhs(chain.moments, chain.closure, u, v, injected_top);
}

BlochMomentChain step_chain(const BlochMomentChain& chain, double u, double v, double dt,
                            const std::optional<std::array<Vec3, 3>>& top_at_stage) {
    if (!(dt > 0.0))
        throw InvalidArgument("time step must be positive");
    auto top = [&](std::size_t s) -> std::optional<Vec3> {
        if (top_at_stage)
            return (*top_at_stage)[s];
        return std::nullopt;
    };
    const Real h = dt;
    const MomentSequence& y0 = chain.moments;
    const MomentSequence k1 = chain_rhs(y0, chain.closure, u, v, top(0));
    const MomentSequence k2 = chain_rhs(y0 + (h / 2) * k1, chain.closure, u, v, top(1));
    const MomentSequence k3 = chain_rhs(y0 + (h / 2) * k2, chain.closure, u, v, top(1));
    const MomentSequence k4 = chain_rhs(y0 + h * k3, chain.closure, u, v, top(2));
    BlochMomentChain next = chain;
    auto& out = next.moments.values();
    for (std::size_t s = 0; s < out.size(); ++s)
        out[s] += h / 6 * (k1.values()[s] + 2 * k2.values()[s] + 2 * k3.values()[s] + k4.values()[s]);
    if (!next.moments.all_finite())
        throw NumericalFailure("moment chain integration produced a non-finite moment");
    return next;
}

MomentImages moment_images(const PushforwardMomentSystem& sys, const EnsembleProfile& profile) {
    if (sys.ensemble == nullptr)
        throw InvalidArgument("pushforward moment system has no ensemble");
    const auto& ens = *sys.ensemble;
    MomentImages images;
    images.drift = compute_ensemble_moments(evaluate_field(ens, ens.drift, profile), ens.grid, sys.order);
    for (const auto& g : ens.controls)
        images.controls.push_back(compute_ensemble_moments(evaluate_field(ens, g, profile), ens.grid, sys.order));
    return images;
}

MomentSequence pushforward_rhs(const PushforwardMomentSystem& sys, const EnsembleProfile& profile,
                               std::span<const double> u) {
    if (sys.ensemble == nullptr)
        throw InvalidArgument("pushforward moment system has no ensemble");
    if (u.size() != sys.ensemble->control_dim())
        throw InvalidArgument("control vector has " + std::to_string(u.size()) + " entries, ensemble takes " +
                              std::to_string(sys.ensemble->control_dim()));
    MomentImages images = moment_images(sys, profile);
    MomentSequence out = std::move(images.drift);
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] != 0.0)
            out += Real(u[i]) * images.controls[i];
    return out;
}

MomentImages bloch_control_images(const MomentSequence& moments, unsigned order) {
    if (moments.index_dim() != 1 || moments.state_dim() != 3)
        throw InvalidArgument("Bloch control images need a 1-D, 3-component moment sequence");
    if (moments.max_order() < order + 1)
        throw InvalidArgument("Bloch control images up to order " + std::to_string(order) + " need moments of order " +
                              std::to_string(order + 1));
    MomentImages images{MomentSequence(1, 3, order), {MomentSequence(1, 3, order), MomentSequence(1, 3, order)}};
    Real next[3], out[3];
    for (unsigned j = 0; j <= order; ++j) {
        for (std::size_t c = 0; c < 3; ++c)
            next[c] = moments.at(j + 1, c);
        apply_omega_y(next, out);
        for (std::size_t c = 0; c < 3; ++c)
            images.controls[0].at(j, c) = out[c];
        apply_omega_x(next, out);
        for (std::size_t c = 0; c < 3; ++c)
            images.controls[1].at(j, c) = out[c];
    }
    return images;
}

std::vector<Real> single_order_moment(const EnsembleProfile& profile, const ParameterGrid& grid, unsigned k) {
    if (grid.dim() != 1)
        throw InvalidArgument("single-order moments are defined for one parameter axis");
    if (profile.nodes() != grid.size())
        throw InvalidArgument("profile does not match grid");
    std::vector<Real> out(profile.state_dim());
    std::vector<Real> terms(profile.nodes());
    std::vector<Real> mono(profile.nodes());
    for (std::size_t p = 0; p < profile.nodes(); ++p) {
        Real b = grid.node(p)[0], w = grid.weights()[p];
        for (unsigned e = 0; e < k; ++e)
            w *= b;
        mono[p] = w;
    }
    for (std::size_t i = 0; i < profile.state_dim(); ++i) {
        for (std::size_t p = 0; p < profile.nodes(); ++p)
            terms[p] = mono[p] * Real(profile(p, i));
        out[i] = pairwise_sum(terms);
    }
    return out;
}

BlochCoSimulation::BlochCoSimulation(const ControlAffineEnsemble& ensemble, EnsembleProfile profile,
                                     BlochMomentChain chain)
    : ensemble_(&ensemble), profile_(std::move(profile)), chain_(std::move(chain)) {
    if (ensemble.state_dim != 3 || ensemble.grid.dim() != 1)
        throw InvalidArgument("co-simulation needs a 3-state ensemble over one parameter axis");
    if (profile_.nodes() != ensemble.grid.size() || profile_.state_dim() != 3)
        throw InvalidArgument("co-simulation profile does not match the ensemble");
}

void BlochCoSimulation::advance(std::span<const double> u, double dt) {
    const auto& grid = ensemble_->grid;
    const unsigned top = chain_.order + 2;
    const double u0 = u.empty() ? 0.0 : u[0];
    const double v0 = u.size() > 1 ? u[1] : 0.0;

    EnsembleProfile rhs;
    auto to_vec = [](const std::vector<Real>& v) { return Vec3{v[0], v[1], v[2]}; };
    const Vec3 c0 = to_vec(single_order_moment(profile_, grid, top));
    evaluate_rhs(*ensemble_, profile_, u, rhs);
    const Vec3 d0 = to_vec(single_order_moment(rhs, grid, top));

    EnsembleProfile next = step(*ensemble_, profile_, u, dt);
    const Vec3 c1 = to_vec(single_order_moment(next, grid, top));
    evaluate_rhs(*ensemble_, next, u, rhs);
    const Vec3 d1 = to_vec(single_order_moment(rhs, grid, top));

    Vec3 half{};
    for (std::size_t c = 0; c < 3; ++c)
        half[c] = (c0[c] + c1[c]) / 2 + Real(dt) / 8 * (d0[c] - d1[c]);

    chain_ = step_chain(chain_, u0, v0, dt, std::array<Vec3, 3>{c0, half, c1});
    profile_ = std::move(next);
}

MomentSequence BlochCoSimulation::ensemble_moments() const {
    return compute_ensemble_moments(profile_, ensemble_->grid, chain_.order + 1);
}

MomentTrajectory integrate_moment_chain(const BlochMomentChain& chain, const ControlSignal& signal, double dt,
                                        double horizon, std::optional<CoEnsemble> co_ensemble,
                                        std::size_t record_stride) {
    if (chain.closure == Closure::from_ensemble && !co_ensemble)
        throw InvalidArgument("from_ensemble closure selected but no co-simulated ensemble was provided");
    const StepPlan plan = plan_steps(dt, horizon);
    const std::size_t stride = std::max<std::size_t>(record_stride, 1);

    std::optional<BlochCoSimulation> cosim;
    BlochMomentChain solo = chain;
    if (co_ensemble) {
        if (co_ensemble->ensemble == nullptr)
            throw InvalidArgument("co-simulated ensemble is missing");
        cosim.emplace(*co_ensemble->ensemble, co_ensemble->profile, chain);
    }
    auto current_chain = [&]() -> const BlochMomentChain& { return cosim ? cosim->chain() : solo; };
    double t = 0.0;

    MomentTrajectory traj;
    auto control_at = [&](std::optional<MomentSequence>& ens_moments) {
        std::vector<double> u;
        if (const auto* open = std::get_if<OpenLoopSignal>(&signal)) {
            u = open->law(t);
        } else {
            const auto& fb = std::get<FeedbackSignal>(signal);
            if (fb.order > chain.order + 1)
                throw InvalidArgument("feedback order exceeds the chain's stored order");
            const MomentSequence& source = cosim ? *ens_moments : current_chain().moments;
            u = fb.law(source.truncated(fb.order), t);
        }
        if (u.empty() || u.size() > 2)
            throw InvalidArgument("Bloch moment chain takes one or two control inputs");
        for (double x : u)
            if (!std::isfinite(x))
                throw NumericalFailure("control signal returned a non-finite input");
        u.resize(2, 0.0);
        return u;
    };
    auto record = [&](const std::vector<double>& u, std::optional<MomentSequence>& ens_moments) {
        traj.times.push_back(t);
        traj.controls.push_back(u);
        traj.chain.push_back(current_chain().moments);
        if (ens_moments)
            traj.ensemble.push_back(*ens_moments);
    };

    for (std::size_t n = 0; n < plan.steps; ++n) {
        std::optional<MomentSequence> ens_moments;
        if (cosim)
            ens_moments = cosim->ensemble_moments();
        const auto u = control_at(ens_moments);
        if (n % stride == 0)
            record(u, ens_moments);
        const double h = (n + 1 == plan.steps) ? plan.last_dt : dt;
        if (cosim)
            cosim->advance(u, h);
        else
            solo = step_chain(solo, u[0], u[1], h);
        t = (n + 1 == plan.steps) ? horizon : dt * static_cast<double>(n + 1);
    }
    std::optional<MomentSequence> ens_moments;
    if (cosim)
        ens_moments = cosim->ensemble_moments();
    const auto u = control_at(ens_moments);
    record(u, ens_moments);
    if (cosim)
        traj.final_profile = cosim->profile();
    return traj;
}

} // namespace moment_ensemble
