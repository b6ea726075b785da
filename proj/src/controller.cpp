#include "moment_ensemble/controller.hpp"

#include <algorithm>
#include <cmath>

#include "moment_ensemble/errors.hpp"

namespace moment_ensemble {

void QuadraticLyapunov::validate() const {
    if (!target.all_finite())
        throw InvalidArgument("Lyapunov target moments must be finite");
    if (target.max_order() < order)
        throw InvalidArgument("Lyapunov target is truncated below order " + std::to_string(order));
    if (first_order > order)
        throw InvalidArgument("Lyapunov window starts after its last order");
    if (!weights.empty()) {
        if (weights.size() != order + 1)
            throw InvalidArgument("Lyapunov weights need one entry per order 0.." + std::to_string(order));
        for (double w : weights)
            if (!(w > 0.0) || !std::isfinite(w))
                throw InvalidArgument("Lyapunov weights must be positive");
    }
}

namespace {

void require_compatible(const QuadraticLyapunov& L, const MomentSequence& m) {
    if (m.index_dim() != L.target.index_dim() || m.state_dim() != L.target.state_dim())
        throw InvalidArgument("moment sequence does not match the Lyapunov target shape");
    if (m.max_order() < L.order)
        throw InvalidArgument("moment sequence of order " + std::to_string(m.max_order()) +
                              " is below the Lyapunov order " + std::to_string(L.order));
}

// Visits (rank, weight) over the Lyapunov window; ranks agree across
// sequences with the same index dimension because of the graded ordering.
template <class Visit>
void for_each_window(const QuadraticLyapunov& L, Visit visit) {
    const auto& set = L.target.index_set();
    for (std::size_t r = 0; r < set.size(); ++r) {
        const unsigned ord = set.at(r).order();
        if (ord < L.first_order || ord > L.order)
            continue;
        visit(r, Real(L.weight(ord)));
    }
}

} // namespace

double lyapunov_value(const QuadraticLyapunov& L, const MomentSequence& m) {
    require_compatible(L, m);
    std::vector<Real> terms;
    for_each_window(L, [&](std::size_t r, Real w) {
        for (std::size_t c = 0; c < m.state_dim(); ++c) {
            const Real e = m.at_rank(r, c) - L.target.at_rank(r, c);
            terms.push_back(w * e * e);
        }
    });
    return static_cast<double>(pairwise_sum(terms));
}

MomentSequence lyapunov_gradient(const QuadraticLyapunov& L, const MomentSequence& m) {
    require_compatible(L, m);
    MomentSequence grad(L.target.index_dim(), L.target.state_dim(), L.target.max_order());
    for_each_window(L, [&](std::size_t r, Real w) {
        for (std::size_t c = 0; c < m.state_dim(); ++c)
            grad.at_rank(r, c) = 2 * w * (m.at_rank(r, c) - L.target.at_rank(r, c));
    });
    return grad;
}

Real damping_product(const QuadraticLyapunov& L, const MomentSequence& m, const MomentSequence& field) {
    require_compatible(L, m);
    if (field.index_dim() != m.index_dim() || field.state_dim() != m.state_dim() || field.max_order() < L.order)
        throw InvalidArgument("moment image does not match the Lyapunov window");
    std::vector<Real> terms;
    for_each_window(L, [&](std::size_t r, Real w) {
        for (std::size_t c = 0; c < m.state_dim(); ++c)
            terms.push_back(w * (m.at_rank(r, c) - L.target.at_rank(r, c)) * field.at_rank(r, c));
    });
    return pairwise_sum(terms);
}

const char* to_string(LawKind k) noexcept {
    switch (k) {
    case LawKind::gradient_damping:
        return "gradient_damping";
    case LawKind::explicit_bloch:
        return "explicit_bloch";
    case LawKind::explicit_nonlinear:
        return "explicit_nonlinear";
    }
    return "unknown";
}

LawKind law_kind_from_string(const std::string& name) {
    if (name == "gradient_damping")
        return LawKind::gradient_damping;
    if (name == "explicit_bloch")
        return LawKind::explicit_bloch;
    if (name == "explicit_nonlinear")
        return LawKind::explicit_nonlinear;
    throw InvalidArgument("unknown controller kind '" + name +
                          "' (expected gradient_damping, explicit_bloch or explicit_nonlinear)");
}

std::vector<double> gradient_damping_control(const FeedbackLaw& law, const MomentSequence& m,
                                             const MomentSequence& /*bar_f*/,
                                             const std::vector<MomentSequence>& bar_g) {
    std::vector<double> u;
    u.reserve(bar_g.size());
    for (const auto& g : bar_g)
        u.push_back(static_cast<double>(-Real(law.gain) * damping_product(law.lyapunov, m, g)));
    return u;
}

std::vector<double> explicit_bloch_control(const FeedbackLaw& law, const MomentSequence& m) {
    const auto& L = law.lyapunov;
    require_compatible(L, m);
    if (m.index_dim() != 1 || m.state_dim() != 3 || m.max_order() < L.order + 1)
        throw InvalidArgument("Bloch feedback needs 3-component moments through order N + 1");
    Real sum = 0;
    for (unsigned j = L.first_order; j <= L.order; ++j) {
        const Real w = L.weight(j);
        const Real e1 = m.at(j, 0) - L.target.at(j, 0);
        const Real e3 = m.at(j, 2) - L.target.at(j, 2);
        sum += w * (e1 * m.at(j + 1, 2) - e3 * m.at(j + 1, 0));
    }
    return {static_cast<double>(-Real(law.gain) * sum), 0.0};
}

double explicit_nonlinear_control(const FeedbackLaw& law, const MomentSequence& e) {
    const auto& L = law.lyapunov;
    if (e.state_dim() < 2)
        throw InvalidArgument("nonlinear feedback needs two state channels");
    if (e.max_order() < L.order)
        throw InvalidArgument("error sequence is truncated below order " + std::to_string(L.order));
    const auto& set = e.index_set();
    Real sum = 0;
    for (std::size_t r = 0; r < set.size(); ++r) {
        const unsigned ord = set.at(r).order();
        if (ord < L.first_order || ord > L.order)
            continue;
        sum += Real(law.c1) * e.at_rank(r, 0) + Real(law.c2) * e.at_rank(r, 1);
    }
    return static_cast<double>(-Real(law.gain) * sum);
}

void clamp_controls(const FeedbackLaw& law, std::vector<double>& u) {
    if (!law.u_max)
        return;
    const double bound = std::abs(*law.u_max);
    for (auto& x : u)
        x = std::clamp(x, -bound, bound);
}

double lyapunov_derivative(const QuadraticLyapunov& L, const MomentSequence& m, const MomentSequence& bar_f,
                           const std::vector<MomentSequence>& bar_g, const std::vector<double>& u) {
    if (u.size() != bar_g.size())
        throw InvalidArgument("one control per moment image is required");
    Real total = 2 * damping_product(L, m, bar_f);
    for (std::size_t i = 0; i < u.size(); ++i)
        total += 2 * Real(u[i]) * damping_product(L, m, bar_g[i]);
    return static_cast<double>(total);
}

SingularityStatus singularity_monitor(const QuadraticLyapunov& L, const MomentSequence& m,
                                      const std::vector<MomentSequence>& bar_g, double threshold) {
    if (!(threshold > 0.0))
        throw InvalidArgument("singularity threshold must be positive");
    SingularityStatus status;
    Real sq = 0;
    for (const auto& g : bar_g) {
        const Real p = 2 * damping_product(L, m, g);
        sq += p * p;
    }
    status.gradient_norm = static_cast<double>(std::sqrt(sq));
    status.error_norm = std::sqrt(lyapunov_value(L, m));
    status.near_singular = status.error_norm > threshold && status.gradient_norm < threshold;
    return status;
}

} // namespace moment_ensemble
