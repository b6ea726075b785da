#include "moment_ensemble/moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "moment_ensemble/binomial.hpp"
#include "moment_ensemble/errors.hpp"

namespace moment_ensemble {

MomentSequence::MomentSequence(std::size_t index_dim, std::size_t state_dim, unsigned max_order)
    : indices_(shared_index_set(index_dim, max_order)), state_dim_(state_dim),
      values_(indices_->size() * state_dim, Real{0}) {
    if (state_dim == 0)
        throw InvalidArgument("moment sequence needs at least one state component");
}

std::size_t MomentSequence::slot(const MultiIndex& k, std::size_t i) const {
    if (i >= state_dim_)
        throw InvalidArgument("state component " + std::to_string(i) + " out of range");
    return indices_->rank(k) * state_dim_ + i;
}

bool MomentSequence::same_shape(const MomentSequence& other) const noexcept {
    return index_dim() == other.index_dim() && state_dim_ == other.state_dim_ && max_order() == other.max_order();
}

bool MomentSequence::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](Real v) { return std::isfinite(v); });
}

MomentSequence MomentSequence::truncated(unsigned new_order) const {
    if (new_order > max_order())
        throw InvalidArgument("cannot truncate order " + std::to_string(max_order()) + " sequence to order " +
                              std::to_string(new_order));
    MomentSequence out(index_dim(), state_dim_, new_order);
    // Graded ordering makes the lower-order block a prefix.
    std::copy_n(values_.begin(), out.values_.size(), out.values_.begin());
    return out;
}

namespace {
void require_same_shape(const MomentSequence& a, const MomentSequence& b, const char* op) {
    if (!a.same_shape(b))
        throw InvalidArgument(std::string("moment sequence shape mismatch in ") + op);
}
} // namespace

MomentSequence& MomentSequence::operator+=(const MomentSequence& other) {
    require_same_shape(*this, other, "addition");
    for (std::size_t s = 0; s < values_.size(); ++s)
        values_[s] += other.values_[s];
    return *this;
}

MomentSequence& MomentSequence::operator-=(const MomentSequence& other) {
    require_same_shape(*this, other, "subtraction");
    for (std::size_t s = 0; s < values_.size(); ++s)
        values_[s] -= other.values_[s];
    return *this;
}

MomentSequence& MomentSequence::operator*=(Real scale) {
    for (auto& v : values_)
        v *= scale;
    return *this;
}

MomentSequence operator+(MomentSequence a, const MomentSequence& b) { return a += b; }
MomentSequence operator-(MomentSequence a, const MomentSequence& b) { return a -= b; }
MomentSequence operator*(Real s, MomentSequence a) { return a *= s; }

Real pairwise_sum(std::span<const Real> terms) {
    constexpr std::size_t block = 32;
    if (terms.size() <= block) {
        Real s = 0;
        for (Real t : terms)
            s += t;
        return s;
    }
    const std::size_t half = terms.size() / 2;
    return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

namespace {

void require_profile_on_grid(const EnsembleProfile& profile, const ParameterGrid& grid) {
    if (profile.nodes() != grid.size())
        throw InvalidArgument("profile has " + std::to_string(profile.nodes()) + " nodes but the grid has " +
                              std::to_string(grid.size()));
    if (profile.state_dim() == 0)
        throw InvalidArgument("profile has no state components");
    if (const auto bad = profile.first_non_finite_node(); bad != profile.nodes())
        throw InvalidArgument("profile has a non-finite state at node " + std::to_string(bad));
}

// powers[(p * axes + j) * (N + 1) + e] = value(p, j)^e
template <class Value>
std::vector<Real> power_table(std::size_t count, std::size_t axes, unsigned max_order, Value value) {
    std::vector<Real> powers(count * axes * (max_order + 1));
    for (std::size_t p = 0; p < count; ++p)
        for (std::size_t j = 0; j < axes; ++j) {
            Real* row = powers.data() + (p * axes + j) * (max_order + 1);
            const Real x = value(p, j);
            row[0] = 1;
            for (unsigned e = 1; e <= max_order; ++e)
                row[e] = row[e - 1] * x;
        }
    return powers;
}

} // namespace

MomentSequence compute_ensemble_moments(const EnsembleProfile& profile, const ParameterGrid& grid,
                                        unsigned max_order) {
    require_profile_on_grid(profile, grid);
    const std::size_t d = grid.dim(), n = profile.state_dim(), P = grid.size();
    MomentSequence m(d, n, max_order);
    if (d == 1) {
        // mono[k * P + p] = w_p beta_p^k
        std::vector<Real> mono((max_order + 1) * P), terms(P);
        for (std::size_t p = 0; p < P; ++p) {
            const Real b = grid.nodes()[p];
            Real v = grid.weights()[p];
            for (unsigned k = 0; k <= max_order; ++k, v *= b)
                mono[k * P + p] = v;
        }
        const double* x = profile.values().data();
        for (unsigned k = 0; k <= max_order; ++k)
            for (std::size_t i = 0; i < n; ++i) {
                const Real* row = mono.data() + k * P;
                for (std::size_t p = 0; p < P; ++p)
                    terms[p] = row[p] * Real(x[p * n + i]);
                m.at(k, i) = pairwise_sum(terms);
            }
        return m;
    }
    const auto powers =
        power_table(P, d, max_order, [&](std::size_t p, std::size_t j) { return Real(grid.node(p)[j]); });
    const auto& indices = m.index_set().indices();
    std::vector<Real> mono(P), terms(P);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const auto k = indices[r].entries();
        for (std::size_t p = 0; p < P; ++p) {
            Real w = grid.weights()[p];
            for (std::size_t j = 0; j < d; ++j)
                w *= powers[(p * d + j) * (max_order + 1) + k[j]];
            mono[p] = w;
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t p = 0; p < P; ++p)
                terms[p] = mono[p] * Real(profile(p, i));
            m.at_rank(r, i) = pairwise_sum(terms);
        }
    }
    return m;
}

MomentSequence compute_output_moments(const EnsembleProfile& profile, const ParameterGrid& grid,
                                      unsigned max_order) {
    require_profile_on_grid(profile, grid);
    const std::size_t n = profile.state_dim(), P = grid.size();
    MomentSequence m(n, 1, max_order);
    const auto powers =
        power_table(P, n, max_order, [&](std::size_t p, std::size_t i) { return Real(profile(p, i)); });
    const auto& indices = m.index_set().indices();
    std::vector<Real> terms(P);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const auto k = indices[r].entries();
        for (std::size_t p = 0; p < P; ++p) {
            Real t = grid.weights()[p];
            for (std::size_t i = 0; i < n; ++i)
                t *= powers[(p * n + i) * (max_order + 1) + k[i]];
            terms[p] = t;
        }
        m.at_rank(r, 0) = pairwise_sum(terms);
    }
    return m;
}

MomentSequence constant_profile_moments(std::span<const double> value, std::span<const Interval> bounds,
                                        unsigned max_order) {
    if (bounds.empty() || value.empty())
        throw InvalidArgument("constant profile moments need a non-empty box and state");
    MomentSequence m(bounds.size(), value.size(), max_order);
    // integrals[j][e] = (b^{e+1} - a^{e+1}) / (e + 1)
    std::vector<std::vector<Real>> integrals(bounds.size());
    for (std::size_t j = 0; j < bounds.size(); ++j) {
        const Real a = bounds[j].lower, b = bounds[j].upper;
        Real ap = a, bp = b;
        for (unsigned e = 0; e <= max_order; ++e) {
            integrals[j].push_back((bp - ap) / Real(e + 1));
            ap *= a;
            bp *= b;
        }
    }
    const auto& indices = m.index_set().indices();
    for (std::size_t r = 0; r < indices.size(); ++r) {
        Real mono = 1;
        for (std::size_t j = 0; j < bounds.size(); ++j)
            mono *= integrals[j][indices[r][j]];
        for (std::size_t i = 0; i < value.size(); ++i)
            m.at_rank(r, i) = mono * Real(value[i]);
    }
    return m;
}

namespace {

// Visits every i with 0 <= i <= upper componentwise.
template <class Visit>
void for_each_in_box(std::span<const unsigned> upper, Visit visit) {
    const std::size_t d = upper.size();
    std::vector<unsigned> i(d, 0u);
    while (true) {
        visit(std::span<const unsigned>(i));
        std::size_t axis = d;
        while (axis > 0) {
            --axis;
            if (i[axis] < upper[axis]) {
                ++i[axis];
                break;
            }
            i[axis] = 0;
            if (axis == 0)
                return;
        }
    }
}

} // namespace

Real difference_operator(const MomentSequence& m, const MultiIndex& n, const MultiIndex& k, std::size_t component) {
    const std::size_t d = m.index_dim();
    if (n.size() != d || k.size() != d)
        throw InvalidArgument("difference operator indices must have length " + std::to_string(d));
    if (component >= m.state_dim())
        throw InvalidArgument("state component " + std::to_string(component) + " out of range");
    if (n.order() + k.order() > m.max_order())
        throw InvalidArgument("difference Delta^" + n.to_string() + " m_" + k.to_string() +
                              " needs moments of order " + std::to_string(n.order() + k.order()) +
                              " beyond truncation order " + std::to_string(m.max_order()));
    const auto& set = m.index_set();
    std::vector<unsigned> shifted(d);
    Real sum = 0;
    for_each_in_box(n.entries(), [&](std::span<const unsigned> i) {
        Real coeff = 1;
        unsigned sign = 0;
        for (std::size_t j = 0; j < d; ++j) {
            coeff *= binomial(n[j], i[j]);
            sign += i[j];
            shifted[j] = k[j] + i[j];
        }
        const Real term = coeff * m.at_rank(set.rank(shifted), component);
        sum += (sign % 2 == 0) ? term : -term;
    });
    return sum;
}

HausdorffReport check_hausdorff(const MomentSequence& m, unsigned up_to, HausdorffNorm norm) {
    const std::size_t d = m.index_dim();
    if (d == 0)
        throw InvalidArgument("empty moment sequence");
    if (static_cast<unsigned long>(up_to) * d > m.max_order())
        throw InvalidArgument("truncation order " + std::to_string(m.max_order()) +
                              " is too small for a Hausdorff sweep up to n = " + std::to_string(up_to) + " per axis");
    HausdorffReport report;
    report.norm = norm;
    const std::vector<unsigned> upper(d, up_to);
    std::vector<unsigned> diff(d);
    for_each_in_box(upper, [&](std::span<const unsigned> n_entries) {
        const MultiIndex n(std::vector<unsigned>(n_entries.begin(), n_entries.end()));
        for (std::size_t comp = 0; comp < m.state_dim(); ++comp) {
            Real acc = 0;
            for_each_in_box(n.entries(), [&](std::span<const unsigned> k_entries) {
                Real coeff = 1;
                for (std::size_t j = 0; j < d; ++j) {
                    coeff *= binomial(n[j], k_entries[j]);
                    diff[j] = n[j] - k_entries[j];
                }
                const Real t = coeff * difference_operator(m, MultiIndex(diff),
                                                           MultiIndex(std::vector<unsigned>(k_entries.begin(),
                                                                                            k_entries.end())),
                                                           comp);
                acc += norm == HausdorffNorm::l2 ? t * t : std::abs(t);
            });
            if (norm == HausdorffNorm::l2)
                for (std::size_t j = 0; j < d; ++j)
                    acc *= Real(n[j] + 1);
            report.max_value = std::max(report.max_value, acc);
            report.per_n.push_back({n, comp, acc});
        }
    });
    return report;
}

MomentSequence rescale_moments(const MomentSequence& unit, std::span<const Interval> target) {
    const std::size_t d = unit.index_dim();
    if (target.size() != d)
        throw InvalidArgument("rescaling needs one target interval per parameter axis");
    for (const auto& t : target)
        if (!(t.upper > t.lower))
            throw InvalidArgument("b must exceed a (got a = " + std::to_string(t.lower) +
                                  ", b = " + std::to_string(t.upper) + ")");
    MomentSequence out(d, unit.state_dim(), unit.max_order());
    const auto& set = unit.index_set();
    for (std::size_t r = 0; r < set.size(); ++r) {
        const MultiIndex& k = set.at(r);
        std::vector<Real> acc(unit.state_dim(), Real{0});
        for_each_in_box(k.entries(), [&](std::span<const unsigned> i) {
            Real coeff = 1;
            for (std::size_t j = 0; j < d; ++j) {
                const Real a = target[j].lower, len = Real(target[j].upper) - Real(target[j].lower);
                coeff *= binomial(k[j], i[j]) * std::pow(a, Real(k[j] - i[j])) * std::pow(len, Real(i[j]));
            }
            const std::size_t src = set.rank(i);
            for (std::size_t c = 0; c < unit.state_dim(); ++c)
                acc[c] += coeff * unit.at_rank(src, c);
        });
        for (std::size_t c = 0; c < unit.state_dim(); ++c)
            out.at_rank(r, c) = acc[c];
    }
    return out;
}

MomentSequence rescale_moments(const MomentSequence& unit, double a, double b) {
    const std::vector<Interval> target(unit.index_dim(), Interval{a, b});
    if (!(b > a))
        throw InvalidArgument("b must exceed a (got a = " + std::to_string(a) + ", b = " + std::to_string(b) + ")");
    return rescale_moments(unit, target);
}

namespace {
Real real_root(Real x, unsigned degree) {
    if (x == 0)
        return 0;
    const Real r = std::pow(std::abs(x), Real(1) / Real(degree));
    return x < 0 ? -r : r;
}
} // namespace

Real radical_distance(const MomentSequence& m, const MomentSequence& n) {
    if (!m.same_shape(n))
        throw InvalidArgument("radical distance needs sequences of the same shape");
    const auto& set = m.index_set();
    Real sup = 0;
    for (std::size_t r = 0; r < set.size(); ++r) {
        const unsigned order = set.at(r).order();
        if (order == 0)
            continue;
        for (std::size_t c = 0; c < m.state_dim(); ++c)
            sup = std::max(sup, std::abs(real_root(m.at_rank(r, c), order) - real_root(n.at_rank(r, c), order)));
    }
    return sup;
}

MomentInversion invert_moments(const MomentSequence& m, unsigned n_grid) {
    const std::size_t d = m.index_dim();
    if (d == 0)
        throw InvalidArgument("empty moment sequence");
    if (static_cast<unsigned long>(n_grid) * d > m.max_order())
        throw InvalidArgument("inversion on a lattice of " + std::to_string(n_grid) + " intervals needs order " +
                              std::to_string(n_grid * d) + " moments, have " + std::to_string(m.max_order()));
    const std::vector<unsigned> upper(d, n_grid);
    std::size_t count = 1;
    for (std::size_t j = 0; j < d; ++j)
        count *= n_grid + 1;
    std::vector<double> nodes;
    nodes.reserve(count * d);
    const double weight = 1.0 / static_cast<double>(count);
    EnsembleProfile density(count, m.state_dim());
    std::size_t p = 0;
    std::vector<unsigned> diff(d);
    for_each_in_box(upper, [&](std::span<const unsigned> k) {
        Real scale = 1;
        for (std::size_t j = 0; j < d; ++j) {
            nodes.push_back(n_grid == 0 ? 0.0 : static_cast<double>(k[j]) / static_cast<double>(n_grid));
            scale *= Real(n_grid + 1) * binomial(n_grid, k[j]);
            diff[j] = n_grid - k[j];
        }
        const MultiIndex kk(std::vector<unsigned>(k.begin(), k.end()));
        const MultiIndex nk(diff);
        for (std::size_t c = 0; c < m.state_dim(); ++c)
            density(p, c) = static_cast<double>(scale * difference_operator(m, nk, kk, c));
        ++p;
    });
    std::vector<Interval> unit(d, Interval{0.0, 1.0});
    ParameterGrid lattice(std::move(unit), std::move(nodes), std::vector<double>(count, weight), 1e-12);
    return {std::move(lattice), std::move(density)};
}

} // namespace moment_ensemble
