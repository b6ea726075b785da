#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "moment_ensemble/grid.hpp"
#include "moment_ensemble/multiindex.hpp"
#include "moment_ensemble/profile.hpp"

namespace moment_ensemble {

/// Moments are accumulated and stored in extended precision. High-order
/// difference operators amplify storage rounding by C(n, k) * 2^n, which is
/// beyond what double can absorb for n around 40.
using Real = long double;

/// Truncated moment array indexed by (k, i) with |k| <= N and i in [0, n).
///
/// For ensemble moments the multi-index runs over parameter axes (length d);
/// for output moments it runs over state components and each k carries one
/// scalar (state_dim() == 1).
class MomentSequence {
public:
    MomentSequence() = default;
    MomentSequence(std::size_t index_dim, std::size_t state_dim, unsigned max_order);

    [[nodiscard]] std::size_t index_dim() const noexcept { return indices_ ? indices_->dim() : 0; }
    [[nodiscard]] std::size_t state_dim() const noexcept { return state_dim_; }
    [[nodiscard]] unsigned max_order() const noexcept { return indices_ ? indices_->max_order() : 0; }
    [[nodiscard]] const MultiIndexSet& index_set() const { return *indices_; }
    [[nodiscard]] std::size_t index_count() const noexcept { return indices_ ? indices_->size() : 0; }

    [[nodiscard]] Real operator()(const MultiIndex& k, std::size_t i) const { return values_[slot(k, i)]; }
    [[nodiscard]] Real& operator()(const MultiIndex& k, std::size_t i) { return values_[slot(k, i)]; }
    // Ranked access; rank follows index_set() ordering.
    [[nodiscard]] Real at_rank(std::size_t rank, std::size_t i) const { return values_[rank * state_dim_ + i]; }
    [[nodiscard]] Real& at_rank(std::size_t rank, std::size_t i) { return values_[rank * state_dim_ + i]; }
    // One-dimensional shorthand m_k[i] for d == 1 (rank == k).
    [[nodiscard]] Real at(unsigned k, std::size_t i) const { return values_[k * state_dim_ + i]; }
    [[nodiscard]] Real& at(unsigned k, std::size_t i) { return values_[k * state_dim_ + i]; }

    [[nodiscard]] const std::vector<Real>& values() const noexcept { return values_; }
    [[nodiscard]] std::vector<Real>& values() noexcept { return values_; }

    [[nodiscard]] bool same_shape(const MomentSequence& other) const noexcept;
    [[nodiscard]] bool all_finite() const noexcept;

    /// Same values restricted to orders <= new_order.
    [[nodiscard]] MomentSequence truncated(unsigned new_order) const;

    MomentSequence& operator+=(const MomentSequence& other);
    MomentSequence& operator-=(const MomentSequence& other);
    MomentSequence& operator*=(Real scale);

    friend bool operator==(const MomentSequence& a, const MomentSequence& b) {
        return a.same_shape(b) && a.values_ == b.values_;
    }

private:
    [[nodiscard]] std::size_t slot(const MultiIndex& k, std::size_t i) const;

    MultiIndexSetPtr indices_;
    std::size_t state_dim_ = 0;
    std::vector<Real> values_;
};

[[nodiscard]] MomentSequence operator+(MomentSequence a, const MomentSequence& b);
[[nodiscard]] MomentSequence operator-(MomentSequence a, const MomentSequence& b);
[[nodiscard]] MomentSequence operator*(Real s, MomentSequence a);

/// Fixed-order pairwise summation; deterministic for a given input order.
[[nodiscard]] Real pairwise_sum(std::span<const Real> terms);

/// values[k][i] = sum_p w_p * beta_p^k * x_i(beta_p).
[[nodiscard]] MomentSequence compute_ensemble_moments(const EnsembleProfile& profile, const ParameterGrid& grid,
                                                      unsigned max_order);

/// values[k] = sum_p w_p * prod_i x_i(beta_p)^{k_i}; k runs over state components.
[[nodiscard]] MomentSequence compute_output_moments(const EnsembleProfile& profile, const ParameterGrid& grid,
                                                    unsigned max_order);

/// Ensemble moments of a profile that is constant in beta, using closed-form
/// monomial integrals over the grid's box instead of quadrature.
[[nodiscard]] MomentSequence constant_profile_moments(std::span<const double> value, std::span<const Interval> bounds,
                                                      unsigned max_order);

/// Tensor-product iterated difference Delta_1^{n_1} ... Delta_d^{n_d} m_k for one
/// state component. Throws when |k| + |n| exceeds the truncation order.
[[nodiscard]] Real difference_operator(const MomentSequence& m, const MultiIndex& n, const MultiIndex& k,
                                       std::size_t component = 0);

enum class HausdorffNorm { l1, l2 };

struct HausdorffTerm {
    MultiIndex n;
    std::size_t component = 0;
    Real value = 0;
};

struct HausdorffReport {
    HausdorffNorm norm = HausdorffNorm::l2;
    Real max_value = 0;
    std::vector<HausdorffTerm> per_n;
};

/// Sweeps every n with 0 <= n_j <= up_to and every state component.
///   l2: (prod_j (n_j + 1)) * sum_{k <= n} [C(n,k) Delta^{n-k} m_k]^2
///   l1: sum_{k <= n} |C(n,k) Delta^{n-k} m_k|
/// max_value is the empirical constant over the sweep.
[[nodiscard]] HausdorffReport check_hausdorff(const MomentSequence& m, unsigned up_to, HausdorffNorm norm);
[[nodiscard]] inline HausdorffReport check_hausdorff_l2(const MomentSequence& m, unsigned up_to) {
    return check_hausdorff(m, up_to, HausdorffNorm::l2);
}
[[nodiscard]] inline HausdorffReport check_hausdorff_l1(const MomentSequence& m, unsigned up_to) {
    return check_hausdorff(m, up_to, HausdorffNorm::l1);
}

/// Moments of the pushforward of a measure on [0,1]^d under beta -> a + (b - a) beta,
/// applied axis-wise: m_k = sum_{i <= k} prod_j C(k_j, i_j) a_j^{k_j - i_j} (b_j - a_j)^{i_j} m'_i.
[[nodiscard]] MomentSequence rescale_moments(const MomentSequence& unit, std::span<const Interval> target);
[[nodiscard]] MomentSequence rescale_moments(const MomentSequence& unit, double a, double b);

/// sup over 1 <= |k| <= N and components of |r(m_k) - r(n_k)|, with the real
/// root r(x) = sign(x) |x|^{1/|k|}.
[[nodiscard]] Real radical_distance(const MomentSequence& m, const MomentSequence& n);

/// Bernstein-lattice density estimate recovered from unit-cube moments.
struct MomentInversion {
    ParameterGrid lattice;    ///< nodes k / n_grid, equal weights
    EnsembleProfile density;  ///< one column per state component
};

/// phi(k/n) ~ prod_j (n + 1) * C(n, k) * Delta^{n-k} m_k with n = (n_grid, ..., n_grid).
/// Requires max_order >= n_grid * d.
[[nodiscard]] MomentInversion invert_moments(const MomentSequence& m, unsigned n_grid);

} // namespace moment_ensemble
