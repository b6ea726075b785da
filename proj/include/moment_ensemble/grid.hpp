#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace moment_ensemble {

struct Interval {
    double lower = 0.0;
    double upper = 1.0;

    [[nodiscard]] double length() const noexcept { return upper - lower; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Quadrature discretization of a parameter box Omega = prod [a_j, b_j].
///
/// Nodes are stored row-major (node p occupies [p*d, p*d + d)). Tensor-product
/// factories order nodes with the last axis varying fastest.
class ParameterGrid {
public:
    /// Validates that nodes lie inside the box and weights are positive.
    /// The weight-sum invariant is checked with `volume_tolerance` (relative).
    ParameterGrid(std::vector<Interval> bounds, std::vector<double> nodes, std::vector<double> weights,
                  double volume_tolerance = 1e-12);

    /// Composite midpoint rule with `points[j]` cells along axis j.
    static ParameterGrid uniform_midpoint(std::vector<Interval> bounds, std::vector<std::size_t> points);
    static ParameterGrid uniform_midpoint(Interval bounds, std::size_t points) {
        return uniform_midpoint(std::vector<Interval>{bounds}, std::vector<std::size_t>{points});
    }

    /// Tensor-product Gauss-Legendre rule, exact for polynomials of degree < 2*points[j] per axis.
    static ParameterGrid gauss_legendre(std::vector<Interval> bounds, std::vector<std::size_t> points);
    static ParameterGrid gauss_legendre(Interval bounds, std::size_t points) {
        return gauss_legendre(std::vector<Interval>{bounds}, std::vector<std::size_t>{points});
    }

    [[nodiscard]] std::size_t dim() const noexcept { return bounds_.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
    [[nodiscard]] const std::vector<Interval>& bounds() const noexcept { return bounds_; }
    [[nodiscard]] std::span<const double> node(std::size_t p) const {
        return {nodes_.data() + p * dim(), dim()};
    }
    [[nodiscard]] const std::vector<double>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
    [[nodiscard]] double volume() const noexcept;

    friend bool operator==(const ParameterGrid&, const ParameterGrid&) = default;

private:
    std::vector<Interval> bounds_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration in long double.
void gauss_legendre_rule(std::size_t points, std::vector<long double>& nodes, std::vector<long double>& weights);

} // namespace moment_ensemble
