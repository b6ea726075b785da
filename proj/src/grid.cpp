#include "moment_ensemble/grid.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "moment_ensemble/errors.hpp"

namespace moment_ensemble {

ParameterGrid::ParameterGrid(std::vector<Interval> bounds, std::vector<double> nodes, std::vector<double> weights,
                             double volume_tolerance)
    : bounds_(std::move(bounds)), nodes_(std::move(nodes)), weights_(std::move(weights)) {
    if (bounds_.empty())
        throw InvalidArgument("parameter grid needs at least one axis");
    for (const auto& b : bounds_)
        if (!(b.upper > b.lower) || !std::isfinite(b.lower) || !std::isfinite(b.upper))
            throw InvalidArgument("degenerate parameter interval [" + std::to_string(b.lower) + ", " +
                                  std::to_string(b.upper) + "]");
    if (weights_.empty())
        throw InvalidArgument("parameter grid has no nodes");
    if (nodes_.size() != weights_.size() * dim())
        throw InvalidArgument("parameter grid node array does not match weight count");
    for (std::size_t p = 0; p < size(); ++p) {
        if (!(weights_[p] > 0.0) || !std::isfinite(weights_[p]))
            throw InvalidArgument("quadrature weight " + std::to_string(p) + " is not positive");
        for (std::size_t j = 0; j < dim(); ++j) {
            const double x = nodes_[p * dim() + j];
            if (!(x >= bounds_[j].lower && x <= bounds_[j].upper))
                throw InvalidArgument("grid node " + std::to_string(p) + " lies outside the parameter box");
        }
    }
    const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    const double vol = volume();
    if (std::abs(total - vol) > volume_tolerance * vol)
        throw InvalidArgument("quadrature weights sum to " + std::to_string(total) + " but the box volume is " +
                              std::to_string(vol));
}

double ParameterGrid::volume() const noexcept {
    double v = 1.0;
    for (const auto& b : bounds_)
        v *= b.length();
    return v;
}

namespace {

ParameterGrid tensor_product(std::vector<Interval> bounds, const std::vector<std::vector<double>>& axis_nodes,
                             const std::vector<std::vector<double>>& axis_weights) {
    const std::size_t d = bounds.size();
    std::size_t total = 1;
    for (const auto& w : axis_weights)
        total *= w.size();
    std::vector<double> nodes(total * d);
    std::vector<double> weights(total);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t p = 0; p < total; ++p) {
        double w = 1.0;
        for (std::size_t j = 0; j < d; ++j) {
            nodes[p * d + j] = axis_nodes[j][idx[j]];
            w *= axis_weights[j][idx[j]];
        }
        weights[p] = w;
        for (std::size_t j = d; j-- > 0;) {
            if (++idx[j] < axis_weights[j].size())
                break;
            idx[j] = 0;
        }
    }
    return ParameterGrid(std::move(bounds), std::move(nodes), std::move(weights));
}

void check_axes(const std::vector<Interval>& bounds, const std::vector<std::size_t>& points) {
    if (bounds.size() != points.size())
        throw InvalidArgument("need one node count per parameter axis");
    for (std::size_t n : points)
        if (n == 0)
            throw InvalidArgument("node count per axis must be positive");
}

} // namespace

ParameterGrid ParameterGrid::uniform_midpoint(std::vector<Interval> bounds, std::vector<std::size_t> points) {
    check_axes(bounds, points);
    std::vector<std::vector<double>> nodes(bounds.size()), weights(bounds.size());
    for (std::size_t j = 0; j < bounds.size(); ++j) {
        const double h = bounds[j].length() / static_cast<double>(points[j]);
        for (std::size_t i = 0; i < points[j]; ++i) {
            nodes[j].push_back(bounds[j].lower + (static_cast<double>(i) + 0.5) * h);
            weights[j].push_back(h);
        }
    }
    return tensor_product(std::move(bounds), nodes, weights);
}

void gauss_legendre_rule(std::size_t points, std::vector<long double>& nodes, std::vector<long double>& weights) {
    nodes.assign(points, 0.0L);
    weights.assign(points, 0.0L);
    const auto n = static_cast<long double>(points);
    for (std::size_t i = 0; i < (points + 1) / 2; ++i) {
        // Tricomi initial guess for the i-th largest root.
        long double x = std::cos(std::numbers::pi_v<long double> * (static_cast<long double>(i) + 0.75L) / (n + 0.5L));
        long double dp = 0.0L;
        for (int iter = 0; iter < 100; ++iter) {
            long double p0 = 1.0L, p1 = x;
            for (std::size_t k = 2; k <= points; ++k) {
                const auto kk = static_cast<long double>(k);
                const long double p2 = ((2.0L * kk - 1.0L) * x * p1 - (kk - 1.0L) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            if (points == 1)
                p0 = 1.0L, p1 = x;
            dp = n * (x * p1 - p0) / (x * x - 1.0L);
            const long double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-19L)
                break;
        }
        // Recompute derivative at the converged root.
        long double p0 = 1.0L, p1 = x;
        for (std::size_t k = 2; k <= points; ++k) {
            const auto kk = static_cast<long double>(k);
            const long double p2 = ((2.0L * kk - 1.0L) * x * p1 - (kk - 1.0L) * p0) / kk;
            p0 = p1;
            p1 = p2;
        }
        if (points == 1) {
            x = 0.0L;
            dp = 1.0L;
        } else {
            dp = n * (x * p1 - p0) / (x * x - 1.0L);
        }
        const long double w = 2.0L / ((1.0L - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[points - 1 - i] = x;
        weights[i] = w;
        weights[points - 1 - i] = w;
    }
    if (points % 2 == 1)
        nodes[points / 2] = 0.0L;
}

ParameterGrid ParameterGrid::gauss_legendre(std::vector<Interval> bounds, std::vector<std::size_t> points) {
    check_axes(bounds, points);
    std::vector<std::vector<double>> nodes(bounds.size()), weights(bounds.size());
    for (std::size_t j = 0; j < bounds.size(); ++j) {
        std::vector<long double> x, w;
        gauss_legendre_rule(points[j], x, w);
        const long double lo = bounds[j].lower, half = 0.5L * (bounds[j].upper - bounds[j].lower);
        for (std::size_t i = 0; i < points[j]; ++i) {
            nodes[j].push_back(static_cast<double>(lo + half * (x[i] + 1.0L)));
            weights[j].push_back(static_cast<double>(half * w[i]));
        }
    }
    return tensor_product(std::move(bounds), nodes, weights);
}

} // namespace moment_ensemble
