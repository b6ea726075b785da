#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace moment_ensemble {

/// State samples x(t, beta_p) for every grid node: a P x n row-major array.
class EnsembleProfile {
public:
    EnsembleProfile() = default;
    EnsembleProfile(std::size_t nodes, std::size_t state_dim, double time = 0.0);
    EnsembleProfile(std::size_t nodes, std::size_t state_dim, std::vector<double> states, double time = 0.0);

    [[nodiscard]] std::size_t nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::size_t state_dim() const noexcept { return state_dim_; }
    [[nodiscard]] double time() const noexcept { return time_; }
    void set_time(double t) noexcept { time_ = t; }

    [[nodiscard]] std::span<const double> state(std::size_t p) const { return {states_.data() + p * state_dim_, state_dim_}; }
    [[nodiscard]] std::span<double> state(std::size_t p) { return {states_.data() + p * state_dim_, state_dim_}; }
    [[nodiscard]] double operator()(std::size_t p, std::size_t i) const { return states_[p * state_dim_ + i]; }
    [[nodiscard]] double& operator()(std::size_t p, std::size_t i) { return states_[p * state_dim_ + i]; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return states_; }
    [[nodiscard]] std::vector<double>& values() noexcept { return states_; }

    /// Index of the first non-finite entry's node, or nodes() if all finite.
    [[nodiscard]] std::size_t first_non_finite_node() const noexcept;

    friend bool operator==(const EnsembleProfile&, const EnsembleProfile&) = default;

private:
    std::size_t nodes_ = 0;
    std::size_t state_dim_ = 0;
    std::vector<double> states_;
    double time_ = 0.0;
};

} // namespace moment_ensemble
