#include "moment_ensemble/profile.hpp"

#include <cmath>

#include "moment_ensemble/errors.hpp"

namespace moment_ensemble {

EnsembleProfile::EnsembleProfile(std::size_t nodes, std::size_t state_dim, double time)
    : nodes_(nodes), state_dim_(state_dim), states_(nodes * state_dim, 0.0), time_(time) {}

EnsembleProfile::EnsembleProfile(std::size_t nodes, std::size_t state_dim, std::vector<double> states, double time)
    : nodes_(nodes), state_dim_(state_dim), states_(std::move(states)), time_(time) {
    if (states_.size() != nodes_ * state_dim_)
        throw InvalidArgument("profile data has " + std::to_string(states_.size()) + " entries, expected " +
                              std::to_string(nodes_ * state_dim_));
}

std::size_t EnsembleProfile::first_non_finite_node() const noexcept {
    for (std::size_t k = 0; k < states_.size(); ++k)
        if (!std::isfinite(states_[k]))
            return k / state_dim_;
    return nodes_;
}

} // namespace moment_ensemble
