#include "moment_ensemble/models.hpp"

#include <cmath>

namespace moment_ensemble {

ControlAffineEnsemble make_bloch_ensemble(ParameterGrid grid) {
    ControlAffineEnsemble ens{3, {}, {}, std::move(grid)};
    ens.controls.emplace_back([](std::span<const double> x, std::span<const double> beta, std::span<double> out) {
        apply_omega_y(x.data(), out.data());
        for (auto& o : out)
            o *= beta[0];
    });
    ens.controls.emplace_back([](std::span<const double> x, std::span<const double> beta, std::span<double> out) {
        apply_omega_x(x.data(), out.data());
        for (auto& o : out)
            o *= beta[0];
    });
    return ens;
}

ControlAffineEnsemble make_nonlinear_ensemble(ParameterGrid grid) {
    ControlAffineEnsemble ens{2, {}, {}, std::move(grid)};
    ens.drift = [](std::span<const double> z, std::span<const double> beta, std::span<double> out) {
        out[0] = beta[0] * z[1];
        out[1] = beta[0] * (-z[1] - std::sin(z[0]));
    };
    ens.controls.emplace_back([](std::span<const double>, std::span<const double> beta, std::span<double> out) {
        out[0] = 0.0;
        out[1] = beta[0];
    });
    return ens;
}

} // namespace moment_ensemble
