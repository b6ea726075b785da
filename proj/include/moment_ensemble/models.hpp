#pragma once

#include "moment_ensemble/ensemble.hpp"

namespace moment_ensemble {

/// Bloch ensemble dM/dt = eps [u Omega_y + v Omega_x] M, labelled by the rf
/// scaling eps. Control 0 is u (rotation about y), control 1 is v (about x).
[[nodiscard]] ControlAffineEnsemble make_bloch_ensemble(ParameterGrid grid);

/// z = (x, y): dz/dt = beta (y, -y - sin x) + (0, beta) u.
[[nodiscard]] ControlAffineEnsemble make_nonlinear_ensemble(ParameterGrid grid);

/// Omega_y m = (m_3, 0, -m_1)
template <class T>
constexpr void apply_omega_y(const T* m, T* out) {
    out[0] = m[2];
    out[1] = T(0);
    out[2] = -m[0];
}

/// Omega_x m = (0, -m_3, m_2)
template <class T>
constexpr void apply_omega_x(const T* m, T* out) {
    out[0] = T(0);
    out[1] = -m[2];
    out[2] = m[1];
}

} // namespace moment_ensemble
