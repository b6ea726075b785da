#pragma once

#include <cstdint>

namespace moment_ensemble {

// Largest n for which binomial coefficients are tabulated exactly.
inline constexpr unsigned max_binomial_n = 60;

// Exact C(n, k) from a 128-bit Pascal table; throws InvalidArgument for n > 60.
[[nodiscard]] unsigned __int128 binomial_exact(unsigned n, unsigned k);

// C(n, k) rounded once to long double. Zero when k > n.
[[nodiscard]] long double binomial(unsigned n, unsigned k);

} // namespace moment_ensemble
