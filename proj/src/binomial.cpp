#include "moment_ensemble/binomial.hpp"

#include <array>
#include <string>

#include "moment_ensemble/errors.hpp"

namespace moment_ensemble {

namespace {

using u128 = unsigned __int128;
constexpr unsigned table_size = max_binomial_n + 1;

struct PascalTable {
    std::array<std::array<u128, table_size>, table_size> rows{};

    constexpr PascalTable() {
        for (unsigned n = 0; n < table_size; ++n) {
            rows[n][0] = 1;
            for (unsigned k = 1; k <= n; ++k)
                rows[n][k] = rows[n - 1][k - 1] + (k < n ? rows[n - 1][k] : u128{0});
        }
    }
};

constexpr PascalTable pascal{};

} // namespace

u128 binomial_exact(unsigned n, unsigned k) {
    if (n > max_binomial_n)
        throw InvalidArgument("binomial coefficient C(" + std::to_string(n) + ", " + std::to_string(k) +
                              ") exceeds the exact table (n <= 60)");
    if (k > n)
        return 0;
    return pascal.rows[n][k];
}

long double binomial(unsigned n, unsigned k) {
    return static_cast<long double>(binomial_exact(n, k));
}

} // namespace moment_ensemble
