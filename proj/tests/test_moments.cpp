#include <doctest.h>

#include <cmath>
#include <random>

#include "moment_ensemble/binomial.hpp"
#include "moment_ensemble/errors.hpp"
#include "moment_ensemble/moments.hpp"
#include "oracles.hpp"

using namespace moment_ensemble;

namespace {

EnsembleProfile scalar_profile(const ParameterGrid& g, double (*f)(double)) {
    EnsembleProfile p(g.size(), 1);
    for (std::size_t i = 0; i < g.size(); ++i)
        p(i, 0) = f(g.node(i)[0]);
    return p;
}

EnsembleProfile polynomial_profile(const ParameterGrid& g, const oracle::Poly& phi) {
    EnsembleProfile p(g.size(), 1);
    for (std::size_t i = 0; i < g.size(); ++i)
        p(i, 0) = static_cast<double>(oracle::evaluate(phi, g.node(i)[0]));
    return p;
}

MomentSequence unit_moments(double (*f)(double), unsigned N, std::size_t points = 40) {
    const auto g = ParameterGrid::gauss_legendre(Interval{0, 1}, points);
    return compute_ensemble_moments(scalar_profile(g, f), g, N);
}

double one(double) { return 1.0; }
double zero(double) { return 0.0; }
double ident(double b) { return b; }
double square(double b) { return b * b; }

} // namespace

TEST_SUITE("moments") {

TEST_CASE("constant profile on the unit interval") {
    const auto m = unit_moments(one, 20);
    for (unsigned k = 0; k <= 20; ++k)
        CHECK(static_cast<double>(m.at(k, 0)) == doctest::Approx(1.0 / (k + 1)).epsilon(1e-15));
}

TEST_CASE("constant Bloch state on [0.9, 1.1]") {
    const auto g = ParameterGrid::gauss_legendre(Interval{0.9, 1.1}, 30);
    EnsembleProfile p(g.size(), 3);
    for (std::size_t i = 0; i < g.size(); ++i)
        p(i, 2) = 1.0;
    const auto m = compute_ensemble_moments(p, g, 35);
    CHECK(static_cast<double>(m.at(0, 2)) == doctest::Approx(0.2).epsilon(1e-14));
    for (unsigned k = 0; k <= 35; ++k) {
        CHECK(m.at(k, 0) == 0.0L);
        CHECK(m.at(k, 1) == 0.0L);
        const double expected = static_cast<double>(oracle::monomial_integral(k, 0.9L, 1.1L));
        CHECK(static_cast<double>(m.at(k, 2)) == doctest::Approx(expected).epsilon(1e-13));
    }
    const double value[] = {0.0, 0.0, 1.0};
    const Interval box[] = {{0.9, 1.1}};
    const auto closed = constant_profile_moments(value, box, 35);
    for (unsigned k = 0; k <= 35; ++k)
        CHECK(std::abs(static_cast<double>(closed.at(k, 2) - m.at(k, 2))) < 1e-14);
}

TEST_CASE("zero profile has zero moments") {
    const auto m = unit_moments(zero, 10);
    for (std::size_t r = 0; r < m.index_count(); ++r)
        CHECK(m.at_rank(r, 0) == 0.0L);
}

TEST_CASE("moments in two parameter dimensions") {
    const auto g = ParameterGrid::gauss_legendre({{0, 1}, {0, 2}}, {8, 8});
    EnsembleProfile p(g.size(), 1);
    for (std::size_t i = 0; i < g.size(); ++i)
        p(i, 0) = 1.0;
    const auto m = compute_ensemble_moments(p, g, 4);
    // int_0^1 int_0^2 b1^i b2^j = 1/(i+1) * 2^(j+1)/(j+1)
    for (const auto& k : m.index_set().indices())
        CHECK(static_cast<double>(m(k, 0)) ==
              doctest::Approx(1.0 / (k[0] + 1) * std::pow(2.0, k[1] + 1) / (k[1] + 1)).epsilon(1e-14));
}

TEST_CASE("shape errors") {
    const auto g = ParameterGrid::uniform_midpoint(Interval{0, 1}, 10);
    CHECK_THROWS_AS((void)compute_ensemble_moments(EnsembleProfile(9, 1), g, 3), InvalidArgument);
    EnsembleProfile bad(10, 1);
    bad(3, 0) = std::nan("");
    CHECK_THROWS_AS((void)compute_ensemble_moments(bad, g, 3), InvalidArgument);
    CHECK_THROWS_AS((void)compute_output_moments(bad, g, 3), InvalidArgument);
}

TEST_CASE("linearity of the moment map") {
    const auto g = ParameterGrid::uniform_midpoint(Interval{0.5, 1.0}, 200);
    EnsembleProfile a(g.size(), 2), b(g.size(), 2), c(g.size(), 2);
    const double alpha = 0.7, beta = -1.3;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.node(i)[0];
        a(i, 0) = std::sin(3 * x), a(i, 1) = x * x;
        b(i, 0) = std::cos(x), b(i, 1) = 1.0 / (1 + x);
        c(i, 0) = alpha * a(i, 0) + beta * b(i, 0);
        c(i, 1) = alpha * a(i, 1) + beta * b(i, 1);
    }
    const auto ma = compute_ensemble_moments(a, g, 15), mb = compute_ensemble_moments(b, g, 15),
               mc = compute_ensemble_moments(c, g, 15);
    const auto combo = Real(alpha) * ma + Real(beta) * mb;
    for (std::size_t r = 0; r < mc.index_count(); ++r)
        for (std::size_t i = 0; i < 2; ++i)
            CHECK(std::abs(static_cast<double>(combo.at_rank(r, i) - mc.at_rank(r, i))) <=
                  1e-14 * std::max(1.0, std::abs(static_cast<double>(mc.at_rank(r, i)))));
}

TEST_CASE("output moments: Bernoulli indicators and the identity") {
    const auto g = ParameterGrid::uniform_midpoint(Interval{0, 1}, 1000);
    EnsembleProfile i1(g.size(), 1), i2(g.size(), 1);
    for (std::size_t p = 0; p < g.size(); ++p) {
        i1(p, 0) = g.node(p)[0] <= 0.5 ? 1.0 : 0.0;
        i2(p, 0) = g.node(p)[0] >= 0.5 ? 1.0 : 0.0;
    }
    const auto m1 = compute_output_moments(i1, g, 10), m2 = compute_output_moments(i2, g, 10);
    CHECK(m1.index_dim() == 1);
    CHECK(m1.state_dim() == 1);
    CHECK(static_cast<double>(m1.at(0, 0)) == doctest::Approx(1.0));
    for (unsigned k = 1; k <= 10; ++k) {
        CHECK(std::abs(static_cast<double>(m1.at(k, 0)) - 0.5) < 1e-3);
        CHECK(m1.at(k, 0) == m2.at(k, 0));
    }
    const auto gg = ParameterGrid::gauss_legendre(Interval{0, 1}, 20);
    const auto mi = compute_output_moments(scalar_profile(gg, ident), gg, 12);
    for (unsigned k = 0; k <= 12; ++k)
        CHECK(static_cast<double>(mi.at(k, 0)) == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
}

TEST_CASE("output moments with a two-component state") {
    const auto g = ParameterGrid::gauss_legendre(Interval{0, 1}, 20);
    EnsembleProfile p(g.size(), 2);
    for (std::size_t i = 0; i < g.size(); ++i)
        p(i, 0) = g.node(i)[0], p(i, 1) = 2.0;
    const auto m = compute_output_moments(p, g, 3);
    CHECK(m.index_dim() == 2);
    // int beta^a 2^b = 2^b / (a + 1)
    for (const auto& k : m.index_set().indices())
        CHECK(static_cast<double>(m(k, 0)) == doctest::Approx(std::pow(2.0, k[1]) / (k[0] + 1)).epsilon(1e-14));
}

TEST_CASE("difference operator examples") {
    const auto m = unit_moments(one, 12);
    CHECK(static_cast<double>(difference_operator(m, MultiIndex{1}, MultiIndex{1})) ==
          doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    std::vector<long double> raw;
    for (unsigned k = 0; k <= 12; ++k)
        raw.push_back(m.at(k, 0));
    for (unsigned n = 0; n <= 10; ++n)
        for (unsigned k = 0; k <= n; ++k) {
            const auto lib = difference_operator(m, MultiIndex{n - k}, MultiIndex{k});
            CHECK(std::abs(static_cast<double>(lib - oracle::alternating_difference(raw, n - k, k))) < 1e-15);
            // Beta integral k!(n-k)!/(n+1)!
            const double beta_int = 1.0 / ((n + 1) * oracle::binomial(n, k));
            CHECK(static_cast<double>(lib) == doctest::Approx(beta_int).epsilon(1e-12));
        }
    for (unsigned k = 0; k <= 12; ++k)
        CHECK(difference_operator(m, MultiIndex{0}, MultiIndex{k}) == m.at(k, 0));

    MomentSequence c(2, 1, 6);
    for (std::size_t r = 0; r < c.index_count(); ++r)
        c.at_rank(r, 0) = 2.5L;
    for (const auto& n : enumerate_multiindices(2, 3))
        if (n.order() >= 1)
            CHECK(difference_operator(c, n, MultiIndex{1, 1}) == 0.0L);
    CHECK_THROWS_AS((void)difference_operator(m, MultiIndex{7}, MultiIndex{6}), InvalidArgument);
}

TEST_CASE("integral representation of differences") {
    // degree-6 polynomial, exact Gauss moments vs the exact Bernstein integral
    const oracle::Poly phi{0.3L, -1.0L, 2.0L, 0.5L, -0.25L, 1.5L, -0.75L};
    const auto g = ParameterGrid::gauss_legendre(Interval{0, 1}, 24);
    const auto m = compute_ensemble_moments(polynomial_profile(g, phi), g, 10);
    for (unsigned n = 0; n <= 10; ++n)
        for (unsigned k = 0; k <= n; ++k)
            CHECK(std::abs(static_cast<double>(difference_operator(m, MultiIndex{n - k}, MultiIndex{k}) -
                                               oracle::bernstein_integral(phi, n, k))) < 1e-12);
}

TEST_CASE("Hausdorff L2 condition") {
    const auto m1 = unit_moments(one, 20);
    const auto r1 = check_hausdorff_l2(m1, 20);
    CHECK(r1.per_n.front().n == MultiIndex{0});
    CHECK(static_cast<double>(r1.per_n.front().value) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(static_cast<double>(r1.max_value) <= 1.0 + 1e-9);

    const auto r0 = check_hausdorff_l2(unit_moments(zero, 10), 10);
    CHECK(r0.max_value == 0.0L);

    const auto rb = check_hausdorff_l2(unit_moments(ident, 10), 10);
    CHECK(static_cast<double>(rb.max_value) <= 1.0 / 3.0 + 1e-12);
    CHECK(rb.per_n.size() == 11);

    CHECK_THROWS_AS((void)check_hausdorff_l2(unit_moments(one, 5), 6), InvalidArgument);
}

TEST_CASE("Hausdorff L1 condition") {
    const auto r = check_hausdorff_l1(unit_moments(one, 3), 3);
    CHECK(static_cast<double>(r.per_n.back().value) == doctest::Approx(1.0).epsilon(1e-14));

    const auto g = ParameterGrid::gauss_legendre({{0, 1}, {0, 1}}, {12, 12});
    EnsembleProfile p(g.size(), 1);
    for (std::size_t i = 0; i < g.size(); ++i)
        p(i, 0) = 1.0;
    const auto r2 = check_hausdorff_l1(compute_ensemble_moments(p, g, 10), 5);
    CHECK(r2.per_n.size() == 36);
    for (const auto& t : r2.per_n)
        CHECK(static_cast<double>(t.value) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(check_hausdorff_l1(unit_moments(zero, 6), 6).max_value == 0.0L);
}

TEST_CASE("binomial partition of unity") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const long double b = unif(rng);
        for (unsigned n : {1u, 5u, 20u, 40u}) {
            long double s = 0;
            for (unsigned k = 0; k <= n; ++k)
                s += binomial(n, k) * std::pow(b, (long double)k) * std::pow(1 - b, (long double)(n - k));
            CHECK(std::abs(static_cast<double>(s - 1)) < 1e-12);
        }
    }
}

TEST_CASE("rescaling unit-interval moments") {
    const auto u = unit_moments(one, 10);
    const auto r = rescale_moments(u, 0.9, 1.1);
    CHECK(std::abs(static_cast<double>(r.at(0, 0)) - 1.0) < 1e-15);
    CHECK(std::abs(static_cast<double>(r.at(1, 0)) - 1.0) < 1e-15);
    for (unsigned k = 0; k <= 10; ++k)
        CHECK(static_cast<double>(r.at(k, 0)) ==
              doctest::Approx(static_cast<double>(oracle::monomial_integral(k, 0.9L, 1.1L) / 0.2L)).epsilon(1e-13));
    const auto id = rescale_moments(u, 0.0, 1.0);
    for (unsigned k = 0; k <= 10; ++k)
        CHECK(id.at(k, 0) == u.at(k, 0));
    CHECK_THROWS_WITH_AS((void)rescale_moments(u, 1.1, 0.9), doctest::Contains("b must exceed a"), InvalidArgument);
    CHECK_THROWS_AS((void)rescale_moments(u, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("radical distance") {
    const auto m = unit_moments(ident, 6);
    CHECK(radical_distance(m, m) == 0.0L);
    MomentSequence ones(1, 1, 8), zeros(1, 1, 8);
    for (unsigned k = 0; k <= 8; ++k)
        ones.at(k, 0) = 1.0L;
    CHECK(static_cast<double>(radical_distance(ones, zeros)) == doctest::Approx(1.0));
    // the |k| = 0 term is excluded
    MomentSequence shifted = zeros;
    shifted.at(0, 0) = 5.0L;
    CHECK(radical_distance(shifted, zeros) == 0.0L);
    // signed real root: (-8)^(1/3) = -2
    MomentSequence neg(1, 1, 3), pos(1, 1, 3);
    neg.at(3, 0) = -8.0L;
    CHECK(static_cast<double>(radical_distance(neg, pos)) == doctest::Approx(2.0));
    CHECK_THROWS_AS((void)radical_distance(MomentSequence(1, 1, 3), MomentSequence(1, 1, 4)), InvalidArgument);
}

TEST_CASE("moment inversion") {
    for (unsigned n : {5u, 10u, 20u}) {
        const auto inv = invert_moments(unit_moments(one, n), n);
        CHECK(inv.lattice.size() == n + 1);
        for (std::size_t p = 0; p < inv.lattice.size(); ++p)
            CHECK(std::abs(inv.density(p, 0) - 1.0) < 1e-10);
    }
    const auto inv0 = invert_moments(unit_moments(zero, 8), 8);
    for (double v : inv0.density.values())
        CHECK(v == 0.0);

    const unsigned n = 20;
    const auto inv = invert_moments(unit_moments(ident, n), n);
    double worst = 0;
    for (std::size_t p = 0; p <= n; ++p) {
        const double k = static_cast<double>(p);
        CHECK(inv.lattice.node(p)[0] == doctest::Approx(k / n));
        CHECK(inv.density(p, 0) == doctest::Approx((k + 1) / (n + 2)).epsilon(1e-9));
        worst = std::max(worst, std::abs(inv.density(p, 0) - k / n));
    }
    CHECK(worst <= 0.05);
    CHECK_THROWS_AS((void)invert_moments(unit_moments(one, 9), 10), InvalidArgument);
}

TEST_CASE("inversion error halves under refinement") {
    double prev = 0;
    for (unsigned n : {10u, 20u, 40u}) {
        const auto inv = invert_moments(unit_moments(square, n, 40), n);
        double worst = 0;
        for (std::size_t p = 0; p <= n; ++p) {
            const double b = inv.lattice.node(p)[0];
            worst = std::max(worst, std::abs(inv.density(p, 0) - b * b));
        }
        if (prev > 0)
            CHECK(prev / worst == doctest::Approx(2.0).epsilon(0.25));
        prev = worst;
    }
}

TEST_CASE("truncation and arithmetic helpers") {
    const auto m = unit_moments(one, 6);
    const auto t = m.truncated(3);
    CHECK(t.max_order() == 3);
    for (unsigned k = 0; k <= 3; ++k)
        CHECK(t.at(k, 0) == m.at(k, 0));
    CHECK_THROWS_AS((void)(m + t), InvalidArgument);
    const auto d = m - m;
    for (std::size_t r = 0; r < d.index_count(); ++r)
        CHECK(d.at_rank(r, 0) == 0.0L);
    std::vector<Real> terms(1000, 0.1L);
    CHECK(static_cast<double>(pairwise_sum(terms)) == doctest::Approx(100.0).epsilon(1e-16));
}

}
