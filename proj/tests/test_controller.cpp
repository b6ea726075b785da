#include <doctest.h>

#include <cmath>
#include <random>

#include "moment_ensemble/controller.hpp"
#include "moment_ensemble/errors.hpp"
#include "moment_ensemble/moment_dynamics.hpp"
#include "oracles.hpp"

using namespace moment_ensemble;

namespace {

MomentSequence random_moments(std::mt19937_64& rng, std::size_t n, unsigned N) {
    std::uniform_real_distribution<double> unif(-1, 1);
    MomentSequence m(1, n, N);
    for (std::size_t r = 0; r < m.index_count(); ++r)
        for (std::size_t i = 0; i < n; ++i)
            m.at_rank(r, i) = unif(rng);
    return m;
}

QuadraticLyapunov lyap(MomentSequence target, unsigned order, unsigned first = 0) {
    QuadraticLyapunov L;
    L.target = std::move(target);
    L.order = order;
    L.first_order = first;
    return L;
}

} // namespace

TEST_SUITE("controller") {

TEST_CASE("Lyapunov value") {
    std::mt19937_64 rng(1);
    const auto m = random_moments(rng, 3, 5);
    CHECK(lyapunov_value(lyap(m, 5), m) == 0.0);

    MomentSequence target(1, 1, 0), m1(1, 1, 0);
    m1.at(0, 0) = 2.0L;
    CHECK(lyapunov_value(lyap(target, 0), m1) == 4.0);
}

TEST_CASE("Lyapunov value of the Bloch initial state") {
    const unsigned N = 35;
    const auto init = BlochMomentChain::from_constant(N, {0.9, 1.1}, Vec3{0, 0, 1}, Closure::hold_last);
    const auto goal = BlochMomentChain::from_constant(N, {0.9, 1.1}, Vec3{1, 0, 0}, Closure::hold_last);
    long double expected = 0;
    for (unsigned j = 0; j <= N; ++j) {
        const long double mj = oracle::monomial_integral(j, 0.9L, 1.1L);
        expected += 2 * mj * mj;
    }
    CHECK(lyapunov_value(lyap(goal.moments, N), init.moments) ==
          doctest::Approx(static_cast<double>(expected)).epsilon(1e-14));
}

TEST_CASE("weights and windows") {
    MomentSequence target(1, 1, 3), m(1, 1, 3);
    for (unsigned k = 0; k <= 3; ++k)
        m.at(k, 0) = 1.0L;
    auto L = lyap(target, 3, 1);
    CHECK(lyapunov_value(L, m) == 3.0);
    L.weights = {1, 2, 3, 4};
    CHECK(lyapunov_value(L, m) == 9.0);
    L.weights = {1, -2, 3, 4};
    CHECK_THROWS_AS(L.validate(), InvalidArgument);
    CHECK_THROWS_AS((void)lyapunov_value(lyap(target, 4), m), InvalidArgument);
}

TEST_CASE("gradient matches finite differences") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const auto target = random_moments(rng, 2, 6);
        auto m = random_moments(rng, 2, 6);
        const auto L = lyap(target, 6);
        const auto grad = lyapunov_gradient(L, m);
        for (std::size_t r = 0; r < m.index_count(); ++r)
            for (std::size_t i = 0; i < 2; ++i) {
                const Real h = 1e-6L, saved = m.at_rank(r, i);
                m.at_rank(r, i) = saved + h;
                const double up = lyapunov_value(L, m);
                m.at_rank(r, i) = saved - h;
                const double down = lyapunov_value(L, m);
                m.at_rank(r, i) = saved;
                const double fd = (up - down) / (2 * static_cast<double>(h));
                CHECK(fd == doctest::Approx(static_cast<double>(grad.at_rank(r, i))).epsilon(1e-6));
            }
    }
}

TEST_CASE("gradient damping examples") {
    std::mt19937_64 rng(3);
    const auto m = random_moments(rng, 3, 8);
    FeedbackLaw law;
    law.lyapunov = lyap(m, 7);
    const auto images = bloch_control_images(m, 7);
    const auto u0 = gradient_damping_control(law, m, images.drift, images.controls);
    CHECK(u0 == std::vector<double>{0.0, 0.0});

    // u = -gamma <e, g> (half the gradient pairing): <e, g> = 3 with gamma = 2 gives u = -6
    MomentSequence target(1, 1, 0), one(1, 1, 0), g(1, 1, 0);
    one.at(0, 0) = 3.0L;
    g.at(0, 0) = 1.0L;
    FeedbackLaw scalar;
    scalar.gain = 2.0;
    scalar.lyapunov = lyap(target, 0);
    CHECK(gradient_damping_control(scalar, one, MomentSequence(1, 1, 0), {g}) == std::vector<double>{-6.0});
}

TEST_CASE("gain scales the control exactly") {
    std::mt19937_64 rng(4);
    const auto target = random_moments(rng, 3, 11);
    const auto m = random_moments(rng, 3, 11);
    const auto images = bloch_control_images(m, 10);
    FeedbackLaw law;
    law.lyapunov = lyap(target, 10);
    const auto base = gradient_damping_control(law, m, images.drift, images.controls);
    law.gain = 4.0;
    const auto scaled = gradient_damping_control(law, m, images.drift, images.controls);
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(scaled[i] == 4.0 * base[i]);
}

TEST_CASE("gradient damping reproduces the explicit Bloch law") {
    std::mt19937_64 rng(5);
    const unsigned N = 35;
    for (int trial = 0; trial < 100; ++trial) {
        const auto target = random_moments(rng, 3, N + 1);
        const auto m = random_moments(rng, 3, N + 1);
        FeedbackLaw law;
        law.lyapunov = lyap(target, N, trial % 2);
        const auto images = bloch_control_images(m, N);
        const auto u = gradient_damping_control(law, m, images.drift, images.controls);
        const auto explicit_u = explicit_bloch_control(law, m);

        std::vector<std::array<long double, 3>> mm(N + 2), tt(N + 2);
        for (unsigned k = 0; k <= N + 1; ++k)
            for (std::size_t i = 0; i < 3; ++i)
                mm[k][i] = m.at(k, i), tt[k][i] = target.at(k, i);
        const double verbatim = oracle::explicit_bloch_law(mm, tt, law.lyapunov.first_order, N);
        CHECK(std::abs(u[0] - verbatim) < 1e-12);
        CHECK(std::abs(explicit_u[0] - verbatim) < 1e-12);
        CHECK(explicit_u[1] == 0.0);
    }
}

TEST_CASE("drift-free descent") {
    std::mt19937_64 rng(6);
    const auto target = random_moments(rng, 3, 9);
    const auto m = random_moments(rng, 3, 9);
    FeedbackLaw law;
    law.lyapunov = lyap(target, 8);
    const auto images = bloch_control_images(m, 8);
    const auto u = gradient_damping_control(law, m, images.drift, images.controls);
    CHECK(lyapunov_derivative(law.lyapunov, m, images.drift, images.controls, u) <= 0.0);
}

TEST_CASE("explicit nonlinear law") {
    FeedbackLaw law;
    law.kind = LawKind::explicit_nonlinear;
    law.lyapunov = lyap(MomentSequence(1, 2, 50), 50, 1);
    MomentSequence e(1, 2, 50);
    CHECK(explicit_nonlinear_control(law, e) == 0.0);
    e.at(7, 0) = 1.0L;
    CHECK(explicit_nonlinear_control(law, e) == -5.0);
    e.at(7, 0) = 0.0L;
    e.at(7, 1) = 2.0L;
    CHECK(explicit_nonlinear_control(law, e) == -2.0);
    // order 0 lies outside the window that starts at j = 1
    e.at(0, 0) = 10.0L;
    CHECK(explicit_nonlinear_control(law, e) == -2.0);
}

TEST_CASE("saturation") {
    FeedbackLaw law;
    std::vector<double> u{3.0, -7.0, 0.5};
    clamp_controls(law, u);
    CHECK(u == std::vector<double>{3.0, -7.0, 0.5});
    law.u_max = 1.0;
    clamp_controls(law, u);
    CHECK(u == std::vector<double>{1.0, -1.0, 0.5});
}

TEST_CASE("singularity monitor") {
    MomentSequence target(1, 3, 3);
    const auto at_target = singularity_monitor(lyap(target, 2), target, bloch_control_images(target, 2).controls, 1e-6);
    CHECK_FALSE(at_target.near_singular);

    // unit error orthogonal to every control image
    MomentSequence m(1, 3, 3);
    m.at(0, 1) = 1.0L;
    const auto status = singularity_monitor(lyap(target, 2), m, bloch_control_images(m, 2).controls, 1e-6);
    CHECK(status.near_singular);
    CHECK(status.error_norm == doctest::Approx(1.0));
    CHECK(status.gradient_norm == 0.0);
}

TEST_CASE("law names") {
    CHECK(law_kind_from_string("explicit_bloch") == LawKind::explicit_bloch);
    CHECK(std::string(to_string(LawKind::gradient_damping)) == "gradient_damping");
    CHECK_THROWS_AS((void)law_kind_from_string("pid"), InvalidArgument);
}

}
