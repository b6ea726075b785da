#include <doctest.h>

#include <cmath>
#include <numbers>

#include "moment_ensemble/ensemble.hpp"
#include "moment_ensemble/errors.hpp"
#include "moment_ensemble/models.hpp"
#include "oracles.hpp"

using namespace moment_ensemble;

namespace {

ControlAffineEnsemble scalar_beta_u(ParameterGrid g) {
    ControlAffineEnsemble ens{1, {}, {}, std::move(g)};
    ens.controls.push_back([](auto, auto beta, auto out) { out[0] = beta[0]; });
    return ens;
}

ControlAffineEnsemble scalar_growth(ParameterGrid g) {
    ControlAffineEnsemble ens{1, {}, {}, std::move(g)};
    ens.drift = [](auto x, auto beta, auto out) { out[0] = beta[0] * x[0]; };
    return ens;
}

} // namespace

TEST_SUITE("ensemble") {

TEST_CASE("zero fields leave the profile unchanged") {
    ControlAffineEnsemble ens{2, {}, {}, ParameterGrid::uniform_midpoint(Interval{0, 1}, 4)};
    EnsembleProfile p(4, 2, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8});
    const auto q = step(ens, p, {}, 0.25);
    CHECK(q.values() == p.values());
    CHECK(q.time() == 0.25);

    const auto traj = simulate(ens, p, OpenLoopSignal{[](double) { return std::vector<double>{}; }}, 0.1, 1.0);
    for (const auto& s : traj.samples)
        CHECK(s.profile.values() == p.values());
    CHECK(traj.samples.back().time == doctest::Approx(1.0));
}

TEST_CASE("Bloch nodes are stationary without control") {
    const auto ens = make_bloch_ensemble(ParameterGrid::uniform_midpoint(Interval{0.9, 1.1}, 5));
    EnsembleProfile p(5, 3);
    for (std::size_t i = 0; i < 5; ++i)
        p(i, 0) = 0.3, p(i, 1) = -0.4, p(i, 2) = 0.5;
    const double u[] = {0.0, 0.0};
    CHECK(step(ens, p, u, 0.01).values() == p.values());
}

TEST_CASE("RK4 is exact for a linear-in-time solution") {
    const auto ens = scalar_beta_u(ParameterGrid(std::vector<Interval>{{0.5, 1.5}}, {1.0}, {1.0}));
    const double u[] = {1.0};
    const auto q = step(ens, EnsembleProfile(1, 1), u, 0.1);
    CHECK(q(0, 0) == 0.1);
}

TEST_CASE("RK4 global error is fourth order") {
    const auto ens = scalar_growth(ParameterGrid::uniform_midpoint(Interval{0.5, 1.5}, 3));
    auto error = [&](double dt) {
        EnsembleProfile p(3, 1, std::vector<double>{1, 1, 1});
        const auto plan = plan_steps(dt, 1.0);
        for (std::size_t i = 0; i < plan.steps; ++i)
            p = step(ens, p, {}, i + 1 == plan.steps ? plan.last_dt : dt);
        double e = 0;
        for (std::size_t i = 0; i < 3; ++i)
            e = std::max(e, std::abs(p(i, 0) - std::exp(ens.grid.node(i)[0])));
        return e;
    };
    const double ratio = error(0.1) / error(0.05);
    CHECK(ratio == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("open-loop quarter turn at beta = 1") {
    const auto ens = make_bloch_ensemble(ParameterGrid(std::vector<Interval>{{0.9, 1.1}}, {1.0}, {0.2}));
    EnsembleProfile p(1, 3, std::vector<double>{0, 0, 1});
    const auto traj = simulate(ens, p, OpenLoopSignal{[](double) { return std::vector<double>{std::numbers::pi / 2, 0}; }},
                               1e-2, 1.0);
    const auto& x = traj.samples.back().profile;
    const auto expected = oracle::rotate_y({0, 0, 1}, std::numbers::pi / 2);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(x(0, i) == doctest::Approx(expected[i]).epsilon(1e-9));
}

TEST_CASE("Bloch norm is conserved") {
    const auto ens = make_bloch_ensemble(ParameterGrid::uniform_midpoint(Interval{0.9, 1.1}, 50));
    EnsembleProfile p(50, 3);
    for (std::size_t i = 0; i < 50; ++i)
        p(i, 2) = 1.0;
    const auto traj = simulate(
        ens, p, OpenLoopSignal{[](double t) { return std::vector<double>{std::sin(3 * t) + 1, std::cos(t)}; }}, 1e-3,
        1.0, {}, {100, true});
    double drift = 0;
    for (const auto& s : traj.samples)
        for (std::size_t i = 0; i < 50; ++i) {
            const auto x = s.profile.state(i);
            drift = std::max(drift, std::abs(std::hypot(x[0], x[1], x[2]) - 1.0));
        }
    CHECK(drift < 1e-6);
}

TEST_CASE("zero feedback matches the zero open-loop run") {
    const auto ens = make_nonlinear_ensemble(ParameterGrid::uniform_midpoint(Interval{0.5, 1}, 20));
    EnsembleProfile p(20, 2);
    for (std::size_t i = 0; i < 20; ++i)
        p(i, 0) = 2, p(i, 1) = 1;
    const auto a = simulate(ens, p, OpenLoopSignal{[](double) { return std::vector<double>{0.0}; }}, 1e-2, 0.5);
    const auto b = simulate(
        ens, p, FeedbackSignal{[](const MomentSequence&, double) { return std::vector<double>{0.0}; }, 4}, 1e-2, 0.5);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t s = 0; s < a.samples.size(); ++s)
        CHECK(a.samples[s].profile == b.samples[s].profile);
    REQUIRE(b.samples.front().moments.has_value());
    CHECK(b.samples.front().moments->max_order() == 4);
}

TEST_CASE("feedback sees the moments of the current profile") {
    const auto ens = scalar_beta_u(ParameterGrid::uniform_midpoint(Interval{0, 1}, 10));
    std::vector<double> seen;
    const auto traj = simulate(ens, EnsembleProfile(10, 1),
                               FeedbackSignal{[&](const MomentSequence& m, double) {
                                                  seen.push_back(static_cast<double>(m.at(0, 0)));
                                                  return std::vector<double>{1.0};
                                              },
                                              0},
                               0.1, 0.3);
    REQUIRE(seen.size() == 4);
    // x = beta t, so m_0 = t / 2
    for (std::size_t i = 0; i < seen.size(); ++i)
        CHECK(seen[i] == doctest::Approx(0.05 * i).epsilon(1e-12));
    CHECK(traj.samples.size() == 4);
}

TEST_CASE("observers and record stride") {
    ControlAffineEnsemble ens{1, {}, {}, ParameterGrid::uniform_midpoint(Interval{0, 1}, 2)};
    Observer obs{"first", [](const EnsembleProfile& p, const MomentSequence*, std::span<const double>) { return p(0, 0); }};
    const auto traj = simulate(ens, EnsembleProfile(2, 1), OpenLoopSignal{[](double) { return std::vector<double>{}; }},
                               0.1, 1.0, {obs}, {3, false});
    CHECK(traj.observer_names == std::vector<std::string>{"first"});
    // steps 0, 3, 6, 9 and the final step 10
    CHECK(traj.samples.size() == 5);
    CHECK(traj.samples.back().time == doctest::Approx(1.0));
    CHECK(traj.samples.front().profile.nodes() == 0);
}

TEST_CASE("blow-up is reported with the node index") {
    const auto ens = scalar_growth(ParameterGrid::uniform_midpoint(Interval{0, 100}, 2));
    EnsembleProfile p(2, 1, std::vector<double>{1, 1});
    CHECK_THROWS_WITH_AS(
        (void)simulate(ens, p, OpenLoopSignal{[](double) { return std::vector<double>{}; }}, 0.01, 1.0),
        doctest::Contains("node 1"), NumericalFailure);
}

TEST_CASE("step preconditions") {
    const auto ens = scalar_beta_u(ParameterGrid::uniform_midpoint(Interval{0, 1}, 2));
    const double u[] = {1.0};
    CHECK_THROWS_AS((void)step(ens, EnsembleProfile(2, 1), u, 0.0), InvalidArgument);
    CHECK_THROWS_AS((void)step(ens, EnsembleProfile(3, 1), u, 0.1), InvalidArgument);
    const double bad[] = {std::nan("")};
    CHECK_THROWS_AS((void)step(ens, EnsembleProfile(2, 1), bad, 0.1), NumericalFailure);
    CHECK_THROWS_AS((void)step(ens, EnsembleProfile(2, 1), {}, 0.1), InvalidArgument);
}

TEST_CASE("Lp distances") {
    const auto g = ParameterGrid::uniform_midpoint(Interval{0, 1}, 1000);
    EnsembleProfile a(g.size(), 1), b(g.size(), 1), c(g.size(), 1);
    for (std::size_t p = 0; p < g.size(); ++p) {
        const double x = g.node(p)[0];
        a(p, 0) = x <= 0.5 ? 1 : 0;
        b(p, 0) = x >= 0.5 ? 1 : 0;
        c(p, 0) = a(p, 0) + 0.3;
    }
    CHECK(lp_distance(a, a, g, 2.0) == 0.0);
    CHECK(lp_distance(a, b, g, 2.0) == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(lp_distance(a, c, g, infinity_norm) == doctest::Approx(0.3));
    CHECK(lp_distance(a, c, g, 1.0) == doctest::Approx(0.3));
    CHECK_THROWS_AS((void)lp_distance(a, EnsembleProfile(10, 1), g, 2.0), InvalidArgument);
    CHECK_THROWS_AS((void)lp_distance(a, b, g, 0.5), InvalidArgument);
}

TEST_CASE("grid refinement changes moments at second order") {
    auto m1 = [](std::size_t P) {
        const auto g = ParameterGrid::uniform_midpoint(Interval{0, 1}, P);
        EnsembleProfile p(P, 1);
        for (std::size_t i = 0; i < P; ++i)
            p(i, 0) = std::exp(g.node(i)[0]);
        return static_cast<double>(compute_ensemble_moments(p, g, 3).at(3, 0));
    };
    const double exact = 6 - 2 * std::exp(1.0);
    const double ratio = std::abs(m1(50) - exact) / std::abs(m1(100) - exact);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(ParameterGrid(std::vector<Interval>{{1, 1}}, {1.0}, {0.0}), InvalidArgument);
    CHECK_THROWS_AS(ParameterGrid(std::vector<Interval>{{0, 1}}, {1.5}, {1.0}), InvalidArgument);
    CHECK_THROWS_AS(ParameterGrid(std::vector<Interval>{{0, 1}}, {0.5}, {0.9}), InvalidArgument);
    CHECK_THROWS_AS(ParameterGrid(std::vector<Interval>{{0, 1}}, {0.2, 0.8}, {1.5, -0.5}), InvalidArgument);
    const auto g = ParameterGrid::uniform_midpoint({{0, 1}, {2, 4}}, {3, 2});
    CHECK(g.size() == 6);
    CHECK(g.volume() == doctest::Approx(2.0));
    CHECK(g.node(1)[0] == doctest::Approx(1.0 / 6));
    CHECK(g.node(1)[1] == doctest::Approx(3.5));
    const auto gl = ParameterGrid::gauss_legendre(Interval{-1, 1}, 5);
    double s = 0;
    for (double w : gl.weights())
        s += w;
    CHECK(s == doctest::Approx(2.0).epsilon(1e-15));
}

}
