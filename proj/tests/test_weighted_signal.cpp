#include "evospec/weighted_signal.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <filesystem>

using namespace evospec;
using namespace evospec::testing;

TEST_CASE("time grid locates nodes and rejects bad sizes") {
    TimeGrid g(-1.0, 0.25, 9);
    CHECK(g.t_end() == doctest::Approx(1.0));
    REQUIRE(g.node_at(0.5).has_value());
    CHECK(*g.node_at(0.5) == 6);
    CHECK_FALSE(g.node_at(0.1).has_value());
    CHECK_THROWS_AS(TimeGrid(0.0, 0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(0.0, 0.1, 1), std::invalid_argument);
}

TEST_CASE("weighted norm of a Gaussian matches quadrature") {
    // reference: sqrt(int exp(-2t^2 - 2t) dt) by mpmath
    TimeGrid g(-10.0, 0.01, 2001);
    Signal f(g, 1.0, 1);
    for (std::size_t j = 0; j < g.n; ++j) f.values(j, 0) = std::exp(-g.t(j) * g.t(j));
    CHECK(weighted_norm(f) == doctest::Approx(1.4374858876042041).epsilon(1e-12));
}

TEST_CASE("weighted inner product is linear in the second slot") {
    std::mt19937_64 rng(11);
    TimeGrid g(-5.0, 0.05, 201);
    Signal f = random_smooth_signal(rng, g, 0.7, 2, -2, 2);
    Signal h = random_smooth_signal(rng, g, 0.7, 2, -2, 2);
    cplx a(0.3, -1.2);
    Signal ah(g, 0.7, CMat(a * h.values));
    cplx lhs = weighted_inner(f, ah);
    CHECK(std::abs(lhs - a * weighted_inner(f, h)) < 1e-12 * std::abs(lhs));
    CHECK(std::abs(weighted_inner(f, f).real() - std::pow(weighted_norm(f), 2)) < 1e-12 * std::pow(weighted_norm(f), 2));
}

TEST_CASE("cutoff keeps the node at the cut on both sides") {
    TimeGrid g(0.0, 1.0, 5);
    Signal f(g, 1.0, CMat::Constant(5, 1, cplx(1.0)));
    Signal below = cutoff(f, 2.0, Side::below);
    Signal above = cutoff(f, 2.0, Side::above);
    CHECK(below.values.col(0).real().sum() == doctest::Approx(3.0));
    CHECK(above.values.col(0).real().sum() == doctest::Approx(3.0));
}

TEST_CASE("translate shifts by whole steps and refuses the rest") {
    TimeGrid g(0.0, 0.5, 6);
    Signal f(g, 0.0, 1);
    for (std::size_t j = 0; j < 6; ++j) f.values(j, 0) = static_cast<double>(j);
    Signal s = translate(f, 1.0);  // s(t) = f(t + 1)
    CHECK(s.values(0, 0).real() == doctest::Approx(2.0));
    CHECK(s.values(3, 0).real() == doctest::Approx(5.0));
    CHECK(s.values(5, 0).real() == doctest::Approx(0.0));
    CHECK_THROWS_AS(translate(f, 0.3), Error);
}

TEST_CASE("antiderivative of cos is sin") {
    TimeGrid g(0.0, 1e-3, 3001);
    Signal f(g, 1.0, 1);
    for (std::size_t j = 0; j < g.n; ++j) f.values(j, 0) = std::cos(g.t(j));
    Signal F = antiderivative(f);
    double err = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) err = std::max(err, std::abs(F.values(j, 0) - std::sin(g.t(j))));
    CHECK(err < 1e-6);
    CHECK_THROWS_AS(antiderivative(f.with_rho(0.0)), Error);
}

TEST_CASE("one-sided traces of a jump") {
    TimeGrid g(-1.0, 0.01, 201);
    Signal f(g, 1.0, 1);
    for (std::size_t j = 0; j < g.n; ++j) {
        double t = g.t(j);
        f.values(j, 0) = t < 0 ? 1.0 + t : 3.0 - t * t;
    }
    CHECK(trace(f, 0.0, TraceSide::left).value(0).real() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(trace(f, 0.0, TraceSide::right).value(0).real() == doctest::Approx(3.0).epsilon(1e-10));
    CHECK_THROWS_AS(trace(f, -0.995, TraceSide::left), Error);
}

TEST_CASE("causality leak and edge ratio") {
    TimeGrid g(-2.0, 0.01, 601);
    Signal u = bump_signal(g, 0.5, CVec::Ones(1), 1.0, 2.0);
    CHECK(causality_leak(u, 1.0) < 1e-14);
    CHECK(causality_leak(u, 1.6) > 0.1);
    CHECK(edge_ratio(u) == 0.0);
}

TEST_CASE("signal CSV round trip") {
    std::mt19937_64 rng(3);
    TimeGrid g(-1.0, 0.1, 21);
    Signal f = random_smooth_signal(rng, g, 0.4, 3, -0.5, 0.5);
    auto dir = std::filesystem::temp_directory_path() / "evospec_ws_test";
    std::filesystem::create_directories(dir);
    write_signal_csv(f, (dir / "f.csv").string());
    Signal back = read_signal_csv((dir / "f.csv").string(), 0.4);
    CHECK(back.grid == f.grid);
    CHECK(rel_diff(back.values, f.values) < 1e-15);
}

TEST_CASE("property: translation commutes with cutoff on grid shifts") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> steps(-20, 20), cut(50, 150);
    TimeGrid g(-2.0, 0.02, 201);
    for (int trial = 0; trial < 25; ++trial) {
        Signal f = random_smooth_signal(rng, g, 0.3, 2, -1, 1);
        double h = steps(rng) * g.dt;
        double t = g.t(static_cast<std::size_t>(cut(rng)));
        // tau_h (chi_{<=t} f) = chi_{<=t-h} tau_h f away from the window ends
        Signal a = translate(cutoff(f, t, Side::below), h);
        Signal b = cutoff(translate(f, h), t - h, Side::below);
        CHECK(rel_diff(a.values, b.values) < 1e-15);
    }
}
