#include "evospec/oracle.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace evospec;
using namespace evospec::testing;

namespace {

double value_at(const Signal& u, double t) { return u.values(static_cast<Eigen::Index>(*u.grid.node_at(t)), 0).real(); }

}  // namespace

TEST_CASE("Post-Widder scalar value") {
    CMat one = CMat::Identity(1, 1), zero = CMat::Zero(1, 1);
    // (1 + t/k)^{-(k+1)} at t = 1, k = 100
    CVec x = post_widder(one, zero, one, CVec::Ones(1), 1.0, 100);
    CHECK(x(0).real() == doctest::Approx(0.3660507052763557).epsilon(1e-14));
}

TEST_CASE("Post-Widder converges to the matrix exponential") {
    std::mt19937_64 rng(1);
    CMat B = random_matrix(rng, 3, 3);
    CMat A = B - B.adjoint() + CMat::Identity(3, 3);
    CVec x = random_vector(rng, 3);
    CVec ref = exp_eigen_oracle(A, x, 0.7);
    double e100 = (post_widder(CMat::Identity(3, 3), CMat::Zero(3, 3), A, x, 0.7, 100) - ref).norm();
    double e400 = (post_widder(CMat::Identity(3, 3), CMat::Zero(3, 3), A, x, 0.7, 400) - ref).norm();
    CHECK(e400 < e100);
    CHECK(e100 / e400 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("eigen exponential of a rotation") {
    CMat A(2, 2);
    A << 0.0, -1.0, 1.0, 0.0;
    CVec x(2);
    x << 1.0, 0.0;
    CVec y = exp_eigen_oracle(A, x, kPi / 2);
    // e^{-tA} x with A the generator of rotation by -t
    CHECK(std::abs(y(0)) < 1e-14);
    CHECK(std::abs(y(1) - (-1.0)) < 1e-14);
}

TEST_CASE("implicit Euler for the scalar ODE") {
    TimeGrid g(0.0, 1e-4, 40001);
    Signal f = bump_signal(g, 0.0, CVec::Ones(1), 1.0, 2.0);
    CMat one = CMat::Identity(1, 1);
    Signal u = step_affine(one, 1.5 * one, CMat::Zero(1, 1), f, CVec::Zero(1));
    // first order in dt: the reference is an rtol 1e-12 adaptive solution
    CHECK(value_at(u, 2.5) == doctest::Approx(0.14073047377180015).epsilon(2e-4));
}

TEST_CASE("delay stepping against the method of steps") {
    const double dt = 1e-4;
    DelaySpec d{CMat::Identity(1, 1), CMat::Identity(1, 1), {{0.7, CMat::Constant(1, 1, 0.5)}}};
    TimeGrid hg(-0.7, dt, 7001);
    Signal history(hg, 0.0, CMat::Constant(7001, 1, 1.0));
    TimeGrid g(0.0, dt, 10001);
    Signal u = step_delay(d, CMat::Zero(1, 1), history, Signal(g, 0.0, 1));
    CHECK(value_at(u, 0.35) == doctest::Approx(0.55703213457807018).epsilon(1e-4));
    CHECK(value_at(u, 1.0) == doctest::Approx(0.079521396592488563).epsilon(2e-3));
    DelaySpec off = d;
    off.terms[0].h = 0.70005;
    CHECK_THROWS_AS(step_delay(off, CMat::Zero(1, 1), history, Signal(g, 0.0, 1)), Error);
}

TEST_CASE("convolution quadrature for the plus form") {
    TimeGrid g(0.0, 1e-3, 4001);
    KernelSpec ks{KernelProfile::exponential({{0.5, 1.0}}), CMat::Identity(1, 1)};
    Signal f = bump_signal(g, 0.0, CVec::Ones(1), 1.0, 2.0);
    Signal u = step_convolution(ks, ConvolutionForm::plus, CMat::Identity(1, 1), f);
    // d/dt(u + k*u) + u = bump with k = e^{-t}/2, reference from the equivalent ODE pair
    CHECK(value_at(u, 3.0) == doctest::Approx(0.11714452197149802).epsilon(2e-3));
}

TEST_CASE("resolvent form with A = 0 reduces to w - k*w") {
    // d/dt w = f, so w is the running integral of f and u = w - k*w
    TimeGrid g(0.0, 1e-3, 3001);
    KernelSpec ks{KernelProfile::exponential({{0.5, 1.0}}), CMat::Identity(1, 1)};
    Signal f = bump_signal(g, 0.0, CVec::Ones(1), 0.5, 1.5);
    Signal u = step_convolution(ks, ConvolutionForm::resolvent, CMat::Zero(1, 1), f);
    std::vector<double> w(g.n, 0.0);
    for (std::size_t j = 1; j < g.n; ++j)
        w[j] = w[j - 1] + 0.5 * g.dt * (f.values(j - 1, 0).real() + f.values(j, 0).real());
    for (double t : {1.0, 2.0, 3.0}) {
        std::size_t jt = *g.node_at(t);
        double kw = 0.0;
        for (std::size_t i = 0; i <= jt; ++i) {
            double wt = (i == 0 || i == jt) ? 0.5 : 1.0;
            kw += wt * 0.5 * std::exp(-(g.t(jt) - g.t(i))) * w[i] * g.dt;
        }
        CHECK(value_at(u, t) == doctest::Approx(w[jt] - kw).epsilon(1e-3));
    }
}

TEST_CASE("heat eigen oracle against the closed form") {
    GradDiv1D op = build_grad_div_1d(64, 4.0, BoundaryCondition::dirichlet);
    HeatEigen h = heat_eigen_oracle(op, 2.0);
    CHECK(h.closed_form_ok);
    CHECK(h.closed_form_error < 1e-10);
    CHECK(h.lambda_min == doctest::Approx(0.61673020417752058).epsilon(1e-11));
    CHECK(h.rate == doctest::Approx(2.0 * 0.61673020417752058).epsilon(1e-11));
    CHECK(std::is_sorted(h.eigenvalues.data(), h.eigenvalues.data() + h.eigenvalues.size()));
    CHECK(h.slowest_mode.norm() == doctest::Approx(1.0));
}
