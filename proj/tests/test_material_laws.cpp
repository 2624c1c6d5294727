#include "evospec/material_laws.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace evospec;
using namespace evospec::testing;

TEST_CASE("affine law evaluates M0 + z^{-1} M1 and rejects z = 0") {
    CMat M0 = CMat::Identity(2, 2), M1(2, 2);
    M1 << 1.0, 2.0, 0.0, 3.0;
    MaterialLaw law = make_affine(M0, M1);
    cplx z(0.5, 2.0);
    CHECK(rel_diff(evaluate(law, z), M0 + M1 / z) < 1e-15);
    CHECK(rel_diff(evaluate_zM(law, z), z * M0 + M1) < 1e-15);
    CHECK_THROWS_AS(evaluate(law, cplx(0.0, 0.0)), Error);
    CHECK(rel_diff(limit_at_infinity(law), M0) == 0.0);
}

TEST_CASE("exponential kernel transform has the closed form a/(z+b)") {
    KernelProfile p = KernelProfile::exponential({{0.5, 1.0}, {2.0, 3.0}});
    cplx z(0.2, -1.7);
    CHECK(std::abs(p.laplace(z) - (0.5 / (z + 1.0) + 2.0 / (z + 3.0))) < 1e-15);
    CHECK(p.k0() == doctest::Approx(2.5));
    CHECK(p.weight() == doctest::Approx(-1.0));
    CHECK(p.l1(0.5) == doctest::Approx(0.5 / 1.5 + 2.0 / 3.5));
    CHECK(p.l1_derivative(0.0) == doctest::Approx(0.5 + 2.0));
    // khat carries the 1/sqrt(2pi) of the unitary transform
    KernelSpec ks{p, CMat::Identity(1, 1)};
    CHECK(std::abs(khat(ks, z)(0, 0) * kSqrt2Pi - p.laplace(z)) < 1e-15);
}

TEST_CASE("indicator kernel transform and its small-z branch") {
    KernelProfile p = KernelProfile::indicator(1.5, 2.0);
    cplx z(0.3, 0.4);
    CHECK(std::abs(p.laplace(z) - 1.5 * (1.0 - std::exp(-2.0 * z)) / z) < 1e-14);
    CHECK(std::abs(p.laplace(cplx(1e-12, 0)) - 3.0) < 1e-10);
    CHECK_FALSE(p.has_derivative());
    CHECK_THROWS_AS(p.l1_derivative(1.0), Error);
}

TEST_CASE("sampled kernel transform converges to the exponential closed form") {
    const double dt = 1e-3;
    std::vector<double> s(40001);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = 0.5 * std::exp(-static_cast<double>(i) * dt);
    KernelProfile p = KernelProfile::sampled(s, dt);
    double err = 0.0;
    cplx z(1.0, 0.7);
    cplx v = p.laplace(z, &err);
    CHECK(std::abs(v - 0.5 / (z + 1.0)) < 1e-6);
    CHECK(err < 1e-6);
}

TEST_CASE("resolvent kernel law inverts 1 - sqrt(2pi) khat") {
    KernelSpec ks{KernelProfile::exponential({{0.5, 1.0}}), CMat::Identity(1, 1)};
    MaterialLaw law = make_resolvent_kernel(ks);
    // |k|_{L1,rho} = 0.5/(1+rho) drops below 1 at rho = -1/2
    CHECK(law.b_of_M == doctest::Approx(-0.5).epsilon(1e-9));
    cplx z(0.4, 1.1);
    cplx expect = 1.0 / (1.0 - 0.5 / (z + 1.0));
    CHECK(std::abs(evaluate(law, z)(0, 0) - expect) < 1e-14);

    KernelSpec big{KernelProfile::exponential({{3.0, 1.0}}), CMat::Identity(1, 1)};
    // 3/(1+rho) < 1 requires rho > 2
    CHECK(make_resolvent_kernel(big).b_of_M == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("Kelvin-Voigt law block structure") {
    KelvinVoigtSpec kv{CMat::Identity(1, 1) * 2.0, CMat::Identity(1, 1) * 4.0, CMat::Identity(1, 1)};
    MaterialLaw law = make_kelvin_voigt(kv);
    CHECK(law.dim == 2);
    CHECK(law.b_of_M == doctest::Approx(0.25));
    cplx z(1.0, 1.0);
    CMat M = evaluate(law, z);
    CHECK(std::abs(M(0, 0) - 2.0) < 1e-15);
    CHECK(std::abs(M(1, 1) - 1.0 / (4.0 * z + 1.0)) < 1e-15);
    CHECK(std::abs(limit_at_infinity(law)(1, 1)) == 0.0);
}

TEST_CASE("phase-lag law: limit and pole") {
    DualPhaseLagSpec s{0.5, 1.0};
    MaterialLaw law = make_dual_phase_lag(s, 2);
    CHECK(limit_at_infinity(law)(0, 0).real() == doctest::Approx(0.125));
    CHECK_THROWS_AS(law.eval(cplx(0.0, 0.0)), Error);
    // Richardson on the closed form reproduces the stored limit
    MaterialLaw copy = law;
    copy.limit_inf.reset();
    CHECK(std::abs(limit_at_infinity(copy)(1, 1) - 0.125) < 1e-6);
}

TEST_CASE("delay tail bound matches reference values") {
    DelaySpec d{CMat::Identity(1, 1), CMat::Identity(1, 1), {{0.7, CMat::Constant(1, 1, 0.5)}}};
    // |N|(1 + 1/(eta s)) e^{-h0 s}, evaluated with mpmath
    CHECK(delay_tail_bound(d, 1.0) == doctest::Approx(0.60299644031814017).epsilon(1e-13));
    CHECK(delay_tail_bound(d, 2.0) == doctest::Approx(0.21136882623566272).epsilon(1e-13));
    CHECK(delay_tail_bound(d, 5.0) == doctest::Approx(0.019412603628633326).epsilon(1e-13));
    CHECK_THROWS_AS(delay_tail_bound(d, 0.0), std::invalid_argument);
}

TEST_CASE("property: the delay tail bound dominates the sampled tail") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> hd(0.1, 1.0), sd(0.2, 8.0), td(-50.0, 50.0);
    for (int trial = 0; trial < 40; ++trial) {
        DelaySpec d{CMat::Identity(2, 2), CMat::Zero(2, 2), {}};
        double h = 0.0;
        for (int k = 0; k < 3; ++k) {
            h += hd(rng);
            d.terms.push_back({h, random_matrix(rng, 2, 2)});
        }
        double s = sd(rng);
        MaterialLaw law = make_delay(d);
        cplx z(s, td(rng));
        // z M(z) - z M0 - M1 is the delayed part
        CMat tail = evaluate_zM(law, z) - z * d.M0 - d.M1;
        CHECK(op_norm(tail) <= delay_tail_bound(d, s) * (1 + 1e-12));
    }
}

TEST_CASE("affine rho0: constants on the range and on the kernel") {
    CMat M0 = CMat::Zero(2, 2), M1 = CMat::Identity(2, 2);
    M0(0, 0) = 2.0;
    AffineRho0 r = affine_rho0(M0, M1, 2.0, 1.0);
    CHECK_FALSE(r.trivial_kernel);
    CHECK(r.c0_actual == doctest::Approx(2.0));
    CHECK(r.c1_actual == doctest::Approx(1.0));
    CHECK(r.rho0 == doctest::Approx((0.5 + 2.0) / 2.0));
    CHECK(r.c == doctest::Approx(0.5));
    CHECK_THROWS_AS(affine_rho0(M0, -M1, 2.0, 1.0), Error);
    CHECK_THROWS_AS(affine_rho0(M0, M1, 3.0, 1.0), Error);
}

TEST_CASE("property: the affine rho0 makes z M(z) accretive with constant c1/2") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> rank(1, 3);
    for (int trial = 0; trial < 25; ++trial) {
        const Eigen::Index n = 4;
        CMat Q = random_matrix(rng, n, n).householderQr().householderQ();
        Eigen::Index r = rank(rng);
        RVec lam = RVec::Zero(n);
        for (Eigen::Index i = 0; i < r; ++i) lam(i) = 0.5 + static_cast<double>(i);
        CMat M0 = Q * lam.cast<cplx>().asDiagonal() * Q.adjoint();
        M0 = herm(M0);
        CMat B = random_matrix(rng, n, n);
        CMat M1 = B + 3.0 * op_norm(B) * CMat::Identity(n, n);
        AffineRho0 a = affine_rho0(M0, M1, 0.5, 0.5);
        MaterialLaw law = make_affine(M0, M1);
        AccretivityScan s = accretivity_scan(law, a.rho0 * 1.01);
        CHECK(s.c_est >= a.c - 1e-9);
    }
}

TEST_CASE("im_form realises t Im<Kx|x>") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        CMat K = random_matrix(rng, 3, 3);
        CVec x = random_vector(rng, 3);
        double t = 0.3 * (trial + 1);
        cplx form = x.dot(im_form(K, t) * x);
        CHECK(std::abs(form.imag()) < 1e-12);
        // <Kx|x> is conjugate-linear in Kx
        CHECK(form.real() == doctest::Approx(t * (K * x).dot(x).imag()).epsilon(1e-12));
    }
}

TEST_CASE("kernel condition check for a small positive kernel") {
    KernelSpec ks{KernelProfile::exponential({{0.5, 1.0}}), CMat::Identity(1, 1)};
    KernelConditionReport r = kernel_condition_check(ks, {0.5, 1.0, 2.0}, symmetric_log_samples(1e-3, 1e3, 64, true));
    CHECK(r.selfadjoint);
    CHECK(r.commute);
    REQUIRE(r.example_a_bound.has_value());
    // -(|k'|_{L1,rho1} + |k(0)|)/sqrt(2pi) with |k'|_{L1,rho1} = 0.5/(1 + rho1)
    CHECK(*r.example_a_bound == doctest::Approx(-(0.5 / (1.0 + r.rho1) + 0.5) / kSqrt2Pi).epsilon(1e-12));
    CHECK(r.example_a_ok);
}

TEST_CASE("accretivity scan of the phase-lag law at a stable weight") {
    // z M(z) = (1 + tq z + tq^2 z^2/2)/(1 + z); Re >= 0 on the imaginary-axis shift rho = 0.5
    MaterialLaw law = make_dual_phase_lag({0.5, 1.0}, 1);
    AccretivityScan s = accretivity_scan(law, 0.5);
    CHECK(s.c_est > 0.0);
    CHECK(s.asymptotic_ok);
    CHECK_THROWS_AS(accretivity_scan(law, -2.0), Error);
}
