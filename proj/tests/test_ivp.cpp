#include "evospec/ivp.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace evospec;
using namespace evospec::testing;

namespace {

EvolutionaryProblem scalar_delay(const TimeGrid& g) {
    DelaySpec d{CMat::Identity(1, 1), CMat::Identity(1, 1), {{0.7, CMat::Constant(1, 1, 0.5)}}};
    return EvolutionaryProblem{make_delay(d), SpatialOperator(CMat::Zero(1, 1), "zero"), 1.0, g};
}

double value_at(const Signal& u, double t, Eigen::Index c = 0) {
    return u.values(static_cast<Eigen::Index>(*u.grid.node_at(t)), c).real();
}

// u' + M1 u = 0 written with M0 = diag(1, 0): u1' + u1 = 0, u2 = u1.
std::pair<CMat, CMat> index1_pair() {
    CMat M0 = CMat::Zero(2, 2), M1(2, 2);
    M0(0, 0) = 1.0;
    M1 << 1.0, 0.0, -1.0, 1.0;
    return {M0, M1};
}

}  // namespace

TEST_CASE("delay equation matches the method of steps") {
    TimeGrid g(-2.0, 0.002, 8001);
    EvolutionaryProblem p = scalar_delay(g);
    IvpResult r = solve_ivp(p, history_from_initial_value(g, 1.0, CVec::Ones(1)));
    CHECK(r.attained);
    CHECK(r.jump.method == JumpMethod::general);
    // -1/2 + 3/2 e^{-t} before the delay acts, closed form beyond, both via mpmath
    CHECK(value_at(r.u, 0.35) == doctest::Approx(0.55703213457807018).epsilon(1e-5));
    CHECK(value_at(r.u, 1.0) == doctest::Approx(0.079521396592488563).epsilon(1e-4));
    CHECK(r.leak < 1e-4);
}

TEST_CASE("index-1 DAE follows the exponential") {
    auto [M0, M1] = index1_pair();
    TimeGrid g(-2.0, 0.002, 6001);
    EvolutionaryProblem p{make_affine(M0, M1), SpatialOperator(CMat::Zero(2, 2), "zero"), 1.0, g};
    CVec u0 = CVec::Ones(2);
    IvpResult r = solve_ivp(p, history_from_initial_value(g, 1.0, u0));
    CHECK(r.jump.method == JumpMethod::amnesic);
    CHECK(r.attained);
    for (double t : {0.5, 1.0, 2.0}) {
        CHECK(value_at(r.u, t, 0) == doctest::Approx(std::exp(-t)).epsilon(1e-4));
        CHECK(value_at(r.u, t, 1) == doctest::Approx(std::exp(-t)).epsilon(1e-4));
    }
}

TEST_CASE("consistent completion of an index-1 initial value") {
    auto [M0, M1] = index1_pair();
    DAEPencil pen = DAEPencil::make(M0, M1);
    CHECK(pen.regular);
    CHECK(pen.index1);
    CVec bad(2);
    bad << 1.0, 0.0;
    CHECK_FALSE(consistent_iv_check(pen, bad));
    CVec fixed = complete_consistent(M0, M1, bad);
    CHECK(std::abs(fixed(0) - 1.0) < 1e-14);
    CHECK(std::abs(fixed(1) - 1.0) < 1e-12);
    CHECK(consistent_iv_check(pen, fixed));
    CHECK(weierstrass_oracle(pen).contains(fixed));
}

TEST_CASE("property: consistency test agrees with the Weierstrass subspace") {
    std::mt19937_64 rng(2718);
    std::uniform_int_distribution<int> size(2, 6);
    for (int trial = 0; trial < 40; ++trial) {
        Eigen::Index n = size(rng);
        std::uniform_int_distribution<int> rank(1, static_cast<int>(n) - 1);
        Eigen::Index r = rank(rng);
        CMat M0 = random_matrix(rng, n, r) * random_matrix(rng, r, n);
        CMat M1 = random_matrix(rng, n, n);
        DAEPencil pen = DAEPencil::make(M0, M1);
        REQUIRE(pen.regular);
        REQUIRE(pen.index1);
        WeierstrassResult w = weierstrass_oracle(pen);
        CHECK(w.d == r);
        CVec u0 = complete_consistent(M0, M1, random_vector(rng, n));
        CHECK(consistent_iv_check(pen, u0));
        CHECK(w.contains(u0));
        CVec y = w.basis * random_vector(rng, w.d);
        CHECK(consistent_iv_check(pen, y));
        CVec x = random_vector(rng, n);
        CHECK(consistent_iv_check(pen, x) == w.contains(x));
    }
}

TEST_CASE("degenerate pencils are rejected") {
    CMat N = CMat::Zero(2, 2);
    N(0, 1) = 1.0;
    CHECK_THROWS_AS(weierstrass_oracle(DAEPencil::make(N, CMat::Identity(2, 2))), Error);
    CMat D = CMat::Zero(2, 2);
    D(0, 0) = 1.0;
    DAEPencil sing = DAEPencil::make(D, D);
    CHECK_FALSE(sing.regular);
    try {
        weierstrass_oracle(sing);
        FAIL("expected SingularPencil");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularPencil);
    }
    try {
        weierstrass_oracle(DAEPencil::make(N, CMat::Identity(2, 2)));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::HighIndexPencil);
    }
}

TEST_CASE("cuts and jump coefficients") {
    TimeGrid g(-2.0, 0.001, 6001);
    const double rho = 0.5;
    Signal f(g, rho, 1);
    for (std::size_t j = 0; j < g.n; ++j) f.values(j, 0) = bump(g.t(j), 0.0, 1.0);
    // antiderivative continuous: no jump at an interior point
    CHECK(jump_coefficient(Distribution(f), 0.5).norm() < 1e-7);

    Distribution d(Signal(g, rho, 1));
    d.atoms.push_back({0.5, CVec::Constant(1, cplx(2.0, -1.0))});
    CHECK(std::abs(jump_coefficient(d, 0.5)(0) - cplx(2.0, -1.0)) < 1e-9);

    // P_t of a constant: the subtracted term carries the running antiderivative
    Signal step = cutoff(Signal(g, rho, CMat::Constant(g.n, 1, 1.0)), 0.0, Side::above);
    step.values(static_cast<Eigen::Index>(*g.node_at(0.0)), 0) = 0.5;  // half value at the jump
    CutResult P = cut_P(step, 1.0);
    CHECK(std::abs(P.jump.coeff(0) - std::exp(-2.0 * rho) * 1.0) < 1e-6);
    CutResult Q = cut_Q(step, 1.0);
    CHECK(std::abs(Q.jump.coeff(0) - P.jump.coeff(0)) < 1e-6);
}

TEST_CASE("translated atoms move and pick up the weight") {
    TimeGrid g(-1.0, 0.01, 301);
    Distribution d(Signal(g, 1.0, 1));
    d.atoms.push_back({0.5, CVec::Ones(1)});
    Distribution s = translate(d, 0.2);
    REQUIRE(s.atoms.size() == 1);
    CHECK(s.atoms[0].t == doctest::Approx(0.3));
    CHECK(s.atoms[0].coeff(0).real() == doctest::Approx(std::exp(0.4)));
}

TEST_CASE("history validation") {
    TimeGrid g(-1.0, 0.1, 21);
    Signal bad(g, 1.0, CMat::Constant(21, 1, 1.0));
    CHECK_THROWS_AS(History{bad}, std::invalid_argument);
    History h = history_from_initial_value(g, 1.0, CVec::Constant(1, 2.0));
    CHECK(h.g0minus(0).real() == 2.0);
    CHECK(history_hash(h) == history_hash(history_from_initial_value(g, 1.0, CVec::Constant(1, 2.0))));
    CHECK(history_hash(h) != history_hash(history_from_initial_value(g, 1.0, CVec::Constant(1, 3.0))));
}

TEST_CASE("semigroup law for a scalar decay") {
    TimeGrid g(-2.0, 0.002, 6001);
    EvolutionaryProblem p{make_affine(CMat::Identity(1, 1), CMat::Identity(1, 1)),
                          SpatialOperator(CMat::Zero(1, 1), "zero"), 1.0, g};
    History h = history_from_initial_value(g, 1.0, CVec::Ones(1));
    SemigroupSampler sampler;
    SemigroupSample s = sampler.sample(p, h, 1.0);
    CHECK(s.state(0).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-4));
    SemigroupDiscrepancy d = semigroup_law_check(p, h, 0.5, 0.25, &sampler);
    CHECK(d.state < 1e-3);
    CHECK_THROWS_AS(sampler.sample(p, h, 0.0011), Error);
    CHECK(sampler.cache_size() >= 1);
}

TEST_CASE("Hille-Yosida ratios for a dissipative pencil") {
    GradDiv1D op = build_grad_div_1d(6, 1.0, BoundaryCondition::dirichlet);
    CMat M0 = CMat::Zero(12, 12), M1 = CMat::Zero(12, 12);
    M0.topLeftCorner(6, 6).setIdentity();
    M1.bottomRightCorner(6, 6).setIdentity();
    std::mt19937_64 rng(6);
    std::vector<CVec> probes;
    for (int i = 0; i < 4; ++i) {
        CVec x = CVec::Zero(12);
        x.head(6) = random_vector(rng, 6);
        probes.push_back(x);
    }
    HilleYosidaReport r = hille_yosida_check(M0, M1, op.A.matrix(), {0.5, 1.0, 4.0, 16.0}, 8, probes, 10.0, 0.0);
    CHECK(r.pass);
    CHECK(r.evaluations > 0);
}

TEST_CASE("property: accretive generators give contractive resolvent powers") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 15; ++trial) {
        CMat B = random_matrix(rng, 4, 4);
        CMat A = B - B.adjoint() + 0.2 * CMat::Identity(4, 4);
        std::vector<CVec> probes{random_vector(rng, 4), random_vector(rng, 4)};
        HilleYosidaReport r = hille_yosida_check(CMat::Identity(4, 4), CMat::Zero(4, 4), A, {0.3, 2.0, 9.0}, 6, probes,
                                                 1.0 + 1e-9, 0.0);
        CHECK(r.pass);
        CHECK(r.M_est <= 1.0 + 1e-9);
    }
}
