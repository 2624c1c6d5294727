#pragma once

#include "evospec/solver.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>

namespace evospec {

// coeff·delta_t in the weighted normalisation: delta_t = e^{2 rho t}·(point mass at t),
// so that d/dt of the cut-off chi_{>=t}x equals e^{-2 rho t} delta_t x.
struct DeltaAtom {
    double t = 0.0;
    CVec coeff;
};

// Regular grid part plus point atoms, carried symbolically.
struct Distribution {
    Signal regular;
    std::vector<DeltaAtom> atoms;

    Distribution() = default;
    explicit Distribution(Signal s) : regular(std::move(s)) {}
    Spectrum spectrum() const;
};

// Grid-aligned shift, (tau_h f)(t) = f(t + h); atoms move to t - h.
Distribution translate(const Distribution& f, double h);

struct CutResult {
    Distribution part;
    DeltaAtom jump;  // the subtracted e^{-2 rho t}(d^{-1} f)(t+/-)·delta_t
};
// P_t and Q_t. Throws TraceFailed when (d^{-1} f)(t+/-) cannot be estimated.
CutResult cut_P(const Distribution& f, double t);
CutResult cut_Q(const Distribution& f, double t);
CutResult cut_P(const Signal& f, double t);
CutResult cut_Q(const Signal& f, double t);
// e^{-2 rho t}((d^{-1} f)(t+) - (d^{-1} f)(t-))
CVec jump_coefficient(const Distribution& f, double t);

struct History {
    Signal g;      // vanishes for t > 0
    CVec g0minus;  // g(0-)

    History() = default;
    explicit History(Signal g);  // g0minus from the left trace
    History(Signal g, CVec g0minus);
};
// u0 on every node t <= 0.
History history_from_initial_value(const TimeGrid& grid, double rho, const CVec& u0);

enum class JumpMethod { amnesic, general };
struct JumpData {
    CVec gamma;
    JumpMethod method = JumpMethod::amnesic;
};
JumpData gamma(const MaterialLaw& law, const History& h, std::optional<JumpMethod> force = std::nullopt);

Signal assemble_K(const MaterialLaw& law, const History& h);

struct IvpOptions {
    std::optional<Certificate> certificate;
    int singular_terms = 0;  // 0 picks 3 when K vanishes, else 2
    double beta = 0.0;       // 0 picks the default decay of the singular basis
    bool check_attainment = true;
    double attainment_tol = 1e-3;
};

struct IvpResult {
    Signal u;  // v + g
    Signal v;
    Signal K;
    JumpData jump;
    CVec u0plus;
    double attainment_error = 0.0;  // |u(0+) - g(0-)|/(1 + |g(0-)|)
    bool attained = true;
    double leak = 0.0;  // weighted mass of v before 0 relative to all of v
    double beta = 0.0;
    std::vector<CVec> singular_coeffs;
    SolveReport report;
};
IvpResult solve_ivp(const EvolutionaryProblem& p, const History& h, const IvpOptions& opt = {});

struct DAEPencil {
    CMat M0, M1;
    CMat range_basis;  // orthonormal columns spanning R(M0)
    bool regular = false;
    bool index1 = false;

    static DAEPencil make(const CMat& M0, const CMat& M1);
};
bool consistent_iv_check(const DAEPencil& pencil, const CVec& u0, double* residual = nullptr);
// Adjusts the ker M0 components of u0 so that (M1 + A) u0 lies in R(M0).
CVec complete_consistent(const CMat& M0, const CMat& M1A, const CVec& u0);

struct WeierstrassResult {
    CMat basis;  // orthonormal, n x d
    int d = 0;
    bool contains(const CVec& u0) const;
};
WeierstrassResult weierstrass_oracle(const DAEPencil& pencil);

struct SemigroupSample {
    CVec state;
    History shifted;
};

// Solves the IVP once per (problem, history) and serves samples from a cache.
class SemigroupSampler {
public:
    explicit SemigroupSampler(IvpOptions opt = {}) : opt_(std::move(opt)) {}
    SemigroupSample sample(const EvolutionaryProblem& p, const History& h, double t);
    const IvpResult& trajectory(const EvolutionaryProblem& p, const History& h);
    std::size_t cache_size() const;

private:
    IvpOptions opt_;
    mutable std::mutex mu_;
    std::map<std::size_t, std::shared_ptr<IvpResult>> cache_;
};

SemigroupSample sample_semigroup(const EvolutionaryProblem& p, const History& h, double t);

struct SemigroupDiscrepancy {
    double state = 0.0;
    double history = 0.0;
};
SemigroupDiscrepancy semigroup_law_check(const EvolutionaryProblem& p, const History& h, double t, double s,
                                         SemigroupSampler* sampler = nullptr);

struct HilleYosidaReport {
    double M_est = 0.0;
    double omega_est = 0.0;
    bool pass = false;
    std::size_t evaluations = 0;
};
HilleYosidaReport hille_yosida_check(const CMat& M0, const CMat& M1, const CMat& A, const std::vector<double>& lambdas,
                                     int n_max, const std::vector<CVec>& probes, double M_budget, double omega_budget);

struct GrowthReport {
    std::vector<double> rates;
    double s0_est = 0.0;
    double required = 0.0;
    bool pass = false;
};
GrowthReport growth_bound_check(const EvolutionaryProblem& p, const std::vector<History>& histories, double s0_est,
                                double t0, double t1, ComponentBlock block = {});

std::size_t history_hash(const History& h);

}  // namespace evospec
