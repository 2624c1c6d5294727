#pragma once

#include "evospec/solver.hpp"

#include <optional>

namespace evospec {

// Coefficients of d^2 M0(d) + d M1(d) + C^H C on the p-dimensional block.
struct SecondOrderLaw {
    std::size_t p = 0;
    std::function<CMat(cplx)> M0, M1;
    std::optional<CMat> M0_const, M1_const;
    double b = 0.0;  // both coefficients analytic on Re z > b
    std::optional<CMat> M0_inf;

    static SecondOrderLaw constant(const CMat& M0, const CMat& M1);
};

// Phase-lag heat conduction written in second-order form:
// M0(z) = tau_q (1 + tau_q z/2)/(1 + tau_theta z), M1(z) = 1/(1 + tau_theta z).
SecondOrderLaw dual_phase_lag_second_order(const DualPhaseLagSpec& spec, std::size_t p);

// Largest nu0 used for the phase-lag example: half of min{(2 - mu)/tau_q, 1/tau_theta}.
double dual_phase_lag_nu0(const DualPhaseLagSpec& spec);

struct SecondOrderConstants {
    double c = 0.0;       // inf lambda_min Herm(z M0(z) + M1(z)) on Re z = -nu0
    double norm_M0 = 0.0;  // sampled sup times the safety factor
    double norm_M1 = 0.0;
    double nu0 = 0.0;
};
SecondOrderConstants second_order_constants(const SecondOrderLaw& law, double nu0,
                                            const std::vector<double>& t_samples = default_scan_samples(),
                                            double safety = 1.05);

MaterialLaw build_Md(const SecondOrderLaw& law, const ReducedGradient& C, double d);

struct ReductionPlan {
    double d = 0.0;
    double K_of_d = 0.0;
    double c = 0.0;
    double c_tilde = 0.0;
    double rho0 = 0.0;
    double nu_target = 0.0;
    double norm_M0 = 0.0, norm_M1 = 0.0, c_inv_norm = 0.0;
    std::vector<double> d_grid, c_tilde_grid;  // the search, for the unimodality check
};

double K_of_d(double d, double norm_M0, double norm_M1, double c_inv_norm);
ReductionPlan select_d(double c, double norm_M0, double norm_M1, double c_inv_norm, double nu_target);

struct MdBoundReport {
    double worst_margin = 0.0;
    cplx witness = 0.0;
    std::size_t samples = 0;
};
// lambda_min Herm(z M_d(z)) >= min{c - d K(d), 3d/4 + Re z} - 1e-10 at every sample.
MdBoundReport verify_Md_bound(const MaterialLaw& Md, const ReductionPlan& plan, const std::vector<cplx>& z_samples);

// First-order problem for (v, q) with A = [[0, -C^H], [C, 0]].
EvolutionaryProblem reduced_problem(const SecondOrderLaw& law, const ReducedGradient& C, double d, double rho,
                                    const TimeGrid& grid);

struct RecoveredU {
    Signal u;
    double consistency = 0.0;  // |du/dt - (v - d u)|_rho / |v|_rho
    bool consistent = true;
};
RecoveredU recover_u(const Signal& v, const Signal& q, const ReducedGradient& C, double d);

// Splits a 2p-component signal into its (v, q) halves.
std::pair<Signal, Signal> split_blocks(const Signal& w, std::size_t p);

// max_k |(z^2 M(z) + C^H C) u_k - f_k| / |f_k| with u_k from the transform of a
// time-domain u. Frequencies where |f_k| <= floor·max|f| are skipped, since the
// transform round trip leaves absolute noise there.
double second_order_residual(const SecondOrderLaw& law, const ReducedGradient& C, const Signal& u, const Signal& f,
                             double floor = 1e-6);

// Same residual with u_k = -C^{-1} q_k taken straight from the reduced solve of
// (f, 0) at each frequency, with no time-domain round trip.
double reduced_frequency_residual(const SecondOrderLaw& law, const ReducedGradient& C, double d, const Signal& f);

}  // namespace evospec
