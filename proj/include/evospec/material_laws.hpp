#pragma once

#include "evospec/common.hpp"

#include <optional>
#include <string>
#include <utility>

namespace evospec {

enum class LawKind { affine, delay, kernel, resolvent_kernel, kelvin_voigt, dual_phase_lag, block_reduced, custom };
const char* law_kind_name(LawKind k);

struct DelayTerm {
    double h = 0.0;
    CMat N;
};

struct DelaySpec {
    CMat M0, M1;
    std::vector<DelayTerm> terms;  // strictly increasing h
    double truncation = 1e-16;

    double h0() const;
    double eta() const;  // smallest gap; for a single delay the gap to 0, i.e. h0
    double sup_norm() const;
};

// Scalar kernel profile k(t) on t >= 0. Matrix kernels are profile(t)·matrix.
struct KernelProfile {
    enum class Type { exponential, indicator, sampled };
    Type type = Type::exponential;
    std::vector<std::pair<double, double>> terms;  // exponential: sum a·e^{-b t}, entries (a, b)
    double amplitude = 0.0, length = 0.0;          // indicator: amplitude·chi_[0,length]
    std::vector<double> samples;                   // sampled: k(j·sample_dt)
    double sample_dt = 0.0;

    static KernelProfile exponential(std::vector<std::pair<double, double>> terms);
    static KernelProfile indicator(double amplitude, double length);
    static KernelProfile sampled(std::vector<double> samples, double dt);

    double value(double t) const;
    bool has_derivative() const;  // absolutely continuous on [0, inf) with integrable k'
    double derivative(double t) const;
    double k0() const;
    // Abscissa of absolute convergence of the Laplace integral.
    double weight() const;
    // integral_0^inf e^{-z s} k(s) ds (that is sqrt(2 pi)·khat). quad_error receives the
    // refinement estimate for sampled profiles, 0 for closed forms.
    cplx laplace(cplx z, double* quad_error = nullptr) const;
    cplx laplace_derivative(cplx z) const;  // same for k'
    double l1(double mu) const;             // |k|_{L1,mu}
    double l1_derivative(double mu) const;  // |k'|_{L1,mu}
};

struct KernelSpec {
    KernelProfile profile;
    CMat matrix;  // selfadjoint, defaults to identity
};

struct DualPhaseLagSpec {
    double tau_q = 1.0, tau_theta = 1.0;
    double mu() const { return tau_q / tau_theta; }
};

struct KelvinVoigtSpec {
    CMat rho_tilde, C, D;
};

struct MaterialLaw {
    LawKind kind = LawKind::custom;
    std::size_t dim = 0;
    double b_of_M = 0.0;
    std::function<CMat(cplx)> eval;     // M(z)
    std::function<CMat(cplx)> eval_zM;  // z·M(z), removable point z = 0 filled where possible
    // zM(z) = z·P0 + P1 exactly, when the law is affine in this sense.
    std::optional<std::pair<CMat, CMat>> pencil;
    std::optional<CMat> limit_inf;  // lim M(s), s -> +inf, when known in closed form
    std::optional<DelaySpec> delay;
    std::optional<KernelSpec> kernel;
    std::optional<DualPhaseLagSpec> dpl;
    std::optional<KelvinVoigtSpec> kelvin_voigt;
    std::string label;
};

MaterialLaw make_affine(const CMat& M0, const CMat& M1);
MaterialLaw make_delay(const DelaySpec& spec);
MaterialLaw make_kernel(const KernelSpec& spec);            // 1 + sqrt(2pi) khat(z)
MaterialLaw make_resolvent_kernel(const KernelSpec& spec);  // (1 - sqrt(2pi) khat(z))^{-1}
MaterialLaw make_kelvin_voigt(const KelvinVoigtSpec& spec);
MaterialLaw make_dual_phase_lag(const DualPhaseLagSpec& spec, std::size_t dim = 1);
MaterialLaw make_custom(std::size_t dim, double b_of_M, std::function<CMat(cplx)> eval, std::string label);

CMat evaluate(const MaterialLaw& law, cplx z);
CMat evaluate_zM(const MaterialLaw& law, cplx z);
// lim_{s -> +inf} M(s); closed form when available, else Richardson on large real s.
// Throws NotRegularizing if the limit does not settle.
CMat limit_at_infinity(const MaterialLaw& law);

struct AffineRho0 {
    double rho0 = 0.0;
    double c = 0.0;  // guaranteed constant c1/2
    double c0_actual = 0.0, c1_actual = 0.0;
    double norm_M1 = 0.0;
    bool trivial_kernel = false;
};
AffineRho0 affine_rho0(const CMat& M0, const CMat& M1, double c0, double c1);

double delay_tail_bound(const DelaySpec& spec, double s);

CMat khat(const KernelSpec& spec, cplx z, double* quad_error = nullptr);

struct KernelConditionReport {
    bool selfadjoint = false;
    bool commute = false;
    double rho1 = 0.0;
    double d_est = 0.0;
    double propagated_min = 0.0;  // min over the larger weights
    bool four_d_ok = false;
    std::optional<double> example_a_bound;  // -(|k'|_{L1,rho1} + |k(0)|)/sqrt(2pi)
    bool example_a_ok = true;
};
// Hermitian form of t·Im<K x|x> (inner product linear in the second slot).
CMat im_form(const CMat& K, double t);
KernelConditionReport kernel_condition_check(const KernelSpec& spec, const std::vector<double>& rho_grid,
                                             const std::vector<double>& t_grid);

struct AccretivityScan {
    double rho = 0.0;
    std::size_t sample_count = 0;
    double t_min = 1e-3, t_max = 1e6;
    double c_est = 0.0;
    double argmin_t = 0.0;
    double asymptotic_term = 0.0;
    bool asymptotic_ok = true;
    bool sampled = true;
};
std::vector<double> default_scan_samples();
AccretivityScan accretivity_scan(const MaterialLaw& law, double rho,
                                 const std::vector<double>& t_samples = default_scan_samples());

}  // namespace evospec
