#pragma once

#include "evospec/fourier_laplace.hpp"
#include "evospec/material_laws.hpp"
#include "evospec/qz.hpp"
#include "evospec/spatial_ops.hpp"
#include "evospec/weighted_signal.hpp"

#include <memory>
#include <optional>
#include <string>

namespace evospec {

struct EvolutionaryProblem {
    MaterialLaw law;
    SpatialOperator A;
    double rho = 1.0;
    TimeGrid grid;

    std::size_t dim() const { return law.dim; }
    void validate() const;
};

// z M(z) + A for one problem. Affine pencils are factored once by QZ; other laws
// get a dense LU per frequency.
class FrequencySystem {
public:
    explicit FrequencySystem(const EvolutionaryProblem& p);

    CMat matrix(cplx z) const;
    // Solution of (zM+A)x = b. sigma receives an inverse-iteration estimate of
    // sigma_min and residual the relative residual against the unfactored matrix.
    CVec solve(cplx z, const CVec& b, double* sigma = nullptr, double* residual = nullptr, double* scale = nullptr) const;
    double sigma_min(cplx z) const;
    bool uses_qz() const { return static_cast<bool>(pencil_); }
    // Finite generalized eigenvalues of the pencil (empty for non-affine laws).
    std::vector<cplx> eigenvalues() const;

private:
    std::function<CMat(cplx)> zM_;
    CMat A_;
    std::shared_ptr<PencilSolver> pencil_;
    CMat P0_, P1A_;
};

enum class CertificateRoute { accretive, small_ball };
const char* route_name(CertificateRoute r);

struct Certificate {
    CertificateRoute route = CertificateRoute::accretive;
    double rho = 0.0;
    double c = 0.0;                // accretivity constant used for the bound
    double resolvent_bound = 0.0;  // sup |(zM + A)^{-1}| on Re z = rho
    AccretivityScan scan;
    MAccretiveCertificate a_cert;
    // small-ball route
    double delta = 0.0, ball_sup = 0.0, a_inv_norm = 0.0, offball_min = 0.0;
    std::size_t ball_samples = 0;
    std::string label = "sampled";
};

struct CertificateOptions {
    double delta = 0.1;
    std::vector<double> t_samples = default_scan_samples();
};

Certificate wellposedness_certificate(const EvolutionaryProblem& p, double rho, const CertificateOptions& opt = {});

struct SolveReport {
    double residual_max = 0.0;
    double sigma_min_min = 0.0;
    double xi_at_sigma_min = 0.0;
    std::optional<double> c_est;
    std::string route;
    double norm_f = 0.0, norm_u = 0.0;
    double edge_ratio = 0.0;
    std::size_t frequencies = 0;
    bool qz_path = false;
    std::vector<double> sigma_profile;  // per frequency, FFT order
};

struct SolveResult {
    Signal u;
    SolveReport report;
};

struct SolveOptions {
    std::optional<Certificate> certificate;  // computed when absent
    bool require_certificate = true;
    // Applied to each solved frequency component before the inverse transform.
    std::function<void(cplx z, CVec& x)> adjust;
};

SolveResult solve(const EvolutionaryProblem& p, const Signal& f, const SolveOptions& opt = {});
// Solve with a source given spectrally (used for delta-driven problems).
SolveResult solve_spectrum(const EvolutionaryProblem& p, const Spectrum& F, const SolveOptions& opt = {});

struct S0Estimate {
    double s0 = 0.0;
    double sigma_floor = 0.0;
    std::vector<double> rho_grid;       // descending
    std::vector<double> sigma_profile;  // min over xi of sigma_min at each rho
    std::size_t xi_samples = 0;
    std::string label = "sampled estimate";
};

struct S0Options {
    std::size_t rho_points = 120;
    int xi_per_decade = 12;
    double xi_min = 1e-3, xi_max = 1e4;
    std::size_t polish_seeds = 12;
};

S0Estimate estimate_s0(const EvolutionaryProblem& p, double rho_lo, double rho_hi, double sigma_floor,
                       const S0Options& opt = {});

struct ParabolicRate {
    double nu1 = 0.0;
    double nu0 = 0.0;
    double c = 0.0;
    double norm_M1 = 0.0;
    double norm_M0 = 0.0;
    double c_inv_norm = 0.0;
};

// nu1 = min{nu0, c/(|M1|^2 |M0| |C^{-1}|^2)} with c and |M1| sampled on Re z = -nu0.
ParabolicRate predicted_parabolic_rate(const CMat& M0, const std::function<CMat(cplx)>& M1, const ReducedGradient& C,
                                       double nu0, const std::vector<double>& t_samples = default_scan_samples());
ParabolicRate predicted_parabolic_rate(const CMat& M0, const CMat& M1, const ReducedGradient& C, double nu0);

struct ComponentBlock {
    std::size_t offset = 0, count = 0;  // count 0 means all components
};

// -slope of log|u(t_j)| over [t0, t1] by least squares.
double measure_decay_rate(const Signal& u, double t0, double t1, ComponentBlock block = {});

double causality_check(const EvolutionaryProblem& p, const Signal& f, double a, const SolveOptions& opt = {});

// Fingerprint of a problem (law samples, operator, weight, grid) for caching.
std::size_t problem_hash(const EvolutionaryProblem& p);

}  // namespace evospec
