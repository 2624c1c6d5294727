#include "evospec/material_laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace evospec {

const char* law_kind_name(LawKind k) {
    switch (k) {
        case LawKind::affine: return "affine";
        case LawKind::delay: return "delay";
        case LawKind::kernel: return "kernel";
        case LawKind::resolvent_kernel: return "resolvent_kernel";
        case LawKind::kelvin_voigt: return "kelvin_voigt";
        case LawKind::dual_phase_lag: return "dual_phase_lag";
        case LawKind::block_reduced: return "block_reduced";
        case LawKind::custom: return "custom";
    }
    return "custom";
}

// ---------------------------------------------------------------- delay spec

double DelaySpec::h0() const { return terms.empty() ? 0.0 : terms.front().h; }

double DelaySpec::eta() const {
    if (terms.empty()) return 0.0;
    if (terms.size() == 1) return terms.front().h;
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < terms.size(); ++k) g = std::min(g, terms[k].h - terms[k - 1].h);
    return g;
}

double DelaySpec::sup_norm() const {
    double s = 0.0;
    for (const auto& t : terms) s = std::max(s, op_norm(t.N));
    return s;
}

// ------------------------------------------------------------ kernel profile

KernelProfile KernelProfile::exponential(std::vector<std::pair<double, double>> terms) {
    KernelProfile p;
    p.type = Type::exponential;
    p.terms = std::move(terms);
    return p;
}

KernelProfile KernelProfile::indicator(double amplitude, double length) {
    KernelProfile p;
    p.type = Type::indicator;
    p.amplitude = amplitude;
    p.length = length;
    return p;
}

KernelProfile KernelProfile::sampled(std::vector<double> samples, double dt) {
    if (samples.size() < 2 || !(dt > 0)) throw std::invalid_argument("sampled kernel needs >= 2 samples and dt > 0");
    KernelProfile p;
    p.type = Type::sampled;
    p.samples = std::move(samples);
    p.sample_dt = dt;
    return p;
}

double KernelProfile::value(double t) const {
    if (t < 0) return 0.0;
    switch (type) {
        case Type::exponential: {
            double s = 0.0;
            for (auto [a, b] : terms) s += a * std::exp(-b * t);
            return s;
        }
        case Type::indicator: return t <= length ? amplitude : 0.0;
        case Type::sampled: {
            double x = t / sample_dt;
            std::size_t i = static_cast<std::size_t>(x);
            if (i + 1 >= samples.size()) return i + 1 == samples.size() && x == static_cast<double>(i) ? samples[i] : 0.0;
            double w = x - static_cast<double>(i);
            return (1 - w) * samples[i] + w * samples[i + 1];
        }
    }
    return 0.0;
}

bool KernelProfile::has_derivative() const { return type != Type::indicator; }

double KernelProfile::derivative(double t) const {
    if (t < 0) return 0.0;
    switch (type) {
        case Type::exponential: {
            double s = 0.0;
            for (auto [a, b] : terms) s -= a * b * std::exp(-b * t);
            return s;
        }
        case Type::indicator: return 0.0;
        case Type::sampled: {
            const double h = sample_dt;
            const std::size_t n = samples.size();
            double x = t / h;
            std::size_t i = std::min(static_cast<std::size_t>(x), n - 1);
            if (i + 1 >= n) return 0.0;
            return (samples[i + 1] - samples[i]) / h;
        }
    }
    return 0.0;
}

double KernelProfile::k0() const {
    switch (type) {
        case Type::exponential: {
            double s = 0.0;
            for (auto [a, b] : terms) s += a;
            return s;
        }
        case Type::indicator: return amplitude;
        case Type::sampled: return samples.front();
    }
    return 0.0;
}

double KernelProfile::weight() const {
    if (type != Type::exponential) return -std::numeric_limits<double>::infinity();
    double w = -std::numeric_limits<double>::infinity();
    for (auto [a, b] : terms) w = std::max(w, -b);
    return w;
}

namespace {

cplx sampled_laplace(const std::vector<double>& s, double dt, cplx z, std::size_t stride) {
    const std::size_t n = s.size();
    const std::size_t last = ((n - 1) / stride) * stride;
    cplx acc = 0.0;
    for (std::size_t i = 0; i <= last; i += stride) {
        double w = (i == 0 || i == last) ? 0.5 : 1.0;
        acc += w * s[i] * std::exp(-z * (static_cast<double>(i) * dt));
    }
    return acc * (dt * static_cast<double>(stride));
}

// Composite Simpson for integral_0^T f, even panel count.
template <class F>
double simpson(F f, double T, int panels) {
    if (panels % 2) ++panels;
    const double h = T / panels;
    double acc = f(0.0) + f(T);
    for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return acc * h / 3.0;
}

}  // namespace

cplx KernelProfile::laplace(cplx z, double* quad_error) const {
    if (quad_error) *quad_error = 0.0;
    switch (type) {
        case Type::exponential: {
            cplx s = 0.0;
            for (auto [a, b] : terms) s += a / (z + b);
            return s;
        }
        case Type::indicator: {
            if (std::abs(z) * length < 1e-8) return amplitude * length * (1.0 - 0.5 * z * length);
            return amplitude * (1.0 - std::exp(-z * length)) / z;
        }
        case Type::sampled: {
            std::size_t stride = 1;
            while (stride * 16 < samples.size()) stride *= 2;
            cplx prev = sampled_laplace(samples, sample_dt, z, stride);
            cplx cur = prev;
            double err = std::numeric_limits<double>::infinity();
            while (stride > 1) {
                stride /= 2;
                cur = sampled_laplace(samples, sample_dt, z, stride);
                err = std::abs(cur - prev);
                prev = cur;
                if (err < 1e-8) break;
            }
            if (quad_error) *quad_error = err;
            return cur;
        }
    }
    return 0.0;
}

cplx KernelProfile::laplace_derivative(cplx z) const {
    switch (type) {
        case Type::exponential: {
            cplx s = 0.0;
            for (auto [a, b] : terms) s -= a * b / (z + b);
            return s;
        }
        case Type::indicator:
            throw Error(ErrorCode::NotRegularizing, "indicator kernel has no integrable derivative");
        case Type::sampled: return z * laplace(z) - k0();
    }
    return 0.0;
}

double KernelProfile::l1(double mu) const {
    switch (type) {
        case Type::exponential: {
            bool same_sign = true;
            for (auto [a, b] : terms) same_sign = same_sign && (a >= 0) == (terms.front().first >= 0);
            double s = 0.0;
            if (same_sign) {
                for (auto [a, b] : terms) {
                    if (b + mu <= 0) return std::numeric_limits<double>::infinity();
                    s += std::abs(a) / (b + mu);
                }
                return s;
            }
            double slow = std::numeric_limits<double>::infinity();
            for (auto [a, b] : terms) slow = std::min(slow, b + mu);
            if (slow <= 0) return std::numeric_limits<double>::infinity();
            return simpson([&](double t) { return std::abs(value(t)) * std::exp(-mu * t); }, 60.0 / slow, 200000);
        }
        case Type::indicator:
            if (std::abs(mu) * length < 1e-12) return std::abs(amplitude) * length;
            return std::abs(amplitude) * (1.0 - std::exp(-mu * length)) / mu;
        case Type::sampled: {
            double acc = 0.0;
            const std::size_t n = samples.size();
            for (std::size_t i = 0; i < n; ++i) {
                double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
                acc += w * std::abs(samples[i]) * std::exp(-mu * static_cast<double>(i) * sample_dt);
            }
            return acc * sample_dt;
        }
    }
    return 0.0;
}

double KernelProfile::l1_derivative(double mu) const {
    switch (type) {
        case Type::exponential: {
            std::vector<std::pair<double, double>> d;
            for (auto [a, b] : terms) d.emplace_back(-a * b, b);
            return exponential(d).l1(mu);
        }
        case Type::indicator:
            throw Error(ErrorCode::NotRegularizing, "indicator kernel has no integrable derivative");
        case Type::sampled: {
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < samples.size(); ++i)
                acc += std::abs(samples[i + 1] - samples[i]) * std::exp(-mu * (static_cast<double>(i) + 0.5) * sample_dt);
            return acc;
        }
    }
    return 0.0;
}

// --------------------------------------------------------------- factories

namespace {

void require_square(const CMat& M, const char* what) {
    if (M.rows() != M.cols()) throw std::invalid_argument(std::string(what) + " must be square");
}

CMat kernel_matrix_or_identity(const KernelSpec& spec, std::size_t dim) {
    if (spec.matrix.size() == 0) return CMat::Identity(dim, dim);
    return spec.matrix;
}

}  // namespace

MaterialLaw make_affine(const CMat& M0, const CMat& M1) {
    require_square(M0, "M0");
    if (M1.rows() != M0.rows() || M1.cols() != M0.cols()) throw std::invalid_argument("M0/M1 size mismatch");
    MaterialLaw law;
    law.kind = LawKind::affine;
    law.dim = static_cast<std::size_t>(M0.rows());
    law.b_of_M = 0.0;
    law.eval = [M0, M1](cplx z) -> CMat { return M0 + M1 / z; };
    law.eval_zM = [M0, M1](cplx z) -> CMat { return z * M0 + M1; };
    law.pencil = std::make_pair(M0, M1);
    law.limit_inf = M0;
    law.label = "affine";
    return law;
}

MaterialLaw make_delay(const DelaySpec& spec) {
    require_square(spec.M0, "M0");
    for (std::size_t k = 1; k < spec.terms.size(); ++k)
        if (!(spec.terms[k].h > spec.terms[k - 1].h)) throw std::invalid_argument("delays must increase strictly");
    for (const auto& t : spec.terms)
        if (!(t.h > 0)) throw std::invalid_argument("delays must be positive");
    MaterialLaw law;
    law.kind = LawKind::delay;
    law.dim = static_cast<std::size_t>(spec.M0.rows());
    law.b_of_M = 0.0;
    std::vector<double> norms;
    for (const auto& t : spec.terms) norms.push_back(op_norm(t.N));
    auto tail = [spec, norms](cplx z) -> CMat {
        CMat s = CMat::Zero(spec.M0.rows(), spec.M0.cols());
        for (std::size_t k = 0; k < spec.terms.size(); ++k) {
            cplx e = std::exp(-spec.terms[k].h * z);
            if (norms[k] * std::abs(e) < spec.truncation) continue;
            s += spec.terms[k].N * e;
        }
        return s;
    };
    law.eval = [spec, tail](cplx z) -> CMat { return spec.M0 + (spec.M1 + tail(z)) / z; };
    law.eval_zM = [spec, tail](cplx z) -> CMat { return z * spec.M0 + spec.M1 + tail(z); };
    law.limit_inf = spec.M0;
    law.delay = spec;
    law.label = "delay";
    return law;
}

MaterialLaw make_kernel(const KernelSpec& spec_in) {
    KernelSpec spec = spec_in;
    std::size_t dim = spec.matrix.size() ? static_cast<std::size_t>(spec.matrix.rows()) : 1;
    spec.matrix = kernel_matrix_or_identity(spec, dim);
    MaterialLaw law;
    law.kind = LawKind::kernel;
    law.dim = dim;
    law.b_of_M = std::max(0.0, spec.profile.weight());
    law.eval = [spec, dim](cplx z) -> CMat {
        return CMat::Identity(dim, dim) + spec.profile.laplace(z) * spec.matrix;
    };
    law.eval_zM = [spec, dim](cplx z) -> CMat {
        return z * (CMat::Identity(dim, dim) + spec.profile.laplace(z) * spec.matrix);
    };
    law.limit_inf = CMat::Identity(dim, dim);
    law.kernel = spec;
    law.label = "kernel";
    return law;
}

MaterialLaw make_resolvent_kernel(const KernelSpec& spec_in) {
    KernelSpec spec = spec_in;
    std::size_t dim = spec.matrix.size() ? static_cast<std::size_t>(spec.matrix.rows()) : 1;
    spec.matrix = kernel_matrix_or_identity(spec, dim);
    const double knorm = op_norm(spec.matrix);
    MaterialLaw law;
    law.kind = LawKind::resolvent_kernel;
    law.dim = dim;
    // smallest rho with |k|_{L1,rho}·|K| < 1
    double lo = spec.profile.weight();
    lo = std::isfinite(lo) ? lo + 1e-12 : -1e3;
    auto excess = [&](double r) { return spec.profile.l1(r) * knorm - 1.0; };
    if (excess(lo) < 0) {
        law.b_of_M = lo;
    } else {
        double hi = std::max(1.0, lo + 1.0);
        while (excess(hi) >= 0 && hi < 1e12) hi *= 2;
        if (excess(hi) >= 0) throw Error(ErrorCode::NotRegularizing, "kernel L1 norm never drops below 1");
        for (int it = 0; it < 200 && hi - lo > 1e-13 * (1 + std::abs(hi)); ++it) {
            double mid = 0.5 * (lo + hi);
            (excess(mid) < 0 ? hi : lo) = mid;
        }
        law.b_of_M = hi;
    }
    auto M = [spec, dim](cplx z) -> CMat {
        CMat B = CMat::Identity(dim, dim) - spec.profile.laplace(z) * spec.matrix;
        if (sigma_min(B) < 1e-12 * std::max(1.0, op_norm(B)))
            throw Error(ErrorCode::SingularEvaluation, "1 - sqrt(2pi) khat(z) is numerically singular");
        return B.inverse();
    };
    law.eval = M;
    law.eval_zM = [M](cplx z) -> CMat { return z * M(z); };
    law.limit_inf = CMat::Identity(dim, dim);
    law.kernel = spec;
    law.label = "resolvent_kernel";
    return law;
}

MaterialLaw make_kelvin_voigt(const KelvinVoigtSpec& spec) {
    require_square(spec.rho_tilde, "rho_tilde");
    require_square(spec.C, "C");
    require_square(spec.D, "D");
    const Eigen::Index p = spec.rho_tilde.rows(), q = spec.C.rows();
    MaterialLaw law;
    law.kind = LawKind::kelvin_voigt;
    law.dim = static_cast<std::size_t>(p + q);
    law.b_of_M = op_norm(spec.C.inverse() * spec.D);
    auto M = [spec, p, q](cplx z) -> CMat {
        CMat out = CMat::Zero(p + q, p + q);
        out.topLeftCorner(p, p) = spec.rho_tilde;
        // z^{-1}(C + z^{-1}D)^{-1} = (zC + D)^{-1}
        out.bottomRightCorner(q, q) = (z * spec.C + spec.D).inverse();
        return out;
    };
    law.eval = M;
    law.eval_zM = [M](cplx z) -> CMat { return z * M(z); };
    CMat lim = CMat::Zero(p + q, p + q);
    lim.topLeftCorner(p, p) = spec.rho_tilde;
    law.limit_inf = lim;
    law.kelvin_voigt = spec;
    law.label = "kelvin_voigt";
    return law;
}

MaterialLaw make_dual_phase_lag(const DualPhaseLagSpec& spec, std::size_t dim) {
    if (!(spec.tau_q > 0 && spec.tau_theta > 0)) throw std::invalid_argument("phase lags must be positive");
    MaterialLaw law;
    law.kind = LawKind::dual_phase_lag;
    law.dim = dim;
    law.b_of_M = -1.0 / spec.tau_theta + 1e-6;
    const double tq = spec.tau_q, tt = spec.tau_theta;
    law.eval = [tq, tt, dim](cplx z) -> CMat {
        if (z == 0.0) throw Error(ErrorCode::SingularEvaluation, "dual phase lag law has a pole at 0");
        cplx m = (1.0 / z + tq + 0.5 * tq * tq * z) / (1.0 + tt * z);
        return m * CMat::Identity(dim, dim);
    };
    law.eval_zM = [tq, tt, dim](cplx z) -> CMat {
        cplx m = (1.0 + tq * z + 0.5 * tq * tq * z * z) / (1.0 + tt * z);
        return m * CMat::Identity(dim, dim);
    };
    law.limit_inf = (0.5 * tq * tq / tt) * CMat::Identity(dim, dim);
    law.dpl = spec;
    law.label = "dual_phase_lag";
    return law;
}

MaterialLaw make_custom(std::size_t dim, double b_of_M, std::function<CMat(cplx)> eval, std::string label) {
    MaterialLaw law;
    law.kind = LawKind::custom;
    law.dim = dim;
    law.b_of_M = b_of_M;
    law.eval = eval;
    law.eval_zM = [eval](cplx z) -> CMat { return z * eval(z); };
    law.label = std::move(label);
    return law;
}

CMat evaluate(const MaterialLaw& law, cplx z) {
    if (!(z.real() > law.b_of_M))
        throw Error(ErrorCode::OutsideDomain, "Re z must exceed b(M) = " + std::to_string(law.b_of_M));
    if ((law.kind == LawKind::affine || law.kind == LawKind::delay) && z == 0.0)
        throw Error(ErrorCode::OutsideDomain, "z = 0 is not in the domain");
    return law.eval(z);
}

CMat evaluate_zM(const MaterialLaw& law, cplx z) { return law.eval_zM(z); }

CMat limit_at_infinity(const MaterialLaw& law) {
    if (law.limit_inf) return *law.limit_inf;
    // Richardson on s, 2s removes the 1/s term
    auto est = [&](double s) -> CMat { return 2.0 * law.eval(cplx(2 * s, 0)) - law.eval(cplx(s, 0)); };
    const double s = 1e6 * (1.0 + std::max(0.0, law.b_of_M));
    CMat a = est(s), b = est(2 * s);
    double scale = 1.0 + op_norm(b);
    if (!((a - b).norm() <= 1e-6 * scale) || !b.allFinite())
        throw Error(ErrorCode::NotRegularizing, "M(s) does not settle as s -> infinity");
    return b;
}

// --------------------------------------------------------------- certificates

AffineRho0 affine_rho0(const CMat& M0, const CMat& M1, double c0, double c1) {
    if (!(c0 > 0) || !(c1 > 0)) throw Error(ErrorCode::SubspaceAccretivityFailed, "c0 and c1 must be positive");
    const double scale = std::max(1.0, op_norm(M0));
    if ((M0 - M0.adjoint()).norm() > 1e-12 * scale)
        throw Error(ErrorCode::SubspaceAccretivityFailed, "M0 is not selfadjoint");
    Eigen::SelfAdjointEigenSolver<CMat> es(herm(M0));
    const auto& ev = es.eigenvalues();
    const double tol = 1e-12 * scale * static_cast<double>(M0.rows());
    std::vector<Eigen::Index> range, ker;
    for (Eigen::Index i = 0; i < ev.size(); ++i) (std::abs(ev(i)) > tol ? range : ker).push_back(i);
    AffineRho0 r;
    r.norm_M1 = op_norm(M1);
    r.c0_actual = std::numeric_limits<double>::infinity();
    for (auto i : range) r.c0_actual = std::min(r.c0_actual, ev(i));
    if (range.empty()) r.c0_actual = 0.0;
    if (r.c0_actual < c0 - 1e-12)
        throw Error(ErrorCode::SubspaceAccretivityFailed,
                    "M0 is not c0-positive on its range (actual " + std::to_string(r.c0_actual) + ")");
    r.trivial_kernel = ker.empty();
    if (!ker.empty()) {
        CMat K(M0.rows(), static_cast<Eigen::Index>(ker.size()));
        for (std::size_t j = 0; j < ker.size(); ++j) K.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(ker[j]);
        r.c1_actual = lambda_min_herm(K.adjoint() * M1 * K);
        if (r.c1_actual < c1 - 1e-12)
            throw Error(ErrorCode::SubspaceAccretivityFailed,
                        "M1 is not c1-accretive on ker M0 (actual " + std::to_string(r.c1_actual) + ")");
        r.rho0 = (c1 / 2.0 + r.norm_M1 * r.norm_M1 * 2.0 / c1) / c0;
    } else {
        r.c1_actual = std::numeric_limits<double>::infinity();
        r.rho0 = (c1 / 2.0 + r.norm_M1) / c0;
    }
    r.c = c1 / 2.0;
    return r;
}

double delay_tail_bound(const DelaySpec& spec, double s) {
    if (!(s > 0)) throw std::invalid_argument("delay_tail_bound needs s > 0");
    if (spec.terms.empty()) return 0.0;
    return spec.sup_norm() * (1.0 + 1.0 / (spec.eta() * s)) * std::exp(-spec.h0() * s);
}

CMat khat(const KernelSpec& spec, cplx z, double* quad_error) {
    double w = spec.profile.weight();
    if (std::isfinite(w) && !(z.real() > w)) throw Error(ErrorCode::OutsideDomain, "Re z must exceed the kernel weight");
    std::size_t dim = spec.matrix.size() ? static_cast<std::size_t>(spec.matrix.rows()) : 1;
    CMat K = kernel_matrix_or_identity(spec, dim);
    return (spec.profile.laplace(z, quad_error) / kSqrt2Pi) * K;
}

CMat im_form(const CMat& K, double t) {
    // Im<Kx|x> = x^H ((K^H - K)/(2i)) x
    return t * (K.adjoint() - K) / cplx(0.0, 2.0);
}

KernelConditionReport kernel_condition_check(const KernelSpec& spec, const std::vector<double>& rho_grid,
                                             const std::vector<double>& t_grid) {
    if (rho_grid.empty() || t_grid.empty()) throw std::invalid_argument("empty grids");
    std::size_t dim = spec.matrix.size() ? static_cast<std::size_t>(spec.matrix.rows()) : 1;
    const CMat K = kernel_matrix_or_identity(spec, dim);
    KernelConditionReport rep;
    rep.selfadjoint = true;
    rep.commute = true;
    std::vector<double> times;
    for (double t : t_grid)
        if (t >= 0) times.push_back(t);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CMat kt = spec.profile.value(times[i]) * K;
        double sc = std::max(1e-300, kt.norm());
        if ((kt - kt.adjoint()).norm() > 1e-10 * sc) rep.selfadjoint = false;
        if (i + 1 < times.size()) {
            CMat ks = spec.profile.value(times[i + 1]) * K;
            if ((kt * ks - ks * kt).norm() > 1e-10 * std::max(1e-300, kt.norm() * ks.norm())) rep.commute = false;
        }
    }
    auto min_form = [&](double rho) {
        std::vector<double> vals(t_grid.size());
        parallel_for(t_grid.size(), [&](std::size_t i) {
            double t = t_grid[i];
            vals[i] = lambda_min_herm(im_form(khat(spec, cplx(rho, t)), t));
        });
        return *std::min_element(vals.begin(), vals.end());
    };
    rep.rho1 = rho_grid.front();
    rep.d_est = min_form(rep.rho1);
    const double d = std::min(rep.d_est, 0.0);
    rep.propagated_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < rho_grid.size(); ++i) rep.propagated_min = std::min(rep.propagated_min, min_form(rho_grid[i]));
    rep.four_d_ok = rho_grid.size() < 2 || rep.propagated_min >= 4.0 * d - 1e-8;
    if (spec.profile.has_derivative()) {
        rep.example_a_bound =
            -(spec.profile.l1_derivative(rep.rho1) + std::abs(spec.profile.k0())) * op_norm(K) / kSqrt2Pi;
        rep.example_a_ok = rep.d_est >= *rep.example_a_bound - 1e-12;
    }
    return rep;
}

std::vector<double> default_scan_samples() { return symmetric_log_samples(1e-3, 1e6, 512, true); }

AccretivityScan accretivity_scan(const MaterialLaw& law, double rho, const std::vector<double>& t_samples) {
    if (!(rho > law.b_of_M)) throw Error(ErrorCode::OutsideDomain, "scan weight must exceed b(M)");
    AccretivityScan scan;
    scan.rho = rho;
    scan.sample_count = t_samples.size();
    double tmin = std::numeric_limits<double>::infinity(), tmax = 0.0;
    for (double t : t_samples) {
        if (t != 0) tmin = std::min(tmin, std::abs(t));
        tmax = std::max(tmax, std::abs(t));
    }
    scan.t_min = tmin;
    scan.t_max = tmax;
    // For an affine pencil with selfadjoint P0 the Hermitian part does not depend on Im z.
    bool flat = false;
    if (law.pencil) {
        const CMat& P0 = law.pencil->first;
        flat = (P0 - P0.adjoint()).norm() <= 1e-14 * std::max(1.0, P0.norm());
    }
    std::vector<double> vals(t_samples.size());
    if (flat) {
        double v = lambda_min_herm(rho * law.pencil->first + law.pencil->second);
        std::fill(vals.begin(), vals.end(), v);
    } else {
        parallel_for(t_samples.size(),
                     [&](std::size_t i) { vals[i] = lambda_min_herm(evaluate_zM(law, cplx(rho, t_samples[i]))); });
    }
    auto it = std::min_element(vals.begin(), vals.end());
    scan.c_est = *it;
    scan.argmin_t = t_samples[static_cast<std::size_t>(it - vals.begin())];
    try {
        CMat lim = limit_at_infinity(law);
        scan.asymptotic_term = rho * lambda_min_herm(lim);
        scan.asymptotic_ok = scan.asymptotic_term >= -1e-12;
    } catch (const Error&) {
        scan.asymptotic_term = std::numeric_limits<double>::quiet_NaN();
        scan.asymptotic_ok = false;
    }
    return scan;
}

}  // namespace evospec
