#include "evospec/ivp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>

namespace evospec {

// ------------------------------------------------------------ distributions

Spectrum Distribution::spectrum() const {
    Spectrum s = transform(regular);
    for (const auto& a : atoms) s.values += delta_spectrum(regular.grid, regular.rho, a.t, a.coeff).values;
    return s;
}

Distribution translate(const Distribution& f, double h) {
    Distribution out(translate(f.regular, h));
    for (const auto& a : f.atoms) out.atoms.push_back({a.t - h, a.coeff * std::exp(2.0 * f.regular.rho * h)});
    return out;
}

namespace {

// (d^{-1} f)(t-) and (t+) for rho > 0.
std::pair<CVec, CVec> antiderivative_traces(const Distribution& f, double t) {
    const double rho = f.regular.rho;
    if (!(rho > 0)) throw Error(ErrorCode::ZeroWeight, "cut-offs need rho > 0");
    Signal F = antiderivative(f.regular);
    CVec left, right;
    try {
        left = trace(F, t, TraceSide::left).value;
        right = trace(F, t, TraceSide::right).value;
    } catch (const Error& e) {
        throw Error(ErrorCode::TraceFailed, std::string("antiderivative trace at t: ") + e.what());
    }
    for (const auto& a : f.atoms) {
        CVec jump = a.coeff * std::exp(2.0 * rho * a.t);
        if (a.t < t - 1e-12) left += jump;
        if (a.t <= t + 1e-12) right += jump;
    }
    return {left, right};
}

}  // namespace

CutResult cut_P(const Distribution& f, double t) {
    auto [left, right] = antiderivative_traces(f, t);
    (void)left;
    CutResult r;
    r.part = Distribution(cutoff(f.regular, t, Side::above));
    for (const auto& a : f.atoms)
        if (a.t > t + 1e-12) r.part.atoms.push_back(a);
    r.jump = {t, std::exp(-2.0 * f.regular.rho * t) * right};
    return r;
}

CutResult cut_Q(const Distribution& f, double t) {
    auto [left, right] = antiderivative_traces(f, t);
    (void)right;
    CutResult r;
    r.part = Distribution(cutoff(f.regular, t, Side::below));
    for (const auto& a : f.atoms)
        if (a.t < t - 1e-12) r.part.atoms.push_back(a);
    r.jump = {t, std::exp(-2.0 * f.regular.rho * t) * left};
    return r;
}

CutResult cut_P(const Signal& f, double t) { return cut_P(Distribution(f), t); }
CutResult cut_Q(const Signal& f, double t) { return cut_Q(Distribution(f), t); }

CVec jump_coefficient(const Distribution& f, double t) {
    auto [left, right] = antiderivative_traces(f, t);
    return std::exp(-2.0 * f.regular.rho * t) * (right - left);
}

// ------------------------------------------------------------------ history

namespace {

void validate_history(const Signal& g) {
    double peak = 0.0, after = 0.0;
    for (std::size_t j = 0; j < g.grid.n; ++j) {
        double a = g.values.row(j).norm();
        peak = std::max(peak, a);
        if (g.grid.t(j) > 1e-9 * g.grid.dt) after = std::max(after, a);
    }
    if (after > 1e-12 * std::max(peak, 1e-300))
        throw std::invalid_argument("history must vanish for t > 0");
    if (!g.grid.node_at(0.0)) throw std::invalid_argument("history grid must contain t = 0");
}

}  // namespace

History::History(Signal s) : g(std::move(s)) {
    validate_history(g);
    g0minus = trace(g, 0.0, TraceSide::left).value;
}

History::History(Signal s, CVec x) : g(std::move(s)), g0minus(std::move(x)) {
    validate_history(g);
    if (static_cast<std::size_t>(g0minus.size()) != g.dim()) throw Error(ErrorCode::Nonconformable, "g(0-) size");
}

History history_from_initial_value(const TimeGrid& grid, double rho, const CVec& u0) {
    Signal g(grid, rho, static_cast<std::size_t>(u0.size()));
    for (std::size_t j = 0; j < grid.n; ++j)
        if (grid.t(j) <= 1e-9 * grid.dt) g.values.row(j) = u0.transpose();
    return History(std::move(g), u0);
}

std::size_t history_hash(const History& h) {
    std::uint64_t x = 1469598103934665603ull;
    auto mix = [&](const void* p, std::size_t n) {
        const auto* c = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            x ^= c[i];
            x *= 1099511628211ull;
        }
    };
    mix(h.g.values.data(), sizeof(cplx) * static_cast<std::size_t>(h.g.values.size()));
    mix(h.g0minus.data(), sizeof(cplx) * static_cast<std::size_t>(h.g0minus.size()));
    mix(&h.g.rho, sizeof(double));
    mix(&h.g.grid.t_start, sizeof(double));
    mix(&h.g.grid.dt, sizeof(double));
    return static_cast<std::size_t>(x);
}

// -------------------------------------------------------------------- gamma

namespace {

bool is_amnesic(const MaterialLaw& law) { return static_cast<bool>(law.pencil); }

std::size_t zero_node(const TimeGrid& g) {
    auto j = g.node_at(0.0);
    if (!j) throw std::invalid_argument("grid must contain t = 0");
    return *j;
}

}  // namespace

JumpData gamma(const MaterialLaw& law, const History& h, std::optional<JumpMethod> force) {
    JumpData jd;
    const bool amnesic = is_amnesic(law);
    if ((force && *force == JumpMethod::amnesic) || (!force && amnesic)) {
        if (!amnesic) throw Error(ErrorCode::NotRegularizing, "law is not of the form M0 + M1/z");
        jd.method = JumpMethod::amnesic;
        jd.gamma = law.pencil->first * h.g0minus;
        return jd;
    }
    jd.method = JumpMethod::general;
    CMat Minf;
    try {
        Minf = limit_at_infinity(law);
    } catch (const Error& e) {
        throw Error(ErrorCode::NotRegularizing, e.what());
    }
    // continue g past 0 by a decaying exponential so the input has no jump at 0
    const Signal& g = h.g;
    const double beta = std::max(1.0, 20.0 / std::max(g.grid.t_end(), 1e-12));
    Signal gt = g;
    const std::size_t j0 = zero_node(g.grid);
    for (std::size_t j = j0; j < g.grid.n; ++j)
        gt.values.row(j) = std::exp(-beta * g.grid.t(j)) * h.g0minus.transpose();
    Signal Mg = apply_law(gt, law);
    CVec left, right;
    try {
        left = trace(Mg, 0.0, TraceSide::left).value;
        right = trace(Mg, 0.0, TraceSide::right).value;
    } catch (const Error& e) {
        throw Error(ErrorCode::NotRegularizing, std::string("trace of M(d)g at 0: ") + e.what());
    }
    jd.gamma = left - right + Minf * h.g0minus;
    return jd;
}

// -------------------------------------------------------------- K assembly

namespace {

// g with the value at t = 0 halved (trapezoid end weight / midpoint at the jump)
CMat halved_history(const History& h, std::size_t j0) {
    CMat v = h.g.values;
    v.row(j0) *= 0.5;
    return v;
}

Signal K_delay(const DelaySpec& spec, const History& h) {
    const TimeGrid& G = h.g.grid;
    const std::size_t j0 = zero_node(G);
    const CMat gh = halved_history(h, j0);
    Signal K(G, h.g.rho, h.g.dim());
    for (const auto& term : spec.terms) {
        double s = term.h / G.dt;
        long lag = std::lround(s);
        if (std::abs(s - static_cast<double>(lag)) > 1e-9) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "delay %.6g snapped to %.6g on the grid", term.h, lag * G.dt);
            note(buf);
        }
        for (std::size_t j = j0; j < G.n; ++j) {
            long src = static_cast<long>(j) - lag;
            if (src < 0 || src > static_cast<long>(j0)) continue;
            double w = j == j0 ? 0.5 : 1.0;
            K.values.row(j) += w * (term.N * gh.row(src).transpose()).transpose();
        }
    }
    return K;
}

Signal K_kernel(const KernelSpec& spec, const History& h) {
    if (!spec.profile.has_derivative())
        throw Error(ErrorCode::NotRegularizing, "kernel without an integrable derivative");
    const TimeGrid& G = h.g.grid;
    const std::size_t j0 = zero_node(G);
    const CMat gh = halved_history(h, j0);
    const double dt = G.dt;
    Signal K(G, h.g.rho, h.g.dim());
    // (k' * g)(t) for t > 0; g lives on t <= 0, trapezoid with the half weight at 0 in gh
    std::vector<double> kd(G.n);
    for (std::size_t i = 0; i < G.n; ++i) kd[i] = spec.profile.derivative(static_cast<double>(i) * dt);
    parallel_for(G.n - j0 - 1, [&](std::size_t r) {
        std::size_t j = j0 + 1 + r;
        CVec acc = CVec::Zero(gh.cols());
        for (std::size_t i = 0; i <= j0; ++i) {
            double w = i == 0 ? 0.5 : 1.0;
            acc += w * kd[j - i] * gh.row(i).transpose();
        }
        K.values.row(j) = (dt * (spec.matrix * acc)).transpose();
    });
    K.values.row(j0) = 0.5 * K.values.row(j0 + 1);  // half of K(0+) by extrapolation below
    if (j0 + 3 < G.n) {
        CVec kp = 3.0 * K.values.row(j0 + 1) - 3.0 * K.values.row(j0 + 2) + K.values.row(j0 + 3);
        K.values.row(j0) = 0.5 * kp.transpose();
    }
    return K;
}

Signal K_resolvent(const KernelSpec& spec, const History& h) {
    if (!spec.profile.has_derivative())
        throw Error(ErrorCode::NotRegularizing, "kernel without an integrable derivative");
    const TimeGrid& G = h.g.grid;
    const std::size_t n = G.n;
    const std::size_t j0 = zero_node(G);
    const double dt = G.dt;
    const Eigen::Index m = static_cast<Eigen::Index>(h.g.dim());
    const CMat& Km = spec.matrix;
    const CMat gh = halved_history(h, j0);
    std::vector<double> kv(n), kd(n);
    for (std::size_t i = 0; i < n; ++i) {
        kv[i] = spec.profile.value(static_cast<double>(i) * dt);
        kd[i] = spec.profile.derivative(static_cast<double>(i) * dt);
    }
    // w = g + k*w by implicit trapezoid from the window start
    CMat w = CMat::Zero(static_cast<Eigen::Index>(n), m);
    Eigen::PartialPivLU<CMat> lu(CMat::Identity(m, m) - 0.5 * dt * kv[0] * Km);
    const double gmax = std::max(1e-300, gh.cwiseAbs().maxCoeff());
    for (std::size_t j = 0; j < n; ++j) {
        CVec acc = CVec::Zero(m);
        if (j > 0) {
            acc += 0.5 * kv[j] * w.row(0).transpose();
            for (std::size_t i = 1; i < j; ++i) acc += kv[j - i] * w.row(i).transpose();
        }
        CVec rhs = gh.row(j).transpose() + dt * (Km * acc);
        w.row(j) = lu.solve(rhs).transpose();
        double a = w.row(j).cwiseAbs().maxCoeff();
        if (!std::isfinite(a) || a > 1e12 * gmax)
            throw Error(ErrorCode::VolterraDiverged, "resolvent iteration blew up at t = " + std::to_string(G.t(j)));
    }
    // one-sided value at 0+: the node holds the midpoint of the jump g(0-)
    CMat wr = w;
    wr.row(j0) = w.row(j0) - 0.5 * h.g0minus.transpose();
    Signal K(G, h.g.rho, h.g.dim());
    parallel_for(n - j0, [&](std::size_t r) {
        std::size_t j = j0 + r;
        CVec acc = CVec::Zero(m);
        const CMat& src = j == j0 ? wr : w;
        for (std::size_t i = 0; i <= j; ++i) {
            double wt = (i == 0 || i == j) ? 0.5 : 1.0;
            acc += wt * kd[j - i] * src.row(i).transpose();
        }
        CVec val = dt * (Km * acc) + kv[0] * (Km * src.row(j).transpose());
        K.values.row(j) = (j == j0 ? 0.5 : 1.0) * val.transpose();
    });
    return K;
}

}  // namespace

Signal assemble_K(const MaterialLaw& law, const History& h) {
    if (law.pencil) return Signal(h.g.grid, h.g.rho, h.g.dim());
    switch (law.kind) {
        case LawKind::affine: return Signal(h.g.grid, h.g.rho, h.g.dim());
        case LawKind::delay: return K_delay(*law.delay, h);
        case LawKind::kernel: return K_kernel(*law.kernel, h);
        case LawKind::resolvent_kernel: return K_resolvent(*law.kernel, h);
        default: break;
    }
    throw Error(ErrorCode::NotRegularizing, std::string("no history source for law kind ") + law_kind_name(law.kind));
}

// --------------------------------------------------------------- solve_ivp

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

Certificate ivp_certificate(const EvolutionaryProblem& p, const IvpOptions& opt) {
    if (opt.certificate) {
        if (opt.certificate->rho != p.rho) throw Error(ErrorCode::NoCertificate, "certificate is for another weight");
        return *opt.certificate;
    }
    try {
        return wellposedness_certificate(p, p.rho);
    } catch (const Error& e) {
        throw Error(ErrorCode::NoCertificate, e.what());
    }
}

}  // namespace

IvpResult solve_ivp(const EvolutionaryProblem& p, const History& h, const IvpOptions& opt) {
    p.validate();
    if (!(h.g.grid == p.grid)) throw Error(ErrorCode::Nonconformable, "history grid differs from the problem grid");
    if (h.g.dim() != p.dim()) throw Error(ErrorCode::Nonconformable, "history dimension differs from the problem");
    const Signal g = h.g.with_rho(p.rho);
    const History hist(g, h.g0minus);
    IvpResult res;
    Certificate cert = ivp_certificate(p, opt);
    res.jump = gamma(p.law, hist);
    res.K = assemble_K(p.law, hist);
    const std::size_t j0 = zero_node(p.grid);
    const bool k_zero = res.K.values.cwiseAbs().maxCoeff() == 0.0;
    CVec K0 = CVec::Zero(static_cast<Eigen::Index>(p.dim()));
    if (!k_zero) K0 = trace(res.K, 0.0, TraceSide::right).value;

    FrequencySystem sys(p);
    const int P = opt.singular_terms > 0 ? opt.singular_terms : (k_zero ? 3 : 2);
    const double t_end = p.grid.t_end();
    const double beta = opt.beta > 0 ? opt.beta : std::sqrt((30.0 / t_end) * (0.05 * kPi / p.grid.dt));
    res.beta = beta;

    // asymptotic coefficients of sqrt(2 pi) v^(z) = sum_p c_p z^{-p}
    const CVec& G = res.jump.gamma;
    double scale_law = 0.0;
    try {
        scale_law = op_norm(p.law.eval_zM(cplx(1.0, 0.0)) - limit_at_infinity(p.law));
    } catch (const Error&) {
        scale_law = op_norm(p.law.eval_zM(cplx(1.0, 0.0)));
    }
    const double Z = 100.0 * (1.0 + op_norm(p.A.matrix()) + scale_law);
    const int npts = P + 6, deg = P + 2;
    CMat V(npts, deg + 1), Y(npts, G.size());
    for (int i = 0; i < npts; ++i) {
        const double z = Z * std::pow(2.0, i);
        for (int q = 0; q <= deg; ++q) V(i, q) = std::pow(z, -q);
        CVec rhs = G - K0 / z;
        Y.row(i) = (z * sys.solve(cplx(z, 0.0), rhs)).transpose();
    }
    CMat c = V.colPivHouseholderQr().solve(Y);  // row q: coefficient of z^{-q}
    std::vector<CVec> a;
    for (int pp = 1; pp <= P; ++pp) {
        CVec acc = c.row(pp - 1).transpose();
        for (int q = 1; q < pp; ++q) acc -= a[q - 1] * (binom(pp - 1, pp - q) * std::pow(-beta, pp - q));
        a.push_back(acc);
    }
    res.singular_coeffs = a;

    Spectrum Kh = transform(res.K);
    Spectrum F = Kh;
    for (std::size_t k = 0; k < F.freq.n; ++k)
        F.values.row(k) = (G / kSqrt2Pi).transpose() - Kh.values.row(k);
    SolveOptions so;
    so.certificate = cert;
    so.adjust = [&](cplx z, CVec& x) {
        for (int q = 1; q <= P; ++q) x -= a[q - 1] / (kSqrt2Pi * std::pow(z + beta, q));
    };
    SolveResult sr = solve_spectrum(p, F, so);
    const Signal& r = sr.u;
    Signal v = r;
    double fact = 1.0;
    for (int q = 1; q <= P; ++q) {
        if (q > 1) fact *= (q - 1);
        for (std::size_t j = j0; j < p.grid.n; ++j) {
            double t = p.grid.t(j);
            double basis = std::exp(-beta * t) * std::pow(t, q - 1) / fact;
            double w = j == j0 ? 0.5 : 1.0;
            v.values.row(j) += (w * basis * a[q - 1]).transpose();
        }
    }
    res.report = sr.report;
    res.v = v;
    res.u = v;
    for (std::size_t j = 0; j <= j0; ++j) res.u.values.row(j) += g.values.row(j);
    res.u.values.row(j0) = hist.g0minus.transpose();

    res.u0plus = trace(res.u, 0.0, TraceSide::right).value;
    res.attainment_error = (res.u0plus - hist.g0minus).norm() / (1.0 + hist.g0minus.norm());
    res.attained = res.attainment_error <= opt.attainment_tol;
    res.leak = causality_leak(v, -p.grid.dt);
    if (opt.check_attainment && !res.attained)
        throw Error(ErrorCode::AttainmentFailed,
                    "u(0+) misses g(0-) by " + std::to_string(res.attainment_error) + "; g likely outside His_rho(M,A)");
    return res;
}

// ---------------------------------------------------------------------- DAE

DAEPencil DAEPencil::make(const CMat& M0, const CMat& M1) {
    if (M0.rows() != M0.cols() || M1.rows() != M0.rows() || M1.cols() != M0.cols())
        throw std::invalid_argument("pencil matrices must be square and equal in size");
    DAEPencil p;
    p.M0 = M0;
    p.M1 = M1;
    Eigen::JacobiSVD<CMat> svd(M0, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    const double tol = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > tol) ++r;
    p.range_basis = svd.matrixU().leftCols(r);
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd;
    p.regular = true;
    const double scale = std::max(1.0, op_norm(M0) + op_norm(M1));
    for (int i = 0; i < 3; ++i) {
        cplx lam(nd(rng), nd(rng));
        if (!(sigma_min(lam * M0 + M1) > 1e-10 * scale * std::max(1.0, std::abs(lam)))) p.regular = false;
    }
    if (p.regular) {
        QZResult f = qz(M1, M0, 0.0);
        int finite = 0;
        for (Eigen::Index i = 0; i < f.beta.size(); ++i)
            if (std::abs(f.beta(i)) > 1e-10 * scale) ++finite;
        p.index1 = finite == static_cast<int>(r);
    }
    return p;
}

bool consistent_iv_check(const DAEPencil& pencil, const CVec& u0, double* residual) {
    CVec y = pencil.M1 * u0;
    CVec proj = pencil.range_basis * (pencil.range_basis.adjoint() * y);
    double res = (y - proj).norm();
    if (residual) *residual = res;
    return res <= 1e-9 * std::max(y.norm(), 1.0);
}

CVec complete_consistent(const CMat& M0, const CMat& M1A, const CVec& u0) {
    Eigen::JacobiSVD<CMat> svd(M0, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double tol = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > tol) ++r;
    const Eigen::Index n = M0.rows();
    if (r == n) return u0;
    CMat Uc = svd.matrixU().rightCols(n - r);  // complement of R(M0)
    CMat Kb = svd.matrixV().rightCols(n - r);  // ker M0
    CMat W = Uc.adjoint() * M1A * Kb;
    CVec rhs = -(Uc.adjoint() * (M1A * u0));
    CVec x = W.colPivHouseholderQr().solve(rhs);
    return u0 + Kb * x;
}

bool WeierstrassResult::contains(const CVec& u0) const {
    CVec r = u0 - basis * (basis.adjoint() * u0);
    return r.norm() <= 1e-9 * std::max(u0.norm(), 1.0);
}

WeierstrassResult weierstrass_oracle(const DAEPencil& pencil) {
    const Eigen::Index n = pencil.M0.rows();
    if (n > 8) throw std::invalid_argument("weierstrass_oracle is limited to n <= 8");
    const double scale = std::max(1.0, op_norm(pencil.M0) + op_norm(pencil.M1));
    std::mt19937_64 rng(777);
    std::normal_distribution<double> nd;
    for (int i = 0; i < 3; ++i) {
        cplx lam(nd(rng), nd(rng));
        if (!(sigma_min(lam * pencil.M0 + pencil.M1) > 1e-10 * scale * std::max(1.0, std::abs(lam))))
            throw Error(ErrorCode::SingularPencil, "det(lambda M0 + M1) vanishes at a random lambda");
    }
    const double tol = 1e-10 * scale;
    QZResult f = qz(pencil.M1, pencil.M0, tol);
    for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(f.alpha(i)) <= tol && std::abs(f.beta(i)) <= tol)
            throw Error(ErrorCode::SingularPencil, "alpha = beta = 0 in the generalized Schur form");
    WeierstrassResult w;
    w.d = f.selected;
    w.basis = f.Z.leftCols(w.d);
    Eigen::Index rank = pencil.range_basis.cols();
    if (pencil.range_basis.size() == 0) rank = DAEPencil::make(pencil.M0, pencil.M1).range_basis.cols();
    if (w.d < rank) throw Error(ErrorCode::HighIndexPencil, "finite part smaller than rank M0: index >= 2");
    return w;
}

// ---------------------------------------------------------------- semigroup

const IvpResult& SemigroupSampler::trajectory(const EvolutionaryProblem& p, const History& h) {
    const std::size_t key = problem_hash(p) * 1000003u ^ history_hash(h);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return *it->second;
    }
    auto res = std::make_shared<IvpResult>(solve_ivp(p, h, opt_));
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = cache_.emplace(key, res);
    return *it->second;
}

std::size_t SemigroupSampler::cache_size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.size();
}

SemigroupSample SemigroupSampler::sample(const EvolutionaryProblem& p, const History& h, double t) {
    if (t < 0) throw std::invalid_argument("semigroup time must be nonnegative");
    if (!p.grid.node_at(t)) throw Error(ErrorCode::NonGridShift, "t is not grid aligned");
    if (std::abs(t) <= 1e-12 * p.grid.dt) return {h.g0minus, h};
    const IvpResult& r = trajectory(p, h);
    CVec state = trace(r.u, t, TraceSide::right).value;
    Signal shifted = cutoff(translate(r.u, t), 0.0, Side::below);
    return {state, History(shifted, state)};
}

SemigroupSample sample_semigroup(const EvolutionaryProblem& p, const History& h, double t) {
    SemigroupSampler s;
    return s.sample(p, h, t);
}

SemigroupDiscrepancy semigroup_law_check(const EvolutionaryProblem& p, const History& h, double t, double s,
                                         SemigroupSampler* sampler) {
    SemigroupSampler local;
    SemigroupSampler& S = sampler ? *sampler : local;
    SemigroupSample direct = S.sample(p, h, t + s);
    SemigroupSample first = S.sample(p, h, s);
    SemigroupSample second = S.sample(p, first.shifted, t);
    SemigroupDiscrepancy d;
    const double sn = std::max(direct.state.norm(), 1e-300);
    d.state = (direct.state - second.state).norm() / sn;
    Signal diff(direct.shifted.g.grid, direct.shifted.g.rho, CMat(direct.shifted.g.values - second.shifted.g.values));
    const double hn = std::max(weighted_norm(direct.shifted.g), 1e-300);
    d.history = weighted_norm(diff) / hn;
    return d;
}

// ------------------------------------------------------------ Hille-Yosida

HilleYosidaReport hille_yosida_check(const CMat& M0, const CMat& M1, const CMat& A, const std::vector<double>& lambdas,
                                     int n_max, const std::vector<CVec>& probes, double M_budget, double omega_budget) {
    HilleYosidaReport rep;
    // ratios r[l][n] = max_x |R^{n+1} x|/|x|
    std::vector<std::vector<double>> ratio(lambdas.size(), std::vector<double>(static_cast<std::size_t>(n_max + 1), 0.0));
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
        const double lam = lambdas[l];
        Eigen::PartialPivLU<CMat> lu(lam * M0 + M1 + A);
        for (const CVec& x : probes) {
            const double xn = x.norm();
            if (xn == 0) continue;
            CVec y = x;
            for (int n = 0; n <= n_max; ++n) {
                y = lu.solve(M0 * y);
                ratio[l][static_cast<std::size_t>(n)] = std::max(ratio[l][static_cast<std::size_t>(n)], y.norm() / xn);
                ++rep.evaluations;
            }
        }
    }
    auto M_of = [&](double omega) {
        double M = 0.0;
        for (std::size_t l = 0; l < lambdas.size(); ++l) {
            if (!(lambdas[l] > omega)) return std::numeric_limits<double>::infinity();
            for (int n = 0; n <= n_max; ++n)
                M = std::max(M, ratio[l][static_cast<std::size_t>(n)] * std::pow(lambdas[l] - omega, n + 1));
        }
        return M;
    };
    const int steps = 200;
    for (int i = 0; i <= steps; ++i) {
        double omega = omega_budget * i / steps;
        double M = M_of(omega);
        if (M <= M_budget * (1.0 + 1e-9)) {
            rep.M_est = M;
            rep.omega_est = omega;
            rep.pass = true;
            return rep;
        }
    }
    rep.omega_est = omega_budget;
    rep.M_est = M_of(omega_budget);
    rep.pass = false;
    return rep;
}

GrowthReport growth_bound_check(const EvolutionaryProblem& p, const std::vector<History>& histories, double s0_est,
                                double t0, double t1, ComponentBlock block) {
    GrowthReport rep;
    rep.s0_est = s0_est;
    rep.required = -s0_est - 0.05 * std::abs(s0_est) - 1e-6;
    rep.pass = true;
    IvpOptions opt;
    opt.certificate = wellposedness_certificate(p, p.rho);
    for (const auto& h : histories) {
        IvpResult r = solve_ivp(p, h, opt);
        double rate = measure_decay_rate(r.u, t0, t1, block);
        rep.rates.push_back(rate);
        if (rate < rep.required) rep.pass = false;
    }
    return rep;
}

}  // namespace evospec
