#include "evospec/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>

namespace evospec {

void EvolutionaryProblem::validate() const {
    if (law.dim != A.dim())
        throw Error(ErrorCode::Nonconformable,
                    "law dim " + std::to_string(law.dim) + " differs from operator dim " + std::to_string(A.dim()));
    if (!law.eval_zM) throw std::invalid_argument("law has no evaluator");
}

// ------------------------------------------------------------ frequency system

FrequencySystem::FrequencySystem(const EvolutionaryProblem& p) : zM_(p.law.eval_zM), A_(p.A.matrix()) {
    p.validate();
    if (p.law.pencil) {
        P0_ = p.law.pencil->first;
        P1A_ = p.law.pencil->second + A_;
        pencil_ = std::make_shared<PencilSolver>(P0_, P1A_);
    }
}

CMat FrequencySystem::matrix(cplx z) const {
    if (pencil_) return z * P0_ + P1A_;
    return zM_(z) + A_;
}

namespace {

double lu_sigma_estimate(const Eigen::PartialPivLU<CMat>& lu, Eigen::Index n, int iterations) {
    CVec x = CVec::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) *= 1.0 + 0.1 * std::sin(1.0 + 3.0 * static_cast<double>(i));
    x.normalize();
    double growth = 0.0;
    for (int it = 0; it < iterations; ++it) {
        CVec y = lu.adjoint().solve(x);
        y = lu.solve(y);
        growth = y.norm();
        if (!(growth > 0) || !std::isfinite(growth)) return 0.0;
        x = y / growth;
    }
    return 1.0 / std::sqrt(growth);
}

}  // namespace

CVec FrequencySystem::solve(cplx z, const CVec& b, double* sigma, double* residual, double* scale) const {
    CVec x;
    if (pencil_) {
        x = pencil_->solve(z, b);
        if (sigma) *sigma = pencil_->sigma_min_estimate(z);
        if (residual || scale) {
            CVec r = z * (P0_ * x) + P1A_ * x - b;
            double bn = b.norm();
            if (residual) *residual = bn > 0 ? r.norm() / bn : r.norm();
            if (scale) *scale = std::abs(z) * P0_.norm() + P1A_.norm();
        }
        return x;
    }
    CMat R = matrix(z);
    if (!R.allFinite()) throw Error(ErrorCode::SingularEvaluation, "non-finite system matrix");
    Eigen::PartialPivLU<CMat> lu(R);
    x = lu.solve(b);
    if (sigma) *sigma = R.rows() <= 8 ? evospec::sigma_min(R) : lu_sigma_estimate(lu, R.rows(), 8);
    if (residual) {
        double bn = b.norm();
        *residual = bn > 0 ? (R * x - b).norm() / bn : (R * x - b).norm();
    }
    if (scale) *scale = R.norm();
    return x;
}

double FrequencySystem::sigma_min(cplx z) const {
    if (pencil_) return pencil_->sigma_min_estimate(z);
    CMat R = matrix(z);
    if (!R.allFinite()) throw Error(ErrorCode::SingularEvaluation, "non-finite system matrix");
    if (R.rows() <= 8) return evospec::sigma_min(R);
    Eigen::PartialPivLU<CMat> lu(R);
    return lu_sigma_estimate(lu, R.rows(), 8);
}

std::vector<cplx> FrequencySystem::eigenvalues() const {
    if (!pencil_) return {};
    return pencil_->finite_eigenvalues();
}

// ------------------------------------------------------------- certificates

const char* route_name(CertificateRoute r) { return r == CertificateRoute::accretive ? "accretive" : "small_ball"; }

Certificate wellposedness_certificate(const EvolutionaryProblem& p, double rho, const CertificateOptions& opt) {
    p.validate();
    if (!(rho > p.law.b_of_M))
        throw Error(ErrorCode::CertificationFailed, "rho = " + std::to_string(rho) + " does not exceed b(M); witness z = " +
                                                        std::to_string(rho));
    Certificate cert;
    cert.rho = rho;
    cert.scan = accretivity_scan(p.law, rho, opt.t_samples);
    cert.a_cert = is_m_accretive(p.A);
    if (cert.scan.c_est > 0 && cert.a_cert.pass) {
        cert.route = CertificateRoute::accretive;
        cert.c = cert.scan.c_est;
        cert.resolvent_bound = 1.0 / cert.c;
        return cert;
    }
    // small-ball route: A invertible and z M(z) small near 0, accretive elsewhere on the line
    const CMat& A = p.A.matrix();
    const double sa = evospec::sigma_min(A);
    const auto witness = [&](cplx z) {
        char buf[96];
        std::snprintf(buf, sizeof buf, " witness z = %.6g%+.6gi", z.real(), z.imag());
        return std::string(buf);
    };
    if (!(sa > 1e-12 * std::max(1.0, op_norm(A))) || !cert.a_cert.pass || cert.a_cert.c < -1e-12)
        throw Error(ErrorCode::CertificationFailed,
                    "accretivity constant " + std::to_string(cert.scan.c_est) + " at rho = " + std::to_string(rho) +
                        " and A not invertible/accretive;" + witness(cplx(rho, cert.scan.argmin_t)));
    cert.route = CertificateRoute::small_ball;
    cert.delta = opt.delta;
    cert.a_inv_norm = 1.0 / sa;
    double sup = 0.0;
    std::size_t count = 0;
    cplx worst = 0.0;
    for (int ir = 0; ir <= 4; ++ir) {
        const double r = opt.delta * ir / 4.0;
        const int angles = ir == 0 ? 1 : 32;
        for (int ia = 0; ia < angles; ++ia) {
            cplx z = std::polar(r, 2.0 * kPi * ia / angles);
            try {
                double v = op_norm(p.law.eval_zM(z));
                if (!std::isfinite(v)) continue;
                ++count;
                if (v > sup) {
                    sup = v;
                    worst = z;
                }
            } catch (const Error&) {
                // exceptional point of the domain
            }
        }
    }
    cert.ball_sup = sup;
    cert.ball_samples = count;
    double offmin = std::numeric_limits<double>::infinity();
    double offarg = 0.0;
    for (std::size_t i = 0; i < opt.t_samples.size(); ++i) {
        double t = opt.t_samples[i];
        if (std::abs(cplx(rho, t)) <= opt.delta) continue;
        double v = lambda_min_herm(p.law.eval_zM(cplx(rho, t)));
        if (v < offmin) {
            offmin = v;
            offarg = t;
        }
    }
    cert.offball_min = offmin;
    if (!(sup * cert.a_inv_norm < 1.0))
        throw Error(ErrorCode::CertificationFailed,
                    "sup |zM(z)| on the ball = " + std::to_string(sup) + " is not below 1/|A^{-1}|;" + witness(worst));
    if (!(offmin >= -1e-12))
        throw Error(ErrorCode::CertificationFailed,
                    "zM(z) not accretive off the ball (" + std::to_string(offmin) + ");" + witness(cplx(rho, offarg)));
    cert.c = std::max(0.0, offmin);
    cert.resolvent_bound = cert.a_inv_norm / (1.0 - sup * cert.a_inv_norm);
    if (cert.c > 0) cert.resolvent_bound = std::max(cert.resolvent_bound, 1.0 / cert.c);
    return cert;
}

// --------------------------------------------------------------------- solve

namespace {

Certificate obtain_certificate(const EvolutionaryProblem& p, const SolveOptions& opt) {
    if (opt.certificate) {
        if (opt.certificate->rho != p.rho)
            throw Error(ErrorCode::NoCertificate, "supplied certificate is for a different weight");
        return *opt.certificate;
    }
    try {
        return wellposedness_certificate(p, p.rho);
    } catch (const Error& e) {
        throw Error(ErrorCode::NoCertificate, std::string("no certificate at rho = ") + std::to_string(p.rho) + " (" +
                                                  e.what() + ")");
    }
}

}  // namespace

SolveResult solve_spectrum(const EvolutionaryProblem& p, const Spectrum& F, const SolveOptions& opt) {
    p.validate();
    if (F.dim() != p.dim()) throw Error(ErrorCode::Nonconformable, "source dimension differs from the problem");
    if (F.rho != p.rho || F.freq.n != p.grid.n || F.freq.dt != p.grid.dt || F.t_start != p.grid.t_start)
        throw Error(ErrorCode::Nonconformable, "source is not on the problem's grid/weight");
    SolveResult res;
    std::optional<Certificate> cert;
    if (opt.require_certificate) cert = obtain_certificate(p, opt);
    FrequencySystem sys(p);
    const std::size_t n = F.freq.n;
    Spectrum U = F;
    std::vector<double> sig(n, std::numeric_limits<double>::infinity()), resid(n, 0.0), scales(n, 1.0);
    parallel_for(n, [&](std::size_t k) {
        cplx z = F.freq.z(k, F.rho);
        CVec b = F.values.row(k).transpose();
        CVec x = sys.solve(z, b, &sig[k], &resid[k], &scales[k]);
        if (b.norm() == 0.0) resid[k] = 0.0;
        if (opt.adjust) opt.adjust(z, x);
        U.values.row(k) = x.transpose();
    });
    SolveReport& rep = res.report;
    rep.frequencies = n;
    rep.qz_path = sys.uses_qz();
    rep.sigma_min_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        if (!(sig[k] >= 1e-12 * std::max(1.0, scales[k])))
            throw Error(ErrorCode::SingularFrequency,
                        "sigma_min " + std::to_string(sig[k]) + " at xi = " + std::to_string(F.freq.xi(k)));
        if (sig[k] < rep.sigma_min_min) {
            rep.sigma_min_min = sig[k];
            rep.xi_at_sigma_min = F.freq.xi(k);
        }
        rep.residual_max = std::max(rep.residual_max, resid[k]);
    }
    rep.sigma_profile = std::move(sig);
    if (cert) {
        rep.c_est = cert->c;
        rep.route = route_name(cert->route);
    }
    res.u = inverse_transform(U);
    rep.norm_u = weighted_norm(res.u);
    rep.edge_ratio = check_edges(res.u, "solution");
    return res;
}

SolveResult solve(const EvolutionaryProblem& p, const Signal& f, const SolveOptions& opt) {
    if (!(f.grid == p.grid)) throw Error(ErrorCode::Nonconformable, "source grid differs from the problem grid");
    if (f.rho != p.rho) throw Error(ErrorCode::Nonconformable, "source weight differs from the problem weight");
    SolveResult res = solve_spectrum(p, transform(f), opt);
    res.report.norm_f = weighted_norm(f);
    return res;
}

// -------------------------------------------------------------- s0 estimate

namespace {

template <class F>
double golden_min(F f, double a, double b, int iters, double fa_hint = std::numeric_limits<double>::infinity()) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    double best = std::min({fc, fd, fa_hint});
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        best = std::min({best, fc, fd});
    }
    return best;
}

}  // namespace

S0Estimate estimate_s0(const EvolutionaryProblem& p, double rho_lo, double rho_hi, double sigma_floor,
                       const S0Options& opt) {
    if (!(rho_hi > rho_lo) || !std::isfinite(rho_lo) || !std::isfinite(rho_hi))
        throw std::invalid_argument("estimate_s0 needs a finite range rho_lo < rho_hi");
    FrequencySystem sys(p);
    const int decades = static_cast<int>(std::ceil(std::log10(opt.xi_max / opt.xi_min)));
    std::vector<double> xi = symmetric_log_samples(opt.xi_min, opt.xi_max, std::max(2, decades * opt.xi_per_decade), true);
    // poles of a pencil law sit exactly on lines Re z = Re lambda; sample those lines too
    std::vector<double> pole_rho;
    for (cplx e : sys.eigenvalues()) {
        if (std::isfinite(e.imag()) && std::abs(e.imag()) < opt.xi_max) xi.push_back(e.imag());
        if (std::isfinite(e.real()) && e.real() > rho_lo && e.real() < rho_hi) pole_rho.push_back(e.real());
    }
    std::sort(xi.begin(), xi.end());
    xi.erase(std::unique(xi.begin(), xi.end()), xi.end());

    auto sigma_at = [&](double rho, double x) -> double {
        try {
            double s = sys.sigma_min(cplx(rho, x));
            return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();  // exceptional point
        }
    };
    auto profile = [&](double rho, std::vector<double>* row = nullptr) -> double {
        std::vector<double> v(xi.size());
        parallel_for(xi.size(), [&](std::size_t i) { v[i] = sigma_at(rho, xi[i]); });
        // refine the three deepest interior local minima
        std::vector<std::size_t> mins;
        for (std::size_t i = 0; i < v.size(); ++i) {
            bool left = i == 0 || v[i] <= v[i - 1];
            bool right = i + 1 == v.size() || v[i] <= v[i + 1];
            if (left && right) mins.push_back(i);
        }
        std::sort(mins.begin(), mins.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        double best = *std::min_element(v.begin(), v.end());
        for (std::size_t r = 0; r < std::min<std::size_t>(3, mins.size()); ++r) {
            std::size_t i = mins[r];
            double a = xi[i == 0 ? 0 : i - 1], b = xi[i + 1 == xi.size() ? i : i + 1];
            if (b > a) best = std::min(best, golden_min([&](double x) { return sigma_at(rho, x); }, a, b, 24, v[i]));
        }
        if (row) *row = std::move(v);
        return best;
    };

    S0Estimate est;
    est.sigma_floor = sigma_floor;
    est.xi_samples = xi.size();
    const std::size_t base = std::max<std::size_t>(3, opt.rho_points);
    for (std::size_t i = 0; i < base; ++i)
        est.rho_grid.push_back(rho_hi - (rho_hi - rho_lo) * static_cast<double>(i) / static_cast<double>(base - 1));
    est.rho_grid.insert(est.rho_grid.end(), pole_rho.begin(), pole_rho.end());
    std::sort(est.rho_grid.begin(), est.rho_grid.end(), std::greater<double>());
    est.rho_grid.erase(std::unique(est.rho_grid.begin(), est.rho_grid.end()), est.rho_grid.end());
    const std::size_t N = est.rho_grid.size();
    std::vector<std::vector<double>> table(N);
    for (std::size_t i = 0; i < N; ++i) est.sigma_profile.push_back(profile(est.rho_grid[i], &table[i]));
    const auto& s = est.sigma_profile;
    // isolated roots (delay laws, poles of a reduced law) slip between grid lines:
    // polish the deepest 2D local minima of the table with Nelder-Mead
    double root_rho = -std::numeric_limits<double>::infinity();
    {
        struct Seed { double v; std::size_t i, k; };
        std::vector<Seed> seeds;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t k = 0; k < xi.size(); ++k) {
                double v = table[i][k];
                if (!std::isfinite(v)) continue;
                bool is_min = true;
                for (int di = -1; di <= 1 && is_min; ++di)
                    for (int dk = -1; dk <= 1; ++dk) {
                        if (di == 0 && dk == 0) continue;
                        auto ii = static_cast<std::ptrdiff_t>(i) + di, kk = static_cast<std::ptrdiff_t>(k) + dk;
                        if (ii < 0 || kk < 0 || ii >= static_cast<std::ptrdiff_t>(N) ||
                            kk >= static_cast<std::ptrdiff_t>(xi.size()))
                            continue;
                        if (table[static_cast<std::size_t>(ii)][static_cast<std::size_t>(kk)] < v) {
                            is_min = false;
                            break;
                        }
                    }
                if (is_min) seeds.push_back({v, i, k});
            }
        std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.v < b.v; });
        if (seeds.size() > opt.polish_seeds) seeds.resize(opt.polish_seeds);
        auto clamp_eval = [&](const std::array<double, 2>& x) {
            if (x[0] < rho_lo || x[0] > rho_hi) return std::numeric_limits<double>::infinity();
            return sigma_at(x[0], x[1]);
        };
        std::vector<double> found(seeds.size(), -std::numeric_limits<double>::infinity());
        parallel_for(seeds.size(), [&](std::size_t q) {
            const Seed& sd = seeds[q];
            double dr = (rho_hi - rho_lo) / static_cast<double>(N);
            double dx = 0.5 * (xi[std::min(sd.k + 1, xi.size() - 1)] - xi[sd.k == 0 ? 0 : sd.k - 1]) + 1e-6;
            std::array<std::array<double, 2>, 3> P{{{est.rho_grid[sd.i], xi[sd.k]},
                                                    {est.rho_grid[sd.i] + dr, xi[sd.k]},
                                                    {est.rho_grid[sd.i], xi[sd.k] + dx}}};
            std::array<double, 3> F{};
            for (int j = 0; j < 3; ++j) F[j] = clamp_eval(P[j]);
            for (int it = 0; it < 400; ++it) {
                std::array<int, 3> o{0, 1, 2};
                std::sort(o.begin(), o.end(), [&](int a, int b) { return F[a] < F[b]; });
                auto& best = P[o[0]];
                auto& worst = P[o[2]];
                if (F[o[0]] < sigma_floor) break;
                std::array<double, 2> c{0.5 * (best[0] + P[o[1]][0]), 0.5 * (best[1] + P[o[1]][1])};
                auto along = [&](double t) { return std::array<double, 2>{c[0] + t * (worst[0] - c[0]), c[1] + t * (worst[1] - c[1])}; };
                auto xr = along(-1.0);
                double fr = clamp_eval(xr);
                if (fr < F[o[0]]) {
                    auto xe = along(-2.0);
                    double fe = clamp_eval(xe);
                    if (fe < fr) worst = xe, F[o[2]] = fe;
                    else worst = xr, F[o[2]] = fr;
                } else if (fr < F[o[1]]) {
                    worst = xr, F[o[2]] = fr;
                } else {
                    auto xc = along(0.5);
                    double fc = clamp_eval(xc);
                    if (fc < F[o[2]]) {
                        worst = xc, F[o[2]] = fc;
                    } else {
                        for (int j : {o[1], o[2]}) {
                            P[j] = {0.5 * (P[j][0] + best[0]), 0.5 * (P[j][1] + best[1])};
                            F[j] = clamp_eval(P[j]);
                        }
                    }
                }
                if (std::abs(P[0][0] - P[1][0]) + std::abs(P[0][0] - P[2][0]) < 1e-14 &&
                    std::abs(P[0][1] - P[1][1]) + std::abs(P[0][1] - P[2][1]) < 1e-14)
                    break;
            }
            int b = static_cast<int>(std::min_element(F.begin(), F.end()) - F.begin());
            if (F[b] < sigma_floor) found[q] = P[b][0];
        });
        for (double r : found) root_rho = std::max(root_rho, r);
    }
    if (!(s[0] >= sigma_floor))
        throw Error(ErrorCode::RangeExhausted, "sigma_min below the floor already at rho_hi = " + std::to_string(rho_hi));
    // first failing grid point, descending; dips between grid points are refined
    std::size_t fail = N;
    double fail_rho = 0.0;
    for (std::size_t i = 1; i < N; ++i) {
        if (!(s[i] >= sigma_floor)) {
            fail = i;
            fail_rho = est.rho_grid[i];
            break;
        }
        if (i + 1 < N && s[i] <= s[i - 1] && s[i] <= s[i + 1]) {
            double lo = est.rho_grid[i + 1], hi = est.rho_grid[i - 1];
            double arg = est.rho_grid[i], val = s[i];
            const double g = 0.5 * (std::sqrt(5.0) - 1.0);
            double a = lo, b = hi, c = b - g * (b - a), d = a + g * (b - a);
            double fc = profile(c), fd = profile(d);
            for (int it = 0; it < 48; ++it) {
                if (fc < fd) {
                    b = d, d = c, fd = fc, c = b - g * (b - a), fc = profile(c);
                } else {
                    a = c, c = d, fc = fd, d = a + g * (b - a), fd = profile(d);
                }
                if (fc < val) val = fc, arg = c;
                if (fd < val) val = fd, arg = d;
            }
            if (!(val >= sigma_floor) && arg <= est.rho_grid[i - 1]) {
                fail = i;
                fail_rho = arg;
                break;
            }
        }
    }
    if (fail == N && std::isfinite(root_rho)) {
        est.s0 = root_rho;
        return est;
    }
    if (fail == N) {
        est.s0 = rho_lo;
        note("estimate_s0: sigma_min stayed above the floor down to rho_lo; s0 <= " + std::to_string(rho_lo));
        return est;
    }
    double pass_rho = est.rho_grid[fail - 1];
    for (int it = 0; it < 40 && pass_rho - fail_rho > 1e-12 * (1.0 + std::abs(pass_rho)); ++it) {
        double mid = 0.5 * (pass_rho + fail_rho);
        (profile(mid) >= sigma_floor ? pass_rho : fail_rho) = mid;
    }
    est.s0 = std::max(pass_rho, root_rho);
    return est;
}

// ---------------------------------------------------------- parabolic rate

ParabolicRate predicted_parabolic_rate(const CMat& M0, const std::function<CMat(cplx)>& M1, const ReducedGradient& C,
                                       double nu0, const std::vector<double>& t_samples) {
    if (!(nu0 > 0)) throw Error(ErrorCode::HypothesisFailed, "nu0 must be positive");
    const double scale = std::max(1.0, op_norm(M0));
    if ((M0 - M0.adjoint()).norm() > 1e-12 * scale) throw Error(ErrorCode::HypothesisFailed, "M0 is not selfadjoint");
    if (!(lambda_min_herm(M0) > 0)) throw Error(ErrorCode::HypothesisFailed, "M0 is not strictly positive");
    ParabolicRate r;
    r.nu0 = nu0;
    r.norm_M0 = op_norm(M0);
    r.c_inv_norm = C.c_inv_norm;
    std::vector<double> cs(t_samples.size()), ns(t_samples.size());
    parallel_for(t_samples.size(), [&](std::size_t i) {
        CMat m = M1(cplx(-nu0, t_samples[i]));
        cs[i] = lambda_min_herm(m);
        ns[i] = op_norm(m);
    });
    r.c = *std::min_element(cs.begin(), cs.end());
    r.norm_M1 = *std::max_element(ns.begin(), ns.end());
    if (!(r.c > 0))
        throw Error(ErrorCode::HypothesisFailed, "M1 is not uniformly accretive on Re z > -nu0 (c = " + std::to_string(r.c) + ")");
    r.nu1 = std::min(nu0, r.c / (r.norm_M1 * r.norm_M1 * r.norm_M0 * r.c_inv_norm * r.c_inv_norm));
    return r;
}

ParabolicRate predicted_parabolic_rate(const CMat& M0, const CMat& M1, const ReducedGradient& C, double nu0) {
    return predicted_parabolic_rate(M0, [M1](cplx) { return M1; }, C, nu0, std::vector<double>{0.0});
}

// ----------------------------------------------------------- decay and leak

namespace {
double log_slope(const std::vector<double>& ts, const std::vector<double>& ns) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t j = 0; j < ts.size(); ++j) {
        if (!(ns[j] >= 1e-13))
            throw Error(ErrorCode::DegenerateFit, "signal below 1e-13 at t = " + std::to_string(ts[j]));
        double y = std::log(ns[j]);
        sx += ts[j], sy += y, sxx += ts[j] * ts[j], sxy += ts[j] * y;
    }
    const double md = static_cast<double>(ts.size());
    const double den = md * sxx - sx * sx;
    if (!(den > 0)) throw Error(ErrorCode::DegenerateFit, "degenerate fit window");
    return -(md * sxy - sx * sy) / den;
}
}  // namespace

double measure_decay_rate(const Signal& u, double t0, double t1, ComponentBlock block) {
    const std::size_t off = block.offset;
    const std::size_t cnt = block.count == 0 ? u.dim() - off : block.count;
    if (off + cnt > u.dim()) throw std::invalid_argument("component block out of range");
    std::vector<double> ts, ns;
    for (std::size_t j = 0; j < u.grid.n; ++j) {
        double t = u.grid.t(j);
        if (t < t0 || t > t1) continue;
        ts.push_back(t);
        ns.push_back(u.values.row(j).segment(off, cnt).norm());
    }
    if (ts.size() < 2) throw Error(ErrorCode::DegenerateFit, "fewer than 2 nodes in the fit window");
    // an oscillating norm has near-zero troughs; fit its envelope through the peaks instead
    // a peak dominates a neighbourhood of 2% of the window, so grid-level ripple does not count
    const std::size_t w = std::max<std::size_t>(1, ns.size() / 50);
    std::vector<std::size_t> peaks;
    for (std::size_t j = w; j + w < ns.size(); ++j) {
        auto lo = ns.begin() + static_cast<std::ptrdiff_t>(j - w), hi = ns.begin() + static_cast<std::ptrdiff_t>(j + w + 1);
        if (ns[j] > ns[j - 1] && ns[j] == *std::max_element(lo, hi)) peaks.push_back(j);
    }
    bool oscillating = peaks.size() >= 2;
    for (std::size_t k = 0; oscillating && k + 1 < peaks.size(); ++k) {
        double trough = *std::min_element(ns.begin() + static_cast<std::ptrdiff_t>(peaks[k]),
                                          ns.begin() + static_cast<std::ptrdiff_t>(peaks[k + 1]));
        if (trough > 0.5 * std::min(ns[peaks[k]], ns[peaks[k + 1]])) oscillating = false;
    }
    if (!oscillating) return log_slope(ts, ns);
    std::vector<double> pt, pn;
    for (std::size_t j : peaks) pt.push_back(ts[j]), pn.push_back(ns[j]);
    return log_slope(pt, pn);
}

double causality_check(const EvolutionaryProblem& p, const Signal& f, double a, const SolveOptions& opt) {
    return causality_leak(solve(p, f, opt).u, a);
}

// -------------------------------------------------------------------- hash

namespace {
struct Fnv {
    std::uint64_t h = 1469598103934665603ull;
    void bytes(const void* p, std::size_t n) {
        const auto* c = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= c[i];
            h *= 1099511628211ull;
        }
    }
    void num(double x) { bytes(&x, sizeof x); }
    void mat(const CMat& m) {
        num(static_cast<double>(m.rows()));
        num(static_cast<double>(m.cols()));
        bytes(m.data(), sizeof(cplx) * static_cast<std::size_t>(m.size()));
    }
};
}  // namespace

std::size_t problem_hash(const EvolutionaryProblem& p) {
    Fnv f;
    f.num(static_cast<double>(p.law.kind));
    f.num(static_cast<double>(p.law.dim));
    f.num(p.law.b_of_M);
    for (cplx z : {cplx(1.0, 0.5), cplx(2.0, -1.0), cplx(0.3, 3.0), cplx(5.0, 17.0)}) {
        try {
            f.mat(p.law.eval_zM(z));
        } catch (const Error&) {
            f.num(-1.0);
        }
    }
    f.mat(p.A.matrix());
    f.num(p.rho);
    f.num(p.grid.t_start);
    f.num(p.grid.dt);
    f.num(static_cast<double>(p.grid.n));
    return static_cast<std::size_t>(f.h);
}

}  // namespace evospec
