#include "evospec/second_order.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace evospec {

SecondOrderLaw SecondOrderLaw::constant(const CMat& M0, const CMat& M1) {
    if (M0.rows() != M0.cols() || M1.rows() != M0.rows() || M1.cols() != M0.cols())
        throw std::invalid_argument("second-order coefficients must be square and equal in size");
    SecondOrderLaw law;
    law.p = static_cast<std::size_t>(M0.rows());
    law.M0 = [M0](cplx) { return M0; };
    law.M1 = [M1](cplx) { return M1; };
    law.M0_const = M0;
    law.M1_const = M1;
    law.M0_inf = M0;
    law.b = 0.0;
    return law;
}

SecondOrderLaw dual_phase_lag_second_order(const DualPhaseLagSpec& spec, std::size_t p) {
    const double tq = spec.tau_q, tt = spec.tau_theta;
    if (!(tq > 0 && tt > 0)) throw std::invalid_argument("phase lags must be positive");
    SecondOrderLaw law;
    law.p = p;
    law.M0 = [tq, tt, p](cplx z) -> CMat {
        return (tq * (1.0 + 0.5 * tq * z) / (1.0 + tt * z)) * CMat::Identity(p, p);
    };
    law.M1 = [tt, p](cplx z) -> CMat { return (1.0 / (1.0 + tt * z)) * CMat::Identity(p, p); };
    law.b = -1.0 / tt + 1e-6;
    law.M0_inf = (0.5 * tq * tq / tt) * CMat::Identity(p, p);
    return law;
}

double dual_phase_lag_nu0(const DualPhaseLagSpec& spec) {
    return 0.5 * std::min((2.0 - spec.mu()) / spec.tau_q, 1.0 / spec.tau_theta);
}

SecondOrderConstants second_order_constants(const SecondOrderLaw& law, double nu0, const std::vector<double>& t_samples,
                                            double safety) {
    SecondOrderConstants k;
    k.nu0 = nu0;
    if (law.M0_const && law.M1_const) {
        const CMat& M0 = *law.M0_const;
        const CMat& M1 = *law.M1_const;
        // Herm(z M0 + M1) = Re z·Herm(M0) + Herm(M1) + Im z·Herm(i M0); M0 selfadjoint kills the last term
        if ((M0 - M0.adjoint()).norm() > 1e-12 * std::max(1.0, M0.norm()))
            throw Error(ErrorCode::HypothesisFailed, "constant M0 must be selfadjoint");
        k.c = lambda_min_herm(-nu0 * M0 + M1);
        k.norm_M0 = op_norm(M0);
        k.norm_M1 = op_norm(M1);
        return k;
    }
    std::vector<double> cs(t_samples.size()), n0(t_samples.size()), n1(t_samples.size());
    parallel_for(t_samples.size(), [&](std::size_t i) {
        cplx z(-nu0, t_samples[i]);
        CMat a = law.M0(z), b = law.M1(z);
        cs[i] = lambda_min_herm(z * a + b);
        n0[i] = op_norm(a);
        n1[i] = op_norm(b);
    });
    k.c = *std::min_element(cs.begin(), cs.end());
    k.norm_M0 = safety * *std::max_element(n0.begin(), n0.end());
    k.norm_M1 = safety * *std::max_element(n1.begin(), n1.end());
    return k;
}

MaterialLaw build_Md(const SecondOrderLaw& law, const ReducedGradient& C, double d) {
    if (!(d > 0)) throw std::invalid_argument("d must be positive");
    const Eigen::Index p = static_cast<Eigen::Index>(law.p);
    if (C.C.rows() != p) throw Error(ErrorCode::Nonconformable, "reduced gradient size differs from the block size");
    const CMat Cinv = C.inverse();
    const CMat I = CMat::Identity(p, p);
    MaterialLaw out;
    out.kind = LawKind::block_reduced;
    out.dim = 2 * law.p;
    out.b_of_M = law.b;
    auto zMd = [law, Cinv, I, d, p](cplx z) -> CMat {
        CMat a = law.M0(z), b = law.M1(z);
        CMat R = CMat::Zero(2 * p, 2 * p);
        R.topLeftCorner(p, p) = z * a + b - d * a;
        R.topRightCorner(p, p) = d * (b - d * a) * Cinv;
        R.bottomRightCorner(p, p) = (z + d) * I;
        return R;
    };
    out.eval_zM = zMd;
    out.eval = [zMd](cplx z) -> CMat {
        if (z == 0.0) throw Error(ErrorCode::OutsideDomain, "z = 0 is not in the domain");
        return zMd(z) / z;
    };
    if (law.M0_const && law.M1_const) {
        const CMat& a = *law.M0_const;
        const CMat& b = *law.M1_const;
        CMat P0 = CMat::Zero(2 * p, 2 * p), P1 = CMat::Zero(2 * p, 2 * p);
        P0.topLeftCorner(p, p) = a;
        P0.bottomRightCorner(p, p) = I;
        P1.topLeftCorner(p, p) = b - d * a;
        P1.topRightCorner(p, p) = d * (b - d * a) * Cinv;
        P1.bottomRightCorner(p, p) = d * I;
        out.pencil = std::make_pair(P0, P1);
    }
    if (law.M0_inf) {
        CMat lim = CMat::Zero(2 * p, 2 * p);
        lim.topLeftCorner(p, p) = *law.M0_inf;
        lim.bottomRightCorner(p, p) = I;
        out.limit_inf = lim;
    }
    out.label = "block_reduced";
    return out;
}

double K_of_d(double d, double norm_M0, double norm_M1, double c_inv_norm) {
    double s = d * norm_M0 + norm_M1;
    return norm_M0 + s * s * c_inv_norm * c_inv_norm;
}

ReductionPlan select_d(double c, double norm_M0, double norm_M1, double c_inv_norm, double nu_target) {
    ReductionPlan plan;
    plan.c = c;
    plan.nu_target = nu_target;
    plan.norm_M0 = norm_M0;
    plan.norm_M1 = norm_M1;
    plan.c_inv_norm = c_inv_norm;
    if (!(c > 0)) throw Error(ErrorCode::NoAdmissibleD, "accretivity constant c = " + std::to_string(c) + " is not positive");
    const int N = 200;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < N; ++i) {
        double d = std::pow(10.0, -6.0 + 9.0 * i / (N - 1));
        double v = std::min(c - d * K_of_d(d, norm_M0, norm_M1, c_inv_norm), 0.75 * d - nu_target);
        plan.d_grid.push_back(d);
        plan.c_tilde_grid.push_back(v);
        if (v > best) {
            best = v;
            plan.d = d;
        }
    }
    if (!(best > 0))
        throw Error(ErrorCode::NoAdmissibleD,
                    "no d in [1e-6, 1e3] gives a positive constant for nu_target = " + std::to_string(nu_target));
    plan.K_of_d = K_of_d(plan.d, norm_M0, norm_M1, c_inv_norm);
    plan.rho0 = std::min(nu_target, 0.75 * plan.d - 1e-12);
    plan.c_tilde = std::min(c - plan.d * plan.K_of_d, 0.75 * plan.d - plan.rho0);
    return plan;
}

MdBoundReport verify_Md_bound(const MaterialLaw& Md, const ReductionPlan& plan, const std::vector<cplx>& z_samples) {
    MdBoundReport rep;
    rep.samples = z_samples.size();
    rep.worst_margin = std::numeric_limits<double>::infinity();
    std::vector<double> margin(z_samples.size());
    parallel_for(z_samples.size(), [&](std::size_t i) {
        cplx z = z_samples[i];
        double lhs = lambda_min_herm(Md.eval_zM(z));
        double rhs = std::min(plan.c - plan.d * plan.K_of_d, 0.75 * plan.d + z.real());
        margin[i] = lhs - rhs;
    });
    for (std::size_t i = 0; i < margin.size(); ++i)
        if (margin[i] < rep.worst_margin) {
            rep.worst_margin = margin[i];
            rep.witness = z_samples[i];
        }
    if (rep.worst_margin < -1e-10) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "margin %.3g at z = %.6g%+.6gi", rep.worst_margin, rep.witness.real(),
                      rep.witness.imag());
        throw Error(ErrorCode::BoundViolated, buf);
    }
    return rep;
}

EvolutionaryProblem reduced_problem(const SecondOrderLaw& law, const ReducedGradient& C, double d, double rho,
                                    const TimeGrid& grid) {
    const Eigen::Index p = static_cast<Eigen::Index>(law.p);
    CMat A = CMat::Zero(2 * p, 2 * p);
    A.topRightCorner(p, p) = -C.C.adjoint();
    A.bottomLeftCorner(p, p) = C.C;
    return EvolutionaryProblem{build_Md(law, C, d), SpatialOperator(A, "second_order_skew", StructureHints{true, false, 0.0}),
                               rho, grid};
}

std::pair<Signal, Signal> split_blocks(const Signal& w, std::size_t p) {
    if (w.dim() != 2 * p) throw Error(ErrorCode::Nonconformable, "expected 2p components");
    const Eigen::Index pp = static_cast<Eigen::Index>(p);
    return {Signal(w.grid, w.rho, CMat(w.values.leftCols(pp))), Signal(w.grid, w.rho, CMat(w.values.rightCols(pp)))};
}

RecoveredU recover_u(const Signal& v, const Signal& q, const ReducedGradient& C, double d) {
    require_conformable(v, q);
    RecoveredU r;
    // rows are node values, so u^T = -q^T C^{-T}
    CMat Cinv = C.inverse();
    r.u = Signal(q.grid, q.rho, CMat(-(q.values * Cinv.transpose())));
    Signal du = apply_derivative(r.u, 1);
    Signal diff(v.grid, v.rho, CMat(du.values - (v.values - d * r.u.values)));
    const double vn = weighted_norm(v);
    r.consistency = vn > 0 ? weighted_norm(diff) / vn : weighted_norm(diff);
    r.consistent = r.consistency <= 1e-3;
    if (!r.consistent)
        note("ConsistencyViolated: recovered u misses du/dt = v - d u by " + std::to_string(r.consistency));
    return r;
}

double second_order_residual(const SecondOrderLaw& law, const ReducedGradient& C, const Signal& u, const Signal& f,
                             double floor) {
    require_conformable(u, f);
    Spectrum U = transform(u), F = transform(f);
    const CMat CC = C.C.adjoint() * C.C;
    double fmax = 0.0;
    for (std::size_t k = 0; k < F.freq.n; ++k) fmax = std::max(fmax, F.values.row(k).norm());
    std::vector<double> res(F.freq.n, 0.0);
    parallel_for(F.freq.n, [&](std::size_t k) {
        CVec fk = F.values.row(k).transpose();
        double fn = fk.norm();
        if (fn <= floor * fmax) return;
        cplx z = F.freq.z(k, F.rho);
        CVec r = (z * z * law.M0(z) + z * law.M1(z) + CC) * U.values.row(k).transpose() - fk;
        res[k] = r.norm() / fn;
    });
    return *std::max_element(res.begin(), res.end());
}

double reduced_frequency_residual(const SecondOrderLaw& law, const ReducedGradient& C, double d, const Signal& f) {
    const Eigen::Index p = static_cast<Eigen::Index>(law.p);
    if (f.dim() != law.p) throw Error(ErrorCode::Nonconformable, "source must have p components");
    const EvolutionaryProblem rp = reduced_problem(law, C, d, f.rho, f.grid);
    const FrequencySystem sys(rp);
    const Spectrum F = transform(f);
    const CMat Cinv = C.inverse();
    const CMat CC = C.C.adjoint() * C.C;
    std::vector<double> res(F.freq.n, 0.0);
    parallel_for(F.freq.n, [&](std::size_t k) {
        CVec fk = F.values.row(k).transpose();
        const double fn = fk.norm();
        if (!(fn > 0.0)) return;
        cplx z = F.freq.z(k, F.rho);
        CVec b = CVec::Zero(2 * p);
        b.head(p) = fk;
        CVec w = sys.solve(z, b);
        CVec uk = -(Cinv * w.tail(p));
        CVec r = (z * z * law.M0(z) + z * law.M1(z) + CC) * uk - fk;
        res[k] = r.norm() / fn;
    });
    return *std::max_element(res.begin(), res.end());
}

}  // namespace evospec
