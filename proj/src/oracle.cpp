#include "evospec/oracle.hpp"

#include <cmath>

namespace evospec {

namespace {

Eigen::PartialPivLU<CMat> step_factor(const CMat& S) {
    if (!(sigma_min(S) > 1e-13 * std::max(1.0, op_norm(S))))
        throw Error(ErrorCode::SingularStep, "implicit Euler step matrix is singular");
    return Eigen::PartialPivLU<CMat>(S);
}

}  // namespace

Signal step_affine(const CMat& M0, const CMat& M1, const CMat& A, const Signal& f, const CVec& u0) {
    const double dt = f.grid.dt;
    auto lu = step_factor(M0 / dt + M1 + A);
    Signal u(f.grid, f.rho, f.dim());
    u.values.row(0) = u0.transpose();
    for (std::size_t j = 0; j + 1 < f.grid.n; ++j) {
        CVec rhs = M0 * u.values.row(j).transpose() / dt + f.values.row(j + 1).transpose();
        u.values.row(j + 1) = lu.solve(rhs).transpose();
    }
    return u;
}

Signal step_delay(const DelaySpec& spec, const CMat& A, const Signal& history, const Signal& f) {
    const double dt = f.grid.dt;
    if (std::abs(history.grid.dt - dt) > 1e-12 * dt) throw Error(ErrorCode::Nonconformable, "history step differs");
    if (std::abs(history.grid.t_end()) > 1e-9 * dt) throw Error(ErrorCode::Nonconformable, "history must end at t = 0");
    if (std::abs(f.grid.t_start) > 1e-9 * dt) throw Error(ErrorCode::Nonconformable, "source must start at t = 0");
    std::vector<long> lag;
    for (const auto& term : spec.terms) {
        double s = term.h / dt;
        long l = std::lround(s);
        if (std::abs(s - static_cast<double>(l)) > 1e-9 || l < 1)
            throw Error(ErrorCode::NonGridShift, "delay " + std::to_string(term.h) + " is not a multiple of dt");
        if (static_cast<std::size_t>(l) >= history.grid.n)
            throw Error(ErrorCode::Nonconformable, "history shorter than the largest delay");
        lag.push_back(l);
    }
    const long nh = static_cast<long>(history.grid.n);
    auto past = [&](long idx, const Signal& u) -> CVec {
        // idx relative to t = 0
        if (idx >= 0) return u.values.row(idx).transpose();
        return history.values.row(nh - 1 + idx).transpose();
    };
    auto lu = step_factor(spec.M0 / dt + spec.M1 + A);
    Signal u(f.grid, f.rho, f.dim());
    u.values.row(0) = history.values.row(nh - 1);
    for (long j = 0; j + 1 < static_cast<long>(f.grid.n); ++j) {
        CVec rhs = spec.M0 * u.values.row(j).transpose() / dt + f.values.row(j + 1).transpose();
        for (std::size_t k = 0; k < spec.terms.size(); ++k) rhs -= spec.terms[k].N * past(j + 1 - lag[k], u);
        u.values.row(j + 1) = lu.solve(rhs).transpose();
    }
    return u;
}

Signal step_convolution(const KernelSpec& kernel, ConvolutionForm form, const CMat& A, const Signal& f) {
    const double dt = f.grid.dt;
    const std::size_t n = f.grid.n;
    const Eigen::Index m = static_cast<Eigen::Index>(f.dim());
    const CMat K = kernel.matrix.size() ? kernel.matrix : CMat::Identity(m, m);
    const CMat I = CMat::Identity(m, m);
    std::vector<double> kv(n);
    for (std::size_t i = 0; i < n; ++i) kv[i] = kernel.profile.value(static_cast<double>(i) * dt);
    // trapezoid (k*x)(t_j) without the implicit x_j term
    auto conv_rest = [&](const CMat& x, std::size_t j) -> CVec {
        CVec acc = CVec::Zero(m);
        if (j == 0) return acc;
        acc += 0.5 * kv[j] * x.row(0).transpose();
        for (std::size_t i = 1; i < j; ++i) acc += kv[j - i] * x.row(i).transpose();
        return dt * (K * acc);
    };
    const double half = 0.5 * dt * kv[0];
    Signal u(f.grid, f.rho, f.dim());
    if (form == ConvolutionForm::plus) {
        auto lu = step_factor((I + half * K) / dt + A);
        CVec v_prev = CVec::Zero(m);  // v = u + k*u, zero at the start
        for (std::size_t j = 0; j + 1 < n; ++j) {
            CVec rest = conv_rest(u.values, j + 1);
            CVec rhs = (v_prev - rest) / dt + f.values.row(j + 1).transpose();
            CVec x = lu.solve(rhs);
            u.values.row(j + 1) = x.transpose();
            v_prev = x + rest + half * (K * x);
        }
        return u;
    }
    CMat w = CMat::Zero(static_cast<Eigen::Index>(n), m);
    auto lu = step_factor(I / dt + A - half * (A * K));
    for (std::size_t j = 0; j + 1 < n; ++j) {
        CVec rest = conv_rest(w, j + 1);
        CVec rhs = w.row(j).transpose() / dt + f.values.row(j + 1).transpose() + A * rest;
        w.row(j + 1) = lu.solve(rhs).transpose();
    }
    for (std::size_t j = 0; j < n; ++j) {
        CVec x = w.row(j).transpose();
        u.values.row(j) = (x - conv_rest(w, j) - half * (K * x)).transpose();
    }
    return u;
}

CVec post_widder(const CMat& M0, const CMat& M1, const CMat& A, const CVec& x, double t, int k) {
    if (!(t > 0) || k < 1) throw std::invalid_argument("post_widder needs t > 0 and k >= 1");
    const double lambda = static_cast<double>(k) / t;
    CMat S = lambda * M0 + M1 + A;
    if (!(sigma_min(S) > 1e-14 * std::max(1.0, op_norm(S))))
        throw Error(ErrorCode::SingularResolvent, "resolvent does not exist at lambda = " + std::to_string(lambda));
    Eigen::PartialPivLU<CMat> lu(S);
    CVec y = x;
    for (int i = 0; i <= k; ++i) y = lambda * lu.solve(M0 * y);
    return y;
}

CVec exp_eigen_oracle(const CMat& A, const CVec& x, double t) {
    Eigen::ComplexEigenSolver<CMat> es(A);
    const CMat& V = es.eigenvectors();
    CVec c = V.partialPivLu().solve(x);
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::exp(-t * es.eigenvalues()(i));
    return V * c;
}

HeatEigen heat_eigen_oracle(const CMat& D, double kappa) {
    CMat G = D.adjoint() * D;
    Eigen::SelfAdjointEigenSolver<CMat> es(herm(G));
    HeatEigen h;
    h.eigenvalues = es.eigenvalues();
    h.lambda_min = h.eigenvalues(0);
    h.rate = kappa * h.lambda_min;
    h.slowest_mode = es.eigenvectors().col(0);
    return h;
}

HeatEigen heat_eigen_oracle(const GradDiv1D& op, double kappa) {
    HeatEigen h = heat_eigen_oracle(op.D, kappa);
    if (op.bc == BoundaryCondition::dirichlet) {
        double err = 0.0;
        for (Eigen::Index j = 0; j < h.eigenvalues.size(); ++j) {
            double s = std::sin(static_cast<double>(j + 1) * kPi * op.h / (2.0 * op.length));
            double exact = 4.0 / (op.h * op.h) * s * s;
            err = std::max(err, std::abs(h.eigenvalues(j) - exact) / exact);
        }
        h.closed_form_error = err;
        h.closed_form_ok = err <= 1e-10;
    }
    return h;
}

}  // namespace evospec
