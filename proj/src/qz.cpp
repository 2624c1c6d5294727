#include "evospec/qz.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <cmath>

namespace evospec {

namespace {

thread_local double t_select_tol = 0.0;

lapack_logical select_finite(const lapack_complex_double* /*alpha*/, const lapack_complex_double* beta) {
    return std::abs(*beta) > t_select_tol ? 1 : 0;
}

}  // namespace

QZResult qz(const CMat& A, const CMat& B, double finite_tol) {
    if (A.rows() != A.cols() || B.rows() != A.rows() || B.cols() != A.cols())
        throw std::invalid_argument("qz needs square matrices of equal size");
    const lapack_int n = static_cast<lapack_int>(A.rows());
    QZResult r;
    r.S = A;
    r.T = B;
    r.Q.resize(n, n);
    r.Z.resize(n, n);
    r.alpha.resize(n);
    r.beta.resize(n);
    lapack_int sdim = 0;
    const bool sort = finite_tol > 0.0;
    t_select_tol = finite_tol;
    lapack_int info = LAPACKE_zgges(LAPACK_COL_MAJOR, 'V', 'V', sort ? 'S' : 'N', sort ? select_finite : nullptr, n,
                                    r.S.data(), n, r.T.data(), n, &sdim, r.alpha.data(), r.beta.data(), r.Q.data(),
                                    n, r.Z.data(), n);
    if (info < 0) throw std::runtime_error("zgges: illegal argument " + std::to_string(-info));
    // info == n+2 is a reordering failure after a successful factorization; keep going with sdim.
    if (info > 0 && info != n + 2) throw std::runtime_error("zgges failed to converge (info " + std::to_string(info) + ")");
    r.selected = static_cast<int>(sdim);
    return r;
}

PencilSolver::PencilSolver(const CMat& P0, const CMat& P1) : P0_(P0), P1_(P1), f_(qz(P0, P1)) {}

CVec PencilSolver::solve(cplx z, const CVec& b) const {
    CMat R = z * f_.S + f_.T;
    CVec y = f_.Q.adjoint() * b;
    R.triangularView<Eigen::Upper>().solveInPlace(y);
    return f_.Z * y;
}

double PencilSolver::sigma_min_estimate(cplx z, int iterations) const {
    const Eigen::Index n = P0_.rows();
    CMat R = z * f_.S + f_.T;
    for (Eigen::Index i = 0; i < n; ++i)
        if (R(i, i) == 0.0) return 0.0;
    auto tri = R.triangularView<Eigen::Upper>();
    CVec x = CVec::Ones(n) / std::sqrt(static_cast<double>(n));
    // mild deterministic perturbation so x is not orthogonal to the smallest singular vector
    for (Eigen::Index i = 0; i < n; ++i) x(i) *= 1.0 + 0.1 * std::sin(1.0 + 3.0 * static_cast<double>(i));
    x.normalize();
    double growth = 0.0;
    for (int it = 0; it < iterations; ++it) {
        CVec y = x;
        tri.adjoint().solveInPlace(y);
        tri.solveInPlace(y);
        growth = y.norm();
        if (!(growth > 0) || !std::isfinite(growth)) return 0.0;
        x = y / growth;
    }
    return 1.0 / std::sqrt(growth);
}

std::vector<cplx> PencilSolver::finite_eigenvalues() const {
    // z P0 + P1 singular where z = -beta/alpha for A = P0, B = P1
    std::vector<cplx> out;
    const double scale = std::max(1.0, op_norm(P0_));
    for (Eigen::Index i = 0; i < f_.alpha.size(); ++i)
        if (std::abs(f_.alpha(i)) > 1e-13 * scale) out.push_back(-f_.beta(i) / f_.alpha(i));
    return out;
}

}  // namespace evospec
