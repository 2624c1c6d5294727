#pragma once

#include "evospec/common.hpp"

namespace evospec {

// Complex generalized Schur form A = Q S Z^H, B = Q T Z^H (LAPACK zgges).
struct QZResult {
    CMat S, T, Q, Z;
    CVec alpha, beta;  // generalized eigenvalues alpha/beta of A - lambda B
    int selected = 0;  // leading block size when sorting was requested
};

// Without selection the order is whatever LAPACK returns. With finite_tol > 0 the
// eigenvalues with |beta| > finite_tol·scale are moved to the top.
QZResult qz(const CMat& A, const CMat& B, double finite_tol = 0.0);

// Solves (z P0 + P1) x = b for many z after one QZ factorization.
class PencilSolver {
public:
    PencilSolver(const CMat& P0, const CMat& P1);
    std::size_t dim() const { return static_cast<std::size_t>(P0_.rows()); }
    CVec solve(cplx z, const CVec& b) const;
    // Inverse-iteration estimate of sigma_min(z P0 + P1).
    double sigma_min_estimate(cplx z, int iterations = 8) const;
    // Generalized eigenvalues -P1/P0 (finite ones only).
    std::vector<cplx> finite_eigenvalues() const;

private:
    CMat P0_, P1_;
    QZResult f_;
};

}  // namespace evospec
