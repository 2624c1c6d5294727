#pragma once

#include "evospec/material_laws.hpp"
#include "evospec/spatial_ops.hpp"
#include "evospec/weighted_signal.hpp"

namespace evospec {

// Implicit Euler for (d/dt M0 + M1 + A) u = f on f's grid, u(t_0) = u0.
Signal step_affine(const CMat& M0, const CMat& M1, const CMat& A, const Signal& f, const CVec& u0);

// Same with delayed terms sum N_k u(t - h_k); history covers [-h_max, 0] on the
// same step and f starts at t = 0. Delays must be whole multiples of dt.
Signal step_delay(const DelaySpec& spec, const CMat& A, const Signal& history, const Signal& f);

enum class ConvolutionForm {
    plus,       // d/dt (u + k*u) + A u = f
    resolvent,  // d/dt w + A (w - k*w) = f, u = w - k*w
};
// Trapezoid convolution quadrature over the stored past, O(n^2). Zero past.
Signal step_convolution(const KernelSpec& kernel, ConvolutionForm form, const CMat& A, const Signal& f);

// [(k/t)((k/t)M0 + M1 + A)^{-1} M0]^{k+1} x.
CVec post_widder(const CMat& M0, const CMat& M1, const CMat& A, const CVec& x, double t, int k);

// e^{-tA} x by eigendecomposition (A diagonalizable).
CVec exp_eigen_oracle(const CMat& A, const CVec& x, double t);

struct HeatEigen {
    double lambda_min = 0.0;
    double rate = 0.0;  // kappa·lambda_min
    CVec slowest_mode;
    RVec eigenvalues;                 // ascending
    double closed_form_error = 0.0;   // Dirichlet builder only, else 0
    bool closed_form_ok = true;
};
HeatEigen heat_eigen_oracle(const CMat& D, double kappa);
// Also checks the eigenvalues against (4/h^2) sin^2(j pi h/(2 length)).
HeatEigen heat_eigen_oracle(const GradDiv1D& op, double kappa);

}  // namespace evospec
