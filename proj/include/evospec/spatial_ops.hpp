#pragma once

#include "evospec/common.hpp"

#include <optional>
#include <string>

namespace evospec {

struct StructureHints {
    bool skew_adjoint = false;
    bool selfadjoint = false;
    std::optional<double> accretive_constant;
};

// Finite-dimensional A. Hints are verified in the constructor.
class SpatialOperator {
public:
    SpatialOperator() = default;
    SpatialOperator(CMat matrix, std::string label, StructureHints hints = {});

    const CMat& matrix() const { return matrix_; }
    const std::string& label() const { return label_; }
    const StructureHints& hints() const { return hints_; }
    std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

private:
    CMat matrix_;
    std::string label_;
    StructureHints hints_;
};

struct ReducedGradient {
    CMat C;  // square, invertible
    double sigma_min = 0.0;
    double c_inv_norm = 0.0;

    ReducedGradient() = default;
    explicit ReducedGradient(CMat C);
    CMat inverse() const { return C.inverse(); }
};

enum class BoundaryCondition { dirichlet, neumann };

struct GradDiv1D {
    BoundaryCondition bc = BoundaryCondition::dirichlet;
    std::size_t n_cells = 0;
    double length = 1.0;
    double h = 1.0;
    CMat D;              // discrete gradient, edges x nodes
    SpatialOperator A;   // [[0, -G^H], [G, 0]]
    ReducedGradient C;   // range-reduced gradient
};

// Dirichlet: n_cells interior nodes, h = length/(n_cells+1), A built from C (size 2n).
// Neumann: n_cells cell values, h = length/n_cells, A built from D (size 2n-1) and C
// acts on the mean-free subspace.
GradDiv1D build_grad_div_1d(std::size_t n_cells, double length, BoundaryCondition bc);
BoundaryCondition parse_boundary_condition(const std::string& s);

double accretivity_constant(const CMat& B);

struct MAccretiveCertificate {
    bool pass = false;
    double c = 0.0;              // accretivity constant
    double sigma_min_1pA = 0.0;  // sigma_min(1 + A)
    double resolvent_norm = 0.0; // |(1 + A)^{-1}|
    double resolvent_bound = 0.0;
    bool resolvent_ok = false;
};
MAccretiveCertificate is_m_accretive(const SpatialOperator& A);
MAccretiveCertificate is_m_accretive(const CMat& A);

double poincare_constant(const ReducedGradient& C);

// {label, m, entries: [[row, col, re, im], ...], hints}
std::string operator_to_json(const SpatialOperator& A);
SpatialOperator operator_from_json(const std::string& text);

}  // namespace evospec
