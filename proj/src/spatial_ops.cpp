#include "evospec/spatial_ops.hpp"

#include <json.hpp>

#include <cmath>

namespace evospec {

SpatialOperator::SpatialOperator(CMat matrix, std::string label, StructureHints hints)
    : matrix_(std::move(matrix)), label_(std::move(label)), hints_(hints) {
    if (matrix_.rows() != matrix_.cols()) throw std::invalid_argument("operator matrix must be square");
    const double scale = matrix_.size() ? op_norm(matrix_) : 0.0;
    if (hints_.skew_adjoint && (matrix_ + matrix_.adjoint()).norm() > 1e-12 * scale)
        throw std::invalid_argument(label_ + ": declared skew-adjoint but A + A^H != 0");
    if (hints_.selfadjoint && (matrix_ - matrix_.adjoint()).norm() > 1e-12 * scale)
        throw std::invalid_argument(label_ + ": declared selfadjoint but A - A^H != 0");
    if (hints_.accretive_constant && accretivity_constant(matrix_) < *hints_.accretive_constant - 1e-12 * scale)
        throw std::invalid_argument(label_ + ": declared accretivity constant not met");
}

ReducedGradient::ReducedGradient(CMat c) : C(std::move(c)) {
    if (C.rows() != C.cols() || C.rows() == 0) throw std::invalid_argument("reduced gradient must be square");
    sigma_min = evospec::sigma_min(C);
    if (!(sigma_min > 0)) throw std::invalid_argument("reduced gradient is singular");
    c_inv_norm = 1.0 / sigma_min;
}

namespace {

// R factor of the economy QR with a nonnegative diagonal.
CMat economy_r(const CMat& D) {
    Eigen::HouseholderQR<CMat> qr(D);
    const Eigen::Index n = D.cols();
    CMat R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
        cplx d = R(i, i);
        if (std::abs(d) > 0) R.row(i) *= std::conj(d) / std::abs(d);
    }
    return R;
}

CMat skew_block(const CMat& G) {
    const Eigen::Index p = G.cols(), q = G.rows();
    CMat A = CMat::Zero(p + q, p + q);
    A.topRightCorner(p, q) = -G.adjoint();
    A.bottomLeftCorner(q, p) = G;
    return A;
}

}  // namespace

GradDiv1D build_grad_div_1d(std::size_t n_cells, double length, BoundaryCondition bc) {
    if (n_cells < 1) throw std::invalid_argument("n_cells must be >= 1");
    if (!(length > 0)) throw std::invalid_argument("length must be positive");
    GradDiv1D g;
    g.bc = bc;
    g.n_cells = n_cells;
    g.length = length;
    const Eigen::Index n = static_cast<Eigen::Index>(n_cells);
    if (bc == BoundaryCondition::dirichlet) {
        g.h = length / static_cast<double>(n_cells + 1);
        g.D = CMat::Zero(n + 1, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            g.D(i, i) = 1.0 / g.h;
            g.D(i + 1, i) = -1.0 / g.h;
        }
        g.C = ReducedGradient(economy_r(g.D));
        g.A = SpatialOperator(skew_block(g.C.C), "grad_div_1d_dirichlet", StructureHints{true, false, 0.0});
    } else {
        if (n_cells < 2) throw std::invalid_argument("Neumann builder needs n_cells >= 2");
        g.h = length / static_cast<double>(n_cells);
        g.D = CMat::Zero(n - 1, n);
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            g.D(i, i) = -1.0 / g.h;
            g.D(i, i + 1) = 1.0 / g.h;
        }
        // orthonormal basis of the mean-free subspace
        CMat ones = CMat::Constant(n, 1, 1.0 / std::sqrt(static_cast<double>(n)));
        Eigen::HouseholderQR<CMat> qr(ones);
        CMat Q = qr.householderQ() * CMat::Identity(n, n);
        CMat V = Q.rightCols(n - 1);
        g.C = ReducedGradient(economy_r(g.D * V));
        g.A = SpatialOperator(skew_block(g.D), "grad_div_1d_neumann", StructureHints{true, false, 0.0});
    }
    return g;
}

BoundaryCondition parse_boundary_condition(const std::string& s) {
    if (s == "dirichlet") return BoundaryCondition::dirichlet;
    if (s == "neumann") return BoundaryCondition::neumann;
    throw std::invalid_argument("unknown boundary condition '" + s + "'");
}

double accretivity_constant(const CMat& B) { return lambda_min_herm(B); }

MAccretiveCertificate is_m_accretive(const CMat& A) {
    MAccretiveCertificate cert;
    const Eigen::Index m = A.rows();
    cert.c = accretivity_constant(A);
    CMat B = CMat::Identity(m, m) + A;
    cert.sigma_min_1pA = sigma_min(B);
    if (cert.sigma_min_1pA > 0) cert.resolvent_norm = 1.0 / cert.sigma_min_1pA;
    cert.resolvent_bound = 1.0 / (1.0 + std::max(0.0, cert.c)) + 1e-10;
    cert.resolvent_ok = cert.sigma_min_1pA > 0 && cert.resolvent_norm <= cert.resolvent_bound;
    cert.pass = cert.c >= -1e-12 && cert.sigma_min_1pA > 0 && cert.resolvent_ok;
    return cert;
}

MAccretiveCertificate is_m_accretive(const SpatialOperator& A) { return is_m_accretive(A.matrix()); }

double poincare_constant(const ReducedGradient& C) {
    if (!(C.sigma_min > 0)) throw std::invalid_argument("poincare_constant needs sigma_min > 0");
    return 1.0 / C.sigma_min;
}

std::string operator_to_json(const SpatialOperator& A) {
    nlohmann::json j;
    j["label"] = A.label();
    j["m"] = A.dim();
    nlohmann::json entries = nlohmann::json::array();
    const CMat& M = A.matrix();
    for (Eigen::Index c = 0; c < M.cols(); ++c)
        for (Eigen::Index r = 0; r < M.rows(); ++r)
            if (M(r, c) != 0.0) entries.push_back({r, c, M(r, c).real(), M(r, c).imag()});
    j["entries"] = entries;
    nlohmann::json hints;
    hints["skew_adjoint"] = A.hints().skew_adjoint;
    hints["selfadjoint"] = A.hints().selfadjoint;
    if (A.hints().accretive_constant) hints["accretive_constant"] = *A.hints().accretive_constant;
    j["hints"] = hints;
    return j.dump();
}

SpatialOperator operator_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    const auto m = j.at("m").get<Eigen::Index>();
    CMat M = CMat::Zero(m, m);
    for (const auto& e : j.at("entries")) {
        auto r = e.at(0).get<Eigen::Index>(), c = e.at(1).get<Eigen::Index>();
        if (r < 0 || c < 0 || r >= m || c >= m) throw std::invalid_argument("operator entry out of range");
        M(r, c) += cplx(e.at(2).get<double>(), e.size() > 3 ? e.at(3).get<double>() : 0.0);
    }
    StructureHints hints;
    if (j.contains("hints")) {
        const auto& h = j["hints"];
        hints.skew_adjoint = h.value("skew_adjoint", false);
        hints.selfadjoint = h.value("selfadjoint", false);
        if (h.contains("accretive_constant")) hints.accretive_constant = h["accretive_constant"].get<double>();
    }
    return SpatialOperator(M, j.value("label", std::string("operator")), hints);
}

}  // namespace evospec
