#include "evospec/common.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace evospec {

const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonGridShift: return "NonGridShift";
        case ErrorCode::ZeroWeight: return "ZeroWeight";
        case ErrorCode::InsufficientNodes: return "InsufficientNodes";
        case ErrorCode::Nonconformable: return "Nonconformable";
        case ErrorCode::WeightBelowDomain: return "WeightBelowDomain";
        case ErrorCode::OutsideDomain: return "OutsideDomain";
        case ErrorCode::SingularEvaluation: return "SingularEvaluation";
        case ErrorCode::SubspaceAccretivityFailed: return "SubspaceAccretivityFailed";
        case ErrorCode::SingularFrequency: return "SingularFrequency";
        case ErrorCode::NoCertificate: return "NoCertificate";
        case ErrorCode::CertificationFailed: return "CertificationFailed";
        case ErrorCode::RangeExhausted: return "RangeExhausted";
        case ErrorCode::HypothesisFailed: return "HypothesisFailed";
        case ErrorCode::DegenerateFit: return "DegenerateFit";
        case ErrorCode::NoAdmissibleD: return "NoAdmissibleD";
        case ErrorCode::BoundViolated: return "BoundViolated";
        case ErrorCode::ConsistencyViolated: return "ConsistencyViolated";
        case ErrorCode::TraceFailed: return "TraceFailed";
        case ErrorCode::NotRegularizing: return "NotRegularizing";
        case ErrorCode::VolterraDiverged: return "VolterraDiverged";
        case ErrorCode::AttainmentFailed: return "AttainmentFailed";
        case ErrorCode::HighIndexPencil: return "HighIndexPencil";
        case ErrorCode::SingularPencil: return "SingularPencil";
        case ErrorCode::SingularStep: return "SingularStep";
        case ErrorCode::SingularResolvent: return "SingularResolvent";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

namespace {
std::atomic<int> g_threads{0};
std::mutex g_note_mutex;
std::vector<std::string> g_notes;
}  // namespace

void set_num_threads(int n) { g_threads.store(std::max(0, n)); }

int num_threads() {
    int n = g_threads.load();
    if (n > 0) return n;
    if (const char* env = std::getenv("EVOSPEC_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(num_threads()), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(n, lo + chunk);
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    // first failing chunk wins, so the reported error is schedule independent
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void note(const std::string& message) {
    std::lock_guard<std::mutex> lock(g_note_mutex);
    if (g_notes.size() < 1000) g_notes.push_back(message);
}

std::vector<std::string> drain_notes() {
    std::lock_guard<std::mutex> lock(g_note_mutex);
    std::vector<std::string> out;
    out.swap(g_notes);
    return out;
}

CMat herm(const CMat& B) { return (B + B.adjoint()) * 0.5; }

double lambda_min_herm(const CMat& B) {
    if (B.rows() == 1) return B(0, 0).real();
    Eigen::SelfAdjointEigenSolver<CMat> es(herm(B), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double sigma_min(const CMat& B) {
    if (B.rows() == 1 && B.cols() == 1) return std::abs(B(0, 0));
    Eigen::JacobiSVD<CMat> svd(B);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

double sigma_max(const CMat& B) {
    if (B.rows() == 1 && B.cols() == 1) return std::abs(B(0, 0));
    Eigen::JacobiSVD<CMat> svd(B);
    return svd.singularValues()(0);
}

double op_norm(const CMat& B) {
    if (B.size() == 0) return 0.0;
    return sigma_max(B);
}

std::vector<double> symmetric_log_samples(double lo, double hi, int count, bool with_zero) {
    std::vector<double> out;
    out.reserve(2 * count + 1);
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < count; ++i) {
        double e = count == 1 ? a : a + (b - a) * i / (count - 1);
        double v = std::pow(10.0, e);
        out.push_back(v);
        out.push_back(-v);
    }
    if (with_zero) out.push_back(0.0);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace evospec
