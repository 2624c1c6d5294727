#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace evospec {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2Pi = 2.50662827463100050242;

enum class ErrorCode {
    NonGridShift,
    ZeroWeight,
    InsufficientNodes,
    Nonconformable,
    WeightBelowDomain,
    OutsideDomain,
    SingularEvaluation,
    SubspaceAccretivityFailed,
    SingularFrequency,
    NoCertificate,
    CertificationFailed,
    RangeExhausted,
    HypothesisFailed,
    DegenerateFit,
    NoAdmissibleD,
    BoundViolated,
    ConsistencyViolated,
    TraceFailed,
    NotRegularizing,
    VolterraDiverged,
    AttainmentFailed,
    HighIndexPencil,
    SingularPencil,
    SingularStep,
    SingularResolvent,
    ConfigError,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Worker count for per-frequency loops. 0 means "read EVOSPEC_THREADS, else 1".
void set_num_threads(int n);
int num_threads();

// Runs body(i) for i in [0, n). Indices are split into contiguous chunks, one per
// worker; callers write only to slot i so results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Non-fatal diagnostics (window-edge warnings, snapped delays, ...). Collected
// process-wide so the CLI can embed them in reports.
void note(const std::string& message);
std::vector<std::string> drain_notes();

// Hermitian part (B + B^H)/2; realizes Re<Bx|x> for an inner product linear in
// the second argument.
CMat herm(const CMat& B);
double lambda_min_herm(const CMat& B);
double sigma_min(const CMat& B);
double sigma_max(const CMat& B);
double op_norm(const CMat& B);

// Log-spaced magnitudes mirrored to both signs, sorted ascending; optionally with 0.
std::vector<double> symmetric_log_samples(double lo, double hi, int count, bool with_zero);

}  // namespace evospec
