#pragma once

#include "evospec/ivp.hpp"
#include "evospec/oracle.hpp"
#include "evospec/second_order.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

namespace evospec {

struct SourceConfig {
    std::string kind = "none";  // none | indicator | bump | gaussian | file
    double t0 = 1.0, t1 = 2.0;
    double center = 1.5, width = 0.2;
    double amplitude = 1.0;
    std::optional<CVec> profile;  // placed at offset; defaults to ones on the primary block
    std::size_t offset = 0;
    std::string file;
};

struct StabilityConfig {
    double rho_lo = -10.0, rho_hi = 1.0;
    double sigma_floor = 1e-8;
    std::optional<std::pair<double, double>> window;  // decay fit window; default [0.45, 0.9]·t_end
};

struct IvpConfig {
    std::optional<CVec> u0;
    bool slowest_mode = false;  // u0 from the slowest heat mode (grad_div_1d operators)
    double mode_amplitude = 1.0;
    std::string history_file;
    bool complete_consistent = false;
    std::optional<std::pair<double, double>> semigroup;  // (t, s)
    std::optional<std::pair<double, int>> post_widder;   // (t, k)
    double attainment_tol = 1e-3;
};

struct CheckLawConfig {
    std::vector<double> rho;
    std::vector<double> tail_s = {1.0, 2.0, 5.0, 10.0, 20.0};
    std::optional<double> c0, c1;
};

struct ProblemConfig {
    std::string source_path;
    std::string base_dir;
    std::string canonical;  // compact JSON of the parsed document
    std::string hash;       // FNV-1a of canonical, hex
    std::uint64_t seed = 0;

    TimeGrid grid;
    double rho = 1.0;

    std::string law_kind;
    MaterialLaw law;  // for second-order problems the reduced law M_d
    std::optional<std::pair<CMat, CMat>> affine;
    std::optional<DelaySpec> delay;
    std::optional<KernelSpec> kernel;
    std::optional<DualPhaseLagSpec> dpl;
    std::optional<SecondOrderLaw> second_order;
    std::optional<ReductionPlan> plan;
    std::optional<SecondOrderConstants> so_constants;
    double nu_target = 0.0;

    SpatialOperator op;  // reduced operator for second-order problems
    std::optional<GradDiv1D> grad_div;
    std::optional<ReducedGradient> C;
    double kappa = 1.0;
    ComponentBlock primary;  // u block for heat, p block for second order

    SourceConfig source;
    StabilityConfig stability;
    IvpConfig ivp;
    CheckLawConfig checklaw;

    EvolutionaryProblem problem() const { return EvolutionaryProblem{law, op, rho, grid}; }
    std::size_t dim() const { return law.dim; }
    bool unstable_candidate() const { return dpl && !(dpl->mu() < 2.0); }
};

// Parses and validates. Failures are Error(ConfigError) with line and column for
// malformed JSON.
ProblemConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ProblemConfig load_config(const std::string& path);

// Sampled source on the config grid. Indicator jumps carry half values.
Signal build_source(const ProblemConfig& cfg);
// Earliest time at which the source is nonzero.
double source_support_start(const ProblemConfig& cfg, const Signal& f);

History build_history(const ProblemConfig& cfg);

std::uint64_t fnv1a(const std::string& bytes);

}  // namespace evospec
