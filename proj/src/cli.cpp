#include "evospec/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>

namespace evospec {

using nlohmann::json;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError: return exit_code::config;
        case ErrorCode::CertificationFailed:
        case ErrorCode::NoCertificate: return exit_code::certification;
        case ErrorCode::SingularFrequency: return exit_code::singular;
        case ErrorCode::AttainmentFailed: return exit_code::attainment;
        default: return exit_code::runtime;
    }
}

namespace {

// Pretty printer with every float at 17 significant digits; keys come sorted
// from nlohmann's std::map objects.
void emit(const json& j, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
    const std::string inner(static_cast<std::size_t>(2 * depth + 2), ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += inner + json(it.key()).dump() + ": ";
                emit(it.value(), out, depth + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += inner;
                emit(j[i], out, depth + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case json::value_t::number_float: {
            double v = j.get<double>();
            if (!std::isfinite(v)) {
                out += "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out += buf;
            return;
        }
        default: out += j.dump();
    }
}

void write_json(const json& j, const std::string& path) {
    std::string s;
    emit(j, s, 0);
    s += "\n";
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path + "'");
    out << s;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json header(const ProblemConfig& cfg, const char* command) {
    json j;
    j["tool"] = "evospec";
    j["version"] = kToolVersion;
    j["config_hash"] = cfg.hash;
    j["seed"] = cfg.seed;
    j["command"] = command;
    j["law"] = cfg.law_kind;
    j["dim"] = cfg.dim();
    j["rho"] = cfg.rho;
    j["grid"] = {{"t_start", cfg.grid.t_start}, {"dt", cfg.grid.dt}, {"n", cfg.grid.n}};
    return j;
}

json notes_json() {
    auto notes = drain_notes();
    std::sort(notes.begin(), notes.end());
    notes.erase(std::unique(notes.begin(), notes.end()), notes.end());
    return notes;
}

json certificate_json(const Certificate& c) {
    json j;
    j["route"] = route_name(c.route);
    j["rho"] = c.rho;
    j["c"] = c.c;
    j["resolvent_bound"] = finite_or_null(c.resolvent_bound);
    j["label"] = c.label;
    j["scan"] = {{"c_est", c.scan.c_est},
                 {"argmin_t", c.scan.argmin_t},
                 {"asymptotic_term", c.scan.asymptotic_term},
                 {"samples", c.scan.sample_count}};
    j["operator"] = {{"accretivity_constant", c.a_cert.c}, {"m_accretive", c.a_cert.pass}};
    if (c.route == CertificateRoute::small_ball)
        j["small_ball"] = {{"delta", c.delta},
                           {"ball_sup", c.ball_sup},
                           {"a_inv_norm", c.a_inv_norm},
                           {"offball_min", c.offball_min},
                           {"samples", c.ball_samples}};
    return j;
}

json report_json(const SolveReport& r) {
    return {{"residual_max", r.residual_max},
            {"sigma_min_min", r.sigma_min_min},
            {"xi_at_sigma_min", r.xi_at_sigma_min},
            {"norm_f", r.norm_f},
            {"norm_u", r.norm_u},
            {"edge_ratio", r.edge_ratio},
            {"frequencies", r.frequencies},
            {"qz_path", r.qz_path}};
}

json error_json(const Error& e) { return {{"code", error_name(e.code())}, {"message", e.what()}}; }

std::string out_path(const std::string& dir, const char* name) { return (std::filesystem::path(dir) / name).string(); }

void write_signal(const Signal& s, const std::string& dir, const char* stem) {
    write_signal_csv(s, out_path(dir, (std::string(stem) + ".csv").c_str()));
    write_signal_sidecar(s, out_path(dir, (std::string(stem) + ".json").c_str()));
}

constexpr double kResidualPass = 1e-10;

std::pair<double, double> decay_window(const ProblemConfig& cfg) {
    if (cfg.stability.window) return *cfg.stability.window;
    const double T = cfg.grid.t_end();
    return {0.45 * T, 0.9 * T};
}

}  // namespace

// ---------------------------------------------------------------------- solve

int cmd_solve(const ProblemConfig& cfg, const std::string& out_dir) {
    const EvolutionaryProblem p = cfg.problem();
    const Signal f = build_source(cfg);
    json rep = header(cfg, "solve");
    Certificate cert;
    try {
        cert = wellposedness_certificate(p, cfg.rho);
    } catch (const Error& e) {
        rep["status"] = "certification-failed";
        rep["error"] = error_json(e);
        rep["notes"] = notes_json();
        write_json(rep, out_path(out_dir, "report.json"));
        throw;
    }
    SolveOptions opt;
    opt.certificate = cert;
    SolveResult r = solve(p, f, opt);
    const double a = source_support_start(cfg, f);
    const double leak = causality_leak(r.u, a);
    write_signal(r.u, out_dir, "u");
    rep["certificate"] = certificate_json(cert);
    rep["solve"] = report_json(r.report);
    rep["causality"] = {{"support_start", a}, {"leak", leak}};
    if (cfg.second_order && cfg.C) {
        const std::size_t pp = cfg.second_order->p;
        auto [v, q] = split_blocks(r.u, pp);
        const double d = cfg.plan ? cfg.plan->d : 1.0;
        RecoveredU rec = recover_u(v, q, *cfg.C, d);
        Signal f_block(f.grid, f.rho, CMat(f.values.leftCols(static_cast<Eigen::Index>(pp))));
        rep["second_order"] = {{"d", d},
                               {"consistency", rec.consistency},
                               {"consistent", rec.consistent},
                               {"frequency_residual", reduced_frequency_residual(*cfg.second_order, *cfg.C, d, f_block)},
                               {"time_domain_residual", second_order_residual(*cfg.second_order, *cfg.C, rec.u, f_block)}};
        write_signal(rec.u, out_dir, "u_recovered");
    }
    const bool pass = r.report.residual_max <= kResidualPass;
    rep["residual_pass"] = pass;
    rep["status"] = pass ? "ok" : "residual-failed";
    rep["notes"] = notes_json();
    write_json(rep, out_path(out_dir, "report.json"));
    return pass ? exit_code::ok : exit_code::runtime;
}

// ------------------------------------------------------------------ stability

int cmd_stability(const ProblemConfig& cfg, const std::string& out_dir) {
    json rep = header(cfg, "stability");
    if (cfg.unstable_candidate()) {
        // the phase-lag bound needs mu < 2; record where Re z M(z) goes negative on the imaginary axis
        const DualPhaseLagSpec& s = *cfg.dpl;
        const SecondOrderLaw law = dual_phase_lag_second_order(s, 1);
        double worst = std::numeric_limits<double>::infinity(), at = 0.0;
        for (double t : default_scan_samples()) {
            cplx z(0.0, t);
            double v = (z * law.M0(z) + law.M1(z))(0, 0).real();
            if (v < worst) {
                worst = v;
                at = t;
            }
        }
        rep["status"] = "unstable-candidate";
        rep["mu"] = s.mu();
        rep["failure"] = {{"reason", "mu >= 2: no positive accretivity constant"},
                          {"min_re_zM_on_axis", worst},
                          {"witness_im_z", at}};
        rep["s0_est"] = nullptr;
        rep["nu_pred"] = nullptr;
        rep["nu_meas"] = nullptr;
        rep["notes"] = notes_json();
        write_json(rep, out_path(out_dir, "stability.json"));
        return exit_code::ok;
    }
    const EvolutionaryProblem p = cfg.problem();
    json certs;
    Certificate cert;
    try {
        cert = wellposedness_certificate(p, cfg.rho);
        certs["wellposedness"] = certificate_json(cert);
    } catch (const Error& e) {
        rep["status"] = "certification-failed";
        rep["error"] = error_json(e);
        rep["notes"] = notes_json();
        write_json(rep, out_path(out_dir, "stability.json"));
        throw;
    }

    std::optional<double> s0;
    try {
        S0Estimate est = estimate_s0(p, cfg.stability.rho_lo, cfg.stability.rho_hi, cfg.stability.sigma_floor);
        s0 = est.s0;
        rep["s0_detail"] = {{"label", est.label}, {"sigma_floor", est.sigma_floor}, {"xi_samples", est.xi_samples}};
    } catch (const Error& e) {
        rep["s0_error"] = error_json(e);
    }
    rep["s0_est"] = s0 ? json(*s0) : json(nullptr);

    std::optional<double> nu_pred;
    if (cfg.law_kind == "heat" && cfg.grad_div) {
        const Eigen::Index nu = static_cast<Eigen::Index>(cfg.primary.count);
        ParabolicRate pr = predicted_parabolic_rate(CMat(CMat::Identity(nu, nu)), CMat(CMat::Identity(nu, nu) / cfg.kappa), *cfg.C,
                                                    std::numeric_limits<double>::max());
        HeatEigen he = heat_eigen_oracle(*cfg.grad_div, cfg.kappa);
        nu_pred = pr.nu1;
        certs["parabolic"] = {{"nu1", pr.nu1}, {"c", pr.c}, {"c_inv_norm", pr.c_inv_norm}};
        certs["eigen_oracle"] = {{"rate", he.rate},
                                 {"lambda_min", he.lambda_min},
                                 {"closed_form_error", he.closed_form_error},
                                 {"closed_form_ok", he.closed_form_ok}};
    } else if (cfg.second_order) {
        if (cfg.plan) {
            nu_pred = cfg.plan->c_tilde;
            certs["reduction"] = {{"d", cfg.plan->d},
                                  {"K_of_d", cfg.plan->K_of_d},
                                  {"c", cfg.plan->c},
                                  {"c_tilde", cfg.plan->c_tilde},
                                  {"rho0", cfg.plan->rho0}};
            // random spot check of the M_d lower bound, reproducible from the seed
            std::mt19937_64 rng(cfg.seed);
            std::uniform_real_distribution<double> re(-cfg.plan->rho0, 2.0), im(-100.0, 100.0);
            std::vector<cplx> zs(100);
            for (auto& z : zs) z = cplx(re(rng), im(rng));
            try {
                MdBoundReport b = verify_Md_bound(cfg.law, *cfg.plan, zs);
                certs["Md_bound"] = {{"worst_margin", b.worst_margin}, {"samples", b.samples}, {"pass", true}};
            } catch (const Error& e) {
                certs["Md_bound"] = {{"pass", false}, {"error", error_json(e)}};
            }
        }
        if (cfg.dpl) {
            const double mu = cfg.dpl->mu();
            const double nu0 = dual_phase_lag_nu0(*cfg.dpl);
            certs["dual_phase_lag"] = {{"mu", mu},
                                       {"nu0", nu0},
                                       {"c_analytic", mu * (1.0 - mu / 2.0) - 0.5 * cfg.dpl->tau_q * mu * nu0},
                                       {"c_sampled", cfg.so_constants ? json(cfg.so_constants->c) : json(nullptr)}};
        }
    } else if (s0) {
        nu_pred = -*s0;
    }
    rep["nu_pred"] = nu_pred ? json(*nu_pred) : json(nullptr);

    // measured decay on the primary block, from the IVP when one is configured
    std::optional<double> nu_meas;
    auto [w0, w1] = decay_window(cfg);
    try {
        Signal traj;
        if (cfg.ivp.u0 || cfg.ivp.slowest_mode || !cfg.ivp.history_file.empty()) {
            IvpOptions io;
            io.certificate = cert;
            traj = solve_ivp(p, build_history(cfg), io).u;
            rep["trajectory_source"] = "ivp";
        } else {
            SolveOptions so;
            so.certificate = cert;
            traj = solve(p, build_source(cfg), so).u;
            rep["trajectory_source"] = "source";
        }
        ComponentBlock blk = cfg.primary;
        if (cfg.second_order && cfg.C) {
            auto [v, q] = split_blocks(traj, cfg.second_order->p);
            traj = recover_u(v, q, *cfg.C, cfg.plan ? cfg.plan->d : 1.0).u;
            blk = {};
        }
        nu_meas = measure_decay_rate(traj, w0, w1, blk);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        rep["nu_meas_error"] = error_json(e);
    }
    rep["nu_meas"] = nu_meas ? json(*nu_meas) : json(nullptr);
    rep["decay_window"] = {w0, w1};
    if (nu_meas && nu_pred && *nu_pred > 0) rep["nu_ratio"] = *nu_meas / *nu_pred;
    if (nu_meas && s0) rep["growth_check"] = {{"required", -*s0 - 0.05 * std::abs(*s0) - 1e-6},
                                              {"pass", *nu_meas >= -*s0 - 0.05 * std::abs(*s0) - 1e-6}};
    rep["certificates"] = certs;
    rep["status"] = "ok";
    rep["notes"] = notes_json();
    write_json(rep, out_path(out_dir, "stability.json"));
    return exit_code::ok;
}

// ------------------------------------------------------------------------ ivp

int cmd_ivp(const ProblemConfig& cfg, const std::string& out_dir) {
    const EvolutionaryProblem p = cfg.problem();
    const History h = build_history(cfg);
    json rep = header(cfg, "ivp");
    IvpOptions opt;
    opt.check_attainment = false;
    opt.attainment_tol = cfg.ivp.attainment_tol;
    try {
        opt.certificate = wellposedness_certificate(p, cfg.rho);
    } catch (const Error& e) {
        rep["status"] = "certification-failed";
        rep["error"] = error_json(e);
        rep["notes"] = notes_json();
        write_json(rep, out_path(out_dir, "ivp_report.json"));
        throw;
    }
    SemigroupSampler sampler(opt);
    const IvpResult& r = sampler.trajectory(p, h);
    write_signal(r.u, out_dir, "trajectory");
    rep["certificate"] = certificate_json(*opt.certificate);
    rep["attainment_error"] = r.attainment_error;
    rep["attained"] = r.attained;
    rep["attainment_tol"] = opt.attainment_tol;
    rep["leak"] = r.leak;
    rep["beta"] = r.beta;
    rep["jump_method"] = r.jump.method == JumpMethod::amnesic ? "amnesic" : "general";
    json sc = json::array();
    for (const auto& c : r.singular_coeffs) sc.push_back(c.norm());
    rep["singular_coeff_norms"] = sc;
    rep["solve"] = report_json(r.report);
    if (cfg.law.pencil) {
        DAEPencil pen = DAEPencil::make(cfg.law.pencil->first, cfg.law.pencil->second + cfg.op.matrix());
        double res = 0.0;
        bool ok = consistent_iv_check(pen, h.g0minus, &res);
        rep["consistency"] = {{"consistent", ok}, {"residual", res}, {"regular", pen.regular}, {"index1", pen.index1}};
    }
    if (!r.attained) {
        rep["status"] = "attainment-failed";
        rep["notes"] = notes_json();
        write_json(rep, out_path(out_dir, "ivp_report.json"));
        return exit_code::attainment;
    }
    if (cfg.ivp.semigroup) {
        auto [t, s] = *cfg.ivp.semigroup;
        SemigroupDiscrepancy d = semigroup_law_check(p, h, t, s, &sampler);
        rep["semigroup"] = {{"t", t}, {"s", s}, {"state", d.state}, {"history", d.history}, {"pass", d.state <= 1e-3}};
    }
    if (cfg.ivp.post_widder) {
        if (!cfg.law.pencil) {
            rep["post_widder"] = {{"skipped", "needs an affine law"}};
        } else {
            auto [t, k] = *cfg.ivp.post_widder;
            CVec pw = post_widder(cfg.law.pencil->first, cfg.law.pencil->second, cfg.op.matrix(), h.g0minus, t, k);
            CVec ut = trace(r.u, t, TraceSide::right).value;
            rep["post_widder"] = {{"t", t}, {"k", k}, {"relative_error", (pw - ut).norm() / std::max(ut.norm(), 1e-300)}};
        }
    }
    rep["status"] = "ok";
    rep["notes"] = notes_json();
    write_json(rep, out_path(out_dir, "ivp_report.json"));
    return exit_code::ok;
}

// ------------------------------------------------------------------- checklaw

int cmd_checklaw(const ProblemConfig& cfg, const std::string& out_dir) {
    json rep = header(cfg, "checklaw");
    const MaterialLaw& law = cfg.law;
    rep["b_of_M"] = law.b_of_M;
    try {
        CMat lim = limit_at_infinity(law);
        rep["limit_at_infinity_norm"] = op_norm(lim);
    } catch (const Error& e) {
        rep["limit_at_infinity_error"] = error_json(e);
    }
    json per_rho = json::array();
    for (double r : cfg.checklaw.rho) {
        json e{{"rho", r}};
        try {
            AccretivityScan s = accretivity_scan(law, r);
            e["c_est"] = s.c_est;
            e["argmin_t"] = s.argmin_t;
            e["asymptotic_term"] = s.asymptotic_term;
            e["asymptotic_ok"] = s.asymptotic_ok;
        } catch (const Error& err) {
            e["error"] = error_json(err);
        }
        per_rho.push_back(e);
    }
    rep["accretivity"] = per_rho;

    if (cfg.affine) {
        const auto& [M0, M1] = *cfg.affine;
        Eigen::SelfAdjointEigenSolver<CMat> es(herm(M0));
        const double tol = 1e-12 * std::max(1.0, op_norm(M0)) * static_cast<double>(M0.rows());
        double c0 = std::numeric_limits<double>::infinity();
        std::vector<Eigen::Index> ker;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            if (std::abs(es.eigenvalues()(i)) > tol) c0 = std::min(c0, es.eigenvalues()(i));
            else ker.push_back(i);
        }
        double c1 = 1.0;
        if (!ker.empty()) {
            CMat K(M0.rows(), static_cast<Eigen::Index>(ker.size()));
            for (std::size_t j = 0; j < ker.size(); ++j) K.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(ker[j]);
            c1 = lambda_min_herm(K.adjoint() * M1 * K);
        }
        if (cfg.checklaw.c0) c0 = *cfg.checklaw.c0;
        if (cfg.checklaw.c1) c1 = *cfg.checklaw.c1;
        try {
            AffineRho0 a = affine_rho0(M0, M1, c0, c1);
            rep["affine"] = {{"rho0", a.rho0},
                             {"c", a.c},
                             {"c0", c0},
                             {"c1", c1},
                             {"c0_actual", a.c0_actual},
                             {"c1_actual", finite_or_null(a.c1_actual)},
                             {"trivial_kernel", a.trivial_kernel}};
        } catch (const Error& e) {
            rep["affine"] = {{"error", error_json(e)}};
        }
    }
    if (cfg.kernel) {
        KernelConditionReport k = kernel_condition_check(*cfg.kernel, cfg.checklaw.rho, default_scan_samples());
        json kj{{"selfadjoint", k.selfadjoint},
                {"commute", k.commute},
                {"rho1", k.rho1},
                {"d_est", k.d_est},
                {"propagated_min", k.propagated_min},
                {"four_d_ok", k.four_d_ok},
                {"example_a_ok", k.example_a_ok}};
        if (k.example_a_bound) kj["example_a_bound"] = *k.example_a_bound;
        rep["kernel"] = kj;
    }
    if (cfg.delay) {
        json tbl = json::array();
        for (double s : cfg.checklaw.tail_s) tbl.push_back({{"s", s}, {"bound", delay_tail_bound(*cfg.delay, s)}});
        rep["delay"] = {{"h0", cfg.delay->h0()}, {"eta", cfg.delay->eta()}, {"sup_norm", cfg.delay->sup_norm()}, {"tail", tbl}};
    }
    if (cfg.dpl) {
        const double mu = cfg.dpl->mu();
        const double nu0 = dual_phase_lag_nu0(*cfg.dpl);
        rep["dual_phase_lag"] = {{"mu", mu}, {"nu0", nu0}, {"c_analytic", mu * (1.0 - mu / 2.0) - 0.5 * cfg.dpl->tau_q * mu * nu0}};
    }
    if (cfg.plan)
        rep["reduction"] = {{"d", cfg.plan->d}, {"c_tilde", cfg.plan->c_tilde}, {"rho0", cfg.plan->rho0}};

    int code = exit_code::ok;
    try {
        if (cfg.unstable_candidate())
            throw Error(ErrorCode::CertificationFailed, "phase-lag ratio mu >= 2 admits no accretivity constant");
        Certificate c = wellposedness_certificate(cfg.problem(), cfg.rho);
        rep["certificate"] = certificate_json(c);
        rep["status"] = "ok";
    } catch (const Error& e) {
        if (e.code() != ErrorCode::CertificationFailed && e.code() != ErrorCode::NoCertificate) throw;
        rep["certificate_error"] = error_json(e);
        rep["status"] = "certification-failed";
        code = exit_code::certification;
    }
    rep["notes"] = notes_json();
    write_json(rep, out_path(out_dir, "law_cert.json"));
    return code;
}

// ------------------------------------------------------------------ front end

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Spectral solver for evolutionary equations in weighted time spaces", "evospec"};
    app.fallthrough();
    app.require_subcommand(1);
    std::string config_path, out_dir = ".";
    int threads = 0;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "problem description (JSON)")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads (default EVOSPEC_THREADS or 1)")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", seed, "seed for randomized spot checks");
    app.set_version_flag("--version", kToolVersion);
    app.add_subcommand("solve", "solve with the configured source; writes u.csv and report.json");
    app.add_subcommand("stability", "abscissa estimate, predicted and measured decay; writes stability.json");
    app.add_subcommand("ivp", "initial value / history problem; writes trajectory.csv and ivp_report.json");
    app.add_subcommand("checklaw", "material-law certificates; writes law_cert.json");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? exit_code::ok : exit_code::config;
    }
    set_num_threads(threads);
    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        std::filesystem::create_directories(out_dir);
        ProblemConfig cfg = load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (cmd == "solve") return cmd_solve(cfg, out_dir);
        if (cmd == "stability") return cmd_stability(cfg, out_dir);
        if (cmd == "ivp") return cmd_ivp(cfg, out_dir);
        return cmd_checklaw(cfg, out_dir);
    } catch (const Error& e) {
        std::cerr << "evospec " << cmd << ": " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "evospec " << cmd << ": " << e.what() << "\n";
        return exit_code::runtime;
    }
}

}  // namespace evospec
