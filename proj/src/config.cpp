#include "evospec/config.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace evospec {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw Error(ErrorCode::ConfigError, where + ": " + what);
}

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) fail(where, "expected an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) fail(where, "unknown key '" + it.key() + "'");
}

const json& need(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) fail(where, std::string("missing '") + key + "'");
    return *it;
}

double num(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) fail(where, "not finite");
    return v;
}

double num_or(const json& j, const char* key, double dflt, const std::string& where) {
    auto it = j.find(key);
    return it == j.end() ? dflt : num(*it, where + "." + key);
}

std::size_t count(const json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<long long>() < 0) fail(where, "expected a nonnegative integer");
    return static_cast<std::size_t>(j.get<long long>());
}

cplx complex_value(const json& j, const std::string& where) {
    if (j.is_number()) return {num(j, where), 0.0};
    if (j.is_array() && j.size() == 2) return {num(j[0], where), num(j[1], where)};
    fail(where, "expected a number or [re, im]");
}

CVec vector_value(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array");
    CVec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_value(j[i], where);
    return v;
}

// number (times identity), {identity}, {zeros}, {diag}, {diag_blocks}, or rows
CMat matrix_value(const json& j, Eigen::Index m, const std::string& where) {
    CMat M;
    if (j.is_number()) {
        if (m <= 0) fail(where, "scalar shorthand needs a known size");
        M = complex_value(j, where) * CMat::Identity(m, m);
    } else if (j.is_object()) {
        if (j.contains("identity")) {
            Eigen::Index k = j["identity"].is_boolean() ? m : static_cast<Eigen::Index>(count(j["identity"], where));
            if (k <= 0) fail(where, "identity size unknown");
            M = CMat::Identity(k, k);
        } else if (j.contains("zeros")) {
            Eigen::Index k = j["zeros"].is_boolean() ? m : static_cast<Eigen::Index>(count(j["zeros"], where));
            if (k <= 0) fail(where, "zeros size unknown");
            M = CMat::Zero(k, k);
        } else if (j.contains("diag")) {
            M = vector_value(j["diag"], where + ".diag").asDiagonal();
        } else if (j.contains("diag_blocks")) {
            const json& b = j["diag_blocks"];
            if (!b.is_array()) fail(where, "diag_blocks must be [[size, value], ...]");
            std::vector<cplx> d;
            for (const auto& blk : b) {
                if (!blk.is_array() || blk.size() != 2) fail(where, "diag_blocks entries are [size, value]");
                std::size_t k = count(blk[0], where);
                cplx v = complex_value(blk[1], where);
                d.insert(d.end(), k, v);
            }
            M = CMat::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
            for (std::size_t i = 0; i < d.size(); ++i) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
        } else {
            fail(where, "matrix object needs identity, zeros, diag or diag_blocks");
        }
    } else if (j.is_array()) {
        const std::size_t r = j.size();
        if (r == 0 || !j[0].is_array()) fail(where, "expected rows");
        const std::size_t c = j[0].size();
        M.resize(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        for (std::size_t i = 0; i < r; ++i) {
            if (!j[i].is_array() || j[i].size() != c) fail(where, "ragged rows");
            for (std::size_t k = 0; k < c; ++k)
                M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = complex_value(j[i][k], where);
        }
    } else {
        fail(where, "expected a matrix");
    }
    if (!M.allFinite()) fail(where, "matrix has non-finite entries");
    if (m > 0 && (M.rows() != m || M.cols() != m))
        fail(where, "expected " + std::to_string(m) + "x" + std::to_string(m) + ", got " + std::to_string(M.rows()) + "x" +
                        std::to_string(M.cols()));
    return M;
}

std::optional<std::pair<double, double>> pair_value(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) return std::nullopt;
    if (!it->is_array() || it->size() != 2) fail(where + "." + key, "expected [a, b]");
    return std::make_pair(num((*it)[0], where), num((*it)[1], where));
}

std::string resolve(const std::string& base, const std::string& file) {
    std::filesystem::path p(file);
    if (p.is_relative()) p = std::filesystem::path(base) / p;
    if (!std::filesystem::exists(p)) fail("file", "'" + p.string() + "' does not exist");
    return p.string();
}

KernelProfile profile_value(const json& j, const std::string& where) {
    allow_keys(j, where, {"type", "terms", "amplitude", "length", "samples", "dt"});
    std::string type = need(j, "type", where).get<std::string>();
    if (type == "exponential") {
        std::vector<std::pair<double, double>> terms;
        for (const auto& t : need(j, "terms", where)) {
            if (!t.is_array() || t.size() != 2) fail(where, "exponential terms are [a, b]");
            terms.emplace_back(num(t[0], where), num(t[1], where));
        }
        return KernelProfile::exponential(terms);
    }
    if (type == "indicator")
        return KernelProfile::indicator(num(need(j, "amplitude", where), where), num(need(j, "length", where), where));
    if (type == "sampled") {
        std::vector<double> s;
        for (const auto& v : need(j, "samples", where)) s.push_back(num(v, where));
        return KernelProfile::sampled(s, num(need(j, "dt", where), where));
    }
    fail(where + ".type", "unknown profile type '" + type + "'");
}

void parse_operator(ProblemConfig& cfg, const json& j) {
    const std::string w = "operator";
    if (j.contains("builder")) {
        allow_keys(j, w, {"builder", "n_cells", "length", "bc", "kappa"});
        std::string b = j["builder"].get<std::string>();
        if (b != "grad_div_1d") fail(w + ".builder", "unknown builder '" + b + "'");
        std::size_t n = count(need(j, "n_cells", w), w + ".n_cells");
        double L = num_or(j, "length", 1.0, w);
        std::string bc = j.value("bc", std::string("dirichlet"));
        cfg.kappa = num_or(j, "kappa", 1.0, w);
        cfg.grad_div = build_grad_div_1d(n, L, parse_boundary_condition(bc));
        cfg.op = cfg.grad_div->A;
        cfg.C = cfg.grad_div->C;
        cfg.primary = {0, static_cast<std::size_t>(cfg.grad_div->D.cols())};
        return;
    }
    allow_keys(j, w, {"matrix", "skew_adjoint", "selfadjoint", "accretive_constant", "C", "label"});
    CMat A = matrix_value(need(j, "matrix", w), 0, w + ".matrix");
    if (A.rows() != A.cols()) fail(w + ".matrix", "must be square");
    StructureHints hints;
    hints.skew_adjoint = j.value("skew_adjoint", false);
    hints.selfadjoint = j.value("selfadjoint", false);
    if (j.contains("accretive_constant")) hints.accretive_constant = num(j["accretive_constant"], w);
    cfg.op = SpatialOperator(A, j.value("label", std::string("inline")), hints);
    if (j.contains("C")) cfg.C = ReducedGradient(matrix_value(j["C"], 0, w + ".C"));
    cfg.primary = {0, static_cast<std::size_t>(A.rows())};
}

void parse_second_order(ProblemConfig& cfg, const json& params, const std::string& w) {
    if (!cfg.C) fail(w, "second-order laws need a reduced gradient (grad_div_1d builder or operator.C)");
    const ReducedGradient& C = *cfg.C;
    const std::size_t p = static_cast<std::size_t>(C.C.rows());
    double nu0 = 0.0;
    if (cfg.dpl) {
        cfg.second_order = dual_phase_lag_second_order(*cfg.dpl, p);
        nu0 = dual_phase_lag_nu0(*cfg.dpl);
    } else {
        const Eigen::Index pp = static_cast<Eigen::Index>(p);
        cfg.second_order = SecondOrderLaw::constant(matrix_value(need(params, "M0", w), pp, w + ".M0"),
                                                    matrix_value(need(params, "M1", w), pp, w + ".M1"));
        nu0 = num_or(params, "nu0", 0.0, w);
    }
    cfg.nu_target = num_or(params, "nu_target", 0.0, w);
    // the reduced operator replaces whatever the operator block built
    const Eigen::Index pp = static_cast<Eigen::Index>(p);
    CMat A = CMat::Zero(2 * pp, 2 * pp);
    A.topRightCorner(pp, pp) = -C.C.adjoint();
    A.bottomLeftCorner(pp, pp) = C.C;
    cfg.op = SpatialOperator(A, "second_order_skew", StructureHints{true, false, 0.0});
    cfg.primary = {0, p};
    double d = 1.0;
    if (!cfg.unstable_candidate()) {
        cfg.so_constants = second_order_constants(*cfg.second_order, nu0);
        const auto& k = *cfg.so_constants;
        if (params.contains("d")) {
            ReductionPlan plan;
            plan.d = num(params["d"], w + ".d");
            plan.c = k.c;
            plan.norm_M0 = k.norm_M0;
            plan.norm_M1 = k.norm_M1;
            plan.c_inv_norm = C.c_inv_norm;
            plan.nu_target = cfg.nu_target;
            plan.K_of_d = K_of_d(plan.d, k.norm_M0, k.norm_M1, C.c_inv_norm);
            plan.rho0 = std::min(cfg.nu_target, 0.75 * plan.d - 1e-12);
            plan.c_tilde = std::min(k.c - plan.d * plan.K_of_d, 0.75 * plan.d - plan.rho0);
            cfg.plan = plan;
        } else {
            try {
                cfg.plan = select_d(k.c, k.norm_M0, k.norm_M1, C.c_inv_norm, cfg.nu_target);
            } catch (const Error& e) {
                note(std::string("no reduction plan: ") + e.what());
            }
        }
        if (cfg.plan) d = cfg.plan->d;
    }
    cfg.law = build_Md(*cfg.second_order, C, d);
}

void parse_law(ProblemConfig& cfg, const json& j) {
    const std::string w = "law";
    allow_keys(j, w, {"kind", "params"});
    cfg.law_kind = need(j, "kind", w).get<std::string>();
    const json params = j.value("params", json::object());
    const std::string pw = "law.params";
    const Eigen::Index m = static_cast<Eigen::Index>(cfg.op.dim());
    const std::string& k = cfg.law_kind;
    if (k == "heat") {
        if (!cfg.grad_div) fail(w, "heat needs the grad_div_1d operator builder");
        allow_keys(params, pw, {"kappa"});
        cfg.kappa = num_or(params, "kappa", cfg.kappa, pw);
        if (!(cfg.kappa > 0)) fail(pw + ".kappa", "must be positive");
        const Eigen::Index nu = static_cast<Eigen::Index>(cfg.primary.count);
        CMat M0 = CMat::Zero(m, m), M1 = CMat::Zero(m, m);
        M0.topLeftCorner(nu, nu).setIdentity();
        M1.bottomRightCorner(m - nu, m - nu) = CMat::Identity(m - nu, m - nu) / cfg.kappa;
        cfg.affine = std::make_pair(M0, M1);
        cfg.law = make_affine(M0, M1);
    } else if (k == "affine") {
        allow_keys(params, pw, {"M0", "M1"});
        CMat M0 = matrix_value(need(params, "M0", pw), m, pw + ".M0");
        CMat M1 = matrix_value(need(params, "M1", pw), m, pw + ".M1");
        cfg.affine = std::make_pair(M0, M1);
        cfg.law = make_affine(M0, M1);
    } else if (k == "delay") {
        allow_keys(params, pw, {"M0", "M1", "terms", "truncation"});
        DelaySpec ds;
        ds.M0 = matrix_value(need(params, "M0", pw), m, pw + ".M0");
        ds.M1 = matrix_value(need(params, "M1", pw), m, pw + ".M1");
        for (const auto& t : need(params, "terms", pw)) {
            allow_keys(t, pw + ".terms", {"h", "N"});
            ds.terms.push_back({num(need(t, "h", pw), pw + ".terms.h"), matrix_value(need(t, "N", pw), m, pw + ".terms.N")});
        }
        ds.truncation = num_or(params, "truncation", ds.truncation, pw);
        cfg.delay = ds;
        cfg.law = make_delay(ds);
    } else if (k == "kernel" || k == "resolvent_kernel") {
        allow_keys(params, pw, {"profile", "matrix"});
        KernelSpec ks;
        ks.profile = profile_value(need(params, "profile", pw), pw + ".profile");
        ks.matrix = params.contains("matrix") ? matrix_value(params["matrix"], m, pw + ".matrix") : CMat::Identity(m, m);
        cfg.kernel = ks;
        cfg.law = k == "kernel" ? make_kernel(ks) : make_resolvent_kernel(ks);
    } else if (k == "kelvin_voigt") {
        allow_keys(params, pw, {"rho_tilde", "C", "D"});
        KelvinVoigtSpec kv;
        kv.rho_tilde = matrix_value(need(params, "rho_tilde", pw), 0, pw + ".rho_tilde");
        kv.C = matrix_value(need(params, "C", pw), 0, pw + ".C");
        kv.D = matrix_value(need(params, "D", pw), kv.C.rows(), pw + ".D");
        cfg.law = make_kelvin_voigt(kv);
    } else if (k == "dual_phase_lag") {
        allow_keys(params, pw, {"tau_q", "tau_theta", "d", "nu_target"});
        cfg.dpl = DualPhaseLagSpec{num(need(params, "tau_q", pw), pw + ".tau_q"),
                                   num(need(params, "tau_theta", pw), pw + ".tau_theta")};
        parse_second_order(cfg, params, pw);
    } else if (k == "second_order") {
        allow_keys(params, pw, {"M0", "M1", "nu0", "d", "nu_target"});
        parse_second_order(cfg, params, pw);
    } else {
        fail(w + ".kind", "unknown law kind '" + k + "'");
    }
    if (cfg.law.dim != cfg.op.dim())
        fail(w, "law acts on " + std::to_string(cfg.law.dim) + " components but the operator on " +
                    std::to_string(cfg.op.dim()));
}

void parse_source(ProblemConfig& cfg, const json& j) {
    const std::string w = "source";
    allow_keys(j, w, {"kind", "params"});
    SourceConfig& s = cfg.source;
    s.kind = need(j, "kind", w).get<std::string>();
    const json p = j.value("params", json::object());
    const std::string pw = "source.params";
    if (s.kind == "file") {
        allow_keys(p, pw, {"path"});
        s.file = resolve(cfg.base_dir, need(p, "path", pw).get<std::string>());
        return;
    }
    if (s.kind != "indicator" && s.kind != "bump" && s.kind != "gaussian")
        fail(w + ".kind", "unknown source kind '" + s.kind + "'");
    allow_keys(p, pw, {"t0", "t1", "center", "width", "amplitude", "profile", "offset"});
    s.t0 = num_or(p, "t0", s.t0, pw);
    s.t1 = num_or(p, "t1", s.t1, pw);
    s.center = num_or(p, "center", s.center, pw);
    s.width = num_or(p, "width", s.width, pw);
    s.amplitude = num_or(p, "amplitude", s.amplitude, pw);
    if (p.contains("offset")) s.offset = count(p["offset"], pw + ".offset");
    if (p.contains("profile")) s.profile = vector_value(p["profile"], pw + ".profile");
    if (s.kind != "gaussian" && !(s.t1 > s.t0)) fail(pw, "need t0 < t1");
    if (s.kind == "gaussian" && !(s.width > 0)) fail(pw + ".width", "must be positive");
    const std::size_t len = s.profile ? static_cast<std::size_t>(s.profile->size()) : cfg.primary.count;
    if (s.offset + len > cfg.dim()) fail(pw + ".profile", "does not fit into " + std::to_string(cfg.dim()) + " components");
}

void parse_ivp(ProblemConfig& cfg, const json& j) {
    const std::string w = "ivp";
    allow_keys(j, w, {"u0", "history_file", "complete_consistent", "semigroup", "post_widder", "attainment_tol"});
    IvpConfig& c = cfg.ivp;
    if (j.contains("u0")) {
        const json& u = j["u0"];
        if (u.is_object()) {
            allow_keys(u, w + ".u0", {"mode", "amplitude"});
            if (need(u, "mode", w + ".u0").get<std::string>() != "slowest") fail(w + ".u0.mode", "only 'slowest' is known");
            if (!cfg.grad_div) fail(w + ".u0", "the slowest mode needs the grad_div_1d builder");
            c.slowest_mode = true;
            c.mode_amplitude = num_or(u, "amplitude", 1.0, w + ".u0");
        } else {
            c.u0 = vector_value(u, w + ".u0");
            if (static_cast<std::size_t>(c.u0->size()) != cfg.dim())
                fail(w + ".u0", "expected " + std::to_string(cfg.dim()) + " components");
        }
    }
    if (j.contains("history_file")) c.history_file = resolve(cfg.base_dir, j["history_file"].get<std::string>());
    c.complete_consistent = j.value("complete_consistent", false);
    if (auto sg = pair_value(j, "semigroup", w)) c.semigroup = sg;
    if (j.contains("post_widder")) {
        const json& pw = j["post_widder"];
        allow_keys(pw, w + ".post_widder", {"t", "k"});
        c.post_widder = std::make_pair(num(need(pw, "t", w), w + ".post_widder.t"),
                                       static_cast<int>(count(need(pw, "k", w), w + ".post_widder.k")));
    }
    c.attainment_tol = num_or(j, "attainment_tol", c.attainment_tol, w);
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

ProblemConfig parse_config(const std::string& text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // locate the byte offset as line/column
        std::size_t line = 1, col = 1;
        const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < upto; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        auto colon = msg.find("syntax error");
        throw Error(ErrorCode::ConfigError, "malformed JSON at line " + std::to_string(line) + ", column " +
                                                std::to_string(col) + ": " +
                                                (colon == std::string::npos ? msg : msg.substr(colon)));
    }
    ProblemConfig cfg;
    cfg.base_dir = base_dir;
    cfg.canonical = j.dump();
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(cfg.canonical)));
    cfg.hash = hex;
    try {
        allow_keys(j, "config",
                   {"grid", "rho", "law", "operator", "source", "history", "ivp", "stability", "checklaw", "seed",
                    "description"});
        const json& g = need(j, "grid", "config");
        allow_keys(g, "grid", {"t_start", "dt", "n"});
        cfg.grid = TimeGrid(num(need(g, "t_start", "grid"), "grid.t_start"), num(need(g, "dt", "grid"), "grid.dt"),
                            count(need(g, "n", "grid"), "grid.n"));
        cfg.rho = num(need(j, "rho", "config"), "rho");
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        parse_operator(cfg, need(j, "operator", "config"));
        parse_law(cfg, need(j, "law", "config"));
        if (j.contains("source")) parse_source(cfg, j["source"]);
        if (j.contains("ivp")) parse_ivp(cfg, j["ivp"]);
        if (j.contains("history")) {
            const json& h = j["history"];
            std::string f = h.is_string() ? h.get<std::string>() : need(h, "file", "history").get<std::string>();
            cfg.ivp.history_file = resolve(cfg.base_dir, f);
        }
        if (j.contains("stability")) {
            const json& s = j["stability"];
            allow_keys(s, "stability", {"rho_lo", "rho_hi", "sigma_floor", "window"});
            cfg.stability.rho_lo = num_or(s, "rho_lo", cfg.stability.rho_lo, "stability");
            cfg.stability.rho_hi = num_or(s, "rho_hi", cfg.stability.rho_hi, "stability");
            cfg.stability.sigma_floor = num_or(s, "sigma_floor", cfg.stability.sigma_floor, "stability");
            cfg.stability.window = pair_value(s, "window", "stability");
        }
        if (j.contains("checklaw")) {
            const json& c = j["checklaw"];
            allow_keys(c, "checklaw", {"rho", "tail_s", "c0", "c1"});
            if (c.contains("rho"))
                for (const auto& r : c["rho"]) cfg.checklaw.rho.push_back(num(r, "checklaw.rho"));
            if (c.contains("tail_s")) {
                cfg.checklaw.tail_s.clear();
                for (const auto& r : c["tail_s"]) cfg.checklaw.tail_s.push_back(num(r, "checklaw.tail_s"));
            }
            if (c.contains("c0")) cfg.checklaw.c0 = num(c["c0"], "checklaw.c0");
            if (c.contains("c1")) cfg.checklaw.c1 = num(c["c1"], "checklaw.c1");
        }
        if (cfg.checklaw.rho.empty()) cfg.checklaw.rho = {cfg.rho};
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw Error(ErrorCode::ConfigError, std::string("config: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        throw Error(ErrorCode::ConfigError, std::string("config: ") + e.what());
    }
    return cfg;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    std::string base = std::filesystem::path(path).parent_path().string();
    ProblemConfig cfg = parse_config(ss.str(), base.empty() ? "." : base);
    cfg.source_path = path;
    return cfg;
}

Signal build_source(const ProblemConfig& cfg) {
    const SourceConfig& s = cfg.source;
    const std::size_t m = cfg.dim();
    if (s.kind == "none") throw Error(ErrorCode::ConfigError, "source: this command needs a source block");
    if (s.kind == "file") {
        Signal f;
        try {
            f = read_signal_csv(s.file, cfg.rho);
        } catch (const std::exception& e) {
            throw Error(ErrorCode::ConfigError, std::string("source file: ") + e.what());
        }
        if (f.dim() != m)
            throw Error(ErrorCode::ConfigError, "source file has " + std::to_string(f.dim()) + " components, expected " +
                                                    std::to_string(m));
        if (!(f.grid == cfg.grid)) throw Error(ErrorCode::ConfigError, "source file grid differs from the config grid");
        return f;
    }
    CVec shape = CVec::Zero(static_cast<Eigen::Index>(m));
    if (s.profile) {
        shape.segment(static_cast<Eigen::Index>(s.offset), s.profile->size()) = *s.profile;
    } else {
        shape.segment(static_cast<Eigen::Index>(s.offset + cfg.primary.offset),
                      static_cast<Eigen::Index>(cfg.primary.count))
            .setOnes();
    }
    Signal f(cfg.grid, cfg.rho, m);
    const double tol = 1e-9 * cfg.grid.dt;
    for (std::size_t j = 0; j < cfg.grid.n; ++j) {
        const double t = cfg.grid.t(j);
        double a = 0.0;
        if (s.kind == "indicator") {
            if (t > s.t0 + tol && t < s.t1 - tol) a = 1.0;
            else if (std::abs(t - s.t0) <= tol || std::abs(t - s.t1) <= tol) a = 0.5;  // midpoint of the jump
        } else if (s.kind == "bump") {
            double x = (2.0 * t - s.t0 - s.t1) / (s.t1 - s.t0);
            if (std::abs(x) < 1.0) a = std::exp(1.0 - 1.0 / (1.0 - x * x));
        } else {
            double x = (t - s.center) / s.width;
            a = std::exp(-0.5 * x * x);
        }
        if (a != 0.0) f.values.row(static_cast<Eigen::Index>(j)) = (s.amplitude * a * shape).transpose();
    }
    return f;
}

double source_support_start(const ProblemConfig& cfg, const Signal& f) {
    const SourceConfig& s = cfg.source;
    if (s.kind == "indicator" || s.kind == "bump") return s.t0;
    if (s.kind == "gaussian") return s.center - 8.0 * s.width;
    const double peak = f.values.cwiseAbs().maxCoeff();
    for (std::size_t j = 0; j < f.grid.n; ++j)
        if (f.values.row(static_cast<Eigen::Index>(j)).cwiseAbs().maxCoeff() > 1e-14 * peak) return f.grid.t(j);
    return f.grid.t_end();
}

History build_history(const ProblemConfig& cfg) {
    const IvpConfig& c = cfg.ivp;
    if (!c.history_file.empty()) {
        Signal g;
        try {
            g = read_signal_csv(c.history_file, cfg.rho);
        } catch (const std::exception& e) {
            throw Error(ErrorCode::ConfigError, std::string("history file: ") + e.what());
        }
        if (g.dim() != cfg.dim() || !(g.grid == cfg.grid))
            throw Error(ErrorCode::ConfigError, "history file does not match the config grid and dimension");
        return History(g);
    }
    CVec u0;
    if (c.slowest_mode) {
        HeatEigen he = heat_eigen_oracle(*cfg.grad_div, cfg.kappa);
        u0 = CVec::Zero(static_cast<Eigen::Index>(cfg.dim()));
        CVec mode = he.slowest_mode;
        // fix the sign so the first nonzero entry is positive
        for (Eigen::Index i = 0; i < mode.size(); ++i)
            if (std::abs(mode(i)) > 1e-12) {
                mode *= std::conj(mode(i)) / std::abs(mode(i));
                break;
            }
        u0.segment(static_cast<Eigen::Index>(cfg.primary.offset), mode.size()) = c.mode_amplitude * mode;
    } else if (c.u0) {
        u0 = *c.u0;
    } else {
        throw Error(ErrorCode::ConfigError, "ivp: provide ivp.u0 or a history file");
    }
    if (c.complete_consistent || c.slowest_mode) {
        if (!cfg.law.pencil) throw Error(ErrorCode::ConfigError, "ivp.complete_consistent needs an affine law");
        u0 = complete_consistent(cfg.law.pencil->first, cfg.law.pencil->second + cfg.op.matrix(), u0);
    }
    return history_from_initial_value(cfg.grid, cfg.rho, u0);
}

}  // namespace evospec
