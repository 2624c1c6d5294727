#include "evospec/weighted_signal.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace evospec {

TimeGrid::TimeGrid(double t_start_, double dt_, std::size_t n_) : t_start(t_start_), dt(dt_), n(n_) {
    if (!(dt > 0.0) || n < 2) throw std::invalid_argument("TimeGrid needs dt > 0 and n >= 2");
}

std::optional<std::size_t> TimeGrid::node_at(double t) const {
    double x = (t - t_start) / dt;
    double r = std::round(x);
    if (std::abs(x - r) > 1e-9 || r < 0 || r > static_cast<double>(n - 1)) return std::nullopt;
    return static_cast<std::size_t>(r);
}

Signal::Signal(TimeGrid g, double r, std::size_t dim) : grid(g), rho(r), values(CMat::Zero(g.n, dim)) {}

Signal::Signal(TimeGrid g, double r, CMat v) : grid(g), rho(r), values(std::move(v)) {
    if (static_cast<std::size_t>(values.rows()) != grid.n)
        throw Error(ErrorCode::Nonconformable, "values rows must equal grid.n");
}

void require_conformable(const Signal& a, const Signal& b) {
    if (!(a.grid == b.grid) || a.dim() != b.dim())
        throw Error(ErrorCode::Nonconformable, "signals differ in grid or dimension");
}

namespace {
inline double weight(const Signal& f, std::size_t j) {
    double w = std::exp(-2.0 * f.rho * f.grid.t(j)) * f.grid.dt;
    if (j == 0 || j + 1 == f.grid.n) w *= 0.5;
    return w;
}
}  // namespace

double weighted_norm(const Signal& f) {
    double acc = 0.0;
    for (std::size_t j = 0; j < f.grid.n; ++j) acc += weight(f, j) * f.values.row(j).squaredNorm();
    return std::sqrt(acc);
}

cplx weighted_inner(const Signal& f, const Signal& g) {
    require_conformable(f, g);
    cplx acc = 0.0;
    for (std::size_t j = 0; j < f.grid.n; ++j)
        acc += weight(f, j) * f.values.row(j).dot(g.values.row(j));
    return acc;
}

Signal cutoff(const Signal& f, double t, Side side) {
    Signal out = f;
    const double tol = 1e-9 * f.grid.dt;
    for (std::size_t j = 0; j < f.grid.n; ++j) {
        double tj = f.grid.t(j);
        bool drop = side == Side::below ? tj > t + tol : tj < t - tol;
        if (drop) out.values.row(j).setZero();
    }
    return out;
}

Signal translate(const Signal& f, double h) {
    const double steps = h / f.grid.dt;
    const double k = std::round(steps);
    const double tol = std::max(1e-12 * f.grid.dt, 8.0 * std::numeric_limits<double>::epsilon() * std::abs(h));
    if (std::abs(h - k * f.grid.dt) > tol)
        throw Error(ErrorCode::NonGridShift, "shift " + std::to_string(h) + " is not a multiple of dt");
    const long shift = static_cast<long>(k);
    const long n = static_cast<long>(f.grid.n);
    Signal out(f.grid, f.rho, f.dim());
    for (long j = 0; j < n; ++j) {
        long src = j + shift;
        if (src >= 0 && src < n) out.values.row(j) = f.values.row(src);
    }
    return out;
}

Signal antiderivative(const Signal& f) {
    if (f.rho == 0.0) throw Error(ErrorCode::ZeroWeight, "antiderivative needs rho != 0");
    Signal out(f.grid, f.rho, f.dim());
    const std::size_t n = f.grid.n;
    const double h = 0.5 * f.grid.dt;
    if (f.rho > 0.0) {
        for (std::size_t j = 1; j < n; ++j)
            out.values.row(j) = out.values.row(j - 1) + h * (f.values.row(j - 1) + f.values.row(j));
    } else {
        for (std::size_t j = n - 1; j-- > 0;)
            out.values.row(j) = out.values.row(j + 1) - h * (f.values.row(j) + f.values.row(j + 1));
    }
    return out;
}

TraceValue trace(const Signal& f, double t, TraceSide side) {
    const double x = (t - f.grid.t_start) / f.grid.dt;
    const double tol = 1e-9;
    long idx[3];
    const long n = static_cast<long>(f.grid.n);
    if (side == TraceSide::left) {
        long j = static_cast<long>(std::ceil(x - tol)) - 1;  // largest node strictly below t
        if (j >= n) j = n - 1;
        for (int i = 0; i < 3; ++i) idx[i] = j - i;
        if (idx[2] < 0) throw Error(ErrorCode::InsufficientNodes, "fewer than 3 nodes left of t");
    } else {
        long j = static_cast<long>(std::floor(x + tol)) + 1;  // smallest node strictly above t
        if (j < 0) j = 0;
        for (int i = 0; i < 3; ++i) idx[i] = j + i;
        if (idx[2] >= n) throw Error(ErrorCode::InsufficientNodes, "fewer than 3 nodes right of t");
    }
    double ts[3];
    for (int i = 0; i < 3; ++i) ts[i] = f.grid.t(static_cast<std::size_t>(idx[i]));
    TraceValue tv;
    tv.t = t;
    tv.side = side;
    tv.estimate_width = 3;
    tv.value = CVec::Zero(static_cast<Eigen::Index>(f.dim()));
    for (int i = 0; i < 3; ++i) {
        double l = 1.0;
        for (int k = 0; k < 3; ++k)
            if (k != i) l *= (t - ts[k]) / (ts[i] - ts[k]);
        tv.value += l * f.values.row(idx[i]).transpose();
    }
    return tv;
}

double causality_leak(const Signal& u, double a) {
    double total = weighted_norm(u);
    double before = weighted_norm(cutoff(u, a - u.grid.dt, Side::below));
    return before / std::max(total, std::numeric_limits<double>::epsilon());
}

double edge_ratio(const Signal& f) {
    double peak = 0.0, edge = 0.0;
    const std::size_t n = f.grid.n;
    for (std::size_t j = 0; j < n; ++j) {
        double a = std::exp(-f.rho * f.grid.t(j)) * f.values.row(j).norm();
        peak = std::max(peak, a);
        if (j < 2 || j + 2 >= n) edge = std::max(edge, a);
    }
    return peak > 0.0 ? edge / peak : 0.0;
}

double check_edges(const Signal& f, const std::string& context) {
    double r = edge_ratio(f);
    if (r > 1e-8) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: weighted edge amplitude %.3g of peak exceeds 1e-8", context.c_str(), r);
        note(buf);
    }
    return r;
}

void write_signal_csv(const Signal& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "t";
    for (std::size_t c = 0; c < f.dim(); ++c) os << ",re_" << c << ",im_" << c;
    os << "\n";
    char buf[64];
    for (std::size_t j = 0; j < f.grid.n; ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", f.grid.t(j));
        os << buf;
        for (std::size_t c = 0; c < f.dim(); ++c) {
            cplx v = f.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c));
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g", v.real(), v.imag());
            os << buf;
        }
        os << "\n";
    }
}

void write_signal_sidecar(const Signal& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    char buf[256];
    std::snprintf(buf, sizeof buf, "{\"dim\": %zu, \"dt\": %.17g, \"n\": %zu, \"rho\": %.17g, \"t_start\": %.17g}\n",
                  f.dim(), f.grid.dt, f.grid.n, f.rho, f.grid.t_start);
    os << buf;
}

Signal read_signal_csv(const std::string& path, double rho) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::ConfigError, "cannot open signal file " + path);
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorCode::ConfigError, "empty signal file " + path);
    std::size_t cols = 1;
    for (char ch : line)
        if (ch == ',') ++cols;
    if (cols < 3 || (cols - 1) % 2 != 0)
        throw Error(ErrorCode::ConfigError, "signal header must be t,re_0,im_0,...");
    const std::size_t dim = (cols - 1) / 2;
    std::vector<double> ts;
    std::vector<std::vector<cplx>> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (...) {
                throw Error(ErrorCode::ConfigError, path + ":" + std::to_string(lineno) + ": bad number");
            }
        }
        if (vals.size() != cols)
            throw Error(ErrorCode::ConfigError, path + ":" + std::to_string(lineno) + ": expected " +
                                                    std::to_string(cols) + " columns");
        ts.push_back(vals[0]);
        std::vector<cplx> r(dim);
        for (std::size_t c = 0; c < dim; ++c) r[c] = cplx(vals[1 + 2 * c], vals[2 + 2 * c]);
        rows.push_back(std::move(r));
    }
    if (ts.size() < 2) throw Error(ErrorCode::ConfigError, "signal file needs at least 2 rows");
    const double dt = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
    for (std::size_t j = 1; j < ts.size(); ++j)
        if (std::abs(ts[j] - ts[j - 1] - dt) > 1e-6 * dt)
            throw Error(ErrorCode::ConfigError, "signal file grid is not uniform");
    Signal s(TimeGrid(ts.front(), dt, ts.size()), rho, dim);
    for (std::size_t j = 0; j < ts.size(); ++j)
        for (std::size_t c = 0; c < dim; ++c) s.values(j, c) = rows[j][c];
    return s;
}

}  // namespace evospec
