#pragma once

#include "evospec/common.hpp"

#include <optional>
#include <string>

namespace evospec {

struct TimeGrid {
    double t_start = 0.0;
    double dt = 1.0;
    std::size_t n = 2;

    TimeGrid() = default;
    TimeGrid(double t_start, double dt, std::size_t n);

    double t(std::size_t j) const { return t_start + static_cast<double>(j) * dt; }
    double t_end() const { return t(n - 1); }
    // Index of the node at time t if t is a node (within 1e-9·dt).
    std::optional<std::size_t> node_at(double t) const;
    bool operator==(const TimeGrid& o) const {
        return n == o.n && t_start == o.t_start && dt == o.dt;
    }
};

// Element of discrete H_rho(R; C^m). values is n x dim, one row per node.
struct Signal {
    TimeGrid grid;
    double rho = 0.0;
    CMat values;

    Signal() = default;
    Signal(TimeGrid grid, double rho, std::size_t dim);
    Signal(TimeGrid grid, double rho, CMat values);

    std::size_t dim() const { return static_cast<std::size_t>(values.cols()); }
    std::size_t size() const { return grid.n; }
    CVec at(std::size_t j) const { return values.row(j).transpose(); }
    Signal with_rho(double r) const {
        Signal s = *this;
        s.rho = r;
        return s;
    }
};

enum class Side { below, above };
enum class TraceSide { left, right };

struct TraceValue {
    double t = 0.0;
    TraceSide side = TraceSide::left;
    CVec value;
    int estimate_width = 0;
};

void require_conformable(const Signal& a, const Signal& b);

double weighted_norm(const Signal& f);
cplx weighted_inner(const Signal& f, const Signal& g);  // <f|g>_rho, linear in g
Signal cutoff(const Signal& f, double t, Side side);
Signal translate(const Signal& f, double h);
Signal antiderivative(const Signal& f);
TraceValue trace(const Signal& f, double t, TraceSide side);
double causality_leak(const Signal& u, double a);

// Largest weighted amplitude among the first/last 2 nodes relative to the weighted peak.
double edge_ratio(const Signal& f);
// Emits a note when edge_ratio exceeds 1e-8; returns the ratio.
double check_edges(const Signal& f, const std::string& context);

// Signal CSV (t,re_0,im_0,...) and JSON sidecar {t_start,dt,n,rho,dim}.
void write_signal_csv(const Signal& f, const std::string& csv_path);
void write_signal_sidecar(const Signal& f, const std::string& json_path);
Signal read_signal_csv(const std::string& csv_path, double rho);

}  // namespace evospec
