#include "evospec/fourier_laplace.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>

namespace evospec {

namespace {
std::mutex g_plan_mutex;  // FFTW planner is not thread safe
}

void fft_columns(CMat& data, int sign) {
    const int n = static_cast<int>(data.rows());
    const int howmany = static_cast<int>(data.cols());
    if (n == 0 || howmany == 0) return;
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(g_plan_mutex);
        plan = fftw_plan_many_dft(1, &n, howmany, buf, nullptr, 1, n, buf, nullptr, 1, n,
                                  sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    fftw_destroy_plan(plan);
}

Spectrum transform(const Signal& f) {
    Spectrum s;
    s.freq = FrequencyGrid(f.grid);
    s.rho = f.rho;
    s.t_start = f.grid.t_start;
    s.edge_ratio = check_edges(f, "transform");
    const std::size_t n = f.grid.n;
    s.values.resize(static_cast<Eigen::Index>(n), f.values.cols());
    for (std::size_t j = 0; j < n; ++j) s.values.row(j) = std::exp(-f.rho * f.grid.t(j)) * f.values.row(j);
    fft_columns(s.values, -1);
    const double scale = f.grid.dt / kSqrt2Pi;
    for (std::size_t k = 0; k < n; ++k)
        s.values.row(k) *= scale * std::exp(cplx(0.0, -s.freq.xi(k) * s.t_start));
    return s;
}

Signal inverse_transform(const Spectrum& s) {
    const std::size_t n = s.freq.n;
    CMat w = s.values;
    const double scale = kSqrt2Pi / s.freq.dt;
    for (std::size_t k = 0; k < n; ++k) w.row(k) *= scale * std::exp(cplx(0.0, s.freq.xi(k) * s.t_start));
    fft_columns(w, +1);
    w /= static_cast<double>(n);
    TimeGrid g = s.time_grid();
    for (std::size_t j = 0; j < n; ++j) w.row(j) *= std::exp(s.rho * g.t(j));
    return Signal(g, s.rho, std::move(w));
}

Spectrum multiply(const Spectrum& s, const std::function<CMat(cplx)>& symbol) {
    Spectrum out = s;
    parallel_for(s.freq.n, [&](std::size_t k) {
        CMat m = symbol(s.freq.z(k, s.rho));
        out.values.row(k) = (m * s.values.row(k).transpose()).transpose();
    });
    return out;
}

Signal apply_multiplier(const Signal& f, const std::function<CMat(cplx)>& symbol) {
    return inverse_transform(multiply(transform(f), symbol));
}

Signal apply_derivative(const Signal& f, int order) {
    if (order == 0) return f;
    if (order < 0 && f.rho == 0.0) throw Error(ErrorCode::ZeroWeight, "negative derivative order needs rho != 0");
    Spectrum s = transform(f);
    for (std::size_t k = 0; k < s.freq.n; ++k) s.values.row(k) *= std::pow(s.freq.z(k, s.rho), order);
    return inverse_transform(s);
}

Signal apply_law(const Signal& f, const MaterialLaw& law) {
    if (!(f.rho > law.b_of_M))
        throw Error(ErrorCode::WeightBelowDomain,
                    "rho = " + std::to_string(f.rho) + " does not exceed b(M) = " + std::to_string(law.b_of_M));
    return apply_multiplier(f, law.eval);
}

Spectrum delta_spectrum(const TimeGrid& grid, double rho, double t, const CVec& coeff) {
    Spectrum s;
    s.freq = FrequencyGrid(grid);
    s.rho = rho;
    s.t_start = grid.t_start;
    s.values.resize(static_cast<Eigen::Index>(grid.n), coeff.size());
    // e^{2 rho t}·e^{-(i xi + rho) t} = e^{(rho - i xi) t}
    for (std::size_t k = 0; k < grid.n; ++k)
        s.values.row(k) = (std::exp(cplx(rho * t, -s.freq.xi(k) * t)) / kSqrt2Pi) * coeff.transpose();
    return s;
}

double rho_independence(const SolutionMap& fwd_a, double rho_a, const SolutionMap& fwd_b, double rho_b,
                        const Signal& f, double t0, double t1) {
    Signal ua = fwd_a(f.with_rho(rho_a));
    Signal ub = fwd_b(f.with_rho(rho_b));
    require_conformable(ua, ub);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < ua.grid.n; ++j) {
        double t = ua.grid.t(j);
        if (t < t0 || t > t1) continue;
        num += (ua.values.row(j) - ub.values.row(j)).squaredNorm();
        den += ua.values.row(j).squaredNorm();
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

double rho_independence(const SolutionMap& fwd_a, double rho_a, const SolutionMap& fwd_b, double rho_b,
                        const Signal& f) {
    return rho_independence(fwd_a, rho_a, fwd_b, rho_b, f, f.grid.t_start, f.grid.t_end());
}

void write_spectrum_csv(const Spectrum& s, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "xi";
    for (std::size_t c = 0; c < s.dim(); ++c) os << ",re_" << c << ",im_" << c;
    os << "\n";
    std::vector<std::size_t> order(s.freq.n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return s.freq.signed_index(a) < s.freq.signed_index(b); });
    char buf[64];
    for (std::size_t k : order) {
        std::snprintf(buf, sizeof buf, "%.17g", s.freq.xi(k));
        os << buf;
        for (std::size_t c = 0; c < s.dim(); ++c) {
            cplx v = s.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c));
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g", v.real(), v.imag());
            os << buf;
        }
        os << "\n";
    }
}

}  // namespace evospec
