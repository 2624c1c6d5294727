#pragma once

#include "evospec/material_laws.hpp"
#include "evospec/weighted_signal.hpp"

#include <functional>
#include <string>

namespace evospec {

// Frequencies in FFT storage order: xi(k) = 2 pi k~ / (n dt), k~ the signed index in (-n/2, n/2].
struct FrequencyGrid {
    double dt = 1.0;
    std::size_t n = 2;

    FrequencyGrid() = default;
    FrequencyGrid(double dt_, std::size_t n_) : dt(dt_), n(n_) {}
    explicit FrequencyGrid(const TimeGrid& g) : dt(g.dt), n(g.n) {}

    long signed_index(std::size_t k) const {
        long kk = static_cast<long>(k), nn = static_cast<long>(n);
        return 2 * kk > nn ? kk - nn : kk;
    }
    double xi(std::size_t k) const {
        return 2.0 * kPi * static_cast<double>(signed_index(k)) / (static_cast<double>(n) * dt);
    }
    cplx z(std::size_t k, double rho) const { return cplx(rho, xi(k)); }
};

// Samples of L_rho f at i xi_k + rho. values is n x dim in FFT order.
struct Spectrum {
    FrequencyGrid freq;
    double rho = 0.0;
    double t_start = 0.0;  // phase reference of the companion time grid
    CMat values;
    double edge_ratio = 0.0;  // window-edge diagnostic of the source signal

    std::size_t dim() const { return static_cast<std::size_t>(values.cols()); }
    TimeGrid time_grid() const { return TimeGrid(t_start, freq.dt, freq.n); }
};

// In-place FFT of every column; sign -1 forward, +1 backward (unnormalized).
void fft_columns(CMat& data, int sign);

Spectrum transform(const Signal& f);
Signal inverse_transform(const Spectrum& s);

// Pointwise multiplier: s_k <- symbol(i xi_k + rho) s_k.
Spectrum multiply(const Spectrum& s, const std::function<CMat(cplx)>& symbol);
Signal apply_multiplier(const Signal& f, const std::function<CMat(cplx)>& symbol);

Signal apply_derivative(const Signal& f, int order);
Signal apply_law(const Signal& f, const MaterialLaw& law);

// Spectrum of coeff·delta_t where delta_t carries the e^{2 rho t} weight of the
// distributional derivative of a cut-off; a plain point mass is coeff·e^{-2 rho t}.
Spectrum delta_spectrum(const TimeGrid& grid, double rho, double t, const CVec& coeff);

// Relative discrepancy of the unweighted outputs of two solution maps on [t0, t1].
using SolutionMap = std::function<Signal(const Signal&)>;
double rho_independence(const SolutionMap& fwd_a, double rho_a, const SolutionMap& fwd_b, double rho_b,
                        const Signal& f, double t0, double t1);
double rho_independence(const SolutionMap& fwd_a, double rho_a, const SolutionMap& fwd_b, double rho_b,
                        const Signal& f);

// CSV with column xi replacing t, rows sorted by xi.
void write_spectrum_csv(const Spectrum& s, const std::string& path);

}  // namespace evospec
