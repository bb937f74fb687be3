#pragma once

// Fourier-multiplier operators, spectral derivatives, Krasny filtering and
// angle-averaged energy spectra.
//
// Singular multipliers (denominator kx^2+ky^2) are set to 0 at the origin
// mode, which fixes the mean field to zero.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dsw/fft.hpp"

namespace dsw {

enum class SymbolKind { DMinus, DPlusInvDMinus, MOp, POp, QOp, Laplacian1D, DxSquared };

inline double symbol_value(SymbolKind s, double kx, double ky) {
    const double d = kx * kx + ky * ky;
    switch (s) {
        case SymbolKind::DMinus:
            return -kx * kx + ky * ky;
        case SymbolKind::DPlusInvDMinus:
            return d == 0.0 ? 0.0 : (kx * kx - ky * ky) / d;
        case SymbolKind::MOp:
            return d == 0.0 ? 0.0 : -2.0 * kx * kx / d;
        case SymbolKind::POp:
            return d == 0.0 ? 0.0 : kx * kx / d;
        case SymbolKind::QOp:
            return d == 0.0 ? 0.0 : kx * ky / d;
        case SymbolKind::Laplacian1D:
        case SymbolKind::DxSquared:
            return -kx * kx;
    }
    return 0.0;
}

// Multiplier table over the grid, in storage order.
inline std::vector<double> symbol_table(const PeriodicGrid& g, SymbolKind s) {
    if (s == SymbolKind::Laplacian1D && g.dims != 1)
        throw std::invalid_argument("Laplacian1D symbol requires a 1D grid");
    std::vector<double> tab(g.size());
    for (std::size_t ix = 0; ix < g.n[0]; ++ix) {
        const double kx = g.wavenumber(0, ix);
        for (std::size_t iy = 0; iy < g.n[1]; ++iy)
            tab[g.index(ix, iy)] = symbol_value(s, kx, g.dims == 2 ? g.wavenumber(1, iy) : 0.0);
    }
    return tab;
}

// Pointwise multiplication of the Fourier coefficients; returns a field in the
// input's space.
inline Field apply_symbol(const Field& f, SymbolKind s) {
    const bool physical_in = f.space == Space::physical;
    Field v = physical_in ? transform(f, Direction::forward) : f;
    const auto tab = symbol_table(f.grid, s);
    for (std::size_t i = 0; i < v.size(); ++i) v.values[i] *= tab[i];
    return physical_in ? transform(v, Direction::inverse) : v;
}

inline void krasny_filter_inplace(cvec& v, double threshold) {
    if (threshold < 0.0) throw std::invalid_argument("krasny_filter: negative threshold");
    for (auto& z : v)
        if (std::abs(z) <= threshold) z = cplx{0.0, 0.0};
}

inline Field krasny_filter(const Field& f, double threshold = 1e-14) {
    if (f.space != Space::fourier)
        throw std::invalid_argument("krasny_filter: expects a fourier-space field");
    Field out = f;
    krasny_filter_inplace(out.values, threshold);
    return out;
}

// d^order/d(axis)^order via (ik)^order multipliers; physical in, physical out.
// Odd orders zero the (unpaired) Nyquist mode.
inline Field spectral_derivative(const Field& f, int axis, int order) {
    if (f.space != Space::physical)
        throw std::invalid_argument("spectral_derivative: expects a physical-space field");
    if (order != 1 && order != 2) throw std::invalid_argument("spectral_derivative: order must be 1 or 2");
    if (axis < 0 || axis >= f.grid.dims) throw std::invalid_argument("spectral_derivative: bad axis");
    Field v = transform(f, Direction::forward);
    const PeriodicGrid& g = v.grid;
    const std::size_t N = g.n[axis];
    for (std::size_t ix = 0; ix < g.n[0]; ++ix) {
        for (std::size_t iy = 0; iy < g.n[1]; ++iy) {
            const std::size_t idx = axis == 0 ? ix : iy;
            const double k = g.wavenumber(axis, idx);
            cplx& z = v.values[g.index(ix, iy)];
            if (order == 1)
                z = (idx == N / 2) ? cplx{0.0, 0.0} : cplx{0.0, k} * z;
            else
                z *= -k * k;
        }
    }
    return transform(v, Direction::inverse);
}

// Fourier-space variant used in right-hand sides: multiply by (ik_axis).
inline void derivative_inplace(cvec& v, const PeriodicGrid& g, int axis) {
    const std::size_t N = g.n[axis];
    for (std::size_t ix = 0; ix < g.n[0]; ++ix)
        for (std::size_t iy = 0; iy < g.n[1]; ++iy) {
            const std::size_t idx = axis == 0 ? ix : iy;
            const double k = g.wavenumber(axis, idx);
            cplx& z = v[g.index(ix, iy)];
            z = (idx == N / 2) ? cplx{0.0, 0.0} : cplx{0.0, k} * z;
        }
}

// Shell sums E(K) = sum_{K < |k'| <= K+1} |v(k')|^2, K = 0..floor(max |k'|).
// The zero mode lies in no shell.
inline std::vector<double> angle_averaged_spectrum(const cvec& v, const PeriodicGrid& g) {
    if (g.dims != 2) throw std::invalid_argument("angle_averaged_spectrum: 2D fields only");
    const double kxm = g.max_wavenumber(0), kym = g.max_wavenumber(1);
    const double kmax = std::sqrt(kxm * kxm + kym * kym);
    std::vector<double> shells(std::size_t(std::floor(kmax)) + 1, 0.0);
    for (std::size_t ix = 0; ix < g.n[0]; ++ix) {
        const double kx = g.wavenumber(0, ix);
        for (std::size_t iy = 0; iy < g.n[1]; ++iy) {
            const double ky = g.wavenumber(1, iy);
            const double kk = std::sqrt(kx * kx + ky * ky);
            if (kk == 0.0) continue;
            // K < kk <= K+1  <=>  K = ceil(kk) - 1
            const std::size_t K = std::size_t(std::ceil(kk)) - 1;
            if (K < shells.size()) shells[K] += std::norm(v[g.index(ix, iy)]);
        }
    }
    return shells;
}

inline std::vector<double> angle_averaged_spectrum(const Field& f) {
    if (f.space != Space::fourier)
        throw std::invalid_argument("angle_averaged_spectrum: expects a fourier-space field");
    return angle_averaged_spectrum(f.values, f.grid);
}

// Coefficients along the positive k_x axis (k_y = 0 slice in 2D).
// Returns (k, v(k)) pairs for k > 0 in increasing k.
inline std::pair<std::vector<double>, std::vector<cplx>> positive_axis_slice(const cvec& v,
                                                                             const PeriodicGrid& g) {
    std::vector<double> ks;
    std::vector<cplx> vs;
    ks.reserve(g.n[0] / 2);
    vs.reserve(g.n[0] / 2);
    for (std::size_t ix = 1; ix < g.n[0] / 2; ++ix) {
        ks.push_back(g.wavenumber(0, ix));
        vs.push_back(v[g.index(ix, 0)]);
    }
    return {std::move(ks), std::move(vs)};
}

inline std::pair<std::vector<double>, std::vector<cplx>> positive_axis_slice(const Field& f) {
    if (f.space != Space::fourier)
        throw std::invalid_argument("positive_axis_slice: expects a fourier-space field");
    return positive_axis_slice(f.values, f.grid);
}

}  // namespace dsw
