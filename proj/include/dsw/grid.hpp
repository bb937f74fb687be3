#pragma once

// Uniform periodic lattice on [-L_x*pi, L_x*pi) x [-L_y*pi, L_y*pi).
// Nodes:        x_j = -L*pi + 2*pi*L*j/N,  j = 0..N-1
// Wavenumbers:  k_n = n/L,  n = -N/2..N/2-1 stored in FFT order
//               (n = idx for idx < N/2, idx - N otherwise; the Nyquist
//               mode n = -N/2 is unpaired).
// N must be a power of two per axis.

#include <array>
#include <cstddef>
#include <numbers>
#include <stdexcept>

namespace dsw {

struct PeriodicGrid {
    int dims = 1;
    std::array<std::size_t, 2> n{1, 1};         // points per axis (n[1] == 1 in 1D)
    std::array<double, 2> half_period{1.0, 1.0};  // L per axis

    static PeriodicGrid line(std::size_t nx, double Lx) {
        check_axis(nx, Lx);
        PeriodicGrid g;
        g.dims = 1;
        g.n = {nx, 1};
        g.half_period = {Lx, 1.0};
        return g;
    }

    static PeriodicGrid plane(std::size_t nx, std::size_t ny, double Lx, double Ly) {
        check_axis(nx, Lx);
        check_axis(ny, Ly);
        PeriodicGrid g;
        g.dims = 2;
        g.n = {nx, ny};
        g.half_period = {Lx, Ly};
        return g;
    }

    std::size_t size() const { return n[0] * n[1]; }

    // Linear index convention: id = ix * n[1] + iy (x is the slow axis).
    std::size_t index(std::size_t ix, std::size_t iy = 0) const { return ix * n[1] + iy; }

    double node(int axis, std::size_t j) const {
        const double L = half_period[axis];
        return -L * std::numbers::pi + 2.0 * std::numbers::pi * L * double(j) / double(n[axis]);
    }

    static long signed_mode(std::size_t idx, std::size_t N) {
        return idx < N / 2 ? long(idx) : long(idx) - long(N);
    }

    double wavenumber(int axis, std::size_t idx) const {
        return double(signed_mode(idx, n[axis])) / half_period[axis];
    }

    // Largest wavenumber magnitude on the axis (Nyquist).
    double max_wavenumber(int axis) const {
        return double(n[axis] / 2) / half_period[axis];
    }

    // Smallest distance resolvable in Fourier space, m = 2*pi*L/N.
    double min_fourier_distance(int axis = 0) const {
        return 2.0 * std::numbers::pi * half_period[axis] / double(n[axis]);
    }

    double cell_volume() const {
        double v = 2.0 * std::numbers::pi * half_period[0] / double(n[0]);
        if (dims == 2) v *= 2.0 * std::numbers::pi * half_period[1] / double(n[1]);
        return v;
    }

    bool operator==(const PeriodicGrid& o) const {
        return dims == o.dims && n == o.n && half_period == o.half_period;
    }

private:
    static void check_axis(std::size_t N, double L) {
        if (N < 2 || (N & (N - 1)) != 0)
            throw std::invalid_argument("PeriodicGrid: points per axis must be a power of two >= 2");
        if (!(L > 0.0))
            throw std::invalid_argument("PeriodicGrid: half_period must be positive");
    }
};

}  // namespace dsw
