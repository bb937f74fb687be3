#pragma once

// Field: complex values over a PeriodicGrid, tagged physical- or Fourier-space.
// Real-valued quantities are carried in complex storage.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <new>
#include <type_traits>
#include <stdexcept>
#include <vector>

#include "dsw/grid.hpp"

namespace dsw {

using cplx = std::complex<double>;

// 64-byte aligned storage so FFTW SIMD plans apply uniformly.
template <typename T>
struct AlignedAlloc {
    using value_type = T;
    AlignedAlloc() = default;
    template <typename U>
    AlignedAlloc(const AlignedAlloc<U>&) {}
    T* allocate(std::size_t n) {
        return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t(64)));
    }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, std::align_val_t(64)); }
    template <typename U>
    bool operator==(const AlignedAlloc<U>&) const { return true; }
};

using cvec = std::vector<cplx, AlignedAlloc<cplx>>;

enum class Space { physical, fourier };

struct Field {
    PeriodicGrid grid;
    Space space = Space::physical;
    cvec values;

    Field() = default;
    Field(const PeriodicGrid& g, Space s) : grid(g), space(s), values(g.size(), cplx{0.0, 0.0}) {}

    std::size_t size() const { return values.size(); }
    cplx& at(std::size_t ix, std::size_t iy = 0) { return values[grid.index(ix, iy)]; }
    const cplx& at(std::size_t ix, std::size_t iy = 0) const { return values[grid.index(ix, iy)]; }
};

inline void require_same_grid(const Field& a, const Field& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("field grid mismatch");
}

// Sample a scalar function of the node coordinates; the callable's arity
// must match the grid dimension.
template <typename Fn>
Field make_field(const PeriodicGrid& g, Space s, Fn&& fn) {
    Field f(g, s);
    if constexpr (std::is_invocable_v<Fn, double, double>) {
        if (g.dims != 2) throw std::invalid_argument("make_field: 2-argument sampler on a 1D grid");
        for (std::size_t ix = 0; ix < g.n[0]; ++ix) {
            const double x = g.node(0, ix);
            for (std::size_t iy = 0; iy < g.n[1]; ++iy)
                f.values[g.index(ix, iy)] = cplx(fn(x, g.node(1, iy)));
        }
    } else {
        if (g.dims != 1) throw std::invalid_argument("make_field: 1-argument sampler on a 2D grid");
        for (std::size_t i = 0; i < g.n[0]; ++i) f.values[i] = cplx(fn(g.node(0, i)));
    }
    return f;
}

inline double sup_norm(const Field& f) {
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v));
    return m;
}

inline double sup_diff(const Field& a, const Field& b) {
    require_same_grid(a, b);
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

inline double max_imag(const Field& f) {
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v.imag()));
    return m;
}

inline bool all_finite(const cvec& v) {
    for (const auto& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

// sum over nodes * cell volume (spectrally exact quadrature on the torus).
inline double integrate_real(const Field& f) {
    long double s = 0.0L;
    for (const auto& v : f.values) s += v.real();
    return double(s) * f.grid.cell_volume();
}

}  // namespace dsw
