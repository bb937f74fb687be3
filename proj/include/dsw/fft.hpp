#pragma once

// Discrete Fourier transforms over PeriodicGrid, FFTW-backed.
//
// Convention: forward gives v(k_n) = (1/N) sum_j f(x_j) exp(-i k_n x_j) with
// the centered nodes of grid.hpp; inverse is the exact adjoint, so
// inverse(forward(f)) == f up to roundoff. Because x_j is offset by -L*pi,
// the raw FFTW output picks up a (-1)^n factor per axis, fused below with the
// normalization pass.
//
// 2D transforms run 1D FFTs over contiguous rows, transpose, transform again,
// and transpose back; rows are dealt to the worker pool and each row is
// computed independently, so results do not depend on the worker count.

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

#include "dsw/field.hpp"
#include "dsw/pool.hpp"

namespace dsw {

enum class Direction { forward, inverse };

namespace detail {

class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache c;
        return c;
    }

    // In-place c2c plans on 64-byte aligned storage; FFTW_ESTIMATE keeps the
    // chosen algorithm (and hence rounding) reproducible across runs.
    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard lk(mu_);
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        cvec dummy(n);
        auto* p = reinterpret_cast<fftw_complex*>(dummy.data());
        fftw_plan plan = fftw_plan_dft_1d(int(n), p, p, sign, FFTW_ESTIMATE);
        if (!plan) throw std::runtime_error("fftw plan creation failed");
        plans_[key] = plan;
        return plan;
    }

private:
    PlanCache() = default;
    std::mutex mu_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

inline void rows_fft(cplx* data, std::size_t rows, std::size_t rowlen, int sign) {
    fftw_plan plan = PlanCache::instance().get(rowlen, sign);
    fft_pool().parallel_for(rows, [&](std::size_t r) {
        auto* p = reinterpret_cast<fftw_complex*>(data + r * rowlen);
        fftw_execute_dft(plan, p, p);
    });
}

inline void transpose(const cplx* src, cplx* dst, std::size_t nrows, std::size_t ncols) {
    constexpr std::size_t B = 32;  // cache blocking
    const std::size_t rblocks = (nrows + B - 1) / B;
    fft_pool().parallel_for(rblocks, [&](std::size_t rb) {
        const std::size_t r0 = rb * B, r1 = std::min(nrows, r0 + B);
        for (std::size_t c0 = 0; c0 < ncols; c0 += B) {
            const std::size_t c1 = std::min(ncols, c0 + B);
            for (std::size_t r = r0; r < r1; ++r)
                for (std::size_t c = c0; c < c1; ++c) dst[c * nrows + r] = src[r * ncols + c];
        }
    });
}

inline cvec& scratch(std::size_t n) {
    thread_local cvec buf;
    if (buf.size() < n) buf.resize(n);
    return buf;
}

// (-1)^(ix+iy) phase from the centered domain, fused with the 1/N scale.
inline void phase_scale(cvec& v, const PeriodicGrid& g, double scale) {
    const std::size_t ny = g.n[1];
    fft_pool().parallel_for(g.n[0], [&](std::size_t ix) {
        const double sx = (ix & 1) ? -scale : scale;
        cplx* row = v.data() + ix * ny;
        for (std::size_t iy = 0; iy < ny; ++iy) row[iy] *= (iy & 1) ? -sx : sx;
    });
}

inline void fft_nd(cvec& v, const PeriodicGrid& g, int sign) {
    if (g.dims == 1) {
        rows_fft(v.data(), 1, g.n[0], sign);
        return;
    }
    const std::size_t nx = g.n[0], ny = g.n[1];
    rows_fft(v.data(), nx, ny, sign);
    cvec& tmp = scratch(nx * ny);
    transpose(v.data(), tmp.data(), nx, ny);
    rows_fft(tmp.data(), ny, nx, sign);
    transpose(tmp.data(), v.data(), ny, nx);
}

}  // namespace detail

// In-place transform of raw coefficient storage.
inline void transform_inplace(cvec& v, const PeriodicGrid& g, Direction dir) {
    if (v.size() != g.size()) throw std::invalid_argument("transform: shape/grid mismatch");
    if (dir == Direction::forward) {
        detail::fft_nd(v, g, FFTW_FORWARD);
        detail::phase_scale(v, g, 1.0 / double(g.size()));
    } else {
        detail::phase_scale(v, g, 1.0);
        detail::fft_nd(v, g, FFTW_BACKWARD);
    }
}

inline Field transform(const Field& f, Direction dir) {
    if (dir == Direction::forward && f.space != Space::physical)
        throw std::invalid_argument("transform: forward expects a physical-space field");
    if (dir == Direction::inverse && f.space != Space::fourier)
        throw std::invalid_argument("transform: inverse expects a fourier-space field");
    Field out = f;
    transform_inplace(out.values, out.grid, dir);
    out.space = (dir == Direction::forward) ? Space::fourier : Space::physical;
    return out;
}

inline Field to_fourier(const Field& f) {
    return f.space == Space::fourier ? f : transform(f, Direction::forward);
}

inline Field to_physical(const Field& f) {
    return f.space == Space::physical ? f : transform(f, Direction::inverse);
}

}  // namespace dsw
