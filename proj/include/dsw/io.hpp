#pragma once

// Persistence formats.
//
// Snapshot (little-endian binary, schema v1):
//   magic "DSWSNAP1" | u32 dims | u32 N per axis | f64 L per axis | u8 space
//   then row-major complex64 (float32 re, float32 im) in storage order.
//
// CSV writers share one fixed precision so reruns are byte-identical.

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "dsw/field.hpp"

namespace dsw {

static_assert(std::endian::native == std::endian::little, "snapshot format assumes little-endian host");

namespace detail {
template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}
}  // namespace detail

inline void write_snapshot(const std::filesystem::path& path, const Field& f) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open snapshot for writing: " + path.string());
    os.write("DSWSNAP1", 8);
    detail::put<std::uint32_t>(os, std::uint32_t(f.grid.dims));
    for (int a = 0; a < f.grid.dims; ++a) detail::put<std::uint32_t>(os, std::uint32_t(f.grid.n[a]));
    for (int a = 0; a < f.grid.dims; ++a) detail::put<double>(os, f.grid.half_period[a]);
    detail::put<std::uint8_t>(os, f.space == Space::physical ? 0 : 1);
    for (const auto& z : f.values) {
        detail::put<float>(os, float(z.real()));
        detail::put<float>(os, float(z.imag()));
    }
    if (!os) throw std::runtime_error("snapshot write failed: " + path.string());
}

inline Field read_snapshot(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open snapshot: " + path.string());
    char magic[8];
    is.read(magic, 8);
    if (std::string(magic, 8) != "DSWSNAP1") throw std::runtime_error("bad snapshot magic: " + path.string());
    const auto dims = detail::get<std::uint32_t>(is);
    if (dims != 1 && dims != 2) throw std::runtime_error("bad snapshot dims");
    std::size_t n[2] = {1, 1};
    double L[2] = {1.0, 1.0};
    for (std::uint32_t a = 0; a < dims; ++a) n[a] = detail::get<std::uint32_t>(is);
    for (std::uint32_t a = 0; a < dims; ++a) L[a] = detail::get<double>(is);
    const auto space = detail::get<std::uint8_t>(is);
    PeriodicGrid g = dims == 1 ? PeriodicGrid::line(n[0], L[0]) : PeriodicGrid::plane(n[0], n[1], L[0], L[1]);
    Field f(g, space == 0 ? Space::physical : Space::fourier);
    for (auto& z : f.values) {
        const float re = detail::get<float>(is);
        const float im = detail::get<float>(is);
        z = cplx(double(re), double(im));
    }
    if (!is) throw std::runtime_error("snapshot truncated: " + path.string());
    return f;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : os_(path, std::ios::trunc) {
        if (!os_) throw std::runtime_error("cannot open csv for writing: " + path.string());
        os_.precision(17);
    }
    void header(const std::string& line) { os_ << line << "\n"; }
    template <typename... Ts>
    void row(const Ts&... vs) {
        bool first = true;
        ((os_ << (first ? "" : ","), first = false, os_ << vs), ...);
        os_ << "\n";
    }

private:
    std::ofstream os_;
};

// Columns (k, modulus) over positive k for 1D coefficients, or (K, E) shells.
inline void write_spectrum_csv(const std::filesystem::path& path, const std::vector<double>& k,
                               const std::vector<double>& value, bool shells) {
    CsvWriter csv(path);
    csv.header(shells ? "K,E" : "k,modulus");
    for (std::size_t i = 0; i < k.size(); ++i) csv.row(k[i], value[i]);
}

}  // namespace dsw
