#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dsw/fft.hpp"
#include "dsw/io.hpp"
#include "dsw/symbols.hpp"

using namespace dsw;

namespace {

Field random_field(const PeriodicGrid& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field f(g, Space::physical);
    for (auto& z : f.values) z = cplx{dist(rng), dist(rng)};
    return f;
}

double rel_diff(const Field& a, const Field& b) {
    double num = sup_diff(a, b);
    double den = std::max(sup_norm(a), 1e-300);
    return num / den;
}

}  // namespace

TEST_CASE("grid nodes and wavenumbers") {
    auto g = PeriodicGrid::line(8, 2.0);
    CHECK(g.node(0, 0) == Catch::Approx(-2.0 * std::numbers::pi));
    CHECK(g.node(0, 4) == Catch::Approx(0.0).margin(1e-15));
    // k table: N values, symmetric about zero up to the unpaired Nyquist mode
    int pos = 0, neg = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        const double k = g.wavenumber(0, i);
        if (k > 0) ++pos;
        if (k < 0) ++neg;
    }
    CHECK(pos == 3);
    CHECK(neg == 4);
    CHECK(g.max_wavenumber(0) == Catch::Approx(2.0));
    CHECK(g.min_fourier_distance(0) == Catch::Approx(2.0 * std::numbers::pi * 2.0 / 8.0));
    CHECK_THROWS_AS(PeriodicGrid::line(12, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(PeriodicGrid::line(8, -1.0), std::invalid_argument);
}

TEST_CASE("forward transform of a constant is a pure DC mode") {
    auto g = PeriodicGrid::line(8, 1.0);
    Field f = make_field(g, Space::physical, [](double) { return 1.0; });
    Field v = transform(f, Direction::forward);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i == 0)
            CHECK(std::abs(v.values[i] - cplx{1.0, 0.0}) < 1e-14);
        else
            CHECK(std::abs(v.values[i]) < 1e-14);
    }
}

TEST_CASE("cos(x) has exactly two modes at k = +-1") {
    auto g = PeriodicGrid::line(64, 1.0);
    Field f = make_field(g, Space::physical, [](double x) { return std::cos(x); });
    Field v = transform(f, Direction::forward);
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::abs(v.values[i]) > 1e-13) {
            ++nonzero;
            CHECK(std::abs(g.wavenumber(0, i)) == Catch::Approx(1.0));
            CHECK(std::abs(v.values[i] - cplx{0.5, 0.0}) < 1e-13);
        }
    }
    CHECK(nonzero == 2);
}

TEST_CASE("round trip is the identity within 1e-12 relative") {
    for (std::size_t n : {64u, 256u, 4096u}) {
        auto g = PeriodicGrid::line(n, 3.0);
        Field f = random_field(g, 42 + unsigned(n));
        Field back = transform(transform(f, Direction::forward), Direction::inverse);
        CHECK(rel_diff(f, back) < 1e-12);
    }
    auto g2 = PeriodicGrid::plane(64, 32, 2.0, 1.0);
    Field f2 = random_field(g2, 7);
    Field back2 = transform(transform(f2, Direction::forward), Direction::inverse);
    CHECK(rel_diff(f2, back2) < 1e-12);
}

TEST_CASE("transform contract violations") {
    auto g = PeriodicGrid::line(8, 1.0);
    Field f(g, Space::fourier);
    CHECK_THROWS_AS(transform(f, Direction::forward), std::invalid_argument);
    Field p(g, Space::physical);
    CHECK_THROWS_AS(transform(p, Direction::inverse), std::invalid_argument);
}

TEST_CASE("Parseval holds for random fields") {
    auto g = PeriodicGrid::plane(32, 32, 2.0, 2.0);
    Field f = random_field(g, 11);
    Field v = transform(f, Direction::forward);
    long double phys = 0.0L, four = 0.0L;
    for (const auto& z : f.values) phys += std::norm(z);
    for (const auto& z : v.values) four += std::norm(z);
    phys *= g.cell_volume();
    // normalization: sum |f|^2 dx = (2 pi L_x)(2 pi L_y) * sum |v|^2
    long double norm = 1.0L;
    for (int a = 0; a < g.dims; ++a) norm *= 2.0 * std::numbers::pi * g.half_period[a];
    four *= norm;
    CHECK(std::abs(double(phys / four) - 1.0) < 1e-12);
}

TEST_CASE("results are identical across worker counts") {
    auto g = PeriodicGrid::plane(64, 64, 1.0, 2.0);
    Field f = random_field(g, 3);
    set_fft_workers(1);
    Field v1 = transform(f, Direction::forward);
    set_fft_workers(4);
    Field v4 = transform(f, Direction::forward);
    set_fft_workers(1);
    REQUIRE(v1.size() == v4.size());
    for (std::size_t i = 0; i < v1.size(); ++i) {
        CHECK(v1.values[i].real() == v4.values[i].real());
        CHECK(v1.values[i].imag() == v4.values[i].imag());
    }
}

TEST_CASE("spectral derivative of sin is cos") {
    auto g = PeriodicGrid::line(128, 1.0);
    Field f = make_field(g, Space::physical, [](double x) { return std::sin(x); });
    Field d = spectral_derivative(f, 0, 1);
    Field expect = make_field(g, Space::physical, [](double x) { return std::cos(x); });
    CHECK(sup_diff(d, expect) < 1e-10);
}

TEST_CASE("second derivative of a constant vanishes") {
    auto g = PeriodicGrid::line(64, 1.0);
    Field f = make_field(g, Space::physical, [](double) { return 4.2; });
    Field d = spectral_derivative(f, 0, 2);
    CHECK(sup_norm(d) < 1e-13);
}

TEST_CASE("derivative of a Gaussian matches the closed form") {
    auto g = PeriodicGrid::line(1024, 5.0);
    Field f = make_field(g, Space::physical, [](double x) { return std::exp(-x * x); });
    Field d = spectral_derivative(f, 0, 1);
    Field expect =
        make_field(g, Space::physical, [](double x) { return -2.0 * x * std::exp(-x * x); });
    CHECK(sup_diff(d, expect) < 1e-8);
}

TEST_CASE("order-2 derivative equals order-1 applied twice on band-limited data") {
    auto g = PeriodicGrid::line(256, 2.0);
    Field f = make_field(g, Space::physical,
                         [](double x) { return std::sin(3.0 * x) + 0.3 * std::cos(0.5 * x); });
    Field d2 = spectral_derivative(f, 0, 2);
    Field d11 = spectral_derivative(spectral_derivative(f, 0, 1), 0, 1);
    CHECK(sup_diff(d2, d11) < 1e-10);
}

TEST_CASE("symbol values and bounds") {
    // (1,1) plane wave under DMinus is annihilated
    CHECK(symbol_value(SymbolKind::DMinus, 1.0, 1.0) == 0.0);
    // kx = 0 line under MOp
    CHECK(symbol_value(SymbolKind::MOp, 0.0, 3.7) == 0.0);
    // direct evaluation at (2,1)
    CHECK(symbol_value(SymbolKind::DPlusInvDMinus, 2.0, 1.0) == Catch::Approx(3.0 / 5.0));
    // singular multipliers vanish at the origin
    for (auto s : {SymbolKind::DPlusInvDMinus, SymbolKind::MOp, SymbolKind::POp, SymbolKind::QOp})
        CHECK(symbol_value(s, 0.0, 0.0) == 0.0);
    // bounds over a wavenumber sweep
    for (double kx = -20.0; kx <= 20.0; kx += 0.37) {
        for (double ky = -20.0; ky <= 20.0; ky += 0.41) {
            CHECK(std::abs(symbol_value(SymbolKind::MOp, kx, ky)) <= 2.0 + 1e-15);
            CHECK(std::abs(symbol_value(SymbolKind::POp, kx, ky)) <= 1.0 + 1e-15);
            CHECK(std::abs(symbol_value(SymbolKind::QOp, kx, ky)) <= 0.5 + 1e-15);
        }
    }
}

TEST_CASE("apply_symbol annihilates symmetric modes and acts pointwise") {
    auto g = PeriodicGrid::plane(32, 32, 1.0, 1.0);
    Field f = make_field(g, Space::physical,
                         [](double x, double y) { return std::cos(x) * std::cos(y); });
    // support on |kx| = |ky| = 1 only
    Field out = apply_symbol(f, SymbolKind::DPlusInvDMinus);
    CHECK(sup_norm(out) < 1e-14);

    Field pw = make_field(g, Space::physical, [](double x, double y) { return std::cos(2.0 * x + y); });
    Field scaled = apply_symbol(pw, SymbolKind::DPlusInvDMinus);
    for (std::size_t i = 0; i < pw.size(); ++i)
        CHECK(std::abs(scaled.values[i] - 0.6 * pw.values[i]) < 1e-13);
}

TEST_CASE("apply_symbol is linear") {
    auto g = PeriodicGrid::plane(16, 16, 1.0, 1.0);
    Field f = random_field(g, 5), h = random_field(g, 6);
    const cplx a{1.3, -0.2}, b{-0.7, 0.45};
    Field combo(g, Space::physical);
    for (std::size_t i = 0; i < combo.size(); ++i)
        combo.values[i] = a * f.values[i] + b * h.values[i];
    Field lhs = apply_symbol(combo, SymbolKind::MOp);
    Field rf = apply_symbol(f, SymbolKind::MOp), rh = apply_symbol(h, SymbolKind::MOp);
    double worst = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i)
        worst = std::max(worst, std::abs(lhs.values[i] - (a * rf.values[i] + b * rh.values[i])));
    CHECK(worst < 1e-13);
}

TEST_CASE("krasny filter") {
    auto g = PeriodicGrid::line(8, 1.0);
    Field v(g, Space::fourier);
    v.values[1] = cplx{1e-15, 0.0};
    v.values[2] = cplx{0.0, 1e-13};
    v.values[3] = cplx{0.5, 0.5};
    Field out = krasny_filter(v, 1e-14);
    CHECK(out.values[1] == cplx{0.0, 0.0});
    CHECK(out.values[2] == cplx{0.0, 1e-13});
    CHECK(out.values[3] == cplx{0.5, 0.5});
    Field zero(g, Space::fourier);
    Field zf = krasny_filter(zero);
    CHECK(sup_norm(zf) == 0.0);
    CHECK_THROWS_AS(krasny_filter(v, -1.0), std::invalid_argument);
    Field phys(g, Space::physical);
    CHECK_THROWS_AS(krasny_filter(phys, 1e-14), std::invalid_argument);
}

TEST_CASE("angle averaged spectrum shell assignment") {
    auto g = PeriodicGrid::plane(32, 32, 1.0, 1.0);
    Field v(g, Space::fourier);
    // mode (3,4): |k'| = 5 falls in shell K = 4
    v.at(3, 4) = cplx{2.0, 0.0};
    auto shells = angle_averaged_spectrum(v);
    for (std::size_t K = 0; K < shells.size(); ++K)
        CHECK(shells[K] == (K == 4 ? 4.0 : 0.0));

    Field iso(g, Space::fourier);
    iso.at(5, 0) = cplx{1.0, 0.0};
    iso.at(0, 5) = cplx{1.0, 0.0};
    auto sh2 = angle_averaged_spectrum(iso);
    CHECK(sh2[4] == 2.0);

    auto g1 = PeriodicGrid::line(8, 1.0);
    Field v1(g1, Space::fourier);
    CHECK_THROWS_AS(angle_averaged_spectrum(v1), std::invalid_argument);
}

TEST_CASE("Gaussian spectrum decays monotonically beyond the peak") {
    auto g = PeriodicGrid::plane(128, 128, 2.0, 2.0);
    Field f = make_field(g, Space::physical,
                         [](double x, double y) { return std::exp(-2.0 * (x * x + y * y)); });
    Field v = transform(f, Direction::forward);
    auto shells = angle_averaged_spectrum(v);
    // find the peak, then require monotone decay down to the noise floor
    std::size_t peak = 0;
    for (std::size_t K = 0; K < shells.size(); ++K)
        if (shells[K] > shells[peak]) peak = K;
    for (std::size_t K = peak; K + 1 < shells.size(); ++K) {
        if (shells[K + 1] < 1e-28) break;
        CHECK(shells[K + 1] <= shells[K] * (1.0 + 1e-12));
    }
}

TEST_CASE("snapshot round trip") {
    auto g = PeriodicGrid::plane(16, 8, 2.5, 1.5);
    Field f = random_field(g, 9);
    auto path = std::filesystem::temp_directory_path() / "dsw_snap_test.bin";
    write_snapshot(path, f);
    Field back = read_snapshot(path);
    REQUIRE(back.grid == f.grid);
    REQUIRE(back.space == f.space);
    // payload is float32 pairs
    CHECK(sup_diff(back, f) < 1e-6);
    std::filesystem::remove(path);
}
