#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dsw/tracer.hpp"

using namespace dsw;

namespace {

// In-family generator: |v(k)| = exp(A - B ln k - delta k).
std::pair<std::vector<double>, std::vector<double>> synthetic_modulus(double A, double B, double delta,
                                                                      double k0, double k1, double dk) {
    std::vector<double> ks, mods;
    for (double k = k0; k <= k1; k += dk) {
        ks.push_back(k);
        mods.push_back(std::exp(A - B * std::log(k) - delta * k));
    }
    return {ks, mods};
}

}  // namespace

TEST_CASE("exact recovery of in-family modulus data") {
    auto [ks, mods] = synthetic_modulus(3.0, 1.5, 0.02, 10.0, 1000.0, 1.0);
    FitWindow w{10.0, 1000.0, 1e-30};
    auto fit = fit_log_modulus(ks, mods, w);
    REQUIRE(fit);
    CHECK(fit.value->A == Catch::Approx(3.0).margin(1e-10));
    CHECK(fit.value->B == Catch::Approx(1.5).margin(1e-10));
    CHECK(fit.value->delta == Catch::Approx(0.02).margin(1e-12));
    CHECK(fit.value->fit_error < 1e-10);
}

TEST_CASE("exact recovery within 1e-9 relative for random generators") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> dA(-8.0, 8.0), dB(0.3, 3.0), dd(-0.05, 0.3);
    for (int trial = 0; trial < 50; ++trial) {
        const double A = dA(rng), B = dB(rng), delta = dd(rng);
        auto [ks, mods] = synthetic_modulus(A, B, delta, 5.0, 400.0, 0.5);
        FitWindow w{5.0, 400.0, 0.0};
        auto fit = fit_log_modulus(ks, mods, w);
        REQUIRE(fit);
        CHECK(std::abs(fit.value->A - A) <= 1e-9 * std::max(1.0, std::abs(A)));
        CHECK(std::abs(fit.value->B - B) <= 1e-9 * std::max(1.0, std::abs(B)));
        CHECK(std::abs(fit.value->delta - delta) <= 1e-9 * std::max(1.0, std::abs(delta)));
    }
}

TEST_CASE("fit declines with fewer than 8 admissible points") {
    auto [ks, mods] = synthetic_modulus(1.0, 1.0, 0.1, 10.0, 16.0, 1.0);  // 7 points
    FitWindow w{10.0, 16.0, 0.0};
    auto fit = fit_log_modulus(ks, mods, w);
    CHECK_FALSE(fit);
    CHECK(fit.declined.find("declined") != std::string::npos);
}

TEST_CASE("modulus floor excludes points") {
    // all points below the floor -> declined
    auto [ks, mods] = synthetic_modulus(-40.0, 1.0, 0.1, 10.0, 200.0, 1.0);
    FitWindow w{10.0, 200.0, 1e-10};
    auto fit = fit_log_modulus(ks, mods, w);
    CHECK_FALSE(fit);
}

TEST_CASE("monotone consistency: shrinking delta decreases the fitted delta") {
    double prev = 1e9;
    for (double delta : {0.3, 0.2, 0.1, 0.05, 0.0}) {
        auto [ks, mods] = synthetic_modulus(1.0, 1.2, delta, 10.0, 300.0, 1.0);
        FitWindow w{10.0, 300.0, 0.0};
        auto fit = fit_log_modulus(ks, mods, w);
        REQUIRE(fit);
        CHECK(fit.value->delta < prev);
        prev = fit.value->delta;
    }
}

TEST_CASE("phase unwrap reconstructs a linear phase") {
    std::vector<double> ks;
    std::vector<cplx> vs;
    for (double k = 1.0; k <= 200.0; k += 1.0) {
        ks.push_back(k);
        vs.push_back(std::polar(1.0, -2.2 * k));
    }
    auto [ku, phi] = unwrap_phase(ks, vs);
    REQUIRE(ku.size() == ks.size());
    // continuous up to a global 2 pi n offset
    const double offset = phi[0] - (-2.2 * ks[0]);
    CHECK(std::abs(std::remainder(offset, 2.0 * std::numbers::pi)) < 1e-12);
    for (std::size_t i = 0; i < ku.size(); ++i)
        CHECK(phi[i] - offset == Catch::Approx(-2.2 * ku[i]).margin(1e-10));
}

TEST_CASE("unwrap leaves constant phase alone and skips zero coefficients") {
    std::vector<double> ks{1, 2, 3, 4, 5, 6};
    std::vector<cplx> vs(6, std::polar(1.0, 0.7));
    vs[3] = cplx{0.0, 0.0};
    auto [ku, phi] = unwrap_phase(ks, vs);
    CHECK(ku.size() == 5);
    for (double p : phi) CHECK(p == Catch::Approx(0.7));
}

TEST_CASE("fit_phase recovers slope and intercept") {
    std::vector<double> ks, phi;
    for (double k = 10.0; k <= 500.0; k += 1.0) {
        ks.push_back(k);
        phi.push_back(1.0 - 2.2094 * k);
    }
    FitWindow w{10.0, 500.0, 0.0};
    auto pf = fit_phase(ks, phi, w);
    REQUIRE(pf);
    CHECK(pf.value->alpha == Catch::Approx(2.2094).margin(1e-12));
    CHECK(pf.value->C == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("shift covariance: multiplying by exp(-ika) moves alpha by a, fixes A, B, delta") {
    const double a = 0.531;
    std::vector<double> ks;
    std::vector<cplx> v0, v1;
    for (double k = 8.0; k <= 300.0; k += 0.5) {
        ks.push_back(k);
        const double mod = std::exp(2.0 - 1.1 * std::log(k) - 0.05 * k);
        const cplx base = std::polar(mod, -0.9 * k + 0.4);
        v0.push_back(base);
        v1.push_back(base * std::polar(1.0, -k * a));
    }
    FitWindow w{8.0, 300.0, 0.0};
    std::vector<double> m0(ks.size()), m1(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
        m0[i] = std::abs(v0[i]);
        m1[i] = std::abs(v1[i]);
    }
    auto f0 = fit_log_modulus(ks, m0, w), f1 = fit_log_modulus(ks, m1, w);
    REQUIRE(f0);
    REQUIRE(f1);
    CHECK(std::abs(f0.value->A - f1.value->A) < 1e-10);
    CHECK(std::abs(f0.value->B - f1.value->B) < 1e-10);
    CHECK(std::abs(f0.value->delta - f1.value->delta) < 1e-10);
    auto [k0, p0] = unwrap_phase(ks, v0);
    auto [k1, p1] = unwrap_phase(ks, v1);
    auto pf0 = fit_phase(k0, p0, w), pf1 = fit_phase(k1, p1, w);
    REQUIRE(pf0);
    REQUIRE(pf1);
    CHECK(pf1.value->alpha - pf0.value->alpha == Catch::Approx(a).margin(1e-10));
}

TEST_CASE("energy spectrum fit recovers shell-model parameters") {
    std::vector<double> shells(400, 0.0);
    for (std::size_t K = 1; K < shells.size(); ++K)
        shells[K] = std::exp(2.0 - 3.0 * std::log(double(K)) - 0.05 * double(K));
    FitWindow w{15.0, 380.0, 0.0};
    auto fit = fit_energy_spectrum(shells, w);
    REQUIRE(fit);
    CHECK(fit.value->A == Catch::Approx(2.0).margin(1e-9));
    CHECK(fit.value->B == Catch::Approx(3.0).margin(1e-9));
    CHECK(fit.value->delta == Catch::Approx(0.05).margin(1e-11));
}

TEST_CASE("detection invariance under uniform rescaling of moduli") {
    std::vector<DeltaSample> s1, s2;
    for (int i = 0; i <= 40; ++i) {
        const double t = 0.01 * i;
        auto [ks, mods] = synthetic_modulus(1.0, 1.3, 0.1 * (0.25 - t), 10.0, 300.0, 1.0);
        FitWindow w{10.0, 300.0, 0.0};
        auto f1 = fit_log_modulus(ks, mods, w, t);
        for (auto& m : mods) m *= 17.3;  // uniform rescale: A shifts, delta unchanged
        auto f2 = fit_log_modulus(ks, mods, w, t);
        REQUIRE(f1);
        REQUIRE(f2);
        s1.push_back({t, f1.value->delta, f1.value->B});
        s2.push_back({t, f2.value->delta, f2.value->B});
        CHECK(f2.value->A - f1.value->A == Catch::Approx(std::log(17.3)).margin(1e-9));
    }
    auto r1 = detect_critical_time(s1, 1e-3);
    auto r2 = detect_critical_time(s2, 1e-3);
    REQUIRE(r1.detected);
    REQUIRE(r2.detected);
    CHECK(r1.t_c == Catch::Approx(r2.t_c).margin(1e-12));
    CHECK(r1.t_c == Catch::Approx(0.25).margin(0.01));
}

TEST_CASE("linear crossing is located within one stride") {
    std::vector<DeltaSample> series;
    for (int i = 0; i <= 50; ++i) {
        const double t = 0.01 * i;
        series.push_back({t, 0.1 * (0.25 - t), 1.33});
    }
    auto rep = detect_critical_time(series, 1e-4);
    REQUIRE(rep.detected);
    CHECK(rep.mechanism == CriticalMechanism::delta_zero_crossing);
    CHECK(rep.t_c == Catch::Approx(0.25).margin(1e-12));  // exact for a linear ramp
    CHECK(rep.B_at_tc == Catch::Approx(1.33));
}

TEST_CASE("min-distance rule stops earlier than the zero crossing") {
    std::vector<DeltaSample> series;
    for (int i = 0; i <= 50; ++i) {
        const double t = 0.01 * i;
        series.push_back({t, 0.1 * (0.25 - t), 1.1});
    }
    const double m = 0.0019;
    auto rep = detect_critical_time(series, m, CriticalMechanism::delta_below_min_distance);
    REQUIRE(rep.detected);
    CHECK(rep.t_c < 0.25);
    CHECK(rep.t_c == Catch::Approx(0.24).margin(1e-12));  // first sample with delta < m
}

TEST_CASE("no detection reports the minimum delta attained") {
    std::vector<DeltaSample> series;
    for (int i = 0; i <= 10; ++i) series.push_back({0.01 * i, 0.5 - 0.01 * i, 1.0});
    auto rep = detect_critical_time(series, 1e-4);
    CHECK_FALSE(rep.detected);
    CHECK(rep.min_delta_attained == Catch::Approx(0.4));
}

TEST_CASE("classification bands") {
    SeriesContext ctx;
    ctx.context = ModelContext::hyperbolic;
    // synthetic series: B == 1.333, bounded fit error
    ctx.B_history.assign(20, 1.333);
    ctx.fit_error_history.assign(25, 0.3);
    ctx.detection_index = 20;
    CHECK(classify_singularity(1.333, ctx) == SingularityClass::cubic_like);

    // focusing context with B in the sqrt band
    ctx.context = ModelContext::elliptic;
    ctx.B_history.assign(20, 1.15);
    CHECK(classify_singularity(1.15, ctx) == SingularityClass::sqrt_like);

    // blow-up: B plateaus near 0.5, fit error diverges across detection
    SeriesContext blow;
    blow.context = ModelContext::dispersive;
    blow.B_history.assign(30, 0.5);
    blow.fit_error_history.assign(30, 0.2);
    blow.fit_error_history.insert(blow.fit_error_history.end(), {0.2, 0.5, 1.7, 3.0});
    blow.detection_index = 30;
    CHECK(classify_singularity(0.31, blow) == SingularityClass::blowup_like);

    // nothing matches
    SeriesContext none;
    none.context = ModelContext::hyperbolic;
    none.B_history.assign(10, 2.7);
    none.fit_error_history.assign(12, 0.2);
    none.detection_index = 10;
    CHECK(classify_singularity(2.7, none) == SingularityClass::unclassified);
}

TEST_CASE("oscillatory moduli keep the fit usable while inflating the residual") {
    // cos(x_c k) modulation on top of the family: the residual stops being a
    // quality gate, but both windows still produce fits
    std::vector<double> ks, mods;
    for (double k = 1.0; k <= 400.0; k += 0.5) {
        ks.push_back(k);
        mods.push_back(std::exp(1.0 - 1.34 * std::log(k) - 0.01 * k) *
                       std::abs(std::cos(2.2 * k) + 1e-3));
    }
    auto fa = fit_log_modulus(ks, mods, FitWindow{10.0, 200.0, 1e-30});
    auto fb = fit_log_modulus(ks, mods, FitWindow{1.0, 200.0, 1e-30});
    REQUIRE(fa);
    REQUIRE(fb);
    CHECK(fa.value->fit_error > 0.1);
}
