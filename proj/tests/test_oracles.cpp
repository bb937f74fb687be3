#include <catch2/catch_amalgamated.hpp>

#include "dsw/oracles.hpp"

using namespace dsw;

TEST_CASE("minimize: quadratic bowl") {
    auto f = [](const std::vector<double>& x) {
        return (x[0] - 1.0) * (x[0] - 1.0) + (x[1] - 2.0) * (x[1] - 2.0);
    };
    auto r = minimize(f, {0.0, 0.0});
    REQUIRE(r.converged);
    CHECK(r.x[0] == Catch::Approx(1.0).margin(1e-7));
    CHECK(r.x[1] == Catch::Approx(2.0).margin(1e-7));
}

TEST_CASE("minimize: returns the basin of the start for symmetric minima") {
    auto f = [](const std::vector<double>& x) {
        const double a = x[0] * x[0] - 1.0;
        return a * a + x[1] * x[1];
    };
    auto left = minimize(f, {-0.4, 0.1});
    auto right = minimize(f, {0.4, 0.1});
    CHECK(left.x[0] == Catch::Approx(-1.0).margin(1e-6));
    CHECK(right.x[0] == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("minimize: iteration cap reports nonconvergence") {
    auto f = [](const std::vector<double>& x) { return std::abs(x[0]) + std::abs(x[1]); };
    MinimizeOptions opt;
    opt.max_iterations = 3;
    auto r = minimize(f, {5.0, -7.0}, opt);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 3);
}

TEST_CASE("critical points") {
    auto foc2 = critical_focusing(2.0);
    CHECK(foc2.t_c == Catch::Approx(0.25));
    CHECK(foc2.u_c == Catch::Approx(8.0));
    CHECK(foc2.w_c == 0.0);
    CHECK(foc2.x_c == 0.0);
    CHECK(critical_focusing(1.0).t_c == Catch::Approx(0.5));

    auto def1 = critical_defocusing(1.0);
    // frozen from the closed forms evaluated at 30-digit precision
    CHECK(def1.t_c == Catch::Approx(1.52435418062304).margin(1e-12));
    CHECK(def1.r_plus_c == Catch::Approx(0.356079683889543).margin(1e-12));
    CHECK(def1.r_minus_c == Catch::Approx(-1.3940000515334).margin(1e-12));
    CHECK(def1.x_c == Catch::Approx(-2.209395255).margin(1e-7));

    // scaling: focusing t_c halves when A0 doubles; defocusing t_c ~ 1/A0
    CHECK(critical_focusing(4.0).t_c == Catch::Approx(0.5 * critical_focusing(2.0).t_c));
    CHECK(critical_defocusing(2.0).t_c == Catch::Approx(0.5 * critical_defocusing(1.0).t_c));
}

TEST_CASE("defocusing oracle at the initial time") {
    auto p0 = defocusing_exact(0.0, 0.0, 1.0);
    REQUIRE(p0.converged);
    CHECK(p0.u == Catch::Approx(1.0).margin(1e-8));
    CHECK(p0.w == Catch::Approx(0.0).margin(1e-8));
    for (double x : {-2.0, -0.7, 0.0, 1.3, 2.5}) {
        auto p = defocusing_exact(x, 0.0, 1.0);
        REQUIRE(p.converged);
        CHECK(p.u == Catch::Approx(sech2_data(x, 1.0)).margin(1e-7));
        CHECK(p.w == Catch::Approx(0.0).margin(1e-7));
    }
}

TEST_CASE("defocusing oracle declines past t_c") {
    auto p = defocusing_exact(0.0, 1.6, 1.0);
    CHECK_FALSE(p.converged);
    CHECK(p.declined.find("t_c") != std::string::npos);
}

TEST_CASE("defocusing invariants satisfy r+ > r- where u > 0") {
    const double t = 1.0;
    std::vector<double> xs;
    for (double x = -6.0; x <= 6.0; x += 0.05) xs.push_back(x);
    auto curve = defocusing_curve(xs, t, 1.0);
    CHECK(curve.failures == 0);
    std::size_t valid_count = 0;
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
        if (!curve.valid[i]) continue;
        ++valid_count;
        if (curve.u[i] > 1e-10) {
            const double rp = curve.w[i] + 2.0 * std::sqrt(curve.u[i]);
            const double rm = curve.w[i] - 2.0 * std::sqrt(curve.u[i]);
            CHECK(rp > rm);
        }
    }
    // the crossover zone near the axis is declined, the flanks are covered
    CHECK(valid_count > xs.size() / 2);
    // even u, odd w over certified pairs
    const std::size_t n = curve.x.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;
        if (!curve.valid[i] || !curve.valid[j]) continue;
        CHECK(curve.u[i] == Catch::Approx(curve.u[j]).margin(1e-6));
        CHECK(curve.w[i] == Catch::Approx(-curve.w[j]).margin(1e-6));
    }
}

TEST_CASE("f_u and f_w match central finite differences of f") {
    // w = 0 with u < A0^2 sits on the branch cut of the principal square
    // root (u + b^2 real negative), where f is not differentiable in w;
    // the crosscheck samples both signs of w away from the cut.
    const double A0 = 2.0;
    const double h = 1e-6;
    for (double u : {0.5, 2.0, 5.0, 7.0}) {
        for (double w : {-1.5, -0.2, 0.4, 2.0}) {
            const double fu_fd =
                (hodograph::f_value(u + h, w, A0) - hodograph::f_value(u - h, w, A0)) / (2.0 * h);
            const double fw_fd =
                (hodograph::f_value(u, w + h, A0) - hodograph::f_value(u, w - h, A0)) / (2.0 * h);
            CHECK(hodograph::f_u(u, w, A0) == Catch::Approx(fu_fd).margin(1e-6));
            CHECK(hodograph::f_w(u, w, A0) == Catch::Approx(fw_fd).margin(1e-6));
        }
    }
}

TEST_CASE("focusing oracle: initial data, axis values, critical point") {
    const double A0 = 2.0;
    for (double x : {-1.5, -0.4, 0.3, 1.0}) {
        auto p = focusing_exact(x, 0.0, A0);
        REQUIRE(p.converged);
        CHECK(p.u == Catch::Approx(sech2_data(x, A0)).margin(1e-7));
        CHECK(p.w == Catch::Approx(0.0).margin(1e-7));
    }
    // u(0,t) closed form: minus branch of u^2 t^2 = u - A0^2
    CHECK(focusing_axis_u(0.2, A0) == Catch::Approx(5.0).margin(1e-12));
    auto mid = focusing_exact(0.0, 0.2, A0);
    REQUIRE(mid.converged);
    CHECK(mid.u == Catch::Approx(5.0).margin(1e-7));
    CHECK(mid.w == Catch::Approx(0.0).margin(1e-8));
    // at (0, t_c): u_c = 2 A0^2
    auto crit = focusing_exact(0.0, 0.25, A0);
    REQUIRE(crit.converged);
    CHECK(crit.u == Catch::Approx(8.0).margin(1e-4));
    CHECK(crit.w == Catch::Approx(0.0).margin(1e-6));
    CHECK_FALSE(focusing_exact(0.0, 0.26, A0).converged);
}

TEST_CASE("focusing solution symmetry: u even, w odd") {
    const double A0 = 2.0, t = 0.2;
    std::vector<double> xs;
    for (double x = -3.0; x <= 3.0; x += 0.05) xs.push_back(x);
    auto curve = focusing_curve(xs, t, A0);
    CHECK(curve.failures == 0);
    const std::size_t n = xs.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;
        CHECK(curve.u[i] == Catch::Approx(curve.u[j]).margin(1e-6));
        CHECK(curve.w[i] == Catch::Approx(-curve.w[j]).margin(1e-6));
    }
}

TEST_CASE("hodograph residual with a warm start reaches 1e-12") {
    const double A0 = 2.0, t = 0.2;
    // neighboring solution as the start
    auto prev = focusing_exact(0.09, t, A0);
    REQUIRE(prev.converged);
    auto resid = [&](const std::vector<double>& uv) {
        const double u = uv[0], w = uv[1];
        if (!(u > 0.0)) return 1e12;
        const double r1 = 0.1 - w * t - hodograph::f_u(u, w, A0);
        const double r2 = u * t + hodograph::f_w(u, w, A0);
        return r1 * r1 + r2 * r2;
    };
    auto mr = minimize(resid, {prev.u, prev.w});
    CHECK(std::sqrt(mr.value) < 1e-12);
}
