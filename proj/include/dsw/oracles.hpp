#pragma once

// Exact/implicit solutions of the 1+1-dimensional semiclassical cubic NLS
// systems and their critical points, evaluated by derivative-free
// minimization of the squared residual of the implicit equations.
//
// Defocusing: Riemann invariants r+- = w +- 2*sqrt(u), hodograph relations
//   x = -lambda_pm * t + mu_pm(r+, r-).
// Focusing:  x = w t + f_u,  0 = u t + f_w  with f from the complex closed
// form; f_u = Re log((b+s)/sqrt(u)), f_w = -Re s, b = -w/2 + i A0,
// s = sqrt(u + b^2).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dsw {

struct MinimizeOptions {
    double simplex_tol = 1e-14;   // converged when simplex diameter drops below
    double value_tol = 1e-24;     // ... or the residual does
    int max_iterations = 5000;
    double initial_step = 0.05;
};

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Nelder-Mead simplex minimization (reflection/expansion/contraction/shrink).
inline MinimizeResult minimize(const std::function<double(const std::vector<double>&)>& f,
                               std::vector<double> start, const MinimizeOptions& opt = {}) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> simplex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i)
        simplex[i + 1][i] += (start[i] != 0.0 ? opt.initial_step * std::abs(start[i]) : opt.initial_step);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

    MinimizeResult res;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        // order: best first, worst last
        std::vector<std::size_t> ord(n + 1);
        for (std::size_t i = 0; i <= n; ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = ord[0], worst = ord[n], second = ord[n - 1];

        double diam = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t d = 0; d < n; ++d)
                diam = std::max(diam, std::abs(simplex[ord[i]][d] - simplex[best][d]));
        if (diam < opt.simplex_tol || fv[best] < opt.value_tol) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d] / double(n);
        }
        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d)
                p[d] = centroid[d] + coef * (simplex[worst][d] - centroid[d]);
            return p;
        };

        auto refl = blend(-1.0);
        const double fr = f(refl);
        if (fr < fv[best]) {
            auto exp_ = blend(-2.0);
            const double fe = f(exp_);
            if (fe < fr) {
                simplex[worst] = std::move(exp_);
                fv[worst] = fe;
            } else {
                simplex[worst] = std::move(refl);
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            simplex[worst] = std::move(refl);
            fv[worst] = fr;
        } else {
            auto con = blend(fr < fv[worst] ? -0.5 : 0.5);
            const double fc = f(con);
            if (fc < std::min(fr, fv[worst])) {
                simplex[worst] = std::move(con);
                fv[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < n; ++d)
                        simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
                    fv[i] = f(simplex[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    res.x = simplex[best];
    res.value = fv[best];
    res.iterations = it;
    return res;
}

struct DefocusingCritical {
    double r_plus_c, r_minus_c;
    double t_c;
    double x_c;
    double A0;
};

struct FocusingCritical {
    double u_c;  // 2*A0^2 (double root of the axis relation u*t = sqrt(u - A0^2))
    double w_c = 0.0;
    double x_c = 0.0;
    double t_c;
    double A0;
};

namespace hodograph {

inline double lambda_plus(double rp, double rm) { return -0.25 * (3.0 * rp + rm); }
inline double lambda_minus(double rp, double rm) { return -0.25 * (rp + 3.0 * rm); }

// mu_pm on the closed domain |r_pm| <= 2 A0, r+ > r-. Out-of-range square
// root arguments are clamped and reported through `violation` so a residual
// stays smooth across the boundary (the initial peak sits exactly on it).
inline double mu(double rp, double rm, double A0, int sign, double* violation = nullptr) {
    const double a = 2.0 * A0;
    auto root = [&](double arg) {
        if (arg >= 0.0) return std::sqrt(arg);
        if (violation) *violation += -arg;
        return 0.0;
    };
    double sep = rp - rm;
    if (sep <= 0.0) {
        if (violation) *violation += 1.0 - sep;
        sep = 1e-300;
    }
    const double s1 = root(a + rp) + root(a + rm);
    const double s2 = root(a - rp) + root(a - rm);
    const double core = -std::log(std::max(s1, 1e-300)) - std::log(std::max(s2, 1e-300)) + std::log(sep);
    const double diff = root((a + rp) * (a + rm)) - root((a - rp) * (a - rm));
    return core + sign * diff / sep;
}

inline std::complex<double> fcn_b(double w, double A0) { return {-0.5 * w, A0}; }

inline double f_value(double u, double w, double A0) {
    const std::complex<double> b = fcn_b(w, A0);
    const std::complex<double> s = std::sqrt(u + b * b);
    return std::real(b * s + u * std::log((b + s) / std::sqrt(u)));
}

inline double f_u(double u, double w, double A0) {
    const std::complex<double> b = fcn_b(w, A0);
    const std::complex<double> s = std::sqrt(u + b * b);
    return std::real(std::log((b + s) / std::sqrt(u)));
}

inline double f_w(double u, double w, double A0) {
    const std::complex<double> b = fcn_b(w, A0);
    return -std::real(std::sqrt(u + b * b));
}

}  // namespace hodograph

inline DefocusingCritical critical_defocusing(double A0) {
    const double s33 = std::sqrt(33.0);
    const double root = std::sqrt(2.0 * s33 + 6.0);
    DefocusingCritical c;
    c.A0 = A0;
    c.r_plus_c = A0 / 3.0 * (6.0 - s33) * root;
    c.r_minus_c = -A0 / 3.0 * root;
    c.t_c = 3.0 * std::sqrt(2.0) / (32.0 * A0) * std::sqrt(69.0 + 11.0 * s33);
    c.x_c = -hodograph::lambda_plus(c.r_plus_c, c.r_minus_c) * c.t_c +
            hodograph::mu(c.r_plus_c, c.r_minus_c, A0, +1);
    return c;
}

inline FocusingCritical critical_focusing(double A0) {
    FocusingCritical c;
    c.A0 = A0;
    c.u_c = 2.0 * A0 * A0;
    c.t_c = 1.0 / (2.0 * A0);
    return c;
}

struct OraclePoint {
    double u = 0.0, w = 0.0;
    double residual = 0.0;
    bool converged = false;
    std::string declined;
};

namespace detail_oracle {

constexpr double kPenalty = 1e12;
constexpr double kTailU = 1e-13;  // below this the state is initial data to roundoff

// fminsearch-style restarts: rebuild the simplex around the best point with a
// shrinking initial step until the residual target is met.
inline MinimizeResult robust_minimize(const std::function<double(const std::vector<double>&)>& f,
                                      std::vector<double> start, MinimizeOptions opt) {
    MinimizeResult best = minimize(f, std::move(start), opt);
    for (int round = 0; round < 4 && best.value > opt.value_tol; ++round) {
        opt.initial_step *= 0.1;
        auto r = minimize(f, best.x, opt);
        if (r.value < best.value) best = r;
    }
    return best;
}

inline OraclePoint solve_defocusing_left(double x, double t, double A0, std::array<double, 2> start,
                                         const MinimizeOptions& opt) {
    auto resid = [&](const std::vector<double>& rv) {
        const double rp = rv[0], rm = rv[1];
        double violation = 0.0;
        const double r1 = x + hodograph::lambda_plus(rp, rm) * t - hodograph::mu(rp, rm, A0, +1, &violation);
        const double r2 = x + hodograph::lambda_minus(rp, rm) * t - hodograph::mu(rp, rm, A0, -1, &violation);
        return r1 * r1 + r2 * r2 + 1e6 * violation * violation;
    };
    auto mr = robust_minimize(resid, {start[0], start[1]}, opt);
    OraclePoint p;
    p.residual = std::sqrt(std::max(0.0, mr.value));
    p.converged = p.residual < 1e-10;
    const double rp = mr.x[0], rm = mr.x[1];
    p.u = 0.0625 * (rp - rm) * (rp - rm);  // ((r+ - r-)/4)^2
    p.w = 0.5 * (rp + rm);
    if (!p.converged) p.declined = "defocusing oracle: nonconvergence, residual " + std::to_string(p.residual);
    return p;
}

// The minus-family characteristic through (x, t), x <= 0, started near
// x - (w - sqrt(u)) t. A positive origin means it crossed over from the
// mirrored flank, where the printed hodograph relations no longer describe
// the physical branch; such points are declined.
inline bool crossed_from_mirror(double x, double t, double u, double w) {
    return x - (w - std::sqrt(std::max(u, 0.0))) * t + 0.35 * std::min(t, 1.0) > 0.0;
}

inline OraclePoint solve_focusing_right(double x, double t, double A0, std::array<double, 2> start,
                                        const MinimizeOptions& opt) {
    auto resid = [&](const std::vector<double>& uv) {
        const double u = uv[0], w = uv[1];
        if (!(u > 0.0)) return kPenalty * (1.0 + u * u);
        const double r1 = x - w * t - hodograph::f_u(u, w, A0);
        const double r2 = u * t + hodograph::f_w(u, w, A0);
        return r1 * r1 + r2 * r2;
    };
    auto mr = robust_minimize(resid, {start[0], start[1]}, opt);
    OraclePoint p;
    p.residual = std::sqrt(std::max(0.0, mr.value));
    p.converged = p.residual < 1e-10;
    p.u = mr.x[0];
    p.w = mr.x[1];
    if (!p.converged) p.declined = "focusing oracle: nonconvergence, residual " + std::to_string(p.residual);
    return p;
}

}  // namespace detail_oracle

// Initial-data profile u0 = A0^2 sech^2 x, w0 = 0 for both families.
inline double sech2_data(double x, double A0) {
    const double s = 1.0 / std::cosh(x);
    return A0 * A0 * s * s;
}

// u(0, t) on the focusing axis: the minus branch of u^2 t^2 = u - A0^2.
inline double focusing_axis_u(double t, double A0) {
    if (t <= 0.0) return A0 * A0;
    const double disc = 1.0 - 4.0 * A0 * A0 * t * t;
    if (disc < 0.0) return 2.0 * A0 * A0;
    return (1.0 - std::sqrt(disc)) / (2.0 * t * t);
}

namespace detail_oracle {

// evaluation on the x <= 0 half; points whose minus characteristic crossed
// the axis are declined (the relations only cover the single-flank region)
inline OraclePoint defocusing_left_point(double xl, double t, double A0, std::array<double, 2> warmA,
                                         const MinimizeOptions& opt) {
    auto p = solve_defocusing_left(xl, t, A0, warmA, opt);
    if (p.converged && crossed_from_mirror(xl, t, p.u, p.w)) {
        p.converged = false;
        p.declined = "defocusing oracle: outside the single-flank hodograph region";
    }
    return p;
}

}  // namespace detail_oracle

// Point evaluation. Defocusing data are even in x with odd w; the implicit
// relations cover the x <= 0 half, so x > 0 is evaluated by mirror symmetry.
// Robustness comes from continuation: the solve walks inward from the far
// field (where the state is still the initial data) to the requested point.
inline OraclePoint defocusing_exact(double x, double t, double A0, const MinimizeOptions& opt = {}) {
    const DefocusingCritical crit = critical_defocusing(A0);
    if (t > crit.t_c) {
        OraclePoint p;
        p.declined = "defocusing oracle: t exceeds t_c (multivalued region)";
        return p;
    }
    const bool mirror = x > 0.0;
    const double xs = mirror ? -x : x;
    if (sech2_data(xs, A0) < detail_oracle::kTailU) {
        OraclePoint p;
        p.u = sech2_data(xs, A0);
        p.w = 0.0;
        p.converged = true;
        return p;
    }
    const double x_far = std::min(xs - 0.5, -6.0 / std::max(A0, 1e-6));
    std::array<double, 2> warm{2.0 * A0 / std::cosh(x_far), -2.0 * A0 / std::cosh(x_far)};
    OraclePoint p;
    const int steps = 48;
    for (int i = steps; i >= 0; --i) {
        const double xi = xs + (x_far - xs) * double(i) / double(steps);
        p = detail_oracle::solve_defocusing_left(xi, t, A0, warm, opt);
        if (p.converged) {
            const double su = 2.0 * std::sqrt(std::max(p.u, 0.0));
            warm = {p.w + su, p.w - su};
        }
    }
    if (p.converged && detail_oracle::crossed_from_mirror(xs, t, p.u, p.w)) {
        p.converged = false;
        p.declined = "defocusing oracle: outside the single-flank hodograph region";
    }
    if (mirror) p.w = -p.w;
    return p;
}

inline OraclePoint focusing_exact(double x, double t, double A0, const MinimizeOptions& opt = {}) {
    if (t > 1.0 / (2.0 * A0)) {
        OraclePoint p;
        p.declined = "focusing oracle: t exceeds t_c";
        return p;
    }
    const bool mirror = x < 0.0;
    const double xs = mirror ? -x : x;
    if (sech2_data(xs, A0) < detail_oracle::kTailU) {
        OraclePoint p;
        p.u = sech2_data(xs, A0);
        p.w = 0.0;
        p.converged = true;
        return p;
    }
    auto p = detail_oracle::solve_focusing_right(xs, t, A0, {std::max(focusing_axis_u(t, A0), sech2_data(xs, A0)), 0.0}, opt);
    if (mirror) p.w = -p.w;
    return p;
}

struct OracleCurve {
    std::vector<double> x, u, w;
    std::vector<unsigned char> valid;  // point is certified (converged, on-branch)
    std::size_t failures = 0;          // convergence failures among attempted points
};

// Curve evaluation with warm starts: walk outward from the symmetry axis so
// each solve starts from the neighboring solution.
inline OracleCurve defocusing_curve(const std::vector<double>& xs, double t, double A0,
                                    const MinimizeOptions& opt = {}) {
    OracleCurve c;
    c.x = xs;
    c.u.assign(xs.size(), 0.0);
    c.w.assign(xs.size(), 0.0);
    c.valid.assign(xs.size(), 0);
    if (t > critical_defocusing(A0).t_c) {
        c.failures = xs.size();
        return c;
    }

    // evaluate the left half once per distinct |x|, marching inward from the
    // tails so every solve starts from its outer neighbor; x > 0 mirrors w
    std::vector<double> mags;
    mags.reserve(xs.size());
    for (double x : xs) mags.push_back(std::abs(x));
    std::vector<std::size_t> order(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mags[a] > mags[b]; });

    std::array<double, 2> warm{0.0, 0.0};
    bool have_warm = false;
    bool inside_crossover = false;
    double last_mag = -1.0;
    double cached_u = 0.0, cached_w = 0.0;
    unsigned char cached_valid = 0;
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const std::size_t i = order[oi];
        const double X = mags[i];
        if (X == last_mag) {
            c.u[i] = cached_u;
            c.w[i] = xs[i] > 0.0 ? -cached_w : cached_w;
            c.valid[i] = cached_valid;
            continue;
        }
        last_mag = X;
        const double xl = -X;
        if (sech2_data(xl, A0) < detail_oracle::kTailU) {
            cached_u = sech2_data(xl, A0);
            cached_w = 0.0;
            cached_valid = 1;
        } else if (inside_crossover) {
            cached_u = 0.0;
            cached_w = 0.0;
            cached_valid = 0;
        } else {
            if (!have_warm) {
                const double q = 2.0 * A0 / std::cosh(xl);
                warm = {q, -q};
            }
            auto p = detail_oracle::solve_defocusing_left(xl, t, A0, warm, opt);
            if (p.converged) {
                const double su = 2.0 * std::sqrt(std::max(p.u, 0.0));
                warm = {p.w + su, p.w - su};
                have_warm = true;
                if (detail_oracle::crossed_from_mirror(xl, t, p.u, p.w)) {
                    inside_crossover = true;
                    cached_u = 0.0;
                    cached_w = 0.0;
                    cached_valid = 0;
                } else {
                    cached_u = p.u;
                    cached_w = p.w;
                    cached_valid = 1;
                }
            } else {
                ++c.failures;
                cached_u = p.u;
                cached_w = p.w;
                cached_valid = 0;
            }
        }
        c.u[i] = cached_u;
        c.w[i] = xs[i] > 0.0 ? -cached_w : cached_w;
        c.valid[i] = cached_valid;
    }
    return c;
}

inline OracleCurve focusing_curve(const std::vector<double>& xs, double t, double A0,
                                  const MinimizeOptions& opt = {}) {
    OracleCurve c;
    c.x = xs;
    c.u.resize(xs.size());
    c.w.resize(xs.size());
    c.valid.assign(xs.size(), 1);
    std::vector<std::size_t> order(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::abs(xs[a]) < std::abs(xs[b]); });
    std::array<double, 2> warm_l{focusing_axis_u(t, A0), 0.0}, warm_r = warm_l;
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const std::size_t i = order[oi];
        const double x = xs[i];
        const bool mirror = x < 0.0;
        const double xr = mirror ? -x : x;
        if (sech2_data(xr, A0) < detail_oracle::kTailU) {
            c.u[i] = sech2_data(xr, A0);
            c.w[i] = 0.0;
            continue;
        }
        auto& warm_side = mirror ? warm_l : warm_r;
        auto p = detail_oracle::solve_focusing_right(xr, t, A0, warm_side, opt);
        if (!p.converged) {
            ++c.failures;
            c.valid[i] = 0;
        }
        warm_side = {std::max(p.u, 1e-12), p.w};
        c.u[i] = p.u;
        c.w[i] = mirror ? -p.w : p.w;
    }
    return c;
}

}  // namespace dsw
