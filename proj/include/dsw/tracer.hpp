#pragma once

// Asymptotic Fourier analysis: least-squares fits of coefficient decay
// ln|v| ~ A - B*ln k - k*delta, phase fits phi ~ C - alpha*k, shell-spectrum
// fits, analyticity-strip tracking delta(t), critical-time detection and
// singularity classification.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dsw/field.hpp"

namespace dsw {

struct FitWindow {
    double k_min = 10.0;
    double k_max = 0.0;
    double modulus_floor = 1e-10;  // data below this never enter a fit
    // Minimal admissible span (fraction of the window) for a fit to count.
    // With only a sliver of the window above the floor the three-parameter
    // fit is ill-posed and can cross delta = 0 spuriously; 0 disables.
    double min_span_fraction = 0.0;
};

struct FitResult {
    double A = 0.0;
    double B = 0.0;
    double delta = 0.0;  // analyticity-strip half width; negative values reported as-is
    double fit_error = 0.0;  // sup-norm residual over the admissible points
    FitWindow window;
    double time = 0.0;
};

struct PhaseFit {
    double C = 0.0;
    double alpha = 0.0;  // singularity abscissa estimate
};

template <typename T>
struct Fitted {
    std::optional<T> value;
    std::string declined;  // nonempty when no fit was produced
    explicit operator bool() const { return value.has_value(); }
};

namespace detail {

// 3-parameter linear LSQ of y ~ A - B*ln k - delta*k on a centered basis
// (exact for in-family data; centering keeps the normal equations benign).
struct TriFit {
    double A, B, delta, sup_resid;
};

inline std::optional<TriFit> lsq_abd(const std::vector<double>& k, const std::vector<double>& y) {
    const std::size_t n = k.size();
    if (n < 3) return std::nullopt;
    long double mz = 0.0L, ml = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        mz += k[i];
        ml += std::log(k[i]);
    }
    const double kc = double(mz / n), lc = double(ml / n);
    // basis: 1, -(ln k - lc), -(k - kc)
    long double S[3][3] = {}, rhs[3] = {};
    for (std::size_t i = 0; i < n; ++i) {
        const double b1 = 1.0, b2 = -(std::log(k[i]) - lc), b3 = -(k[i] - kc);
        const double bi[3] = {b1, b2, b3};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) S[r][c] += (long double)bi[r] * bi[c];
            rhs[r] += (long double)bi[r] * y[i];
        }
    }
    // Gaussian elimination with partial pivoting on the 3x3 system.
    long double M[3][4];
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) M[r][c] = S[r][c];
        M[r][3] = rhs[r];
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs((double)M[r][col]) > std::abs((double)M[piv][col])) piv = r;
        if (M[piv][col] == 0.0L) return std::nullopt;
        std::swap(M[piv], M[col]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const long double f = M[r][col] / M[col][col];
            for (int c = col; c < 4; ++c) M[r][c] -= f * M[col][c];
        }
    }
    const double Ac = double(M[0][3] / M[0][0]);
    const double B = double(M[1][3] / M[1][1]);
    const double delta = double(M[2][3] / M[2][2]);
    const double A = Ac + B * lc + delta * kc;
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        sup = std::max(sup, std::abs(y[i] - (A - B * std::log(k[i]) - delta * k[i])));
    return TriFit{A, B, delta, sup};
}

}  // namespace detail

constexpr std::size_t kMinFitPoints = 8;

// Fit ln|v| ~ A - B ln k - k delta over admissible points of the window.
inline Fitted<FitResult> fit_log_modulus(const std::vector<double>& k, const std::vector<double>& modulus,
                                         const FitWindow& window, double time = 0.0) {
    std::vector<double> ks, ys;
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (k[i] < window.k_min || k[i] > window.k_max) continue;
        if (!(modulus[i] > window.modulus_floor)) continue;
        ks.push_back(k[i]);
        ys.push_back(std::log(modulus[i]));
    }
    if (ks.size() < kMinFitPoints)
        return {std::nullopt, "fit declined: " + std::to_string(ks.size()) + " admissible points (need >= 8)"};
    if (window.min_span_fraction > 0.0 &&
        ks.back() - window.k_min < window.min_span_fraction * (window.k_max - window.k_min))
        return {std::nullopt, "fit declined: admissible span reaches only k = " + std::to_string(ks.back())};
    auto fit = detail::lsq_abd(ks, ys);
    if (!fit) return {std::nullopt, "fit declined: singular normal equations"};
    return {FitResult{fit->A, fit->B, fit->delta, fit->sup_resid, window, time}, ""};
}

// Remove 2*pi jumps so consecutive differences lie in (-pi, pi]. Zero
// coefficients are excluded; the unwrap continues across the gap.
inline std::pair<std::vector<double>, std::vector<double>> unwrap_phase(const std::vector<double>& k,
                                                                        const std::vector<cplx>& v) {
    std::vector<double> ks, phi;
    double offset = 0.0;
    bool have_prev = false;
    double prev = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (std::abs(v[i]) == 0.0) continue;
        double p = std::arg(v[i]);
        if (have_prev) {
            double d = p + offset - prev;
            while (d > std::numbers::pi) {
                offset -= 2.0 * std::numbers::pi;
                d -= 2.0 * std::numbers::pi;
            }
            while (d <= -std::numbers::pi) {
                offset += 2.0 * std::numbers::pi;
                d += 2.0 * std::numbers::pi;
            }
        }
        prev = p + offset;
        have_prev = true;
        ks.push_back(k[i]);
        phi.push_back(prev);
    }
    return {std::move(ks), std::move(phi)};
}

// Fit phi ~ C - alpha k over the window (phi already unwrapped).
inline Fitted<PhaseFit> fit_phase(const std::vector<double>& k, const std::vector<double>& phi,
                                  const FitWindow& window) {
    std::vector<double> ks, ys;
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (k[i] < window.k_min || k[i] > window.k_max) continue;
        ks.push_back(k[i]);
        ys.push_back(phi[i]);
    }
    if (ks.size() < kMinFitPoints)
        return {std::nullopt, "phase fit declined: " + std::to_string(ks.size()) + " admissible points"};
    const std::size_t n = ks.size();
    long double mk = 0.0L, my = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        mk += ks[i];
        my += ys[i];
    }
    const double kc = double(mk / n), yc = double(my / n);
    long double sxx = 0.0L, sxy = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (long double)(ks[i] - kc) * (ks[i] - kc);
        sxy += (long double)(ks[i] - kc) * (ys[i] - yc);
    }
    if (sxx == 0.0L) return {std::nullopt, "phase fit declined: degenerate abscissae"};
    const double slope = double(sxy / sxx);  // phi ~ yc + slope*(k - kc), alpha = -slope
    return {PhaseFit{yc - slope * kc, -slope}, ""};
}

// Fit ln E(K) with the same three-parameter model against the shell label K.
// The window's modulus_floor applies to E itself (shells with E at or below
// it, including empty shells, are excluded).
inline Fitted<FitResult> fit_energy_spectrum(const std::vector<double>& shells, const FitWindow& window,
                                             double time = 0.0) {
    std::vector<double> ks, moduli;
    for (std::size_t K = 1; K < shells.size(); ++K) {
        ks.push_back(double(K));
        moduli.push_back(shells[K]);
    }
    return fit_log_modulus(ks, moduli, window, time);
}

enum class CriticalMechanism { delta_zero_crossing, delta_below_min_distance };
enum class SingularityClass { cubic_like, sqrt_like, blowup_like, unclassified };

struct CriticalReport {
    bool detected = false;
    double t_c = 0.0;
    CriticalMechanism mechanism = CriticalMechanism::delta_zero_crossing;
    double B_at_tc = 0.0;
    double min_distance = 0.0;  // m = 2*pi*L/N
    SingularityClass classification = SingularityClass::unclassified;
    double min_delta_attained = 0.0;
    std::size_t sample_index = 0;  // detection sample in the series
};

struct DeltaSample {
    double t;
    double delta;
    double B;
};

// First time delta <= 0 (linear interpolation between the bracketing
// samples) or, under the min-distance rule, first sample with delta < m.
inline CriticalReport detect_critical_time(const std::vector<DeltaSample>& series, double m,
                                           CriticalMechanism rule = CriticalMechanism::delta_zero_crossing) {
    CriticalReport rep;
    rep.mechanism = rule;
    rep.min_distance = m;
    if (series.empty()) return rep;
    rep.min_delta_attained = series.front().delta;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        rep.min_delta_attained = std::min(rep.min_delta_attained, s.delta);
        const bool hit = rule == CriticalMechanism::delta_zero_crossing ? s.delta <= 0.0 : s.delta < m;
        if (!hit) continue;
        rep.detected = true;
        rep.sample_index = i;
        rep.B_at_tc = s.B;
        if (rule == CriticalMechanism::delta_zero_crossing && i > 0 && series[i - 1].delta > 0.0 && s.delta < 0.0) {
            const auto& p = series[i - 1];
            rep.t_c = p.t + p.delta * (s.t - p.t) / (p.delta - s.delta);
        } else {
            rep.t_c = s.t;
        }
        return rep;
    }
    return rep;
}

struct ClassificationBands {
    double cubic_lo = 1.15, cubic_hi = 1.45;
    double sqrt_lo = 1.0, sqrt_hi = 1.3;
    double blowup_B_lo = 0.35, blowup_B_hi = 0.65;
    double blowup_error_growth = 2.0;  // fit_error ratio across detection
};

enum class ModelContext { hyperbolic, elliptic, dispersive };

struct SeriesContext {
    std::vector<double> B_history;          // pre-detection samples
    std::vector<double> fit_error_history;  // full series, aligned with samples
    std::size_t detection_index = 0;
    ModelContext context = ModelContext::hyperbolic;
};

// Median of the last max(3, 20%) pre-detection B samples drives the blow-up
// plateau check; overlapping algebraic bands resolve by model context.
inline SingularityClass classify_singularity(double B_at_tc, const SeriesContext& ctx,
                                             const ClassificationBands& bands = {}) {
    // blow-up signature first: B plateau near 1/2 and diverging fit error
    if (!ctx.B_history.empty() && ctx.fit_error_history.size() > ctx.detection_index) {
        const std::size_t n = ctx.B_history.size();
        const std::size_t tail = std::min(n, std::max<std::size_t>(3, n / 5));
        std::vector<double> tailB(ctx.B_history.end() - tail, ctx.B_history.end());
        std::nth_element(tailB.begin(), tailB.begin() + tail / 2, tailB.end());
        const double medB = tailB[tail / 2];
        std::vector<double> pre(ctx.fit_error_history.begin(),
                                ctx.fit_error_history.begin() + ctx.detection_index);
        double post_max = 0.0;
        for (std::size_t i = ctx.detection_index; i < ctx.fit_error_history.size(); ++i)
            post_max = std::max(post_max, ctx.fit_error_history[i]);
        double pre_med = 0.0;
        if (!pre.empty()) {
            std::nth_element(pre.begin(), pre.begin() + pre.size() / 2, pre.end());
            pre_med = pre[pre.size() / 2];
        }
        const bool plateau = medB >= bands.blowup_B_lo && medB <= bands.blowup_B_hi;
        const bool diverged = pre_med > 0.0 && post_max >= bands.blowup_error_growth * pre_med;
        if (plateau && diverged) return SingularityClass::blowup_like;
    }
    const bool in_cubic = B_at_tc >= bands.cubic_lo && B_at_tc <= bands.cubic_hi;
    const bool in_sqrt = B_at_tc > bands.sqrt_lo && B_at_tc <= bands.sqrt_hi;
    if (in_cubic && in_sqrt) return ctx.context == ModelContext::elliptic ? SingularityClass::sqrt_like
                                                                          : SingularityClass::cubic_like;
    if (in_cubic) return SingularityClass::cubic_like;
    if (in_sqrt && ctx.context == ModelContext::elliptic) return SingularityClass::sqrt_like;
    return SingularityClass::unclassified;
}

}  // namespace dsw
