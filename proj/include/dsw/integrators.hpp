#pragma once

// Time integration: classical RK4 for the dispersionless systems and a
// composite Runge-Kutta scheme for the stiff dispersive ones.
//
// The composite step partitions Fourier modes into slow (S) and fast (F)
// sets. The linear term on S plus the nonlinear term advance through the
// classical RK4 stages; the linear term on F is handled by a linearly
// implicit third-order DIRK companion sharing the stage abscissae
// c = [0, 1/2, 1/2, 1] and the weights b = [1/6, 1/3, 1/3, 1/6]:
//
//     0    |  0
//     1/2  |  1/2-g   g
//     1/2  |  p       q       g
//     1    |  r       0       t       g
//
// g is the L-stable SDIRK root of g^3 - 3g^2 + 3g/2 - 1/6; p is fixed by
// b^T A c = 1/6 together with vanishing z^3 and z^4 numerator coefficients
// of the stability function R(z). The companion is then L-stable with
// |R(iy)| <= 1 for every real y. With an empty fast set the step reduces
// exactly to classical RK4.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>

#include "dsw/record.hpp"

namespace dsw {

enum class Scheme { RK4, DCRK };

struct StepperConfig {
    double dt = 1e-3;
    Scheme scheme = Scheme::RK4;
    // |k| cutoff above which modes are fast; nullopt = automatic rule
    // |L(k)|*dt > 1; infinity = everything slow (plain RK4 on the split).
    std::optional<double> frequency_split_threshold;
    int snapshot_stride = 10;
    double krasny_threshold = 1e-14;
    bool krasny_enabled = true;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("StepperConfig: dt must be positive");
        if (frequency_split_threshold && *frequency_split_threshold < 0.0)
            throw std::invalid_argument("StepperConfig: threshold must be nonnegative");
        if (snapshot_stride <= 0)
            throw std::invalid_argument("StepperConfig: snapshot_stride must be positive");
    }
};

using FourierState = std::vector<cvec>;
using RhsFn = std::function<FourierState(const FourierState&)>;

namespace detail_step {

inline FourierState axpy(const FourierState& base, double a, const FourierState& dir) {
    FourierState out = base;
    for (std::size_t f = 0; f < out.size(); ++f)
        for (std::size_t i = 0; i < out[f].size(); ++i) out[f][i] += a * dir[f][i];
    return out;
}

}  // namespace detail_step

// One classical RK4 step; optional Krasny filtering of the result.
inline FourierState rk4_step(const FourierState& s, const RhsFn& rhs, double dt,
                             std::optional<double> krasny = std::nullopt) {
    using detail_step::axpy;
    FourierState k1 = rhs(s);
    FourierState k2 = rhs(axpy(s, 0.5 * dt, k1));
    FourierState k3 = rhs(axpy(s, 0.5 * dt, k2));
    FourierState k4 = rhs(axpy(s, dt, k3));
    FourierState out = s;
    const double c = dt / 6.0;
    for (std::size_t f = 0; f < out.size(); ++f)
        for (std::size_t i = 0; i < out[f].size(); ++i)
            out[f][i] += c * (k1[f][i] + 2.0 * k2[f][i] + 2.0 * k3[f][i] + k4[f][i]);
    if (krasny)
        for (auto& v : out) krasny_filter_inplace(v, *krasny);
    return out;
}

namespace dcrk {

constexpr double g = 0.43586652150845900;     // root of g^3 - 3g^2 + 3g/2 - 1/6
constexpr double a21 = 0.5 - g;
constexpr double a31 = -0.26251554008631268;  // p
constexpr double a32 = 0.32664901857785368;   // q = 1/2 - g - p
constexpr double a41 = 1.83263064469800236;   // r = 3g - 2p
constexpr double a42 = 0.0;                   // s
constexpr double a43 = -1.26849716620646136;  // t = 1 - g - r - s

// Stability function of the implicit companion on y' = z y.
inline cplx stability(cplx z) {
    const cplx d = 1.0 / (1.0 - g * z);
    const cplx g1 = 1.0;
    const cplx g2 = (1.0 + a21 * z) * d;
    const cplx g3 = (1.0 + z * (a31 * g1 + a32 * g2)) * d;
    const cplx g4 = (1.0 + z * (a41 * g1 + a42 * g2 + a43 * g3)) * d;
    return 1.0 + z * (g1 / 6.0 + g2 / 3.0 + g3 / 3.0 + g4 / 6.0);
}

}  // namespace dcrk

// Fast-set mask per mode: explicit |k| cutoff when given, else |L(k)|*dt > 1.
inline std::vector<unsigned char> dcrk_fast_mask(const PeriodicGrid& grid, const std::vector<cplx>& linear,
                                                 double dt, std::optional<double> threshold) {
    std::vector<unsigned char> fast(linear.size(), 0);
    if (threshold && std::isinf(*threshold)) return fast;
    for (std::size_t ix = 0; ix < grid.n[0]; ++ix) {
        const double kx = grid.wavenumber(0, ix);
        for (std::size_t iy = 0; iy < grid.n[1]; ++iy) {
            const std::size_t id = grid.index(ix, iy);
            if (threshold) {
                const double ky = grid.dims == 2 ? grid.wavenumber(1, iy) : 0.0;
                fast[id] = std::sqrt(kx * kx + ky * ky) > *threshold;
            } else {
                fast[id] = std::abs(linear[id]) * dt > 1.0;
            }
        }
    }
    return fast;
}

// One composite step on a single-field Fourier state. The stage solves are
// diagonal in Fourier space, hence a pointwise division.
inline cvec dcrk_step(const cvec& v, const std::vector<cplx>& linear,
                      const std::function<cvec(const cvec&)>& nonlinear, double dt,
                      const std::vector<unsigned char>& fast,
                      std::optional<double> krasny = std::nullopt) {
    const std::size_t n = v.size();
    auto F = [&](const cvec& stage) {
        cvec out = nonlinear(stage);
        for (std::size_t i = 0; i < n; ++i)
            if (!fast[i]) out[i] += linear[i] * stage[i];
        return out;
    };
    auto lam = [&](std::size_t i) { return fast[i] ? linear[i] : cplx{0.0, 0.0}; };

    const cvec F1 = F(v);
    cvec G2(n);
    for (std::size_t i = 0; i < n; ++i)
        G2[i] = (v[i] + dt * (0.5 * F1[i] + dcrk::a21 * lam(i) * v[i])) / (1.0 - dt * dcrk::g * lam(i));
    const cvec F2 = F(G2);
    cvec G3(n);
    for (std::size_t i = 0; i < n; ++i)
        G3[i] = (v[i] + dt * (0.5 * F2[i] + lam(i) * (dcrk::a31 * v[i] + dcrk::a32 * G2[i]))) /
                (1.0 - dt * dcrk::g * lam(i));
    const cvec F3 = F(G3);
    cvec G4(n);
    for (std::size_t i = 0; i < n; ++i)
        G4[i] = (v[i] + dt * (F3[i] + lam(i) * (dcrk::a41 * v[i] + dcrk::a42 * G2[i] + dcrk::a43 * G3[i]))) /
                (1.0 - dt * dcrk::g * lam(i));
    const cvec F4 = F(G4);

    cvec out = v;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx lin = lam(i);
        out[i] += dt *
                  ((F1[i] + 2.0 * F2[i] + 2.0 * F3[i] + F4[i]) +
                   lin * (v[i] + 2.0 * G2[i] + 2.0 * G3[i] + G4[i])) /
                  6.0;
    }
    if (krasny) krasny_filter_inplace(out, *krasny);
    return out;
}

// ---- evolution driver ----------------------------------------------------

enum class StopRuleKind { t_max, delta_zero, delta_below_m };
enum class StopSeries { fit1d, fit2d, both };

struct EvolveOptions {
    double t_max = 0.0;
    StepperConfig stepper;
    QuinticConvention quintic_convention = QuinticConvention::half;

    std::vector<FitWindow> windows_1d;  // fits of field 0 along the positive k_x axis
    bool fit_2d = false;
    FitWindow window_2d;

    StopRuleKind stop = StopRuleKind::t_max;
    StopSeries stop_series = StopSeries::fit1d;
    int stop_margin_samples = 2;  // extra samples recorded past the trigger

    bool sample_center = false;   // per-step |field0| at (center_x, center_y)
    double center_x = 0.0, center_y = 0.0;

    std::vector<double> snapshot_times;  // states captured at the nearest sample
};

namespace detail_evolve {

inline std::string window_id_1d(std::size_t i) { return "1d:w" + std::to_string(i); }

inline bool probe_finite(const FourierState& s) {
    for (const auto& f : s) {
        if (f.empty()) continue;
        const cplx a = f[0], b = f[f.size() / 2];
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()) || !std::isfinite(b.real()) ||
            !std::isfinite(b.imag()))
            return false;
    }
    return true;
}

// Point value from Fourier coefficients: sum of v(k) e^{i k x_c}.
inline double center_value(const cvec& v, const PeriodicGrid& g, double xc, double yc) {
    if (xc == 0.0 && yc == 0.0) {
        cplx s{0.0, 0.0};
        for (const auto& z : v) s += z;
        return std::abs(s);
    }
    cplx s{0.0, 0.0};
    std::vector<cplx> py(g.n[1], cplx{1.0, 0.0});
    if (g.dims == 2)
        for (std::size_t iy = 0; iy < g.n[1]; ++iy) py[iy] = std::polar(1.0, g.wavenumber(1, iy) * yc);
    for (std::size_t ix = 0; ix < g.n[0]; ++ix) {
        const cplx px = std::polar(1.0, g.wavenumber(0, ix) * xc);
        cplx row{0.0, 0.0};
        for (std::size_t iy = 0; iy < g.n[1]; ++iy) row += v[g.index(ix, iy)] * py[iy];
        s += px * row;
    }
    return std::abs(s);
}

inline ModelState to_physical_state(ModelKind model, const PeriodicGrid& g, const FourierState& s,
                                    double t) {
    ModelState out(model, g, Space::physical);
    out.time = t;
    for (std::size_t i = 0; i < s.size(); ++i) {
        out.fields[i].values = s[i];
        transform_inplace(out.fields[i].values, g, Direction::inverse);
    }
    return out;
}

}  // namespace detail_evolve

inline ExperimentRecord evolve(const ModelState& initial, const ModelParams& params,
                               const EvolveOptions& opt) {
    opt.stepper.validate();
    params.validate();
    const auto wall0 = std::chrono::steady_clock::now();
    const PeriodicGrid g = initial.grid();

    ExperimentRecord rec;
    rec.model = initial.model;
    rec.params = params;

    FourierState state;
    for (const auto& f : initial.fields) {
        cvec v = f.values;
        if (f.space == Space::physical) transform_inplace(v, g, Direction::forward);
        state.push_back(std::move(v));
    }

    const bool dispersive = !is_semiclassical(initial.model);
    Scheme scheme = opt.stepper.scheme;
    if (!dispersive && scheme == Scheme::DCRK)
        throw std::invalid_argument("evolve: DCRK requires a dispersive (split) model");

    Splitting split;
    std::vector<unsigned char> fast;
    RhsFn rhs_full;
    if (dispersive) {
        split = initial.model == ModelKind::DSII
                    ? split_dsii(params, g)
                    : split_quintic_nls(params, g, opt.quintic_convention);
        if (scheme == Scheme::DCRK)
            fast = dcrk_fast_mask(g, split.linear, opt.stepper.dt, opt.stepper.frequency_split_threshold);
        rhs_full = [&split](const FourierState& s) { return rhs_fourier_split(split, s); };
    } else {
        const ModelKind model = initial.model;
        rhs_full = [model, &params, &g](const FourierState& s) {
            return rhs_fourier(model, params, g, s);
        };
    }

    const std::optional<double> krasny =
        opt.stepper.krasny_enabled ? std::optional<double>(opt.stepper.krasny_threshold) : std::nullopt;
    const double m = g.min_fourier_distance(0);

    std::vector<double> snap_times = opt.snapshot_times;
    std::sort(snap_times.begin(), snap_times.end());

    double E0 = 0.0;
    bool have_E0 = false;
    bool triggered = false;
    int margin_left = 0;
    ModelState last_good = initial;

    auto do_sample = [&](double t) {
        if (!all_finite(state[0])) return false;
        ModelState cur(initial.model, g, Space::fourier);
        cur.time = t;
        for (std::size_t i = 0; i < state.size(); ++i) cur.fields[i].values = state[i];
        auto cons = conserved_quantities(cur, params, opt.quintic_convention);
        if (!have_E0) {
            E0 = cons.E();
            have_E0 = true;
        }
        rec.conserved.push_back({t, cons.N(), cons.E(), relative_energy_drift(E0, cons.E()).value});

        auto [ks, vs] = positive_axis_slice(state[0], g);
        std::vector<double> mods(vs.size());
        for (std::size_t i = 0; i < vs.size(); ++i) mods[i] = std::abs(vs[i]);
        for (std::size_t wi = 0; wi < opt.windows_1d.size(); ++wi) {
            auto fr = fit_log_modulus(ks, mods, opt.windows_1d[wi], t);
            std::optional<double> alpha;
            if (wi == 0 && fr) {
                auto [ku, phi] = unwrap_phase(ks, vs);
                auto pf = fit_phase(ku, phi, opt.windows_1d[wi]);
                if (pf) alpha = pf.value->alpha;
            }
            rec.fits[detail_evolve::window_id_1d(wi)].push_back(
                {t, fr ? std::optional<FitResult>(*fr.value) : std::nullopt, alpha});
        }
        if (opt.fit_2d) {
            auto shells = angle_averaged_spectrum(state[0], g);
            auto fr = fit_energy_spectrum(shells, opt.window_2d, t);
            rec.fits["2d"].push_back({t, fr ? std::optional<FitResult>(*fr.value) : std::nullopt, std::nullopt});
        }

        last_good = detail_evolve::to_physical_state(initial.model, g, state, t);
        while (!snap_times.empty() && t >= snap_times.front() - 1e-12) {
            rec.snapshots.emplace_back(t, last_good);
            snap_times.erase(snap_times.begin());
        }

        if (opt.stop != StopRuleKind::t_max && !triggered) {
            auto crossed = [&](const std::string& id) {
                auto it = rec.fits.find(id);
                if (it == rec.fits.end() || it->second.empty() || !it->second.back().fit) return false;
                const double d = it->second.back().fit->delta;
                return opt.stop == StopRuleKind::delta_zero ? d <= 0.0 : d < m;
            };
            bool hit = false;
            if (opt.stop_series == StopSeries::fit1d)
                hit = crossed(detail_evolve::window_id_1d(0));
            else if (opt.stop_series == StopSeries::fit2d)
                hit = crossed("2d");
            else
                hit = crossed(detail_evolve::window_id_1d(0)) && crossed("2d");
            if (hit) {
                triggered = true;
                margin_left = opt.stop_margin_samples;
                return margin_left > 0;
            }
        } else if (triggered) {
            if (--margin_left <= 0) return false;
        }
        return true;
    };

    const double dt = opt.stepper.dt;
    double t = initial.time;
    long step = 0;
    bool keep_going = do_sample(t);
    if (opt.sample_center)
        rec.center.push_back({t, detail_evolve::center_value(state[0], g, opt.center_x, opt.center_y)});

    while (keep_going && t < opt.t_max - 1e-14) {
        double h = std::min(dt, opt.t_max - t);
        bool landed_snapshot = false;
        if (!snap_times.empty() && snap_times.front() > t + 1e-14 &&
            snap_times.front() - t <= h + 1e-14) {
            h = snap_times.front() - t;  // land exactly on the requested time
            landed_snapshot = true;
        }
        if (scheme == Scheme::RK4) {
            state = rk4_step(state, rhs_full, h, krasny);
        } else {
            state[0] = dcrk_step(state[0], split.linear, split.nonlinear, h, fast, krasny);
        }
        t += h;
        ++step;
        if (!detail_evolve::probe_finite(state)) {
            rec.aborted = true;
            rec.abort_reason = "non-finite values at t=" + std::to_string(t) +
                               " (blow-up or instability reached)";
            break;
        }
        if (opt.sample_center)
            rec.center.push_back({t, detail_evolve::center_value(state[0], g, opt.center_x, opt.center_y)});
        if (step % opt.stepper.snapshot_stride == 0 || t >= opt.t_max - 1e-14 || landed_snapshot) {
            if (!all_finite(state[0])) {
                rec.aborted = true;
                rec.abort_reason = "non-finite values at t=" + std::to_string(t) +
                                   " (blow-up or instability reached)";
                break;
            }
            keep_going = do_sample(t);
        }
    }

    if (triggered && !rec.aborted) {
        rec.abort_reason = opt.stop == StopRuleKind::delta_zero ? "stopped: delta reached zero"
                                                                : "stopped: delta below minimal distance";
    }
    rec.t_final = t;
    rec.steps = step;
    rec.final_state = rec.aborted ? last_good : detail_evolve::to_physical_state(initial.model, g, state, t);
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    return rec;
}

}  // namespace dsw
