#pragma once

// Right-hand sides, linear/nonlinear splittings and conserved quantities for
// the four systems:
//   SemiclassicalNLS1D:  u_t = -(u w)_x,  w_t = -w w_x - (rho/sigma) (u^sigma)_x
//   SemiclassicalDSII:   S_t = -S_x^2 + S_y^2 - 2 rho Dp^-1 Dm (u)
//                        u_t = -2 (S_x u)_x + 2 (S_y u)_y
//   DSII:                i eps Psi_t + eps^2 Dm Psi - 2 rho (Dp^-1 Dm |Psi|^2) Psi = 0
//   QuinticNLS1D (half): i eps Psi_t + (eps^2/2) Psi_xx + (1/2) |Psi|^4 Psi = 0
//                (unit): i eps Psi_t +  eps^2    Psi_xx +       |Psi|^4 Psi = 0
//
// The canonical RHS path works on Fourier-space states (products evaluated
// pseudospectrally); physical-space wrappers sit on top.

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsw/symbols.hpp"

namespace dsw {

enum class ModelKind { SemiclassicalNLS1D, SemiclassicalDSII, DSII, QuinticNLS1D };

enum class QuinticConvention { half, unit };

struct ModelParams {
    double epsilon = 1.0;
    int rho = +1;  // +1 defocusing, -1 focusing
    double sigma = 1.0;
    double A0 = 1.0;

    void validate() const {
        if (!(epsilon > 0.0)) throw std::invalid_argument("ModelParams: epsilon must be positive");
        if (rho != 1 && rho != -1) throw std::invalid_argument("ModelParams: rho must be +1 or -1");
        if (!(sigma > 0.0)) throw std::invalid_argument("ModelParams: sigma must be positive");
    }
};

inline int field_count(ModelKind m) {
    return (m == ModelKind::SemiclassicalNLS1D || m == ModelKind::SemiclassicalDSII) ? 2 : 1;
}

inline bool is_semiclassical(ModelKind m) {
    return m == ModelKind::SemiclassicalNLS1D || m == ModelKind::SemiclassicalDSII;
}

inline int model_dims(ModelKind m) {
    return (m == ModelKind::SemiclassicalDSII || m == ModelKind::DSII) ? 2 : 1;
}

inline std::string model_name(ModelKind m) {
    switch (m) {
        case ModelKind::SemiclassicalNLS1D: return "semiclassical_nls_1d";
        case ModelKind::SemiclassicalDSII: return "semiclassical_dsii";
        case ModelKind::DSII: return "dsii";
        case ModelKind::QuinticNLS1D: return "quintic_nls_1d";
    }
    return "?";
}

// Named collection of fields for one system: (u,w), (u,S) or a single Psi.
// All members share one grid and one space tag.
struct ModelState {
    ModelKind model = ModelKind::DSII;
    std::vector<Field> fields;
    double time = 0.0;

    ModelState() = default;
    ModelState(ModelKind m, const PeriodicGrid& g, Space s) : model(m) {
        if (g.dims != model_dims(m)) throw std::invalid_argument("ModelState: grid/model dims mismatch");
        fields.assign(std::size_t(field_count(m)), Field(g, s));
    }

    const PeriodicGrid& grid() const { return fields.at(0).grid; }
    Space space() const { return fields.at(0).space; }

    Field& u() { return fields.at(0); }
    const Field& u() const { return fields.at(0); }
    Field& w() { return fields.at(1); }  // also S for SemiclassicalDSII
    const Field& w() const { return fields.at(1); }
    Field& psi() { return fields.at(0); }
    const Field& psi() const { return fields.at(0); }
};

namespace detail_models {

inline cvec forward(cvec v, const PeriodicGrid& g) {
    transform_inplace(v, g, Direction::forward);
    return v;
}

inline cvec inverse(cvec v, const PeriodicGrid& g) {
    transform_inplace(v, g, Direction::inverse);
    return v;
}

inline void take_real(cvec& v) {
    for (auto& z : v) z = cplx{z.real(), 0.0};
}

// u^s for the pressure/energy terms. Integer exponents are evaluated exactly
// so (unphysical) negative excursions of u propagate instead of NaN-ing.
inline double upow(double u, double s) {
    if (s == 1.0) return u;
    if (s == 2.0) return u * u;
    if (s == 3.0) return u * u * u;
    return u <= 0.0 ? 0.0 : std::pow(u, s);
}

}  // namespace detail_models

// Canonical tendency on Fourier-space state vectors (one cvec per field).
// Real-valued models evaluate their products on the real parts, which keeps
// roundoff off the imaginary axis.
inline const std::vector<double>& cached_symbol_table(const PeriodicGrid& g, SymbolKind s) {
    thread_local std::map<std::pair<int, std::size_t>, std::pair<PeriodicGrid, std::vector<double>>> cache;
    auto key = std::make_pair(int(s), g.size());
    auto it = cache.find(key);
    if (it != cache.end() && it->second.first == g) return it->second.second;
    auto& slot = cache[key];
    slot.first = g;
    slot.second = symbol_table(g, s);
    return slot.second;
}

inline std::vector<cvec> rhs_fourier(ModelKind model, const ModelParams& p, const PeriodicGrid& g,
                                     const std::vector<cvec>& vhat) {
    using detail_models::forward;
    using detail_models::inverse;
    p.validate();
    const std::size_t n = g.size();
    switch (model) {
        case ModelKind::SemiclassicalNLS1D: {
            cvec u = inverse(vhat[0], g), w = inverse(vhat[1], g);
            cvec uw(n), pressure(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double ur = u[i].real(), wr = w[i].real();
                uw[i] = ur * wr;
                // (rho/sigma) u^sigma + w^2/2, differentiated below
                pressure[i] = (p.rho / p.sigma) * detail_models::upow(ur, p.sigma) + 0.5 * wr * wr;
            }
            cvec ut = forward(std::move(uw), g), wt = forward(std::move(pressure), g);
            derivative_inplace(ut, g, 0);
            derivative_inplace(wt, g, 0);
            for (std::size_t i = 0; i < n; ++i) {
                ut[i] = -ut[i];
                wt[i] = -wt[i];
            }
            return {std::move(ut), std::move(wt)};
        }
        case ModelKind::SemiclassicalDSII: {
            cvec u = inverse(vhat[0], g);
            cvec sx = vhat[1], sy = vhat[1];
            derivative_inplace(sx, g, 0);
            derivative_inplace(sy, g, 1);
            sx = inverse(std::move(sx), g);
            sy = inverse(std::move(sy), g);
            const auto& gsym = cached_symbol_table(g, SymbolKind::DPlusInvDMinus);
            cvec nonlocal(n);
            for (std::size_t i = 0; i < n; ++i) nonlocal[i] = gsym[i] * vhat[0][i];
            nonlocal = inverse(std::move(nonlocal), g);
            cvec s_quad(n), fx(n), fy(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double sxr = sx[i].real(), syr = sy[i].real(), ur = u[i].real();
                s_quad[i] = -sxr * sxr + syr * syr - 2.0 * p.rho * nonlocal[i].real();
                fx[i] = sxr * ur;
                fy[i] = syr * ur;
            }
            cvec st = forward(std::move(s_quad), g);
            cvec fxh = forward(std::move(fx), g), fyh = forward(std::move(fy), g);
            derivative_inplace(fxh, g, 0);
            derivative_inplace(fyh, g, 1);
            cvec ut(n);
            for (std::size_t i = 0; i < n; ++i) ut[i] = -2.0 * fxh[i] + 2.0 * fyh[i];
            return {std::move(ut), std::move(st)};
        }
        case ModelKind::DSII:
        case ModelKind::QuinticNLS1D:
            throw std::logic_error("rhs_fourier: dispersive models are evaluated via their splitting");
    }
    throw std::logic_error("rhs_fourier: unknown model");
}

// Physical-space wrapper (the contract surface used by tests).
inline ModelState rhs(const ModelState& s, const ModelParams& p) {
    if (s.space() != Space::physical) throw std::invalid_argument("rhs: expects a physical-space state");
    std::vector<cvec> vhat;
    vhat.reserve(s.fields.size());
    for (const auto& f : s.fields) vhat.push_back(detail_models::forward(f.values, s.grid()));
    auto that = rhs_fourier(s.model, p, s.grid(), vhat);
    ModelState out(s.model, s.grid(), Space::physical);
    out.time = s.time;
    for (std::size_t i = 0; i < that.size(); ++i)
        out.fields[i].values = detail_models::inverse(that[i], s.grid());
    return out;
}

inline ModelState rhs_semiclassical_nls_1d(const ModelState& s, const ModelParams& p) {
    if (s.model != ModelKind::SemiclassicalNLS1D) throw std::invalid_argument("wrong model");
    return rhs(s, p);
}

inline ModelState rhs_semiclassical_dsii(const ModelState& s, const ModelParams& p) {
    if (s.model != ModelKind::SemiclassicalDSII) throw std::invalid_argument("wrong model");
    return rhs(s, p);
}

// Linear symbol plus pseudospectral nonlinear tendency for the stiff systems,
// both acting on Fourier-space coefficient vectors.
struct Splitting {
    std::vector<cplx> linear;  // diagonal L(k), purely imaginary
    std::function<cvec(const cvec&)> nonlinear;
    PeriodicGrid grid;
};

inline Splitting split_dsii(const ModelParams& p, const PeriodicGrid& g) {
    p.validate();
    if (g.dims != 2) throw std::invalid_argument("split_dsii: 2D grid required");
    Splitting sp;
    sp.grid = g;
    sp.linear.resize(g.size());
    for (std::size_t ix = 0; ix < g.n[0]; ++ix) {
        const double kx = g.wavenumber(0, ix);
        for (std::size_t iy = 0; iy < g.n[1]; ++iy) {
            const double ky = g.wavenumber(1, iy);
            sp.linear[g.index(ix, iy)] = cplx{0.0, p.epsilon * (ky * ky - kx * kx)};
        }
    }
    const auto gsym = symbol_table(g, SymbolKind::DPlusInvDMinus);
    const double eps = p.epsilon;
    const int rho = p.rho;
    sp.nonlinear = [g, gsym, eps, rho](const cvec& vhat) {
        using namespace detail_models;
        cvec psi = inverse(vhat, g);
        const std::size_t n = g.size();
        cvec msq(n);
        for (std::size_t i = 0; i < n; ++i) msq[i] = std::norm(psi[i]);
        cvec mhat = forward(msq, g);
        for (std::size_t i = 0; i < n; ++i) mhat[i] *= gsym[i];
        cvec phi = inverse(mhat, g);
        // N(psi) = (2 rho / (i eps)) * (Dp^-1 Dm |psi|^2) * psi
        const cplx coef = cplx{0.0, -2.0 * double(rho) / eps};
        for (std::size_t i = 0; i < n; ++i) psi[i] *= coef * phi[i].real();
        return forward(psi, g);
    };
    return sp;
}

inline Splitting split_quintic_nls(const ModelParams& p, const PeriodicGrid& g,
                                   QuinticConvention conv = QuinticConvention::half) {
    p.validate();
    if (g.dims != 1) throw std::invalid_argument("split_quintic_nls: 1D grid required");
    Splitting sp;
    sp.grid = g;
    sp.linear.resize(g.size());
    const double lin_coef = conv == QuinticConvention::half ? 0.5 * p.epsilon : p.epsilon;
    for (std::size_t i = 0; i < g.n[0]; ++i) {
        const double k = g.wavenumber(0, i);
        sp.linear[i] = cplx{0.0, -lin_coef * k * k};
    }
    const double nl_coef = conv == QuinticConvention::half ? 0.5 / p.epsilon : 1.0 / p.epsilon;
    sp.nonlinear = [g, nl_coef](const cvec& vhat) {
        using namespace detail_models;
        cvec psi = inverse(vhat, g);
        for (auto& z : psi) {
            const double m = std::norm(z);
            z *= cplx{0.0, nl_coef} * (m * m);
        }
        return forward(psi, g);
    };
    return sp;
}

// Full (unsplit) dispersive tendency, for consistency checks and RK4 override.
inline std::vector<cvec> rhs_fourier_split(const Splitting& sp, const std::vector<cvec>& vhat) {
    cvec out = sp.nonlinear(vhat[0]);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += sp.linear[i] * vhat[0][i];
    return {std::move(out)};
}

// ---- conserved quantities ----------------------------------------------

struct ConservedSet {
    std::map<std::string, double> values;
    double N() const { return values.at("N"); }
    double E() const { return values.at("E"); }
};

namespace detail_models {

inline Field real_part_field(const Field& f) {
    Field r = f;
    take_real(r.values);
    return r;
}

}  // namespace detail_models

inline ConservedSet conserved_quantities(const ModelState& s, const ModelParams& p,
                                         QuinticConvention conv = QuinticConvention::half) {
    p.validate();
    ModelState phys = s;
    if (s.space() == Space::fourier)
        for (auto& f : phys.fields) {
            transform_inplace(f.values, f.grid, Direction::inverse);
            f.space = Space::physical;
        }
    const PeriodicGrid& g = phys.grid();
    const double dv = g.cell_volume();
    ConservedSet out;
    switch (s.model) {
        case ModelKind::SemiclassicalNLS1D: {
            // E = int (u w^2 + 2 rho u^(sigma+1)/(sigma (sigma+1))) dx
            long double N = 0.0L, E = 0.0L;
            const double cs = 2.0 * p.rho / (p.sigma * (p.sigma + 1.0));
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double u = phys.u().values[i].real(), w = phys.w().values[i].real();
                N += u;
                E += u * w * w + cs * detail_models::upow(u, p.sigma + 1.0);
            }
            out.values["N"] = double(N) * dv;
            out.values["E"] = double(E) * dv;
            return out;
        }
        case ModelKind::SemiclassicalDSII: {
            // E = int ( u (S_x^2 - S_y^2) - rho (u^2 - 2((P u)^2 + (Q u)^2)) )
            Field u = detail_models::real_part_field(phys.u());
            Field S = detail_models::real_part_field(phys.w());
            Field Sx = spectral_derivative(S, 0, 1), Sy = spectral_derivative(S, 1, 1);
            Field Pu = apply_symbol(u, SymbolKind::POp), Qu = apply_symbol(u, SymbolKind::QOp);
            long double N = 0.0L, E = 0.0L;
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double uv = u.values[i].real();
                const double sx = Sx.values[i].real(), sy = Sy.values[i].real();
                const double pu = Pu.values[i].real(), qu = Qu.values[i].real();
                N += uv;
                E += uv * (sx * sx - sy * sy) - p.rho * (uv * uv - 2.0 * (pu * pu + qu * qu));
            }
            out.values["N"] = double(N) * dv;
            out.values["E"] = double(E) * dv;
            return out;
        }
        case ModelKind::DSII: {
            const Field& psi = phys.psi();
            Field px = spectral_derivative(psi, 0, 1), py = spectral_derivative(psi, 1, 1);
            Field msq(g, Space::physical);
            for (std::size_t i = 0; i < g.size(); ++i) msq.values[i] = std::norm(psi.values[i]);
            Field phi = apply_symbol(msq, SymbolKind::MOp);
            // dx^-1 phi_y by symbol ky/kx, zero on the kx = 0 column
            Field phih = transform(phi, Direction::forward);
            for (std::size_t ix = 0; ix < g.n[0]; ++ix) {
                const double kx = g.wavenumber(0, ix);
                for (std::size_t iy = 0; iy < g.n[1]; ++iy) {
                    const double ky = g.wavenumber(1, iy);
                    phih.values[g.index(ix, iy)] *= (kx == 0.0 ? 0.0 : ky / kx);
                }
            }
            Field dxinv_phiy = transform(phih, Direction::inverse);
            long double N = 0.0L, E = 0.0L;
            const double e2 = p.epsilon * p.epsilon;
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double m = std::norm(psi.values[i]);
                const double gx = std::norm(px.values[i]), gy = std::norm(py.values[i]);
                const double ph = phi.values[i].real(), dpy = dxinv_phiy.values[i].real();
                N += m;
                E += 0.5 * (e2 * gx - e2 * gy - p.rho * (m * m - 0.5 * (ph * ph + dpy * dpy)));
            }
            out.values["N"] = double(N) * dv;
            out.values["E"] = double(E) * dv;
            return out;
        }
        case ModelKind::QuinticNLS1D: {
            const Field& psi = phys.psi();
            Field px = spectral_derivative(psi, 0, 1);
            long double N = 0.0L, E = 0.0L;
            const double e2 = p.epsilon * p.epsilon;
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double m = std::norm(psi.values[i]);
                const double gx = std::norm(px.values[i]);
                if (conv == QuinticConvention::half)
                    E += 0.5 * e2 * gx - m * m * m / 6.0;
                else
                    E += e2 * gx - m * m * m / 3.0;
                N += m;
            }
            out.values["N"] = double(N) * dv;
            out.values["E"] = double(E) * dv;
            return out;
        }
    }
    throw std::logic_error("conserved_quantities: unknown model");
}

struct EnergyDrift {
    double value = 0.0;
    bool absolute_fallback = false;  // E(0) == 0: |E - E0| instead of |E/E0 - 1|
};

inline EnergyDrift relative_energy_drift(double E0, double Et) {
    EnergyDrift d;
    if (E0 == 0.0) {
        d.absolute_fallback = true;
        d.value = std::abs(Et - E0);
    } else {
        d.value = std::abs(Et / E0 - 1.0);
    }
    return d;
}

}  // namespace dsw
