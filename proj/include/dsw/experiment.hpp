#pragma once

// Experiment configuration, execution, persistence, sweeps, the scaling-law
// regression and the Peregrine-ratio measurement.
//
// A record directory holds meta.json plus CSV series and binary snapshots:
//   meta.json  fits_<id>.csv  conserved.csv  center.csv  field_<i>.bin

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dsw/expr.hpp"
#include "dsw/integrators.hpp"
#include "dsw/io.hpp"
#include "dsw/oracles.hpp"

namespace dsw {

using nlohmann::json;

// ---- configuration -------------------------------------------------------

enum class InitialFamily { gauss_sym, gauss_aniso, sech2, custom };

struct InitialData {
    InitialFamily family = InitialFamily::gauss_sym;
    double nu = 1.0;  // anisotropy of gauss_aniso
    std::string custom_re, custom_im;  // custom amplitude expressions
};

struct GridSpec {
    int dims = 2;
    std::size_t nx = 1024, ny = 1024;
    double Lx = 2.5, Ly = 2.5;

    PeriodicGrid build() const {
        return dims == 1 ? PeriodicGrid::line(nx, Lx) : PeriodicGrid::plane(nx, ny, Lx, Ly);
    }
};

struct WindowSpec {
    double k_min = 10.0;
    double k_max_fraction = 0.5;  // of max(k_x)
    double modulus_floor = 1e-10;
    double min_span_fraction = 0.5;

    FitWindow build(const PeriodicGrid& g) const {
        return FitWindow{k_min, k_max_fraction * g.max_wavenumber(0), modulus_floor,
                         min_span_fraction};
    }
};

struct ExperimentConfig {
    std::string name = "experiment";
    ModelKind model = ModelKind::DSII;
    ModelParams params;
    QuinticConvention quintic_convention = QuinticConvention::half;
    InitialData initial;
    GridSpec grid;
    StepperConfig stepper;
    double t_max = 0.0;

    std::vector<WindowSpec> windows;  // first entry is the primary window
    bool fit_2d = true;               // 2D models: shell-spectrum fit alongside

    StopRuleKind stop = StopRuleKind::t_max;
    StopSeries stop_series = StopSeries::fit1d;
    int stop_margin_samples = 2;

    bool sample_center = false;
    double center_x = 0.0, center_y = 0.0;
    std::vector<double> snapshot_times;

    void validate() const {
        params.validate();
        stepper.validate();
        if (grid.dims != model_dims(model))
            throw std::invalid_argument("config: grid/model dims mismatch");
        if (windows.empty()) throw std::invalid_argument("config: at least one fit window required");
    }
};

// ---- json (de)serialization ----------------------------------------------

inline std::string to_string(ModelKind m) { return model_name(m); }

inline ModelKind model_from_string(const std::string& s) {
    for (auto m : {ModelKind::SemiclassicalNLS1D, ModelKind::SemiclassicalDSII, ModelKind::DSII,
                   ModelKind::QuinticNLS1D})
        if (model_name(m) == s) return m;
    throw std::invalid_argument("unknown model '" + s + "'");
}

inline json to_json(const ExperimentConfig& c) {
    json j;
    j["name"] = c.name;
    j["model"] = model_name(c.model);
    j["params"] = {{"epsilon", c.params.epsilon},
                   {"rho", c.params.rho},
                   {"sigma", c.params.sigma},
                   {"A0", c.params.A0}};
    j["quintic_convention"] = c.quintic_convention == QuinticConvention::half ? "half" : "unit";
    const char* fam = c.initial.family == InitialFamily::gauss_sym    ? "gauss_sym"
                      : c.initial.family == InitialFamily::gauss_aniso ? "gauss_aniso"
                      : c.initial.family == InitialFamily::sech2       ? "sech2"
                                                                       : "custom";
    j["initial"] = {{"family", fam},
                    {"nu", c.initial.nu},
                    {"re", c.initial.custom_re},
                    {"im", c.initial.custom_im}};
    j["grid"] = {{"dims", c.grid.dims}, {"nx", c.grid.nx}, {"ny", c.grid.ny},
                 {"Lx", c.grid.Lx},     {"Ly", c.grid.Ly}};
    j["stepper"] = {{"dt", c.stepper.dt},
                    {"scheme", c.stepper.scheme == Scheme::RK4 ? "rk4" : "dcrk"},
                    {"snapshot_stride", c.stepper.snapshot_stride},
                    {"krasny_threshold", c.stepper.krasny_threshold},
                    {"krasny_enabled", c.stepper.krasny_enabled}};
    if (c.stepper.frequency_split_threshold)
        j["stepper"]["split_threshold"] = std::isinf(*c.stepper.frequency_split_threshold)
                                              ? json("inf")
                                              : json(*c.stepper.frequency_split_threshold);
    j["t_max"] = c.t_max;
    j["windows"] = json::array();
    for (const auto& w : c.windows)
        j["windows"].push_back({{"k_min", w.k_min},
                                {"k_max_fraction", w.k_max_fraction},
                                {"floor", w.modulus_floor},
                                {"min_span", w.min_span_fraction}});
    j["fit_2d"] = c.fit_2d;
    j["stop"] = {{"rule", c.stop == StopRuleKind::t_max        ? "t_max"
                          : c.stop == StopRuleKind::delta_zero ? "delta_zero"
                                                               : "delta_below_m"},
                 {"series", c.stop_series == StopSeries::fit1d   ? "fit1d"
                            : c.stop_series == StopSeries::fit2d ? "fit2d"
                                                                 : "both"},
                 {"margin_samples", c.stop_margin_samples}};
    j["center"] = {{"enabled", c.sample_center}, {"x", c.center_x}, {"y", c.center_y}};
    j["snapshot_times"] = c.snapshot_times;
    return j;
}

inline ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    c.name = j.value("name", "experiment");
    c.model = model_from_string(j.at("model").get<std::string>());
    if (j.contains("params")) {
        const auto& p = j["params"];
        c.params.epsilon = p.value("epsilon", 1.0);
        c.params.rho = p.value("rho", 1);
        c.params.sigma = p.value("sigma", 1.0);
        c.params.A0 = p.value("A0", 1.0);
    }
    c.quintic_convention =
        j.value("quintic_convention", "half") == std::string("unit") ? QuinticConvention::unit
                                                                     : QuinticConvention::half;
    if (j.contains("initial")) {
        const auto& i = j["initial"];
        const std::string fam = i.value("family", "gauss_sym");
        c.initial.family = fam == "gauss_sym"    ? InitialFamily::gauss_sym
                           : fam == "gauss_aniso" ? InitialFamily::gauss_aniso
                           : fam == "sech2"       ? InitialFamily::sech2
                           : fam == "custom"      ? InitialFamily::custom
                                                  : throw std::invalid_argument("bad family " + fam);
        c.initial.nu = i.value("nu", 1.0);
        c.initial.custom_re = i.value("re", "");
        c.initial.custom_im = i.value("im", "");
    }
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        c.grid.dims = g.value("dims", 2);
        c.grid.nx = g.value("nx", std::size_t(1024));
        c.grid.ny = g.value("ny", std::size_t(1024));
        c.grid.Lx = g.value("Lx", 2.5);
        c.grid.Ly = g.value("Ly", 2.5);
    }
    if (j.contains("stepper")) {
        const auto& s = j["stepper"];
        c.stepper.dt = s.value("dt", 1e-3);
        c.stepper.scheme = s.value("scheme", "rk4") == std::string("dcrk") ? Scheme::DCRK : Scheme::RK4;
        c.stepper.snapshot_stride = s.value("snapshot_stride", 10);
        c.stepper.krasny_threshold = s.value("krasny_threshold", 1e-14);
        c.stepper.krasny_enabled = s.value("krasny_enabled", true);
        if (s.contains("split_threshold")) {
            if (s["split_threshold"].is_string())
                c.stepper.frequency_split_threshold = std::numeric_limits<double>::infinity();
            else
                c.stepper.frequency_split_threshold = s["split_threshold"].get<double>();
        }
    }
    c.t_max = j.value("t_max", 0.0);
    if (j.contains("windows"))
        for (const auto& w : j["windows"])
            c.windows.push_back(WindowSpec{w.value("k_min", 10.0), w.value("k_max_fraction", 0.5),
                                           w.value("floor", 1e-10), w.value("min_span", 0.5)});
    c.fit_2d = j.value("fit_2d", true);
    if (j.contains("stop")) {
        const auto& s = j["stop"];
        const std::string rule = s.value("rule", "t_max");
        c.stop = rule == "delta_zero"      ? StopRuleKind::delta_zero
                 : rule == "delta_below_m" ? StopRuleKind::delta_below_m
                                           : StopRuleKind::t_max;
        const std::string series = s.value("series", "fit1d");
        c.stop_series = series == "fit2d" ? StopSeries::fit2d
                        : series == "both" ? StopSeries::both
                                           : StopSeries::fit1d;
        c.stop_margin_samples = s.value("margin_samples", 2);
    }
    if (j.contains("center")) {
        c.sample_center = j["center"].value("enabled", false);
        c.center_x = j["center"].value("x", 0.0);
        c.center_y = j["center"].value("y", 0.0);
    }
    if (j.contains("snapshot_times"))
        c.snapshot_times = j["snapshot_times"].get<std::vector<double>>();
    return c;
}

inline std::string config_hash(const ExperimentConfig& c) {
    const std::string dump = to_json(c).dump();
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf, 16);
}

// ---- initial data ---------------------------------------------------------

// Amplitude profile of the family; semiclassical models use its square as u0.
inline double amplitude_at(const InitialData& init, const ModelParams& p, double x, double y) {
    switch (init.family) {
        case InitialFamily::gauss_sym:
            return std::exp(-(x * x + y * y));
        case InitialFamily::gauss_aniso:
            return std::exp(-(x * x + init.nu * y * y));
        case InitialFamily::sech2:
            return p.A0 / std::cosh(x);
        case InitialFamily::custom:
            return 0.0;  // handled separately (complex-valued)
    }
    return 0.0;
}

inline ModelState build_initial_state(const ExperimentConfig& cfg) {
    const PeriodicGrid g = cfg.grid.build();
    ModelState s(cfg.model, g, Space::physical);
    const bool semicl = is_semiclassical(cfg.model);

    if (cfg.initial.family == InitialFamily::custom) {
        Expr re = Expr::parse(cfg.initial.custom_re.empty() ? "0" : cfg.initial.custom_re);
        Expr im = Expr::parse(cfg.initial.custom_im.empty() ? "0" : cfg.initial.custom_im);
        Expr::Vars vars{{"A0", cfg.params.A0}, {"nu", cfg.initial.nu},
                        {"epsilon", cfg.params.epsilon}, {"pi", std::numbers::pi},
                        {"e", std::numbers::e}, {"x", 0.0}, {"y", 0.0}, {"R", 0.0}};
        for (std::size_t ix = 0; ix < g.n[0]; ++ix) {
            vars["x"] = g.node(0, ix);
            for (std::size_t iy = 0; iy < g.n[1]; ++iy) {
                vars["y"] = g.dims == 2 ? g.node(1, iy) : 0.0;
                vars["R"] = std::sqrt(vars["x"] * vars["x"] + vars["y"] * vars["y"]);
                const cplx v{re.eval(vars), im.eval(vars)};
                s.fields[0].values[g.index(ix, iy)] = semicl ? cplx(std::norm(v), 0.0) : v;
            }
        }
        return s;
    }

    for (std::size_t ix = 0; ix < g.n[0]; ++ix) {
        const double x = g.node(0, ix);
        for (std::size_t iy = 0; iy < g.n[1]; ++iy) {
            const double y = g.dims == 2 ? g.node(1, iy) : 0.0;
            const double a = amplitude_at(cfg.initial, cfg.params, x, y);
            s.fields[0].values[g.index(ix, iy)] = semicl ? a * a : a;
        }
    }
    return s;
}

// ---- record persistence ----------------------------------------------------

namespace detail_exp {

inline json report_to_json(const CriticalReport& r) {
    return {{"detected", r.detected},
            {"t_c", r.t_c},
            {"mechanism", r.mechanism == CriticalMechanism::delta_zero_crossing ? "delta_zero_crossing"
                                                                                : "delta_below_min_distance"},
            {"B_at_tc", r.B_at_tc},
            {"min_distance", r.min_distance},
            {"classification", r.classification == SingularityClass::cubic_like    ? "cubic_like"
                               : r.classification == SingularityClass::sqrt_like   ? "sqrt_like"
                               : r.classification == SingularityClass::blowup_like ? "blowup_like"
                                                                                   : "unclassified"},
            {"min_delta_attained", r.min_delta_attained},
            {"sample_index", r.sample_index}};
}

inline CriticalReport report_from_json(const json& j) {
    CriticalReport r;
    r.detected = j.value("detected", false);
    r.t_c = j.value("t_c", 0.0);
    r.mechanism = j.value("mechanism", "delta_zero_crossing") == std::string("delta_below_min_distance")
                      ? CriticalMechanism::delta_below_min_distance
                      : CriticalMechanism::delta_zero_crossing;
    r.B_at_tc = j.value("B_at_tc", 0.0);
    r.min_distance = j.value("min_distance", 0.0);
    const std::string cl = j.value("classification", "unclassified");
    r.classification = cl == "cubic_like"    ? SingularityClass::cubic_like
                       : cl == "sqrt_like"   ? SingularityClass::sqrt_like
                       : cl == "blowup_like" ? SingularityClass::blowup_like
                                             : SingularityClass::unclassified;
    r.min_delta_attained = j.value("min_delta_attained", 0.0);
    r.sample_index = j.value("sample_index", std::size_t(0));
    return r;
}

inline std::vector<std::vector<std::string>> parse_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open csv: " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace detail_exp

inline void write_fits_csv(const std::filesystem::path& path, const std::vector<TracerSample>& series) {
    CsvWriter csv(path);
    csv.header("t,ok,A,B,delta,fit_error,alpha,k_min,k_max");
    for (const auto& s : series) {
        if (s.fit)
            csv.row(s.t, 1, s.fit->A, s.fit->B, s.fit->delta, s.fit->fit_error,
                    s.alpha ? *s.alpha : std::numeric_limits<double>::quiet_NaN(), s.fit->window.k_min,
                    s.fit->window.k_max);
        else
            csv.row(s.t, 0, 0.0, 0.0, 0.0, 0.0, std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0);
    }
}

inline void persist_record(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                           const ExperimentRecord& rec) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    json meta;
    meta["schema"] = "dsw-record-v1";
    meta["config"] = to_json(cfg);
    meta["config_hash"] = config_hash(cfg);
    meta["aborted"] = rec.aborted;
    meta["abort_reason"] = rec.abort_reason;
    meta["t_final"] = rec.t_final;
    meta["steps"] = rec.steps;
    meta["wall_seconds"] = rec.wall_seconds;
    meta["series"] = json::array();
    for (const auto& [id, series] : rec.fits) {
        meta["series"].push_back(id);
        std::string fname = "fits_" + id + ".csv";
        for (auto& ch : fname)
            if (ch == ':') ch = '_';
        write_fits_csv(dir / fname, series);
    }
    json dets = json::object();
    for (const auto& [id, rep] : rec.detections) dets[id] = detail_exp::report_to_json(rep);
    meta["detections"] = dets;

    {
        CsvWriter csv(dir / "conserved.csv");
        csv.header("t,N,E,Delta_E");
        for (const auto& c : rec.conserved) csv.row(c.t, c.N, c.E, c.drift);
    }
    if (!rec.center.empty()) {
        CsvWriter csv(dir / "center.csv");
        csv.header("t,modulus");
        for (const auto& c : rec.center) csv.row(c.t, c.modulus);
    }
    for (std::size_t f = 0; f < rec.final_state.fields.size(); ++f)
        write_snapshot(dir / ("field_" + std::to_string(f) + ".bin"), rec.final_state.fields[f]);
    for (std::size_t si = 0; si < rec.snapshots.size(); ++si) {
        meta["snapshots"].push_back(rec.snapshots[si].first);
        for (std::size_t f = 0; f < rec.snapshots[si].second.fields.size(); ++f)
            write_snapshot(dir / ("snap_" + std::to_string(si) + "_field_" + std::to_string(f) + ".bin"),
                           rec.snapshots[si].second.fields[f]);
    }
    meta["complete"] = true;
    std::ofstream os(dir / "meta.json");
    os << meta.dump(2) << "\n";
}

struct LoadedRecord {
    ExperimentConfig config;
    ExperimentRecord record;
    std::filesystem::path dir;
};

inline LoadedRecord load_record(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::ifstream is(dir / "meta.json");
    if (!is) throw std::runtime_error("no meta.json in " + dir.string());
    json meta = json::parse(is);
    LoadedRecord out;
    out.dir = dir;
    out.config = config_from_json(meta.at("config"));
    ExperimentRecord& rec = out.record;
    rec.name = out.config.name;
    rec.model = out.config.model;
    rec.params = out.config.params;
    rec.aborted = meta.value("aborted", false);
    rec.abort_reason = meta.value("abort_reason", "");
    rec.t_final = meta.value("t_final", 0.0);
    rec.steps = meta.value("steps", 0L);
    rec.wall_seconds = meta.value("wall_seconds", 0.0);
    for (const auto& idj : meta.value("series", json::array())) {
        const std::string id = idj.get<std::string>();
        std::string fname = "fits_" + id + ".csv";
        for (auto& ch : fname)
            if (ch == ':') ch = '_';
        auto rows = detail_exp::parse_csv(dir / fname);
        std::vector<TracerSample> series;
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& c = rows[r];
            TracerSample s;
            s.t = std::stod(c[0]);
            if (c[1] == "1") {
                FitResult fr;
                fr.A = std::stod(c[2]);
                fr.B = std::stod(c[3]);
                fr.delta = std::stod(c[4]);
                fr.fit_error = std::stod(c[5]);
                fr.window.k_min = std::stod(c[7]);
                fr.window.k_max = std::stod(c[8]);
                fr.time = s.t;
                s.fit = fr;
                const double alpha = std::stod(c[6]);
                if (std::isfinite(alpha)) s.alpha = alpha;
            }
            series.push_back(std::move(s));
        }
        rec.fits[id] = std::move(series);
    }
    if (meta.contains("detections"))
        for (auto it = meta["detections"].begin(); it != meta["detections"].end(); ++it)
            rec.detections[it.key()] = detail_exp::report_from_json(it.value());
    if (fs::exists(dir / "conserved.csv")) {
        auto rows = detail_exp::parse_csv(dir / "conserved.csv");
        for (std::size_t r = 1; r < rows.size(); ++r)
            rec.conserved.push_back({std::stod(rows[r][0]), std::stod(rows[r][1]),
                                     std::stod(rows[r][2]), std::stod(rows[r][3])});
    }
    if (fs::exists(dir / "center.csv")) {
        auto rows = detail_exp::parse_csv(dir / "center.csv");
        for (std::size_t r = 1; r < rows.size(); ++r)
            rec.center.push_back({std::stod(rows[r][0]), std::stod(rows[r][1])});
    }
    // final state fields
    const int nf = field_count(out.config.model);
    rec.final_state = ModelState(out.config.model, out.config.grid.build(), Space::physical);
    for (int f = 0; f < nf; ++f) {
        const auto p = dir / ("field_" + std::to_string(f) + ".bin");
        if (fs::exists(p)) rec.final_state.fields[std::size_t(f)] = read_snapshot(p);
    }
    rec.final_state.time = rec.t_final;
    return out;
}

// ---- running ---------------------------------------------------------------

inline ModelContext model_context(const ExperimentConfig& cfg) {
    if (!is_semiclassical(cfg.model)) return ModelContext::dispersive;
    return cfg.params.rho > 0 ? ModelContext::hyperbolic : ModelContext::elliptic;
}

inline void attach_detections(const ExperimentConfig& cfg, ExperimentRecord& rec) {
    const PeriodicGrid g = cfg.grid.build();
    const double m = g.min_fourier_distance(0);
    for (const auto& [id, series] : rec.fits) {
        auto deltas = rec.delta_series(id);
        const bool primary = id == "1d:w0";
        const auto rule = (cfg.stop == StopRuleKind::delta_below_m && primary)
                              ? CriticalMechanism::delta_below_min_distance
                              : CriticalMechanism::delta_zero_crossing;
        auto rep = detect_critical_time(deltas, m, rule);
        if (rep.detected) {
            SeriesContext ctx;
            ctx.context = model_context(cfg);
            // align histories with the delta series (fitted samples only)
            for (std::size_t i = 0; i < rep.sample_index && i < deltas.size(); ++i)
                ctx.B_history.push_back(deltas[i].B);
            for (const auto& s : series)
                if (s.fit) ctx.fit_error_history.push_back(s.fit->fit_error);
            ctx.detection_index = rep.sample_index;
            rep.classification = classify_singularity(rep.B_at_tc, ctx);
        }
        rec.detections[id] = rep;
    }
}

inline EvolveOptions evolve_options_from(const ExperimentConfig& cfg) {
    const PeriodicGrid g = cfg.grid.build();
    EvolveOptions opt;
    opt.t_max = cfg.t_max;
    opt.stepper = cfg.stepper;
    opt.quintic_convention = cfg.quintic_convention;
    for (const auto& w : cfg.windows) opt.windows_1d.push_back(w.build(g));
    if (g.dims == 2 && cfg.fit_2d) {
        opt.fit_2d = true;
        const FitWindow w0 = cfg.windows.front().build(g);
        // K window derived from the 1D window: K = sqrt(kx^2 + ky^2)
        opt.window_2d = FitWindow{std::numbers::sqrt2 * w0.k_min, std::numbers::sqrt2 * w0.k_max,
                                  w0.modulus_floor * w0.modulus_floor, w0.min_span_fraction};
    }
    opt.stop = cfg.stop;
    opt.stop_series = cfg.stop_series;
    opt.stop_margin_samples = cfg.stop_margin_samples;
    opt.sample_center = cfg.sample_center;
    opt.center_x = cfg.center_x;
    opt.center_y = cfg.center_y;
    opt.snapshot_times = cfg.snapshot_times;
    return opt;
}

inline ExperimentRecord run_experiment(const ExperimentConfig& cfg,
                                       const std::filesystem::path& out_dir = {}) {
    cfg.validate();
    ModelState init = build_initial_state(cfg);
    if (cfg.stepper.scheme == Scheme::RK4 && !is_semiclassical(cfg.model) &&
        cfg.model == ModelKind::DSII) {
        // allowed override; nothing to adjust
    }
    auto rec = evolve(init, cfg.params, evolve_options_from(cfg));
    rec.name = cfg.name;
    attach_detections(cfg, rec);
    if (!out_dir.empty()) persist_record(out_dir, cfg, rec);
    return rec;
}

// Cached execution: reuse a persisted record when its config hash matches.
inline LoadedRecord run_cached(const ExperimentConfig& cfg, const std::filesystem::path& cache_root) {
    namespace fs = std::filesystem;
    const fs::path dir = cache_root / (cfg.name + "-" + config_hash(cfg).substr(0, 8));
    if (fs::exists(dir / "meta.json")) {
        try {
            std::ifstream is(dir / "meta.json");
            json meta = json::parse(is);
            if (meta.value("complete", false) && meta.value("config_hash", "") == config_hash(cfg))
                return load_record(dir);
        } catch (...) {
            // fall through to a fresh run
        }
    }
    auto rec = run_experiment(cfg, dir);
    LoadedRecord out;
    out.config = cfg;
    out.record = std::move(rec);
    out.dir = dir;
    return out;
}

// ---- spectral resampling and comparison ------------------------------------

// Evaluate a field on another grid by Fourier zero-padding/truncation.
inline Field resample_field(const Field& f, const PeriodicGrid& target) {
    if (f.grid == target) return f;
    if (f.grid.dims != target.dims) throw std::invalid_argument("resample: dims mismatch");
    for (int a = 0; a < f.grid.dims; ++a)
        if (f.grid.half_period[a] != target.half_period[a])
            throw std::invalid_argument("resample: half_period mismatch");
    Field src = to_fourier(f);
    Field dst(target, Space::fourier);
    const auto& gs = f.grid;
    for (std::size_t ix = 0; ix < gs.n[0]; ++ix) {
        const long mx = PeriodicGrid::signed_mode(ix, gs.n[0]);
        if (mx < -long(target.n[0] / 2) || mx >= long(target.n[0] / 2)) continue;
        const std::size_t tx = std::size_t((mx + long(target.n[0])) % long(target.n[0]));
        for (std::size_t iy = 0; iy < gs.n[1]; ++iy) {
            const long my = gs.dims == 2 ? PeriodicGrid::signed_mode(iy, gs.n[1]) : 0;
            if (gs.dims == 2 && (my < -long(target.n[1] / 2) || my >= long(target.n[1] / 2))) continue;
            const std::size_t ty =
                gs.dims == 2 ? std::size_t((my + long(target.n[1])) % long(target.n[1])) : 0;
            dst.values[target.index(tx, ty)] = src.values[gs.index(ix, iy)];
        }
    }
    return f.space == Space::fourier ? dst : transform(dst, Direction::inverse);
}

// sup | |Psi|^2 - u | over the semiclassical grid.
inline double dispersive_vs_semiclassical_sup(const ModelState& dispersive, const ModelState& semicl) {
    Field psi = resample_field(dispersive.psi(), semicl.grid());
    double sup = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i)
        sup = std::max(sup, std::abs(std::norm(psi.values[i]) - semicl.u().values[i].real()));
    return sup;
}

// ---- scaling regression ------------------------------------------------------

struct ScalingResult {
    bool ok = false;
    std::string declined;
    double a = 0.0, b = 0.0, r = 0.0;
    std::vector<std::pair<double, double>> points;  // (eps, value) actually used
    std::vector<std::pair<double, double>> excluded;
};

inline ScalingResult scaling_regression(const std::vector<std::pair<double, double>>& points) {
    ScalingResult res;
    for (const auto& p : points) {
        if (p.second > 0.0 && p.first > 0.0)
            res.points.push_back(p);
        else
            res.excluded.push_back(p);
    }
    if (res.points.size() < 3) {
        res.declined = "regression declined: needs at least 3 positive points, have " +
                       std::to_string(res.points.size());
        return res;
    }
    const std::size_t n = res.points.size();
    long double sx = 0.0L, sy = 0.0L;
    for (const auto& p : res.points) {
        sx += std::log10(p.first);
        sy += std::log10(p.second);
    }
    const double mx = double(sx / n), my = double(sy / n);
    long double sxx = 0.0L, sxy = 0.0L, syy = 0.0L;
    for (const auto& p : res.points) {
        const double dx = std::log10(p.first) - mx, dy = std::log10(p.second) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0L || syy == 0.0L) {
        res.declined = "regression declined: degenerate spread";
        return res;
    }
    res.a = double(sxy / sxx);
    res.b = my - res.a * mx;
    res.r = double(sxy / std::sqrt(double(sxx) * double(syy)));
    res.ok = true;
    return res;
}

// ---- Peregrine ratio ---------------------------------------------------------

struct PeregrineResult {
    bool ok = false;
    std::string declined;
    double ratio = 0.0;
    double t_peak = 0.0;
    double at_tc = 0.0, at_peak = 0.0;
};

// |Psi(x_c, t_peak)| / |Psi(x_c, t_c)| with t_peak the first interior local
// maximum of the center series (that is, before any oscillations develop).
inline PeregrineResult peregrine_ratio(const std::vector<CenterSample>& center, double t_c) {
    PeregrineResult res;
    if (center.size() < 3) {
        res.declined = "peregrine declined: center series too short";
        return res;
    }
    if (t_c < center.front().t || t_c > center.back().t) {
        res.declined = "peregrine declined: t_c outside the recorded series";
        return res;
    }
    // value at t_c by linear interpolation
    double at_tc = center.back().modulus;
    for (std::size_t i = 1; i < center.size(); ++i) {
        if (center[i].t >= t_c) {
            const auto& a = center[i - 1];
            const auto& b = center[i];
            at_tc = a.modulus + (b.modulus - a.modulus) * (t_c - a.t) / std::max(b.t - a.t, 1e-300);
            break;
        }
    }
    for (std::size_t i = 1; i + 1 < center.size(); ++i) {
        if (center[i].modulus >= center[i - 1].modulus && center[i].modulus > center[i + 1].modulus) {
            res.ok = true;
            res.t_peak = center[i].t;
            res.at_peak = center[i].modulus;
            res.at_tc = at_tc;
            res.ratio = res.at_peak / at_tc;
            return res;
        }
    }
    res.declined = "peregrine declined: no local maximum before the end of the series";
    return res;
}

}  // namespace dsw
