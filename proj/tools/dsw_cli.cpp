// Batch CLI: run experiments and sweeps from presets or JSON configs,
// regress scaling laws from persisted sweeps, export record series.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "dsw/presets.hpp"

namespace fs = std::filesystem;
using namespace dsw;

namespace {

int fail_json(const std::string& kind, const std::string& reason, int code) {
    json j{{"error", kind}, {"reason", reason}};
    std::cerr << j.dump() << "\n";
    return code;
}

// "--set stepper.dt=1e-4" style dotted-path overrides on the config JSON.
void apply_overrides(json& j, const std::vector<std::string>& sets) {
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got " + kv);
        const std::string path = kv.substr(0, eq), raw = kv.substr(eq + 1);
        json value;
        try {
            value = json::parse(raw);
        } catch (...) {
            value = raw;  // plain string
        }
        json* cur = &j;
        std::size_t start = 0;
        for (;;) {
            const auto dot = path.find('.', start);
            const std::string key = path.substr(start, dot - start);
            if (dot == std::string::npos) {
                (*cur)[key] = value;
                break;
            }
            cur = &((*cur)[key]);
            start = dot + 1;
        }
    }
}

json load_config_json(const std::string& spec_name) {
    if (fs::exists(spec_name)) {
        std::ifstream is(spec_name);
        return json::parse(is);
    }
    return to_json(preset_experiment(spec_name));
}

SweepConfig sweep_from_spec(const std::string& name, const std::vector<std::string>& sets) {
    SweepConfig sc = preset_sweep(name);
    if (!sets.empty()) {
        // plain keys address the dispersive run config; "sweep." keys the driver
        json dj = to_json(sc.dispersive);
        json extra = json::object();
        for (const auto& kv : sets) {
            std::vector<std::string> one{kv};
            if (kv.rfind("sweep.", 0) == 0) {
                one[0] = kv.substr(6);
                apply_overrides(extra, one);
            } else {
                apply_overrides(dj, one);
            }
        }
        sc.dispersive = config_from_json(dj);
        if (extra.contains("eps_list")) sc.eps_list = extra["eps_list"].get<std::vector<double>>();
        if (extra.contains("t_c")) sc.t_c_override = extra["t_c"].get<double>();
        if (extra.contains("t_max")) sc.dispersive_t_max = extra["t_max"].get<double>();
        if (extra.contains("scale_dt")) sc.scale_dt_with_eps = extra["scale_dt"].get<bool>();
    }
    return sc;
}

void export_fields_csv(const LoadedRecord& lr, const fs::path& out) {
    const auto& st = lr.record.final_state;
    const PeriodicGrid& g = st.grid();
    for (std::size_t f = 0; f < st.fields.size(); ++f) {
        {
            CsvWriter csv(out / ("field" + std::to_string(f) + "_axis_x.csv"));
            csv.header("x,re,im");
            const std::size_t iy = g.dims == 2 ? g.n[1] / 2 : 0;  // y = 0 row
            for (std::size_t ix = 0; ix < g.n[0]; ++ix) {
                const cplx v = st.fields[f].values[g.index(ix, iy)];
                csv.row(g.node(0, ix), v.real(), v.imag());
            }
        }
        if (g.dims == 2) {
            CsvWriter csv(out / ("field" + std::to_string(f) + "_axis_y.csv"));
            csv.header("y,re,im");
            const std::size_t ix = g.n[0] / 2;  // x = 0 column
            for (std::size_t iy = 0; iy < g.n[1]; ++iy) {
                const cplx v = st.fields[f].values[g.index(ix, iy)];
                csv.row(g.node(1, iy), v.real(), v.imag());
            }
        }
    }
}

void export_spectra_csv(const LoadedRecord& lr, const fs::path& out) {
    const auto& st = lr.record.final_state;
    Field vhat = transform(st.fields[0], Direction::forward);
    auto [ks, vs] = positive_axis_slice(vhat);
    std::vector<double> mods(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) mods[i] = std::abs(vs[i]);
    write_spectrum_csv(out / "spectrum_kx.csv", ks, mods, false);
    if (st.grid().dims == 2) {
        auto shells = angle_averaged_spectrum(vhat);
        std::vector<double> Ks(shells.size());
        for (std::size_t i = 0; i < shells.size(); ++i) Ks[i] = double(i);
        write_spectrum_csv(out / "spectrum_shells.csv", Ks, shells, true);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral experiments for semiclassical Davey-Stewartson II"};
    app.require_subcommand(1);

    std::string spec, out_dir = "records";
    std::vector<std::string> sets;
    unsigned workers = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", spec, "preset name or config JSON path")->required();
        cmd->add_option("--out", out_dir, "output root directory");
        cmd->add_option("--set", sets, "dotted-path config overrides (key=value)");
        cmd->add_option("--workers", workers, "FFT worker threads");
    };

    auto* run_cmd = app.add_subcommand("run", "run one experiment");
    add_common(run_cmd);

    auto* sweep_cmd = app.add_subcommand("sweep", "run an epsilon sweep");
    add_common(sweep_cmd);

    auto* regress_cmd = app.add_subcommand("regress", "scaling-law regression over sweep records");
    std::vector<std::string> globs;
    std::string target = "delta_inf";
    regress_cmd->add_option("records", globs, "sweep.json paths (or sweep directories)")->required();
    regress_cmd->add_option("--target", target, "delta_inf | blowup_gap");

    auto* export_cmd = app.add_subcommand("export", "export record series");
    std::string record_dir, what = "fits", format = "csv", export_out = "export";
    export_cmd->add_option("record", record_dir, "record directory")->required();
    export_cmd->add_option("--what", what, "fields | spectra | fits | conserved");
    export_cmd->add_option("--format", format, "csv | binary");
    export_cmd->add_option("--out", export_out, "output directory");

    auto* presets_cmd = app.add_subcommand("presets", "list or dump presets");
    std::string presets_verb = "list", dump_name;
    presets_cmd->add_option("verb", presets_verb, "list | dump");
    presets_cmd->add_option("name", dump_name, "preset to dump");

    CLI11_PARSE(app, argc, argv);

    try {
        if (workers) set_fft_workers(workers);

        if (run_cmd->parsed()) {
            json cj = load_config_json(spec);
            apply_overrides(cj, sets);
            ExperimentConfig cfg = config_from_json(cj);
            const fs::path dir = fs::path(out_dir) / cfg.name;
            auto rec = run_experiment(cfg, dir);
            json summary{{"record", dir.string()},
                         {"t_final", rec.t_final},
                         {"steps", rec.steps},
                         {"aborted", rec.aborted},
                         {"max_drift", rec.max_drift()},
                         {"wall_seconds", rec.wall_seconds}};
            for (const auto& [id, det] : rec.detections)
                if (det.detected) summary["detections"][id] = {{"t_c", det.t_c}, {"B", det.B_at_tc}};
            std::cout << summary.dump(2) << "\n";
            if (rec.aborted && rec.detections.empty())
                return fail_json("aborted", rec.abort_reason, 3);
            return 0;
        }

        if (sweep_cmd->parsed()) {
            SweepConfig sc = sweep_from_spec(spec, sets);
            auto outcome = run_sweep(sc, fs::path(out_dir));
            std::cout << sweep_to_json(outcome).dump(2) << "\n";
            if (!outcome.ok) return fail_json("declined", outcome.declined, 2);
            return 0;
        }

        if (regress_cmd->parsed()) {
            std::vector<std::pair<double, double>> points;
            for (const auto& p : globs) {
                fs::path path = p;
                if (fs::is_directory(path)) path /= "sweep.json";
                std::ifstream is(path);
                if (!is) return fail_json("declined", "cannot open " + path.string(), 2);
                auto outcome = sweep_from_json(json::parse(is));
                const bool want_gap = target == "blowup_gap";
                if (want_gap != (outcome.target == SweepTarget::blowup_gap)) continue;
                for (const auto& pt : outcome.points) points.emplace_back(pt.eps, pt.value);
            }
            auto res = scaling_regression(points);
            json j{{"target", target}, {"ok", res.ok}};
            if (res.ok) {
                j["a"] = res.a;
                j["b"] = res.b;
                j["r"] = res.r;
                j["points"] = res.points;
            } else {
                j["declined"] = res.declined;
            }
            std::cout << j.dump(2) << "\n";
            if (!res.ok) return fail_json("declined", res.declined, 2);
            return 0;
        }

        if (export_cmd->parsed()) {
            auto lr = load_record(record_dir);
            fs::create_directories(export_out);
            if (what == "fields") {
                if (format == "binary") {
                    for (std::size_t f = 0; f < lr.record.final_state.fields.size(); ++f)
                        write_snapshot(fs::path(export_out) / ("field_" + std::to_string(f) + ".bin"),
                                       lr.record.final_state.fields[f]);
                } else {
                    export_fields_csv(lr, export_out);
                }
            } else if (what == "spectra") {
                export_spectra_csv(lr, export_out);
            } else if (what == "fits" || what == "conserved") {
                for (const auto& entry : fs::directory_iterator(record_dir)) {
                    const std::string fn = entry.path().filename().string();
                    const bool take = what == "fits" ? fn.rfind("fits_", 0) == 0 : fn == "conserved.csv";
                    if (take)
                        fs::copy_file(entry.path(), fs::path(export_out) / fn,
                                      fs::copy_options::overwrite_existing);
                }
            } else {
                return fail_json("declined", "unknown export selector '" + what + "'", 2);
            }
            std::cout << json{{"exported", what}, {"out", export_out}}.dump() << "\n";
            return 0;
        }

        if (presets_cmd->parsed()) {
            if (presets_verb == "dump") {
                std::cout << to_json(preset_experiment(dump_name)).dump(2) << "\n";
            } else {
                json j;
                j["experiments"] = experiment_preset_names();
                j["sweeps"] = sweep_preset_names();
                std::cout << j.dump(2) << "\n";
            }
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        return fail_json("declined", e.what(), 2);
    } catch (const std::exception& e) {
        return fail_json("error", e.what(), 1);
    }
    return 0;
}
