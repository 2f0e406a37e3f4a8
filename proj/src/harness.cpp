#include "rscs/harness.hpp"

#include "rscs/rng.hpp"
#include "rscs/svg.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace rscs {

namespace {

using nlohmann::json;
using io::Table;

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

PsteSpec parse_pste(const json& j) {
    PsteSpec spec;
    spec.n = j.value("n", spec.n);
    spec.sigma_px = j.value("sigma_px", spec.sigma_px);
    if (j.contains("center")) {
        spec.center = {j["center"].at(0).get<int>(), j["center"].at(1).get<int>()};
    } else {
        spec.center = {spec.n / 2, spec.n / 2};
    }
    spec.rate_hz = j.value("rate_hz", spec.rate_hz);
    spec.duration_s = j.value("duration_s", spec.duration_s);
    spec.pulses.clear();
    if (j.contains("pulses")) {
        for (const auto& jp : j["pulses"]) {
            PulseSpec p;
            p.freq_hz = jp.value("freq_hz", p.freq_hz);
            p.start_s = jp.value("start_s", p.start_s);
            p.cycles = jp.value("cycles", p.cycles);
            p.amplitude = jp.value("amplitude", p.amplitude);
            spec.pulses.push_back(p);
        }
    }
    return spec;
}

SolverConfig parse_solver(const json& j) {
    SolverConfig cfg;
    cfg.lambda = j.value("lambda", cfg.lambda);
    if (j.contains("step") && !j["step"].is_null()) cfg.step = j["step"].get<double>();
    cfg.max_iters = j.value("max_iters", cfg.max_iters);
    cfg.conv_tol = j.value("conv_tol", cfg.conv_tol);
    if (j.contains("block_len") && !j["block_len"].is_null()) {
        cfg.block_len = j["block_len"].get<int>();
    }
    const std::string mode = j.value("step_mode", std::string("conservative"));
    require(mode == "conservative" || mode == "empirical",
            "config: step_mode must be conservative or empirical");
    cfg.step_mode = mode == "conservative" ? StepMode::conservative : StepMode::empirical;
    if (j.contains("lambda_split") && !j["lambda_split"].is_null()) {
        cfg.lambda_split = {j["lambda_split"].at(0).get<double>(),
                            j["lambda_split"].at(1).get<double>()};
    }
    cfg.tv_inner_iters = j.value("tv_inner_iters", cfg.tv_inner_iters);
    return cfg;
}

std::string manifest_path(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    p.replace_extension(".manifest.json");
    return p.string();
}

void write_manifest(const ExperimentConfig& cfg, const std::filesystem::path& csv_path) {
    json manifest = {{"scenario", cfg.scenario},
                     {"seed", cfg.rng_seed},
                     {"config_sha256", cfg.config_hash}};
    io::write_text_atomic(manifest_path(csv_path), manifest.dump(2) + "\n");
}

json report_to_json(const SolveReport& rep) {
    return {{"iterations", rep.iterations},
            {"final_objective", rep.final_objective},
            {"objective_trace", rep.objective_trace},
            {"wall_time", rep.wall_time},
            {"converged", rep.converged}};
}

Movie solve_with_fista_d(const ExperimentConfig& cfg, const MeasurementSeq& y,
                         const Psf& psf, SolveReport* report_out = nullptr) {
    const SolverConfig solver_cfg = cfg.solver("fista_d");
    auto [d, report] = blocked_fista_d(y, solver_cfg, psf, y.schedule, cfg.mode);
    if (report_out) *report_out = report;
    return diffs_to_movie(d);
}

} // namespace

SolverConfig ExperimentConfig::solver(const std::string& name) const {
    auto it = solvers.find(name);
    if (it != solvers.end()) return it->second;
    return SolverConfig{};
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io::IoError("cannot open config " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    json j = json::parse(bytes);

    ExperimentConfig cfg;
    cfg.config_hash = io::sha256_hex(bytes);
    cfg.scenario = j.value("scenario", cfg.scenario);
    cfg.rng_seed = j.value("seed", std::uint64_t{0});
    cfg.out_dir = j.value("out_dir", std::string("out"));

    if (j.contains("signal")) {
        const json& js = j["signal"];
        cfg.signal.kind = js.value("kind", cfg.signal.kind);
        require(cfg.signal.kind == "pste" || cfg.signal.kind == "pulse_sweep",
                "config: signal.kind must be pste or pulse_sweep");
        if (js.contains("pste")) cfg.signal.pste = parse_pste(js["pste"]);
        cfg.signal.f_start_hz = js.value("f_start_hz", cfg.signal.f_start_hz);
        cfg.signal.f_end_hz = js.value("f_end_hz", cfg.signal.f_end_hz);
        cfg.signal.n_pulses = js.value("n_pulses", cfg.signal.n_pulses);
        cfg.signal.spacing_s = js.value("spacing_s", cfg.signal.spacing_s);
    }

    if (j.contains("psf")) {
        const json& jp = j["psf"];
        const std::string kind = jp.value("kind", std::string("speckle"));
        if (kind == "speckle") cfg.psf.kind = PsfKind::speckle;
        else if (kind == "subgaussian") cfg.psf.kind = PsfKind::subgaussian;
        else if (kind == "delta") cfg.psf.kind = PsfKind::delta;
        else throw std::invalid_argument("config: unknown psf kind " + kind);
        if (jp.contains("params")) {
            cfg.psf.params.disk_radius_frac =
                jp["params"].value("disk_radius_frac", cfg.psf.params.disk_radius_frac);
            cfg.psf.params.lowpass_sigma_px =
                jp["params"].value("lowpass_sigma_px", cfg.psf.params.lowpass_sigma_px);
        }
    }

    if (j.contains("schedule")) {
        const json& js = j["schedule"];
        cfg.schedule.n = js.value("n", cfg.schedule.n);
        cfg.schedule.lines_per_sample =
            js.value("lines_per_sample", cfg.schedule.lines_per_sample);
        cfg.schedule.num_shutters = js.value("num_shutters", cfg.schedule.num_shutters);
        cfg.schedule.shutter_gap = js.value("shutter_gap", cfg.schedule.shutter_gap);
        cfg.schedule.phase_offset = js.value("phase_offset", cfg.schedule.phase_offset);
        cfg.schedule.rate_hz = js.value("rate_hz", cfg.schedule.rate_hz);
    }

    const std::string mode = j.value("mode", std::string("physical"));
    require(mode == "physical" || mode == "circular",
            "config: mode must be physical or circular");
    cfg.mode = mode == "physical" ? ConvMode::physical : ConvMode::circular;

    if (j.contains("noise") && !j["noise"].is_null()) {
        cfg.noise = NoiseSpec{j["noise"].value("snr_db", 30.0)};
    }

    if (j.contains("solvers")) {
        for (const auto& [name, js] : j["solvers"].items()) {
            cfg.solvers[name] = parse_solver(js);
        }
    }

    if (j.contains("sweep")) {
        cfg.sweep.axis = j["sweep"].value("axis", cfg.sweep.axis);
        require(cfg.sweep.axis == "lines" || cfg.sweep.axis == "rate" ||
                    cfg.sweep.axis == "snr",
                "config: sweep.axis must be lines, rate, or snr");
        cfg.sweep.values.clear();
        for (const auto& v : j["sweep"].at("values")) {
            cfg.sweep.values.push_back(v.get<double>());
        }
        require(!cfg.sweep.values.empty(), "config: sweep.values must be non-empty");
    }

    if (j.contains("phase")) {
        cfg.phase.system = j["phase"].value("system", cfg.phase.system);
        require(cfg.phase.system == "single" || cfg.phase.system == "double" ||
                    cfg.phase.system == "single_4x",
                "config: phase.system must be single, double, or single_4x");
        if (j["phase"].contains("offsets_ms")) {
            cfg.phase.offsets_ms.clear();
            for (const auto& v : j["phase"]["offsets_ms"]) {
                cfg.phase.offsets_ms.push_back(v.get<double>());
            }
        }
        cfg.phase.stability_factor =
            j["phase"].value("stability_factor", cfg.phase.stability_factor);
    }

    if (j.contains("rip")) {
        const json& jr = j["rip"];
        if (jr.contains("ks")) {
            cfg.rip.ks.clear();
            for (const auto& v : jr["ks"]) cfg.rip.ks.push_back(v.get<int>());
        }
        if (jr.contains("lines")) {
            cfg.rip.lines.clear();
            for (const auto& v : jr["lines"]) cfg.rip.lines.push_back(v.get<int>());
        }
        cfg.rip.trials = jr.value("trials", cfg.rip.trials);
        cfg.rip.all_phases = jr.value("all_phases", cfg.rip.all_phases);
    }

    return cfg;
}

Scenario build_scenario(const ExperimentConfig& cfg) {
    require(cfg.schedule.n >= 1, "config: schedule.n missing");
    require(cfg.signal.pste.n == cfg.schedule.n,
            "config: signal and schedule FPA sizes differ");

    Scenario sc{Movie{},
                {},
                gen_psf(cfg.psf.kind, cfg.schedule.n, Rng::derive(cfg.rng_seed, 7),
                        cfg.psf.params),
                cfg.schedule};
    if (cfg.signal.kind == "pste") {
        sc.truth = gen_pste(cfg.signal.pste);
        sc.pulses = pulse_supports(cfg.signal.pste);
    } else {
        auto [movie, pulses] =
            gen_pulse_sweep(cfg.signal.f_start_hz, cfg.signal.f_end_hz,
                            cfg.signal.n_pulses, cfg.signal.spacing_s, cfg.signal.pste);
        sc.truth = std::move(movie);
        sc.pulses = std::move(pulses);
    }
    return sc;
}

CompareResult cmd_compare_solvers(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    Scenario sc = build_scenario(cfg);
    const MeasurementSeq y = measure(sc.truth, sc.psf, sc.schedule, cfg.mode, cfg.noise,
                                     Rng::derive(cfg.rng_seed, 1));

    CompareResult result;
    {
        SolverRun run;
        run.name = "fista_d";
        auto [d, rep] = blocked_fista_d(y, cfg.solver("fista_d"), sc.psf, sc.schedule,
                                        cfg.mode);
        run.recon = diffs_to_movie(d);
        run.report = std::move(rep);
        result.runs.push_back(std::move(run));
    }
    {
        SolverRun run;
        run.name = "tv";
        auto [x, rep] = tv_solver(y, cfg.solver("tv"), sc.psf, sc.schedule, cfg.mode);
        run.recon = std::move(x);
        run.report = std::move(rep);
        result.runs.push_back(std::move(run));
    }
    {
        SolverRun run;
        run.name = "l1";
        auto [x, rep] = l1_solver(y, cfg.solver("l1"), sc.psf, sc.schedule, cfg.mode);
        run.recon = std::move(x);
        run.report = std::move(rep);
        result.runs.push_back(std::move(run));
    }
    for (auto& run : result.runs) {
        run.avg_framewise_error =
            avg_framewise_error(sc.truth, run.recon).avg_framewise_l2;
    }

    // Center-pixel traces.
    const auto [cr, cc] = cfg.signal.pste.center;
    Table trace;
    trace.columns = {"t", "truth", "fista_d", "tv", "l1"};
    for (int t = 0; t < sc.truth.t_len(); ++t) {
        trace.add_row({std::to_string(t), io::format_double(sc.truth.data.at(cr, cc, t)),
                       io::format_double(result.runs[0].recon.data.at(cr, cc, t)),
                       io::format_double(result.runs[1].recon.data.at(cr, cc, t)),
                       io::format_double(result.runs[2].recon.data.at(cr, cc, t))});
    }
    const auto trace_path = cfg.out_dir / "compare_trace.csv";
    io::write_csv(trace_path, trace);
    write_manifest(cfg, trace_path);

    Table summary;
    summary.columns = {"solver", "avg_framewise_error", "wall_time_s", "iterations",
                       "converged"};
    for (const auto& run : result.runs) {
        summary.add_row({run.name, io::format_double(run.avg_framewise_error),
                         io::format_double(run.report.wall_time),
                         std::to_string(run.report.iterations),
                         run.report.converged ? "true" : "false"});
    }
    const auto summary_path = cfg.out_dir / "compare_summary.csv";
    io::write_csv(summary_path, summary);
    write_manifest(cfg, summary_path);

    if (cfg.plots) {
        std::vector<svg::Series> series(4);
        const char* names[4] = {"truth", "fista_d", "tv", "l1"};
        for (int s = 0; s < 4; ++s) series[s].label = names[s];
        for (int t = 0; t < sc.truth.t_len(); ++t) {
            const double tx = static_cast<double>(t);
            series[0].x.push_back(tx);
            series[0].y.push_back(sc.truth.data.at(cr, cc, t));
            for (int s = 0; s < 3; ++s) {
                series[s + 1].x.push_back(tx);
                series[s + 1].y.push_back(result.runs[s].recon.data.at(cr, cc, t));
            }
        }
        svg::write_line_chart(cfg.out_dir / "compare_trace.svg",
                              "Center-pixel reconstruction", "sample", "intensity",
                              series);
    }
    return result;
}

SweepResult cmd_sweep(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    require(!cfg.sweep.values.empty(), "cmd_sweep: sweep.values required");

    SweepResult result;
    result.axis = cfg.sweep.axis;

    // The truth movie and PSF are fixed across lines/snr cells; the rate
    // axis regenerates the movie at each cell's sampling rate.
    Scenario base = build_scenario(cfg);

    for (std::size_t i = 0; i < cfg.sweep.values.size(); ++i) {
        const double value = cfg.sweep.values[i];
        ExperimentConfig cell_cfg = cfg;
        const Scenario* sc = &base;
        std::optional<Scenario> rate_sc;
        if (cfg.sweep.axis == "lines") {
            cell_cfg.schedule.lines_per_sample = static_cast<int>(value);
        } else if (cfg.sweep.axis == "rate") {
            cell_cfg.signal.pste.rate_hz = value;
            cell_cfg.schedule.rate_hz = value;
            rate_sc.emplace(build_scenario(cell_cfg));
            sc = &*rate_sc;
        } else { // snr
            cell_cfg.noise = NoiseSpec{value};
        }

        const MeasurementSeq y =
            measure(sc->truth, sc->psf, cell_cfg.schedule, cfg.mode, cell_cfg.noise,
                    Rng::derive(cfg.rng_seed, 1000 + i));
        SolveReport report;
        const Movie recon = solve_with_fista_d(cell_cfg, y, sc->psf, &report);

        SweepCell cell;
        cell.value = value;
        cell.avg_framewise_error =
            avg_framewise_error(sc->truth, recon).avg_framewise_l2;
        cell.wall_time = report.wall_time;
        result.cells.push_back(cell);
    }

    Table table;
    table.columns = {cfg.sweep.axis, "avg_framewise_error", "wall_time_s"};
    for (const auto& cell : result.cells) {
        table.add_row({io::format_double(cell.value),
                       io::format_double(cell.avg_framewise_error),
                       io::format_double(cell.wall_time)});
    }
    const auto path = cfg.out_dir / ("sweep_" + cfg.sweep.axis + ".csv");
    io::write_csv(path, table);
    write_manifest(cfg, path);

    if (cfg.plots) {
        svg::Series series{"avg error", {}, {}};
        for (const auto& cell : result.cells) {
            series.x.push_back(cell.value);
            series.y.push_back(cell.avg_framewise_error);
        }
        svg::write_line_chart(cfg.out_dir / ("sweep_" + cfg.sweep.axis + ".svg"),
                              "Error vs " + cfg.sweep.axis, cfg.sweep.axis,
                              "avg framewise error", {series});
    }
    return result;
}

NyquistResult cmd_nyquist(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    Scenario sc = build_scenario(cfg);
    const MeasurementSeq y = measure(sc.truth, sc.psf, sc.schedule, cfg.mode, cfg.noise,
                                     Rng::derive(cfg.rng_seed, 1));
    const Movie recon = solve_with_fista_d(cfg, y, sc.psf);

    NyquistResult result;
    result.per_pulse = pulse_normalized_errors(sc.truth, recon, sc.pulses);

    Table table;
    table.columns = {"freq_hz", "normalized_error"};
    for (const auto& [freq, err] : result.per_pulse) {
        table.add_row({io::format_double(freq), io::format_double(err)});
    }
    const auto path = cfg.out_dir / "nyquist.csv";
    io::write_csv(path, table);
    write_manifest(cfg, path);

    if (cfg.plots) {
        svg::Series series{"normalized error", {}, {}};
        for (const auto& [freq, err] : result.per_pulse) {
            series.x.push_back(freq);
            series.y.push_back(err);
        }
        svg::write_line_chart(cfg.out_dir / "nyquist.svg",
                              "Error vs pulse frequency", "pulse frequency (Hz)",
                              "normalized error", {series});
    }
    return result;
}

double PhaseSweepResult::worst_fastest_pulse() const {
    double fastest = 0.0;
    for (const auto& cell : cells) {
        for (const auto& [freq, err] : cell.per_pulse) fastest = std::max(fastest, freq);
    }
    double worst = 0.0;
    for (const auto& cell : cells) {
        for (const auto& [freq, err] : cell.per_pulse) {
            if (freq == fastest) worst = std::max(worst, err);
        }
    }
    return worst;
}

double PhaseSweepResult::best_fastest_pulse() const {
    double fastest = 0.0;
    for (const auto& cell : cells) {
        for (const auto& [freq, err] : cell.per_pulse) fastest = std::max(fastest, freq);
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& cell : cells) {
        for (const auto& [freq, err] : cell.per_pulse) {
            if (freq == fastest) best = std::min(best, err);
        }
    }
    return best;
}

PhaseSweepResult cmd_phase_sweep(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    require(!cfg.phase.offsets_ms.empty(), "cmd_phase_sweep: phase.offsets_ms required");

    ExperimentConfig sys_cfg = cfg;
    if (cfg.phase.system == "double") {
        require(cfg.schedule.lines_per_sample % 2 == 0,
                "cmd_phase_sweep: double shutter needs an even line budget");
        sys_cfg.schedule.num_shutters = 2;
        sys_cfg.schedule.lines_per_sample = cfg.schedule.lines_per_sample / 2;
        sys_cfg.schedule.shutter_gap = cfg.schedule.n / 2;
    } else if (cfg.phase.system == "single_4x") {
        sys_cfg.schedule.rate_hz = 4.0 * cfg.schedule.rate_hz;
        sys_cfg.signal.pste.rate_hz = 4.0 * cfg.signal.pste.rate_hz;
    }

    Scenario sc = build_scenario(sys_cfg);

    PhaseSweepResult result;
    result.system = cfg.phase.system;
    for (std::size_t i = 0; i < cfg.phase.offsets_ms.size(); ++i) {
        const double offset_ms = cfg.phase.offsets_ms[i];
        const int offset_samples = static_cast<int>(
            std::llround(offset_ms / 1000.0 * sys_cfg.schedule.rate_hz));
        const ShutterSchedule shifted = sc.schedule.advanced_by(offset_samples);
        const MeasurementSeq y = measure(sc.truth, sc.psf, shifted, sys_cfg.mode,
                                         sys_cfg.noise, Rng::derive(cfg.rng_seed, 2000 + i));
        const Movie recon = solve_with_fista_d(sys_cfg, y, sc.psf);

        PhaseCell cell;
        cell.offset_ms = offset_ms;
        cell.per_pulse = pulse_normalized_errors(sc.truth, recon, sc.pulses);
        result.cells.push_back(std::move(cell));
    }

    Table table;
    table.columns = {"offset_ms", "pulse_freq", "normalized_error"};
    for (const auto& cell : result.cells) {
        for (const auto& [freq, err] : cell.per_pulse) {
            table.add_row({io::format_double(cell.offset_ms), io::format_double(freq),
                           io::format_double(err)});
        }
    }
    const auto path = cfg.out_dir / ("phase_" + cfg.phase.system + ".csv");
    io::write_csv(path, table);
    write_manifest(cfg, path);

    if (cfg.plots && !result.cells.empty()) {
        std::vector<svg::Series> series;
        for (std::size_t p = 0; p < result.cells[0].per_pulse.size(); ++p) {
            svg::Series s;
            s.label = io::format_double(result.cells[0].per_pulse[p].first) + " Hz";
            for (const auto& cell : result.cells) {
                s.x.push_back(cell.offset_ms);
                s.y.push_back(cell.per_pulse[p].second);
            }
            series.push_back(std::move(s));
        }
        svg::write_line_chart(cfg.out_dir / ("phase_" + cfg.phase.system + ".svg"),
                              "Error vs shutter offset (" + cfg.phase.system + ")",
                              "offset (ms)", "normalized error", series);
    }
    return result;
}

RipProbeResult cmd_rip_probe(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    const Psf psf = gen_psf(cfg.psf.kind, cfg.schedule.n, Rng::derive(cfg.rng_seed, 7),
                            cfg.psf.params);

    RipProbeResult result;
    Table table;
    table.columns = {"k", "lines", "delta_lower", "normalization", "degenerate",
                     "trials", "seed"};
    std::size_t cell_index = 0;
    for (int k : cfg.rip.ks) {
        for (int lines : cfg.rip.lines) {
            ShutterSchedule sched = cfg.schedule;
            sched.lines_per_sample = lines;
            const std::uint64_t seed = Rng::derive(cfg.rng_seed, 3000 + cell_index++);
            const int t_probes = cfg.rip.all_phases ? sched.period() : 1;
            RipEstimate worst;
            for (int t = 0; t < t_probes; ++t) {
                RipEstimate est =
                    estimate_rip(psf, sched, t, k, cfg.rip.trials, seed, cfg.mode);
                if (t == 0 || est.delta_lower > worst.delta_lower) worst = est;
            }
            result.cells.push_back({k, lines, worst});
            table.add_row({std::to_string(k), std::to_string(lines),
                           io::format_double(worst.delta_lower),
                           io::format_double(worst.normalization),
                           worst.degenerate ? "true" : "false",
                           std::to_string(worst.trials), std::to_string(seed)});
        }
    }
    const auto path = cfg.out_dir / "rip_probe.csv";
    io::write_csv(path, table);
    write_manifest(cfg, path);
    return result;
}

void cmd_gen(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    Scenario sc = build_scenario(cfg);
    io::write_movie(cfg.out_dir / "movie.rsm1", sc.truth);
    io::write_psf(cfg.out_dir / "psf.rsm1", sc.psf);
    json pulses = json::array();
    for (const auto& p : sc.pulses) {
        pulses.push_back({{"freq_hz", p.freq_hz},
                          {"first_frame", p.first_frame},
                          {"last_frame", p.last_frame}});
    }
    io::write_text_atomic(cfg.out_dir / "pulses.json", pulses.dump(2) + "\n");
    write_manifest(cfg, cfg.out_dir / "gen.csv");
}

void cmd_measure(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    const Movie movie =
        io::read_movie(cfg.out_dir / "movie.rsm1", cfg.schedule.rate_hz);
    const Psf psf = io::read_psf(cfg.out_dir / "psf.rsm1");
    const MeasurementSeq y = measure(movie, psf, cfg.schedule, cfg.mode, cfg.noise,
                                     Rng::derive(cfg.rng_seed, 1));
    io::write_measurements(cfg.out_dir / "meas.rsm1", y);
    write_manifest(cfg, cfg.out_dir / "measure.csv");
}

void cmd_reconstruct(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    const MeasurementSeq y = io::read_measurements(cfg.out_dir / "meas.rsm1");
    const Psf psf = io::read_psf(cfg.out_dir / "psf.rsm1");
    ExperimentConfig run_cfg = cfg;
    run_cfg.schedule = y.schedule;
    SolveReport report;
    const Movie recon = solve_with_fista_d(run_cfg, y, psf, &report);
    io::write_movie(cfg.out_dir / "recon.rsm1", recon);
    io::write_text_atomic(cfg.out_dir / "report.json", report_to_json(report).dump(2) + "\n");
    write_manifest(cfg, cfg.out_dir / "reconstruct.csv");
}

} // namespace rscs
