#include "rscs/harness.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace rscs;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& leaf) {
    const fs::path dir = fs::temp_directory_path() / "rscs_harness_test" / leaf;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Tiny identity-sensing scenario: delta PSF, full-frame shutter.
fs::path write_identity_config(const fs::path& dir) {
    const std::string config = R"({
  "scenario": "test_identity",
  "seed": 7,
  "out_dir": ")" + (dir / "out").string() + R"(",
  "signal": {
    "kind": "pste",
    "pste": {
      "n": 12,
      "sigma_px": 1.274,
      "center": [6, 6],
      "rate_hz": 1000.0,
      "duration_s": 0.02,
      "pulses": [{"freq_hz": 200.0, "start_s": 0.002, "cycles": 2, "amplitude": 1.0}]
    }
  },
  "psf": {"kind": "delta"},
  "schedule": {"n": 12, "lines_per_sample": 12, "num_shutters": 1,
               "shutter_gap": 0, "phase_offset": 0, "rate_hz": 1000.0},
  "mode": "circular",
  "noise": null,
  "solvers": {
    "fista_d": {"lambda": 1e-6, "max_iters": 2000, "conv_tol": 1e-10,
                 "step_mode": "empirical", "block_len": 10},
    "tv": {"lambda": 1e-6, "max_iters": 300, "conv_tol": 1e-8},
    "l1": {"lambda": 1e-6, "max_iters": 500, "conv_tol": 1e-10}
  },
  "sweep": {"axis": "snr", "values": [10, 30]},
  "rip": {"ks": [1], "lines": [2, 4], "trials": 10}
})";
    const fs::path path = dir / "config.json";
    io::write_text_atomic(path, config);
    return path;
}

} // namespace

TEST_CASE("config loading and defaults") {
    const fs::path dir = temp_dir("config");
    const fs::path path = write_identity_config(dir);
    const ExperimentConfig cfg = load_config(path);
    CHECK(cfg.scenario == "test_identity");
    CHECK(cfg.rng_seed == 7);
    CHECK(cfg.mode == ConvMode::circular);
    CHECK(!cfg.noise.has_value());
    CHECK(cfg.schedule.lines_per_sample == 12);
    CHECK(cfg.signal.pste.pulses.size() == 1);
    CHECK(cfg.solver("fista_d").lambda == 1e-6);
    CHECK(cfg.solver("fista_d").block_len == 10);
    CHECK(cfg.solver("fista_d").step_mode == StepMode::empirical);
    CHECK(!cfg.solver("fista_d").step.has_value());
    CHECK(cfg.config_hash.size() == 64);
    CHECK(cfg.sweep.values == std::vector<double>{10.0, 30.0});
}

TEST_CASE("gen -> measure -> reconstruct reproduces an identity-sensing movie") {
    const fs::path dir = temp_dir("pipeline");
    ExperimentConfig cfg = load_config(write_identity_config(dir));

    cmd_gen(cfg);
    CHECK(fs::exists(cfg.out_dir / "movie.rsm1"));
    CHECK(fs::exists(cfg.out_dir / "psf.rsm1"));
    CHECK(fs::exists(cfg.out_dir / "pulses.json"));

    cmd_measure(cfg);
    CHECK(fs::exists(cfg.out_dir / "meas.rsm1"));
    CHECK(fs::exists(cfg.out_dir / "meas.rsm1.schedule.json"));

    cmd_reconstruct(cfg);
    CHECK(fs::exists(cfg.out_dir / "recon.rsm1"));
    CHECK(fs::exists(cfg.out_dir / "report.json"));

    const Movie truth = io::read_movie(cfg.out_dir / "movie.rsm1", 1000.0);
    const Movie recon = io::read_movie(cfg.out_dir / "recon.rsm1", 1000.0);
    const double rel = std::sqrt((truth.data.flat() - recon.data.flat()).square().sum() /
                                 truth.data.flat().square().sum());
    CHECK(rel <= 1e-3);

    // Stage outputs are byte-stable across reruns with the same seed.
    const std::string meas_bytes = slurp(cfg.out_dir / "meas.rsm1");
    const std::string recon_bytes = slurp(cfg.out_dir / "recon.rsm1");
    cmd_measure(cfg);
    cmd_reconstruct(cfg);
    CHECK(slurp(cfg.out_dir / "meas.rsm1") == meas_bytes);
    CHECK(slurp(cfg.out_dir / "recon.rsm1") == recon_bytes);

    // Missing sidecar gives a clear error.
    fs::remove(cfg.out_dir / "meas.rsm1.schedule.json");
    CHECK_THROWS_WITH_AS(cmd_reconstruct(cfg), doctest::Contains("sidecar"), io::IoError);
}

TEST_CASE("compare-solvers emits deterministic CSVs and manifests") {
    const fs::path dir = temp_dir("compare");
    ExperimentConfig cfg = load_config(write_identity_config(dir));
    cfg.plots = true;

    const CompareResult result = cmd_compare_solvers(cfg);
    REQUIRE(result.runs.size() == 3);
    for (const auto& run : result.runs) {
        CHECK(run.avg_framewise_error < 1e-2); // identity sensing, tiny lambda
    }
    CHECK(fs::exists(cfg.out_dir / "compare_trace.csv"));
    CHECK(fs::exists(cfg.out_dir / "compare_summary.csv"));
    CHECK(fs::exists(cfg.out_dir / "compare_trace.manifest.json"));
    CHECK(fs::exists(cfg.out_dir / "compare_trace.svg"));

    const std::string manifest = slurp(cfg.out_dir / "compare_trace.manifest.json");
    CHECK(manifest.find(cfg.config_hash) != std::string::npos);
    CHECK(manifest.find("test_identity") != std::string::npos);

    const std::string trace1 = slurp(cfg.out_dir / "compare_trace.csv");
    cmd_compare_solvers(cfg);
    CHECK(slurp(cfg.out_dir / "compare_trace.csv") == trace1);

    // Plot emission does not change CSV content.
    ExperimentConfig no_plots = cfg;
    no_plots.plots = false;
    no_plots.out_dir = dir / "out2";
    cmd_compare_solvers(no_plots);
    CHECK(slurp(no_plots.out_dir / "compare_trace.csv") == trace1);
    CHECK(!fs::exists(no_plots.out_dir / "compare_trace.svg"));
}

TEST_CASE("sweep over snr produces finite errors in axis order") {
    const fs::path dir = temp_dir("sweep");
    ExperimentConfig cfg = load_config(write_identity_config(dir));
    const SweepResult result = cmd_sweep(cfg);
    REQUIRE(result.cells.size() == 2);
    CHECK(result.cells[0].value == 10.0);
    CHECK(result.cells[1].value == 30.0);
    for (const auto& cell : result.cells) {
        CHECK(std::isfinite(cell.avg_framewise_error));
        CHECK(cell.avg_framewise_error > 0.0);
    }
    // More SNR, less error.
    CHECK(result.cells[1].avg_framewise_error < result.cells[0].avg_framewise_error);
    CHECK(fs::exists(cfg.out_dir / "sweep_snr.csv"));
}

TEST_CASE("rip-probe writes one row per (k, lines) cell") {
    const fs::path dir = temp_dir("rip");
    ExperimentConfig cfg = load_config(write_identity_config(dir));
    const RipProbeResult result = cmd_rip_probe(cfg);
    CHECK(result.cells.size() == 2);
    const std::string csv = slurp(cfg.out_dir / "rip_probe.csv");
    CHECK(csv.find("k,lines,delta_lower") != std::string::npos);
    for (const auto& cell : result.cells) {
        CHECK(std::isfinite(cell.estimate.delta_lower));
    }
}

TEST_CASE("nyquist control with identity sensing reaches tiny errors") {
    const fs::path dir = temp_dir("nyquist");
    const std::string config = R"({
  "scenario": "test_nyquist_control",
  "seed": 3,
  "out_dir": ")" + (dir / "out").string() + R"(",
  "signal": {
    "kind": "pulse_sweep",
    "pste": {"n": 12, "sigma_px": 1.274, "center": [6, 6],
              "rate_hz": 1000.0, "duration_s": 0.12},
    "f_start_hz": 100.0, "f_end_hz": 400.0, "n_pulses": 3, "spacing_s": 0.04
  },
  "psf": {"kind": "delta"},
  "schedule": {"n": 12, "lines_per_sample": 12, "num_shutters": 1,
               "shutter_gap": 0, "phase_offset": 0, "rate_hz": 1000.0},
  "mode": "circular",
  "noise": null,
  "solvers": {
    "fista_d": {"lambda": 1e-6, "max_iters": 2000, "conv_tol": 1e-10,
                 "step_mode": "empirical", "block_len": 12}
  }
})";
    io::write_text_atomic(dir / "config.json", config);
    const ExperimentConfig cfg = load_config(dir / "config.json");
    const NyquistResult result = cmd_nyquist(cfg);
    REQUIRE(result.per_pulse.size() == 3);
    for (const auto& [freq, err] : result.per_pulse) {
        CHECK(err <= 1e-3);
    }
    CHECK(fs::exists(cfg.out_dir / "nyquist.csv"));
}
