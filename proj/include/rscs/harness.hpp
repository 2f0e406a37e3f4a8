#pragma once

#include "rscs/analysis.hpp"
#include "rscs/io.hpp"
#include "rscs/model.hpp"
#include "rscs/signals.hpp"
#include "rscs/solvers.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rscs {

struct SignalSpec {
    std::string kind = "pste"; // "pste" | "pulse_sweep"
    PsteSpec pste;
    // pulse_sweep parameters
    double f_start_hz = 40.0;
    double f_end_hz = 480.0;
    int n_pulses = 6;
    double spacing_s = 0.03;
};

struct PsfSpec {
    PsfKind kind = PsfKind::speckle;
    PsfParams params;
};

struct SweepSpec {
    std::string axis = "lines"; // "lines" | "rate" | "snr"
    std::vector<double> values;
};

struct PhaseSpec {
    std::string system = "single"; // "single" | "double" | "single_4x"
    std::vector<double> offsets_ms;
    double stability_factor = 3.0; // max/min normalized-error ratio allowed
};

struct RipSpec {
    std::vector<int> ks{1, 2};
    std::vector<int> lines{1, 2, 4, 8};
    int trials = 50;
    bool all_phases = false; // probe every distinct t when set
};

struct ExperimentConfig {
    std::string scenario = "unnamed";
    SignalSpec signal;
    PsfSpec psf;
    ShutterSchedule schedule;
    ConvMode mode = ConvMode::physical;
    std::optional<NoiseSpec> noise;
    std::map<std::string, SolverConfig> solvers;
    SweepSpec sweep;
    PhaseSpec phase;
    RipSpec rip;
    std::filesystem::path out_dir = "out";
    std::uint64_t rng_seed = 0;
    bool plots = true;

    std::string config_hash; // sha256 of the config file bytes

    SolverConfig solver(const std::string& name) const;
};

ExperimentConfig load_config(const std::filesystem::path& path);

/// Built scenario inputs shared by the experiment commands.
struct Scenario {
    Movie truth;
    std::vector<PulseSupport> pulses;
    Psf psf;
    ShutterSchedule schedule;
};

Scenario build_scenario(const ExperimentConfig& cfg);

struct SolverRun {
    std::string name;
    Movie recon;
    SolveReport report;
    double avg_framewise_error = 0.0;
};

struct CompareResult {
    std::vector<SolverRun> runs; // fista_d, tv, l1
};

/// Fig. 4 style comparison: all three solvers on the same measurements;
/// emits the center-pixel trace and a summary table.
CompareResult cmd_compare_solvers(const ExperimentConfig& cfg);

struct SweepCell {
    double value = 0.0;
    double avg_framewise_error = 0.0;
    double wall_time = 0.0;
};

struct SweepResult {
    std::string axis;
    std::vector<SweepCell> cells;
};

/// Fig. 5 style sweeps over lines per sample, sampling rate, or SNR.
SweepResult cmd_sweep(const ExperimentConfig& cfg);

struct NyquistResult {
    std::vector<std::pair<double, double>> per_pulse; // (freq_hz, normalized error)
};

/// Figs. 7-8: pulse train swept up to the Nyquist limit, per-pulse
/// power-normalized errors.
NyquistResult cmd_nyquist(const ExperimentConfig& cfg);

struct PhaseCell {
    double offset_ms = 0.0;
    std::vector<std::pair<double, double>> per_pulse;
};

struct PhaseSweepResult {
    std::string system;
    std::vector<PhaseCell> cells;

    /// Worst normalized error of the highest-frequency pulse over offsets.
    double worst_fastest_pulse() const;
    double best_fastest_pulse() const;
};

/// Figs. 9-11: reconstruction quality across shutter phase offsets for the
/// single, double, and 4x-rate single shutter systems.
PhaseSweepResult cmd_phase_sweep(const ExperimentConfig& cfg);

struct RipProbeCell {
    int k = 0;
    int lines = 0;
    RipEstimate estimate;
};

struct RipProbeResult {
    std::vector<RipProbeCell> cells;
};

RipProbeResult cmd_rip_probe(const ExperimentConfig& cfg);

/// Staged pipeline: gen writes truth movie + psf, measure writes the
/// readout + schedule sidecar, reconstruct writes the recovered movie and
/// its solve report.
void cmd_gen(const ExperimentConfig& cfg);
void cmd_measure(const ExperimentConfig& cfg);
void cmd_reconstruct(const ExperimentConfig& cfg);

} // namespace rscs
