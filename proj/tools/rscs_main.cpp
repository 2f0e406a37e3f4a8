#include "rscs/harness.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct GlobalArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool no_plots = false;
};

rscs::ExperimentConfig resolve(const GlobalArgs& args) {
    rscs::ExperimentConfig cfg = rscs::load_config(args.config_path);
    if (args.seed) cfg.rng_seed = *args.seed;
    if (args.out_dir) cfg.out_dir = *args.out_dir;
    cfg.plots = !args.no_plots;
    return cfg;
}

void add_global_flags(CLI::App* cmd, GlobalArgs& args) {
    cmd->add_option("--config", args.config_path, "Experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed, "Override the config RNG seed");
    cmd->add_option("--out", args.out_dir, "Override the output directory");
    cmd->add_flag("--no-plots", args.no_plots, "Skip SVG plot emission");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rolling-shutter compressed sensing simulator"};
    app.require_subcommand(1);

    GlobalArgs args;
    struct Cmd {
        const char* name;
        const char* help;
        void (*run)(const rscs::ExperimentConfig&);
    };
    const Cmd cmds[] = {
        {"gen", "Generate the truth movie and PSF",
         [](const rscs::ExperimentConfig& cfg) { rscs::cmd_gen(cfg); }},
        {"measure", "Apply the forward model to a generated movie",
         [](const rscs::ExperimentConfig& cfg) { rscs::cmd_measure(cfg); }},
        {"reconstruct", "Reconstruct a movie from measurements",
         [](const rscs::ExperimentConfig& cfg) { rscs::cmd_reconstruct(cfg); }},
        {"compare-solvers", "Run FISTA-D, TV and l1 on the same measurements",
         [](const rscs::ExperimentConfig& cfg) {
             const auto result = rscs::cmd_compare_solvers(cfg);
             for (const auto& run : result.runs) {
                 std::cout << run.name << ": avg error " << run.avg_framewise_error
                           << ", wall " << run.report.wall_time << " s, "
                           << run.report.iterations << " iters\n";
             }
         }},
        {"sweep", "Sweep lines per sample, sampling rate, or SNR",
         [](const rscs::ExperimentConfig& cfg) {
             const auto result = rscs::cmd_sweep(cfg);
             for (const auto& cell : result.cells) {
                 std::cout << result.axis << "=" << cell.value << ": avg error "
                           << cell.avg_framewise_error << "\n";
             }
         }},
        {"nyquist", "Pulse-frequency sweep up to the Nyquist limit",
         [](const rscs::ExperimentConfig& cfg) {
             const auto result = rscs::cmd_nyquist(cfg);
             for (const auto& [freq, err] : result.per_pulse) {
                 std::cout << freq << " Hz: normalized error " << err << "\n";
             }
         }},
        {"phase-sweep", "Reconstruction quality across shutter phase offsets",
         [](const rscs::ExperimentConfig& cfg) {
             const auto result = rscs::cmd_phase_sweep(cfg);
             std::cout << result.system
                       << ": fastest-pulse error worst " << result.worst_fastest_pulse()
                       << ", best " << result.best_fastest_pulse() << "\n";
         }},
        {"rip-probe", "Monte-Carlo RIP constants over (k, lines) grid",
         [](const rscs::ExperimentConfig& cfg) {
             const auto result = rscs::cmd_rip_probe(cfg);
             for (const auto& cell : result.cells) {
                 std::cout << "k=" << cell.k << " lines=" << cell.lines
                           << ": delta_lower " << cell.estimate.delta_lower << "\n";
             }
         }},
    };
    for (const auto& cmd : cmds) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        add_global_flags(sub, args);
        auto run = cmd.run;
        sub->callback([&args, run]() { run(resolve(args)); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
