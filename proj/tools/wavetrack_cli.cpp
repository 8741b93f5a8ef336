// wavetrack: simulate, sweep, calibrate and measure the water-air tracking link.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wavetrack/harness.hpp"

namespace fs = std::filesystem;
using namespace wavetrack;

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string tracking;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "Experiment configuration (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Master seed (overrides the config)");
    cmd->add_option("--out", o.out_dir, "Output directory (overrides the config)");
    cmd->add_option("--tracking", o.tracking, "Tracking arm(s) to run")->check(CLI::IsMember({"on", "off", "both"}));
    cmd->add_flag("--quiet", o.quiet, "Only write files");
}

ExperimentConfig load(const CommonOptions& o) {
    ExperimentConfig config = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
    if (o.seed) config.seed = *o.seed;
    if (!o.out_dir.empty()) config.output = o.out_dir;
    config.validate();
    return config;
}

TrackingArms arms_from(const std::string& flag, TrackingArms fallback) {
    if (flag == "on") return TrackingArms::On;
    if (flag == "off") return TrackingArms::Off;
    if (flag == "both") return TrackingArms::Both;
    return fallback;
}

int run_simulate(const CommonOptions& o, bool write_trace) {
    const ExperimentConfig config = load(o);
    const TrackingArms arms = arms_from(o.tracking, config.tracking_enabled ? TrackingArms::On : TrackingArms::Off);
    fs::create_directories(config.output);
    const auto& ax = config.sweep;
    Cell cell{ax.modulations.front(), ax.symbol_rates.front(), ax.ascrs.front(), ax.h_airs.front(), true};
    const std::uint64_t seed = cell_seed(*config.seed, 0, 0, 0, 0);
    for (bool on : {false, true}) {
        if ((on && arms == TrackingArms::Off) || (!on && arms == TrackingArms::On)) continue;
        cell.tracking = on;
        const RunResult r = run_trial(config, cell, seed, write_trace);
        const std::string arm = on ? "on" : "off";
        std::ofstream txt(fs::path(config.output) / ("result_tracking_" + arm + ".txt"));
        write_run_result(txt, r);
        if (write_trace) {
            std::ofstream csv(fs::path(config.output) / ("trace_tracking_" + arm + ".csv"));
            write_trace_csv(csv, r.trace);
        }
        if (!o.quiet) {
            write_run_result(std::cout, r);
            std::cout << '\n';
        }
    }
    return 0;
}

int run_sweep(const CommonOptions& o) {
    const ExperimentConfig config = load(o);
    const auto rows = sweep(config, arms_from(o.tracking, TrackingArms::Both));
    fs::create_directories(config.output);
    const fs::path csv_path = fs::path(config.output) / "sweep.csv";
    std::ofstream csv(csv_path);
    write_sweep_csv(csv, rows);
    const auto plots = write_sweep_plots(config.output, rows);
    if (!o.quiet) {
        std::cout << "wrote " << csv_path.string() << " (" << rows.size() << " rows)\n";
        for (const auto& p : plots) std::cout << "wrote " << p.string() << '\n';
    }
    return 0;
}

int run_calibrate(const CommonOptions& o) {
    const CalibrationReport report = calibrate(load(o));
    fs::create_directories(report.config.output);
    const fs::path path = fs::path(report.config.output) / "calibrated_config.json";
    std::ofstream(path) << config_to_json(report.config);
    if (!o.quiet) {
        for (const auto& line : report.lines) std::cout << line << '\n';
        std::cout << "wrote " << path.string() << '\n';
    }
    return 0;
}

int run_ascr(const CommonOptions& o, const std::string& preset, std::optional<double> target) {
    ExperimentConfig config = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
    if (!preset.empty()) {
        config.wave.preset = preset;
        config.wave.components.clear();
    }
    WaveModeld model;
    if (target) {
        model = resolve_wave(config, *target);
    } else if (!config.wave.components.empty()) {
        model.components = config.wave.components;
        model.label = "custom";
    } else {
        model = wave_preset(config.wave.preset);
    }
    const double ascr = ascr_estimate(model, config.geometry.x0, config.wave.sampling);
    std::cout << "model: " << model.label << '\n' << "components: " << model.components.size() << '\n';
    for (const auto& c : model.components) {
        std::cout << "  amplitude_m=" << c.amplitude << " wavenumber_rad_m=" << c.wavenumber
                  << " angular_frequency_rad_s=" << c.angular_frequency << " phase_rad=" << c.phase << '\n';
    }
    std::cout << "ascr_rad_s: " << ascr << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Water-air optical link simulator with closed-loop MEMS beam tracking"};
    app.require_subcommand(1);

    CommonOptions sim_opts, sweep_opts, cal_opts, ascr_opts;
    bool write_trace = false;
    auto* sim = app.add_subcommand("simulate", "Run one trial (first value of every sweep axis)");
    add_common(sim, sim_opts);
    sim->add_flag("--trace", write_trace, "Also write the TraceLog CSV");

    auto* sw = app.add_subcommand("sweep", "Run the sweep grid; writes sweep.csv and SVG plots");
    add_common(sw, sweep_opts);

    auto* cal = app.add_subcommand("calibrate", "Fit snr_peak and per-ASCR omega scales; writes calibrated_config.json");
    add_common(cal, cal_opts);

    std::string preset;
    std::optional<double> target;
    auto* asc = app.add_subcommand("ascr", "Measure the ASCR of a wave preset or configured wave");
    add_common(asc, ascr_opts);
    asc->add_option("--preset", preset, "Wave preset (flat, mild, paper-wave)");
    asc->add_option("--target", target, "Calibrate the configured wave to this ASCR before measuring");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*sim) return run_simulate(sim_opts, write_trace);
        if (*sw) return run_sweep(sweep_opts);
        if (*cal) return run_calibrate(cal_opts);
        if (*asc) return run_ascr(ascr_opts, preset, target);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
