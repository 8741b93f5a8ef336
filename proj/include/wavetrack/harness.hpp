#pragma once

// Experiment orchestration: wave -> optics -> detector -> tracker -> link.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wavetrack/detector.hpp"
#include "wavetrack/link.hpp"
#include "wavetrack/optics.hpp"
#include "wavetrack/tracker.hpp"
#include "wavetrack/wave.hpp"

namespace wavetrack {

inline constexpr const char* kVersion = "0.1.0";

struct OmegaScale {
    double ascr = 0.0;   // rad/s
    double scale = 1.0;  // common omega multiplier
};

struct WaveConfig {
    std::string preset = "paper-wave";
    /// When non-empty, replaces the preset's components.
    std::vector<WaveComponentd> components;
    AscrSampling sampling;
    /// Cached calibration results; missing ASCR targets are calibrated on demand.
    std::vector<OmegaScale> omega_scales;
};

struct LinkAnchor {
    std::string modulation = "pam4";
    double symbol_rate = 600e6;
    double ber = 1e-4;
    double h_air = 1.2;
};

struct LinkConfig {
    std::optional<double> snr_peak;  // fitted from `anchor` when absent
    LinkAnchor anchor;
    double system_bandwidth = 1e9;
    double fec_limit = kDefaultFecLimit;
    double symbols_per_packet = 400e3;
    int packets_per_trial = 200;
    /// Start-to-start spacing of packet captures (s); 0 packs them back to back.
    double packet_interval = 0.05;
    Pam6Mapping pam6 = Pam6Mapping::Log2;
    /// Lower bound on capture samples inside each packet window.
    int min_samples_per_packet = 8;
};

struct TrialConfig {
    /// The wave starts at a seed-derived time in [0, start_window).
    double start_window = 60.0;
    /// Closed-loop time simulated before the first packet.
    double settle = 3.0;
};

struct SweepAxes {
    std::vector<std::string> modulations{"ook", "pam4", "pam6"};
    std::vector<double> symbol_rates{200e6, 400e6, 600e6, 800e6, 1000e6};
    std::vector<double> ascrs{0.34};
    std::vector<double> h_airs{1.2};
};

struct ExperimentConfig {
    WaveConfig wave;
    LinkGeometry geometry;
    DetectorParams detector;
    TrackerParams tracker;
    bool tracking_enabled = true;
    LinkConfig link;
    TrialConfig trial;
    SweepAxes sweep;
    std::optional<std::uint64_t> seed;
    std::string output = "out";
    int threads = 0;  // 0: hardware concurrency

    /// Throws ConfigError with the offending field named.
    void validate() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& config);

/// One point of the experiment grid.
struct Cell {
    std::string modulation = "pam4";
    double symbol_rate = 600e6;
    double ascr = 0.34;
    double h_air = 1.2;
    bool tracking = true;
};

struct RunResult {
    Cell cell;
    std::uint64_t seed = 0;
    LinkSummary link;
    double mean_capture = 0.0;
    double min_capture = 0.0;
    std::array<double, 2> offset_std{0.0, 0.0};
    /// Seconds spent in Idle, Tracking, Lost.
    std::array<double, 3> mode_occupancy{0.0, 0.0, 0.0};
    double duration = 0.0;
    std::vector<PacketResult> packets;
    TraceLog trace;
};

/// Wave model for an ASCR target (0 means flat water).
WaveModeld resolve_wave(const ExperimentConfig& config, double ascr);

/// snr_peak, fitted from the anchor if the config leaves it unset.
double resolve_snr_peak(const ExperimentConfig& config);

/// Deterministic per seed. The wave start time and the PD noise come from
/// independent children of the seed, so on/off arms with one seed share both.
RunResult run_trial(const ExperimentConfig& config, const Cell& cell, std::uint64_t seed, bool keep_trace = false);

/// seed_cell = master ^ mix64(((i_mod * 1024 + i_rate) * 1024 + i_ascr) * 1024 + i_h).
std::uint64_t cell_seed(std::uint64_t master, std::size_t i_mod, std::size_t i_rate, std::size_t i_ascr,
                        std::size_t i_h);

enum class TrackingArms { On, Off, Both };

/// Axis product in declared order (modulation, symbol rate, ASCR, h_air),
/// tracking off then on innermost. Both arms of a cell share its seed.
std::vector<RunResult> sweep(const ExperimentConfig& config, TrackingArms arms = TrackingArms::Both);

void write_sweep_csv(std::ostream& out, const std::vector<RunResult>& rows);

/// Structured text summary of one trial.
void write_run_result(std::ostream& out, const RunResult& result);

struct CalibrationReport {
    ExperimentConfig config;
    std::vector<std::string> lines;
};

/// Fits snr_peak to the link anchor and the omega scale of every sweep ASCR.
CalibrationReport calibrate(const ExperimentConfig& config);

/// SVG plots for the PLR / throughput vs symbol rate and PLR vs ASCR views.
std::vector<std::filesystem::path> write_sweep_plots(const std::filesystem::path& dir,
                                                     const std::vector<RunResult>& rows);

}  // namespace wavetrack
