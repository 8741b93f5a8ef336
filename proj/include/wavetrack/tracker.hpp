#pragma once

// Threshold-triggered MEMS beam tracker: 16-bit quantized two-axis mirror,
// argmax-directed fixed steps, lost detection after five consecutive
// sub-threshold readings and reset to the initial point.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "wavetrack/detector.hpp"
#include "wavetrack/optics.hpp"
#include "wavetrack/random.hpp"
#include "wavetrack/wave.hpp"

namespace wavetrack {

inline constexpr int kMissesBeforeLost = 5;

enum class TrackerMode : std::uint8_t { Idle, Tracking, Lost };

std::string_view to_string(TrackerMode mode);

struct TrackerParams {
    double threshold_a = 0.5;     // trigger: center intensity below a
    double threshold_b = 0.1;     // valid spot: peak intensity at least b
    double step = 0.075e-3;       // tilt increment per control tick (rad)
    double control_rate = 1000.0; // Hz
    double max_tilt = 0.08726646259971647;  // 5 degrees
    int dac_bits = 16;

    void validate() const;
};

/// Two-axis mirror held as DAC codes on a uniform grid over [-max_tilt, +max_tilt].
class MirrorState {
public:
    explicit MirrorState(double max_tilt = TrackerParams{}.max_tilt, int dac_bits = 16);

    double max_tilt() const noexcept { return max_tilt_; }
    std::int64_t max_code() const noexcept { return max_code_; }
    /// 2 max_tilt / (2^bits - 1).
    double lsb() const noexcept { return 2.0 * max_tilt_ / static_cast<double>(max_code_); }

    std::int64_t code(int axis) const { return codes_[axis]; }
    double tilt(int axis) const { return code_to_tilt(codes_[axis]); }
    AxisAnglesd tilt() const { return AxisAnglesd(tilt(0), tilt(1)); }

    double code_to_tilt(std::int64_t code) const;
    /// Clamp to the range, then round to the nearest code (half away from zero).
    std::int64_t tilt_to_code(double tilt) const;

    void set_code(int axis, std::int64_t code);
    /// Grid point nearest zero tilt on both axes.
    void reset();
    bool at_initial_point() const;

    bool operator==(const MirrorState&) const = default;

private:
    double max_tilt_;
    std::int64_t max_code_;
    std::int64_t codes_[2];
};

struct MirrorCommand {
    enum class Kind : std::uint8_t { None, Step, Reset };
    Kind kind = Kind::None;
    AxisAnglesd delta = AxisAnglesd::Zero();

    static MirrorCommand none() { return {}; }
    static MirrorCommand reset() { return {Kind::Reset, AxisAnglesd::Zero()}; }
    static MirrorCommand step(const AxisAnglesd& d) { return {Kind::Step, d}; }
};

struct TrackerState {
    TrackerMode mode = TrackerMode::Idle;
    MirrorState mirror;
    int miss_count = 0;
    TrackerParams params;

    explicit TrackerState(const TrackerParams& p = {}) : mirror(p.max_tilt, p.dac_bits), params(p) {}
};

struct ControlOutput {
    TrackerState state;
    MirrorCommand command;
};

/// Tilt direction (per axis, in units of `step`) commanded when the
/// brightest PD is (row, col). The array sees the receiver offset mirrored
/// through the retroreflector, and a positive tilt moves the receiver spot
/// toward +x/+y, so the mirror steers toward the brightest PD:
///
///   col 0 -> -x, col 1 -> 0, col 2 -> +x
///   row 0 -> +y, row 1 -> 0, row 2 -> -y
AxisAnglesd steering_direction(const PdIndex& cell);

/// One pass of the control algorithm for the current reading.
ControlOutput control_step(const TrackerState& state, const PdArrayReading& reading);

MirrorState apply_tilt(const MirrorState& mirror, const MirrorCommand& command);

struct TraceSample {
    double t = 0.0;            // s since run start
    double gamma = 0.0;        // slope angle at x0 (rad)
    SpotOffsetd offset = SpotOffsetd::Zero();  // receiver plane
    double capture = 0.0;      // receiver capture fraction
    TrackerMode mode = TrackerMode::Idle;
    AxisAnglesd tilt = AxisAnglesd::Zero();
    bool control_tick = false; // controller evaluated at this sample
    bool beam_lost = false;    // TIR on the forward path
};

struct TraceLog {
    std::vector<TraceSample> samples;
    double control_rate = 0.0;
    int samples_per_tick = 1;
    std::size_t ticks = 0;
};

struct LoopOptions {
    bool tracking_enabled = true;
    /// Link samples per control tick; the mirror holds between ticks.
    int samples_per_tick = 1;
    /// Wave time at the first tick (s).
    double start_time = 0.0;
    /// When set, samples between ticks are only taken where this returns true
    /// (run time since start). Tick samples are always recorded.
    std::function<bool(double)> oversample_when;
};

/// Runs ceil(duration * control_rate) control ticks. At each tick: gamma at x0,
/// forward trace with the current tilt, CCR and feedback offsets, PD-array
/// sample, control_step, apply_tilt. TIR or a CCR miss yields a dark reading.
TraceLog closed_loop_run(const WaveModeld& wave, const LinkGeometry& geometry, const DetectorParams& detector,
                         const TrackerParams& tracker, double duration, RngStream& rng, const LoopOptions& options = {});

/// Columns: t_s,gamma_rad,offset_x_m,offset_y_m,capture_fraction,mode,tilt_x_rad,tilt_y_rad
void write_trace_csv(std::ostream& out, const TraceLog& log);

}  // namespace wavetrack
