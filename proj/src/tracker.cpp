#include "wavetrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "format.hpp"

namespace wavetrack {

std::string_view to_string(TrackerMode mode) {
    switch (mode) {
        case TrackerMode::Idle: return "idle";
        case TrackerMode::Tracking: return "tracking";
        case TrackerMode::Lost: return "lost";
    }
    return "?";
}

void TrackerParams::validate() const {
    if (!(threshold_b > 0)) throw InvalidArgument("tracker.threshold_b must be > 0");
    if (!(threshold_a > threshold_b)) throw InvalidArgument("tracker.threshold_a must exceed threshold_b");
    if (!(step > 0)) throw InvalidArgument("tracker.step must be > 0");
    if (!(control_rate > 0)) throw InvalidArgument("tracker.control_rate must be > 0");
    if (!(max_tilt > 0)) throw InvalidArgument("tracker.max_tilt must be > 0");
    if (dac_bits < 2 || dac_bits > 32) throw InvalidArgument("tracker.dac_bits must be in [2, 32]");
}

MirrorState::MirrorState(double max_tilt, int dac_bits)
    : max_tilt_(max_tilt), max_code_((std::int64_t{1} << dac_bits) - 1), codes_{0, 0} {
    if (!(max_tilt > 0)) throw InvalidArgument("mirror max_tilt must be > 0");
    if (dac_bits < 2 || dac_bits > 32) throw InvalidArgument("mirror dac_bits must be in [2, 32]");
    reset();
}

double MirrorState::code_to_tilt(std::int64_t code) const {
    // Symmetric form: both endpoints are exact and code c mirrors max_code - c.
    return static_cast<double>(2 * code - max_code_) / static_cast<double>(max_code_) * max_tilt_;
}

std::int64_t MirrorState::tilt_to_code(double tilt) const {
    const double clamped = std::clamp(tilt, -max_tilt_, max_tilt_);
    const auto code = static_cast<std::int64_t>(std::llround((clamped + max_tilt_) / lsb()));
    return std::clamp<std::int64_t>(code, 0, max_code_);
}

void MirrorState::set_code(int axis, std::int64_t code) {
    if (code < 0 || code > max_code_) throw InvalidArgument("mirror code out of range");
    codes_[axis] = code;
}

void MirrorState::reset() {
    codes_[0] = codes_[1] = tilt_to_code(0.0);
}

bool MirrorState::at_initial_point() const {
    const auto zero = tilt_to_code(0.0);
    return codes_[0] == zero && codes_[1] == zero;
}

AxisAnglesd steering_direction(const PdIndex& cell) {
    return AxisAnglesd(static_cast<double>(cell.second - 1), static_cast<double>(1 - cell.first));
}

namespace {

void track(ControlOutput& out, const PdArrayReading& reading, bool allow_idle) {
    TrackerState& s = out.state;
    const TrackerParams& p = s.params;
    const PdIndex cell = locate_max(reading);
    if (reading.intensities(cell.first, cell.second) >= p.threshold_b) {
        s.miss_count = 0;
        if (cell == PdIndex{1, 1}) {
            if (allow_idle && reading.center() >= p.threshold_a) s.mode = TrackerMode::Idle;
            return;
        }
        out.command = MirrorCommand::step(p.step * steering_direction(cell));
        return;
    }
    s.miss_count = std::min(s.miss_count + 1, kMissesBeforeLost);
    if (s.miss_count == kMissesBeforeLost) {
        s.mode = TrackerMode::Lost;
        out.command = MirrorCommand::reset();
    }
}

}  // namespace

ControlOutput control_step(const TrackerState& state, const PdArrayReading& reading) {
    ControlOutput out{state, MirrorCommand::none()};
    TrackerState& s = out.state;
    switch (state.mode) {
        case TrackerMode::Idle:
            if (reading.center() >= s.params.threshold_a) return out;
            s.mode = TrackerMode::Tracking;
            track(out, reading, /*allow_idle=*/true);
            return out;
        case TrackerMode::Tracking:
            track(out, reading, /*allow_idle=*/true);
            return out;
        case TrackerMode::Lost:
            if (reading.peak() < s.params.threshold_b) return out;
            s.mode = TrackerMode::Tracking;
            s.miss_count = 0;
            // Re-centering starts on this reading; Idle is only reachable from the next one.
            track(out, reading, /*allow_idle=*/false);
            return out;
    }
    return out;
}

MirrorState apply_tilt(const MirrorState& mirror, const MirrorCommand& command) {
    MirrorState next = mirror;
    switch (command.kind) {
        case MirrorCommand::Kind::None: break;
        case MirrorCommand::Kind::Reset: next.reset(); break;
        case MirrorCommand::Kind::Step:
            for (int axis = 0; axis < 2; ++axis) {
                if (command.delta[axis] == 0.0) continue;
                next.set_code(axis, next.tilt_to_code(mirror.tilt(axis) + command.delta[axis]));
            }
            break;
    }
    return next;
}

TraceLog closed_loop_run(const WaveModeld& wave, const LinkGeometry& geometry, const DetectorParams& detector,
                         const TrackerParams& tracker, double duration, RngStream& rng, const LoopOptions& options) {
    if (!(duration > 0)) throw InvalidArgument("closed_loop_run: duration must be > 0");
    if (!(tracker.control_rate > 0)) throw InvalidArgument("closed_loop_run: control_rate must be > 0");
    if (options.samples_per_tick < 1) throw InvalidArgument("closed_loop_run: samples_per_tick must be >= 1");
    geometry.validate();
    detector.validate();
    tracker.validate();

    TraceLog log;
    log.control_rate = tracker.control_rate;
    log.samples_per_tick = options.samples_per_tick;
    log.ticks = static_cast<std::size_t>(std::ceil(duration * tracker.control_rate - 1e-9));
    log.samples.reserve(log.ticks * options.samples_per_tick);

    const double sample_dt = 1.0 / (tracker.control_rate * options.samples_per_tick);
    TrackerState state(tracker);

    for (std::size_t k = 0; k < log.ticks; ++k) {
        for (int sub = 0; sub < options.samples_per_tick; ++sub) {
            TraceSample sample;
            sample.t = static_cast<double>(k * options.samples_per_tick + sub) * sample_dt;
            if (sub != 0 && options.oversample_when && !options.oversample_when(sample.t)) continue;
            sample.gamma = slope_angle(wave, geometry.x0, options.start_time + sample.t);
            sample.mode = state.mode;
            sample.tilt = state.mirror.tilt();
            sample.control_tick = sub == 0;

            BeamTrace<double> trace;
            try {
                trace = trace_beam_full(sample.tilt, sample.gamma, 0.0, geometry);
                sample.offset = trace.offset;
                sample.capture = capture_fraction(trace.offset, detector.beam, detector.rx_aperture_radius);
            } catch (const TotalInternalReflection&) {
                sample.beam_lost = true;
            }
            log.samples.push_back(sample);

            if (sub != 0 || !options.tracking_enabled) continue;

            PdArrayReading reading;
            if (sample.beam_lost) {
                reading = dark_reading(detector, rng, sample.t);
            } else {
                try {
                    const SpotOffsetd at_array = feedback_offset(ccr_offset(trace, geometry), geometry, trace.launch);
                    reading = pd_array_sample(at_array, detector, rng, sample.t);
                } catch (const BeamLost&) {
                    reading = dark_reading(detector, rng, sample.t);
                }
            }
            ControlOutput out = control_step(state, reading);
            out.state.mirror = apply_tilt(out.state.mirror, out.command);
            state = out.state;
        }
    }
    return log;
}

void write_trace_csv(std::ostream& out, const TraceLog& log) {
    using detail::format_double;
    out << "t_s,gamma_rad,offset_x_m,offset_y_m,capture_fraction,mode,tilt_x_rad,tilt_y_rad\n";
    for (const auto& s : log.samples) {
        out << format_double(s.t) << ',' << format_double(s.gamma) << ',' << format_double(s.offset.x()) << ','
            << format_double(s.offset.y()) << ',' << format_double(s.capture) << ',' << to_string(s.mode) << ','
            << format_double(s.tilt.x()) << ',' << format_double(s.tilt.y()) << '\n';
    }
}

}  // namespace wavetrack
