#pragma once

// Sum-of-sinusoids water surface propagating along x, its analytic slope,
// and the frame-difference ASCR estimator (mean |d gamma / dt|).

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "wavetrack/errors.hpp"

namespace wavetrack {

template <typename Scalar>
struct WaveComponent {
    Scalar amplitude{0};          // m
    Scalar wavenumber{1};         // rad/m
    Scalar angular_frequency{0};  // rad/s
    Scalar phase{0};              // rad, kept in [0, 2 pi)

    WaveComponent() = default;

    WaveComponent(Scalar amplitude_, Scalar wavenumber_, Scalar angular_frequency_, Scalar phase_ = Scalar(0))
        : amplitude(amplitude_), wavenumber(wavenumber_), angular_frequency(angular_frequency_),
          phase(normalize_phase(phase_)) {
        if (!(amplitude >= 0)) throw InvalidArgument("wave component amplitude must be >= 0");
        if (!(wavenumber > 0)) throw InvalidArgument("wave component wavenumber must be > 0");
        if (!(angular_frequency >= 0)) throw InvalidArgument("wave component angular frequency must be >= 0");
    }

    static Scalar normalize_phase(Scalar p) {
        using std::floor;
        const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
        Scalar r = p - two_pi * floor(p / two_pi);
        if (r >= two_pi) r -= two_pi;
        return r;
    }

    /// Argument of the sinusoid, kappa*x - omega*t + phi.
    Scalar argument(Scalar x, Scalar t) const { return wavenumber * x - angular_frequency * t + phase; }

    /// Peak surface slope A*kappa.
    Scalar steepness() const { return amplitude * wavenumber; }
};

template <typename Scalar>
struct WaveModel {
    std::vector<WaveComponent<Scalar>> components;
    std::string label;

    bool flat() const noexcept { return components.empty(); }
};

using WaveComponentd = WaveComponent<double>;
using WaveModeld = WaveModel<double>;

template <typename Scalar>
Scalar surface_height(const WaveModel<Scalar>& model, Scalar x, Scalar t) {
    using std::sin;
    Scalar f(0);
    for (const auto& c : model.components) f += c.amplitude * sin(c.argument(x, t));
    return f;
}

/// k(t) = df/dx.
template <typename Scalar>
Scalar surface_slope(const WaveModel<Scalar>& model, Scalar x, Scalar t) {
    using std::cos;
    Scalar k(0);
    for (const auto& c : model.components) k += c.steepness() * cos(c.argument(x, t));
    return k;
}

/// gamma(t) = arctan(k(t)), in (-pi/2, pi/2).
template <typename Scalar>
Scalar slope_angle(const WaveModel<Scalar>& model, Scalar x, Scalar t) {
    using std::atan;
    return atan(surface_slope(model, x, t));
}

/// Analytic d gamma / dt.
template <typename Scalar>
Scalar slope_angle_rate(const WaveModel<Scalar>& model, Scalar x, Scalar t) {
    using std::sin;
    Scalar dk(0);
    for (const auto& c : model.components) dk += c.steepness() * c.angular_frequency * sin(c.argument(x, t));
    const Scalar k = surface_slope(model, x, t);
    return dk / (Scalar(1) + k * k);
}

/// Video-style sampling used to measure ASCR.
struct AscrSampling {
    double duration = 60.0;     // s
    double frame_rate = 240.0;  // Hz
};

/// Mean over adjacent frames of |delta gamma| * frame_rate, gamma sampled at x.
template <typename Scalar>
Scalar ascr_estimate(const WaveModel<Scalar>& model, Scalar x, AscrSampling sampling = {}) {
    using std::abs;
    if (!(sampling.duration > 0) || !(sampling.frame_rate > 0))
        throw InvalidArgument("ascr_estimate: duration and frame_rate must be > 0");
    const auto frames = static_cast<std::size_t>(std::floor(sampling.duration * sampling.frame_rate + 1e-9));
    if (frames < 2) throw InvalidArgument("ascr_estimate: need at least 2 frames");
    if (model.flat()) return Scalar(0);

    const Scalar rate(sampling.frame_rate);
    Scalar previous = slope_angle(model, x, Scalar(0));
    Scalar total(0);
    for (std::size_t i = 1; i < frames; ++i) {
        const Scalar current = slope_angle(model, x, Scalar(i) / rate);
        total += abs(current - previous);
        previous = current;
    }
    return total * rate / Scalar(frames - 1);
}

/// Copy of the model with every angular frequency multiplied by `factor`.
template <typename Scalar>
WaveModel<Scalar> scale_frequencies(const WaveModel<Scalar>& model, Scalar factor) {
    WaveModel<Scalar> out = model;
    for (auto& c : out.components) c.angular_frequency *= factor;
    return out;
}

/// Common omega scale factor that brings ascr_estimate to `target` within
/// `tolerance` (relative). Bisection in log-space over [1e-3, 1e3].
template <typename Scalar>
Scalar ascr_scale_factor(const WaveModel<Scalar>& model, Scalar target, Scalar x, AscrSampling sampling = {},
                         Scalar tolerance = Scalar(1e-4)) {
    using std::abs;
    using std::exp;
    using std::log;
    if (!(target > 0)) throw InvalidArgument("calibrate_to_ascr: target must be > 0");
    bool moving = false;
    for (const auto& c : model.components) moving = moving || c.angular_frequency > 0;
    if (!moving) throw InvalidArgument("calibrate_to_ascr: model needs a component with omega > 0");

    auto measure = [&](Scalar log_scale) {
        return ascr_estimate(scale_frequencies(model, exp(log_scale)), x, sampling);
    };
    Scalar lo = log(Scalar(1e-3));
    Scalar hi = log(Scalar(1e3));
    const Scalar at_lo = measure(lo);
    const Scalar at_hi = measure(hi);
    if (at_lo > target || at_hi < target) {
        throw CalibrationFailure("calibrate_to_ascr: target " + std::to_string(double(target)) +
                                 " rad/s outside reachable range [" + std::to_string(double(at_lo)) + ", " +
                                 std::to_string(double(at_hi)) + "] for omega scale in [1e-3, 1e3]");
    }
    // The unit scale is tried first so an already calibrated model is a fixed point.
    if (abs(measure(Scalar(0)) / target - Scalar(1)) <= tolerance) return Scalar(1);

    for (int iter = 0; iter < 200; ++iter) {
        const Scalar mid = Scalar(0.5) * (lo + hi);
        const Scalar value = measure(mid);
        if (abs(value / target - Scalar(1)) <= tolerance) return exp(mid);
        (value < target ? lo : hi) = mid;
    }
    return exp(Scalar(0.5) * (lo + hi));
}

template <typename Scalar>
WaveModel<Scalar> calibrate_to_ascr(const WaveModel<Scalar>& model, Scalar target, Scalar x,
                                    AscrSampling sampling = {}) {
    return scale_frequencies(model, ascr_scale_factor(model, target, x, sampling));
}

/// Named wave scenarios: "flat", "mild", "paper-wave".
/// "paper-wave" is returned calibrated to ASCR 0.34 rad/s at x = 0.
WaveModeld wave_preset(const std::string& name);

/// Uncalibrated component set behind a preset.
WaveModeld wave_preset_raw(const std::string& name);

std::vector<std::string> wave_preset_names();

}  // namespace wavetrack
