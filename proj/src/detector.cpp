#include "wavetrack/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wavetrack {

void DetectorParams::validate() const {
    if (!(beam.diameter > 0)) throw InvalidArgument("detector.beam_diameter must be > 0");
    if (!(pd_spacing > 0)) throw InvalidArgument("detector.pd_spacing must be > 0");
    if (!(pd_radius > 0)) throw InvalidArgument("detector.pd_radius must be > 0");
    if (!(rx_aperture_radius > 0)) throw InvalidArgument("detector.rx_aperture_radius must be > 0");
    if (!(noise_sigma >= 0)) throw InvalidArgument("detector.noise_sigma must be >= 0");
}

namespace {

// P(lo < Z < hi) for Z ~ N(0, 1).
double normal_interval(double lo, double hi) {
    const double s = std::numbers::sqrt2 / 2.0;
    if (lo > 0) return 0.5 * (std::erfc(lo * s) - std::erfc(hi * s));
    if (hi < 0) return 0.5 * (std::erfc(-hi * s) - std::erfc(-lo * s));
    return 1.0 - 0.5 * (std::erfc(-lo * s) + std::erfc(hi * s));
}

}  // namespace

// With x = R sin(theta) the chord half-length is R cos(theta); the y-integral
// of the Gaussian over the chord is closed form, and the remaining integrand
// is smooth and 2 pi periodic, so the trapezoid rule on theta converges
// geometrically. The node count scales with R / sigma so the Gaussian is
// resolved along the chord direction.
double capture_fraction(const SpotOffsetd& offset, const BeamProfile& beam, double aperture_radius) {
    if (!(aperture_radius > 0)) throw InvalidArgument("capture_fraction: aperture_radius must be > 0");
    const double sigma = beam.sigma();
    const double R = aperture_radius;
    const double dist = offset.norm();
    if (dist - R > 9.0 * sigma) return 0.0;

    const int nodes = std::clamp(static_cast<int>(std::ceil(24.0 * R / sigma)), 64, 1 << 16);
    const double dtheta = 2.0 * std::numbers::pi / nodes;
    const double norm_x = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double theta = -0.5 * std::numbers::pi + (i + 0.5) * dtheta;
        const double c = std::cos(theta);
        const double x = R * std::sin(theta);
        const double half = R * c;
        const double gx = norm_x * std::exp(-0.5 * std::pow((x - offset.x()) / sigma, 2));
        // For cos(theta) < 0 the interval is reversed and the Jacobian is negative; both flips cancel.
        const double lo = (-std::abs(half) - offset.y()) / sigma;
        const double hi = (std::abs(half) - offset.y()) / sigma;
        sum += gx * normal_interval(lo, hi) * R * std::abs(c);
    }
    return std::clamp(0.5 * sum * dtheta, 0.0, 1.0);
}

SpotOffsetd pd_position(int row, int col, double spacing) {
    return SpotOffsetd((col - 1) * spacing, (1 - row) * spacing);
}

PdArrayReading pd_array_sample(const SpotOffsetd& offset_at_array, const DetectorParams& params, RngStream& rng,
                               double timestamp) {
    PdArrayReading reading;
    reading.timestamp = timestamp;
    const double peak = capture_fraction(SpotOffsetd::Zero(), params.beam, params.pd_radius);
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            const SpotOffsetd rel = offset_at_array - pd_position(r, c, params.pd_spacing);
            double value = capture_fraction(rel, params.beam, params.pd_radius) / peak;
            if (params.noise_sigma > 0) value += params.noise_sigma * rng.normal();
            reading.intensities(r, c) = std::max(value, 0.0);
        }
    }
    return reading;
}

PdArrayReading dark_reading(const DetectorParams& params, RngStream& rng, double timestamp) {
    PdArrayReading reading;
    reading.timestamp = timestamp;
    if (params.noise_sigma > 0) {
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) reading.intensities(r, c) = std::max(params.noise_sigma * rng.normal(), 0.0);
    }
    return reading;
}

PdIndex locate_max(const PdArrayReading& reading) {
    PdIndex best{0, 0};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            if (reading.intensities(r, c) > reading.intensities(best.first, best.second)) best = {r, c};
    return best;
}

}  // namespace wavetrack
