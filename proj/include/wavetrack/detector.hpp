#pragma once

#include <utility>

#include <Eigen/Core>

#include "wavetrack/optics.hpp"
#include "wavetrack/random.hpp"

namespace wavetrack {

/// Circular Gaussian beam; power normalized to 1 at the plane of interest.
struct BeamProfile {
    double diameter = 7e-3;  // 1/e^2 intensity diameter (m)

    double radius() const { return 0.5 * diameter; }
    /// Standard deviation of the intensity profile per axis (w / 2).
    double sigma() const { return 0.25 * diameter; }
};

struct DetectorParams {
    BeamProfile beam;
    double pd_spacing = 5e-3;          // adjacent PD pitch on the 3x3 array (m)
    double pd_radius = 1e-3;           // PD active-area radius (m)
    double rx_aperture_radius = 3.5e-3;  // receiver PD collecting aperture (m)
    double noise_sigma = 0.02;         // additive noise on normalized PD intensity

    void validate() const;
};

/// Normalized 3x3 intensities, (row, col) with center (1,1). Row 0 is +y, column 2 is +x.
struct PdArrayReading {
    Eigen::Matrix3d intensities = Eigen::Matrix3d::Zero();
    double timestamp = 0.0;

    double center() const { return intensities(1, 1); }
    double peak() const { return intensities.maxCoeff(); }
};

using PdIndex = std::pair<int, int>;

/// Fraction of a Gaussian beam centered at `offset` that falls inside a
/// circular aperture of `aperture_radius` centered at the plane origin.
/// Absolute error <= 1e-4.
double capture_fraction(const SpotOffsetd& offset, const BeamProfile& beam, double aperture_radius);

/// Center of PD (row, col) relative to the array center.
SpotOffsetd pd_position(int row, int col, double spacing);

/// Each PD reads its capture fraction divided by the centered-PD capture,
/// plus N(0, noise_sigma) clamped at 0. No draws are taken when noise_sigma == 0.
PdArrayReading pd_array_sample(const SpotOffsetd& offset_at_array, const DetectorParams& params, RngStream& rng,
                               double timestamp = 0.0);

/// All-dark reading (beam lost before reaching the array).
PdArrayReading dark_reading(const DetectorParams& params, RngStream& rng, double timestamp = 0.0);

/// Argmax; ties resolved to the smallest row, then smallest column.
PdIndex locate_max(const PdArrayReading& reading);

}  // namespace wavetrack
