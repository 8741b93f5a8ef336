#pragma once

#include <stdexcept>
#include <string>

namespace wavetrack {

/// Bad argument or precondition violation.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The beam no longer reaches the plane of interest (CCR aperture miss,
/// array out of reach, ...). The control loop treats it as a dark reading.
class BeamLost : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No refracted ray exists at the water-air interface.
class TotalInternalReflection : public BeamLost {
public:
    explicit TotalInternalReflection(double incidence)
        : BeamLost("total internal reflection at incidence angle " + std::to_string(incidence) + " rad"),
          incidence_(incidence) {}

    double incidence() const noexcept { return incidence_; }

private:
    double incidence_;
};

/// A bisection-based calibration could not bracket its target.
class CalibrationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration file problem; the message names the offending key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wavetrack
