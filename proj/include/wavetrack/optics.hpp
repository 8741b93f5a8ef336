#pragma once

// Water-to-air refraction, receiver-plane spot displacement and the
// retroreflector feedback path. x and y are treated as independent planar
// problems; the surface is sampled at the nominal intersection x0 only.

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wavetrack/errors.hpp"

namespace wavetrack {

/// Lateral offset of a beam centroid from a plane's reference center (m).
template <typename Scalar>
using SpotOffset = Eigen::Matrix<Scalar, 2, 1>;
using SpotOffsetd = SpotOffset<double>;

/// Per-axis angles (rad): mirror tilt, beam direction, ...
template <typename Scalar>
using AxisAngles = Eigen::Matrix<Scalar, 2, 1>;
using AxisAnglesd = AxisAngles<double>;

struct LinkGeometry {
    double n_water = 1.33;
    double n_air = 1.00;
    double h_air = 1.2;     // surface -> receiver plane (m)
    double l_water = 0.14;  // MEMS mirror -> surface (m)
    double x0 = 0.0;        // nominal surface intersection (m)
    double bs_to_pdarray = 0.05;
    double bs_to_mems = 0.05;
    double bs2_to_ccr = 0.05;
    double bs2_to_rxpd = 0.05;
    double ccr_aperture_radius = 0.025;

    /// Throws InvalidArgument naming the first violated constraint.
    void validate() const;

    double critical_angle() const { return std::asin(n_air / n_water); }
};

inline void LinkGeometry::validate() const {
    if (!(n_air >= 1.0)) throw InvalidArgument("geometry.n_air must be >= 1");
    if (!(n_water > n_air)) throw InvalidArgument("geometry.n_water must exceed n_air");
    if (!(h_air > 0)) throw InvalidArgument("geometry.h_air must be > 0");
    if (!(l_water > 0)) throw InvalidArgument("geometry.l_water must be > 0");
    if (!(bs_to_pdarray >= 0 && bs_to_mems >= 0 && bs2_to_ccr >= 0 && bs2_to_rxpd >= 0))
        throw InvalidArgument("geometry plane spacings must be >= 0");
    if (!(ccr_aperture_radius > 0)) throw InvalidArgument("geometry.ccr_aperture_radius must be > 0");
    if (!std::isfinite(x0)) throw InvalidArgument("geometry.x0 must be finite");
}

/// Snell's law n_water sin(alpha) = n_air sin(beta).
template <typename Scalar>
Scalar refract_exit_angle(Scalar alpha, const LinkGeometry& g) {
    using std::abs;
    using std::asin;
    using std::sin;
    const Scalar s = Scalar(g.n_water) * sin(alpha) / Scalar(g.n_air);
    if (abs(s) > Scalar(1)) throw TotalInternalReflection(static_cast<double>(alpha));
    return asin(s);
}

/// d = h tan(beta - alpha) for a vertically incident beam (alpha = gamma).
template <typename Scalar>
Scalar spot_displacement(Scalar gamma, const LinkGeometry& g) {
    using std::tan;
    const Scalar beta = refract_exit_angle(gamma, g);
    return Scalar(g.h_air) * tan(beta - gamma);
}

/// Forward beam state at the receiver plane.
template <typename Scalar>
struct BeamTrace {
    SpotOffset<Scalar> offset;        // at the receiver plane
    AxisAngles<Scalar> direction;     // propagation angle from vertical above the surface
    AxisAngles<Scalar> launch;        // angle from vertical below the surface (2 * tilt)
};

/// Per axis: the mirror deflects by 2*tilt, the beam shifts l_water*tan(2*tilt)
/// by the surface, meets the local normal at 2*tilt + gamma, refracts, and
/// travels h_air at (beta - gamma) from vertical.
template <typename Scalar>
BeamTrace<Scalar> trace_beam_full(const AxisAngles<Scalar>& tilt, Scalar gamma_x, Scalar gamma_y,
                                  const LinkGeometry& g) {
    using std::tan;
    BeamTrace<Scalar> out;
    const Scalar gamma[2] = {gamma_x, gamma_y};
    for (int axis = 0; axis < 2; ++axis) {
        const Scalar launch = Scalar(2) * tilt[axis];
        const Scalar beta = refract_exit_angle(launch + gamma[axis], g);
        out.launch[axis] = launch;
        out.direction[axis] = beta - gamma[axis];
        out.offset[axis] = Scalar(g.l_water) * tan(launch) + Scalar(g.h_air) * tan(out.direction[axis]);
    }
    return out;
}

template <typename Scalar>
SpotOffset<Scalar> trace_beam(const AxisAngles<Scalar>& tilt, Scalar gamma_x, Scalar gamma_y, const LinkGeometry& g) {
    return trace_beam_full(tilt, gamma_x, gamma_y, g).offset;
}

/// Offset after a further `distance` of straight propagation past the receiver-plane reference.
template <typename Scalar>
SpotOffset<Scalar> propagate(const BeamTrace<Scalar>& trace, Scalar distance) {
    return trace.offset + distance * trace.direction.array().tan().matrix();
}

/// Offset at the CCR plane; equals the receiver offset when BS2 is equidistant.
template <typename Scalar>
SpotOffset<Scalar> ccr_offset(const BeamTrace<Scalar>& trace, const LinkGeometry& g) {
    return propagate(trace, Scalar(g.bs2_to_ccr - g.bs2_to_rxpd));
}

/// Corner-cube return: point-symmetric about the vertex.
template <typename Scalar>
SpotOffset<Scalar> retroreflect(const SpotOffset<Scalar>& offset_at_ccr, double aperture_radius) {
    if (offset_at_ccr.norm() > Scalar(aperture_radius)) throw BeamLost("beam misses the retroreflector aperture");
    return -offset_at_ccr;
}

template <typename Scalar>
SpotOffset<Scalar> retroreflect(const SpotOffset<Scalar>& offset_at_ccr, const LinkGeometry& g) {
    return retroreflect(offset_at_ccr, g.ccr_aperture_radius);
}

/// Offset of the returning beam at the PD-array plane. Under the locally
/// planar surface assumption the return retraces the refraction, so the
/// aligned geometry maps the CCR offset through retroreflect() unchanged.
/// A transmitter-side spacing mismatch delta = bs_to_pdarray - bs_to_mems
/// adds delta * tan(return_angle) per axis.
template <typename Scalar>
SpotOffset<Scalar> feedback_offset(const SpotOffset<Scalar>& offset_at_ccr, const LinkGeometry& g,
                                   const AxisAngles<Scalar>& return_angle = AxisAngles<Scalar>::Zero()) {
    SpotOffset<Scalar> out = retroreflect(offset_at_ccr, g);
    const Scalar delta = Scalar(g.bs_to_pdarray - g.bs_to_mems);
    if (delta != Scalar(0)) out += delta * return_angle.array().tan().matrix();
    return out;
}

struct CongruenceReport {
    bool congruent = true;
    std::vector<std::string> violations;
};

/// Checks AB = BD on the transmitter side and BS2->CCR = BS2->Rx PD on the receiver side.
inline CongruenceReport verify_congruence(const LinkGeometry& g, double tolerance = 1e-9) {
    CongruenceReport report;
    if (std::abs(g.bs_to_pdarray - g.bs_to_mems) > tolerance) {
        report.violations.push_back("transmitter side: bs_to_pdarray (" + std::to_string(g.bs_to_pdarray) +
                                    " m) != bs_to_mems (" + std::to_string(g.bs_to_mems) + " m)");
    }
    if (std::abs(g.bs2_to_ccr - g.bs2_to_rxpd) > tolerance) {
        report.violations.push_back("receiver side: bs2_to_ccr (" + std::to_string(g.bs2_to_ccr) +
                                    " m) != bs2_to_rxpd (" + std::to_string(g.bs2_to_rxpd) + " m)");
    }
    report.congruent = report.violations.empty();
    return report;
}

}  // namespace wavetrack
