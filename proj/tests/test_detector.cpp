#include <cmath>

#include <gtest/gtest.h>

#include "wavetrack/detector.hpp"

using namespace wavetrack;

namespace {

// Encircled energy of an offset circular Gaussian: integral over r of the
// Rician density, P = int_0^R r/s^2 exp(-(r^2 + d^2) / 2s^2) I0(r d / s^2) dr.
// The exp-scaled product keeps I0 finite for large arguments.
double rician_capture(double d, double sigma, double R, int n = 4000) {
    auto f = [&](double r) {
        const double z = r * d / (sigma * sigma);
        const double log_i0 = z < 600 ? std::log(std::cyl_bessel_i(0.0, z)) : z - 0.5 * std::log(2 * M_PI * z);
        return r / (sigma * sigma) * std::exp(log_i0 - (r * r + d * d) / (2 * sigma * sigma));
    };
    const double h = R / n;
    double sum = f(0) + f(R);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return sum * h / 3.0;
}

}  // namespace

TEST(Detector, CenteredEncircledEnergy) {
    BeamProfile beam;
    EXPECT_NEAR(capture_fraction(SpotOffsetd::Zero(), beam, beam.radius()), 1.0 - std::exp(-2.0), 1e-4);
    EXPECT_NEAR(capture_fraction(SpotOffsetd::Zero(), beam, beam.radius()), 0.8647, 1e-4);
    EXPECT_GE(capture_fraction(SpotOffsetd::Zero(), beam, 10 * beam.diameter), 0.9999);
    EXPECT_LE(capture_fraction(SpotOffsetd(20 * beam.diameter, 0.0), beam, beam.radius()), 1e-4);
}

TEST(Detector, OffsetCaptureAgainstRicianOracle) {
    BeamProfile beam;
    for (double R : {1e-3, 3.5e-3, 8e-3})
        for (double d : {0.0, 0.5e-3, 2e-3, 3.5e-3, 6e-3, 12e-3}) {
            const double got = capture_fraction(SpotOffsetd(d * 0.6, -d * 0.8), beam, R);
            EXPECT_NEAR(got, rician_capture(d, beam.sigma(), R), 1e-6) << "R=" << R << " d=" << d;
        }
}

TEST(Detector, CaptureRadiallyNonIncreasingAndBounded) {
    BeamProfile beam;
    double prev = 2.0;
    for (int i = 0; i <= 200; ++i) {
        const double c = capture_fraction(SpotOffsetd(i * 1e-4, 0.0), beam, 3.5e-3);
        EXPECT_GE(c, 0.0);
        EXPECT_LE(c, 1.0);
        EXPECT_LE(c, prev + 1e-6);
        prev = c;
    }
}

TEST(Detector, CaptureRotationInvariant) {
    BeamProfile beam;
    for (double d : {1e-3, 4e-3, 9e-3}) {
        const double ref = capture_fraction(SpotOffsetd(d, 0.0), beam, 3.5e-3);
        for (int k = 1; k < 12; ++k) {
            const double th = k * M_PI / 6.0 + 0.1;
            EXPECT_NEAR(capture_fraction(SpotOffsetd(d * std::cos(th), d * std::sin(th)), beam, 3.5e-3), ref, 1e-4);
        }
    }
}

TEST(Detector, CaptureRejectsBadAperture) {
    EXPECT_THROW(capture_fraction(SpotOffsetd::Zero(), BeamProfile{}, 0.0), InvalidArgument);
}

TEST(Detector, PdPositions) {
    EXPECT_EQ(pd_position(1, 1, 5e-3), SpotOffsetd::Zero());
    EXPECT_EQ(pd_position(1, 2, 5e-3), SpotOffsetd(5e-3, 0.0));  // east
    EXPECT_EQ(pd_position(0, 1, 5e-3), SpotOffsetd(0.0, 5e-3));  // north
    EXPECT_EQ(pd_position(2, 0, 5e-3), SpotOffsetd(-5e-3, -5e-3));
}

TEST(Detector, CenteredSpotLightsCenterPd) {
    DetectorParams p;
    p.noise_sigma = 0;
    RngStream rng(1);
    const auto r = pd_array_sample(SpotOffsetd::Zero(), p, rng);
    EXPECT_DOUBLE_EQ(r.center(), 1.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != 1 || j != 1) {
                EXPECT_LT(r.intensities(i, j), r.center());
            }
    EXPECT_EQ(locate_max(r), PdIndex(1, 1));
}

TEST(Detector, EastSpotLightsEastPd) {
    DetectorParams p;
    p.noise_sigma = 0;
    RngStream rng(1);
    const auto r = pd_array_sample(SpotOffsetd(5e-3, 0.0), p, rng);
    const double peak = rician_capture(0.0, p.beam.sigma(), p.pd_radius);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double d = (SpotOffsetd(5e-3, 0.0) - pd_position(i, j, p.pd_spacing)).norm();
            EXPECT_NEAR(r.intensities(i, j), rician_capture(d, p.beam.sigma(), p.pd_radius) / peak, 1e-6);
            if (i != 1 || j != 2) {
                EXPECT_LT(r.intensities(i, j), r.intensities(1, 2));
            }
        }
    EXPECT_EQ(locate_max(r), PdIndex(1, 2));
}

TEST(Detector, NoiselessSampleIsPureAndDrawsNothing) {
    DetectorParams p;
    p.noise_sigma = 0;
    RngStream a(5), b(99);
    const auto r1 = pd_array_sample(SpotOffsetd(1.1e-3, -0.4e-3), p, a, 0.5);
    const auto r2 = pd_array_sample(SpotOffsetd(1.1e-3, -0.4e-3), p, b, 0.5);
    EXPECT_EQ(r1.intensities, r2.intensities);
    EXPECT_EQ(a.counter(), 0u);
    EXPECT_EQ(r1.timestamp, 0.5);
}

TEST(Detector, NoisySampleIsSeededAndNonNegative) {
    DetectorParams p;
    RngStream a(5), b(5);
    const auto r1 = pd_array_sample(SpotOffsetd(9e-3, 0.0), p, a);
    const auto r2 = pd_array_sample(SpotOffsetd(9e-3, 0.0), p, b);
    EXPECT_EQ(r1.intensities, r2.intensities);
    EXPECT_GE(r1.intensities.minCoeff(), 0.0);
    const auto dark = dark_reading(p, a);
    EXPECT_GE(dark.intensities.minCoeff(), 0.0);
    EXPECT_LT(dark.peak(), 0.1);  // 5 sigma
}

TEST(Detector, CenterWinsInsideCenterCell) {
    DetectorParams p;
    p.noise_sigma = 0;
    RngStream rng(1);
    for (int k = 0; k < 24; ++k)
        for (double d : {0.5e-3, 1.5e-3, 2.4e-3}) {
            const double th = k * M_PI / 12.0;
            const auto r = pd_array_sample(SpotOffsetd(d * std::cos(th), d * std::sin(th)), p, rng);
            EXPECT_EQ(locate_max(r), PdIndex(1, 1));
        }
}

TEST(Detector, LocateMaxTies) {
    PdArrayReading r;
    r.intensities(1, 1) = 1.0;
    EXPECT_EQ(locate_max(r), PdIndex(1, 1));
    r.intensities.setZero();
    r.intensities(0, 2) = 0.4;
    EXPECT_EQ(locate_max(r), PdIndex(0, 2));
    r.intensities.setZero();
    r.intensities(0, 0) = r.intensities(2, 2) = 0.6;
    EXPECT_EQ(locate_max(r), PdIndex(0, 0));
    r.intensities.setConstant(0.3);
    EXPECT_EQ(locate_max(r), PdIndex(0, 0));
}

TEST(Detector, ParamValidation) {
    DetectorParams p;
    EXPECT_NO_THROW(p.validate());
    p.noise_sigma = -1;
    EXPECT_THROW(p.validate(), InvalidArgument);
    p = {};
    p.pd_spacing = 0;
    EXPECT_THROW(p.validate(), InvalidArgument);
    p = {};
    p.beam.diameter = 0;
    EXPECT_THROW(p.validate(), InvalidArgument);
}
