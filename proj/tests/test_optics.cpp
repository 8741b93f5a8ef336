#include <cmath>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "wavetrack/optics.hpp"

using namespace wavetrack;
using hp = boost::multiprecision::cpp_bin_float_50;

namespace {

// Snell exit angle and receiver displacement written out directly at 50 digits.
hp exit_angle_hp(hp alpha) { return boost::multiprecision::asin(hp("1.33") * boost::multiprecision::sin(alpha)); }

hp displacement_hp(hp gamma, hp h) { return h * boost::multiprecision::tan(exit_angle_hp(gamma) - gamma); }

}  // namespace

TEST(Optics, ExitAngleExamples) {
    LinkGeometry g;
    EXPECT_EQ(refract_exit_angle(0.0, g), 0.0);
    const double beta = refract_exit_angle(0.1, g);
    EXPECT_NEAR(beta, exit_angle_hp(hp("0.1")).convert_to<double>(), 1e-15);
    EXPECT_NEAR(beta, 0.13317, 5e-6);
}

TEST(Optics, TotalInternalReflection) {
    LinkGeometry g;
    EXPECT_NEAR(g.critical_angle(), boost::multiprecision::asin(1 / hp("1.33")).convert_to<double>(), 1e-15);
    EXPECT_NEAR(g.critical_angle(), 0.85091, 1e-5);
    EXPECT_THROW(refract_exit_angle(0.86, g), TotalInternalReflection);
    EXPECT_THROW(refract_exit_angle(-0.86, g), TotalInternalReflection);
    try {
        refract_exit_angle(0.9, g);
        FAIL();
    } catch (const BeamLost& e) {  // catchable as the generic beam-lost error
        EXPECT_DOUBLE_EQ(dynamic_cast<const TotalInternalReflection&>(e).incidence(), 0.9);
    }
    EXPECT_NO_THROW(refract_exit_angle(0.85, g));
}

TEST(Optics, DisplacementExamples) {
    LinkGeometry g;
    EXPECT_EQ(spot_displacement(0.0, g), 0.0);
    const double d12 = spot_displacement(0.1, g);
    EXPECT_NEAR(d12, displacement_hp(hp("0.1"), hp("1.2")).convert_to<double>(), 1e-15);
    EXPECT_NEAR(d12, 0.0398, 5e-5);
    g.h_air = 0.8;
    EXPECT_NEAR(spot_displacement(0.1, g), 0.0265, 5e-5);
}

TEST(Optics, OddSymmetry) {
    LinkGeometry g;
    for (int i = 0; i <= 100; ++i) {
        const double gamma = 0.84 * i / 100.0;
        EXPECT_NEAR(spot_displacement(-gamma, g), -spot_displacement(gamma, g), 1e-12);
    }
}

TEST(Optics, MonotoneBelowCriticalAngle) {
    LinkGeometry g;
    const double crit = g.critical_angle();
    double prev = spot_displacement(0.0, g);
    for (int i = 1; i < 1000; ++i) {
        const double d = spot_displacement(crit * i / 1000.0, g);
        EXPECT_GT(d, prev) << i;
        prev = d;
    }
}

TEST(Optics, SnellConsistency) {
    LinkGeometry g;
    for (int i = -80; i <= 80; ++i) {
        const double a = 0.01 * i;
        EXPECT_NEAR(g.n_water * std::sin(a) - g.n_air * std::sin(refract_exit_angle(a, g)), 0.0, 1e-12);
    }
}

TEST(Optics, TraceReducesToDisplacement) {
    LinkGeometry g;
    EXPECT_EQ(trace_beam(AxisAnglesd(0.0, 0.0), 0.0, 0.0, g), SpotOffsetd(0.0, 0.0));
    for (double gx : {-0.3, -0.02, 0.1, 0.5})
        for (double gy : {-0.1, 0.0, 0.2}) {
            const SpotOffsetd p = trace_beam(AxisAnglesd(0.0, 0.0), gx, gy, g);
            EXPECT_NEAR(p.x(), spot_displacement(gx, g), 1e-12);
            EXPECT_NEAR(p.y(), spot_displacement(gy, g), 1e-12);
        }
    const SpotOffsetd p = trace_beam(AxisAnglesd(0.0, 0.0), 0.1, 0.0, g);
    EXPECT_NEAR(p.x(), 0.0398, 5e-5);
    EXPECT_EQ(p.y(), 0.0);
}

TEST(Optics, TraceWithTiltMatchesOracle) {
    LinkGeometry g;
    for (double tilt : {-0.04, -0.003, 0.01, 0.07})
        for (double gamma : {-0.2, 0.05, 0.3}) {
            const hp launch = 2 * hp(tilt);
            const hp beta = exit_angle_hp(launch + hp(gamma));
            const hp want = hp("0.14") * boost::multiprecision::tan(launch) +
                            hp("1.2") * boost::multiprecision::tan(beta - hp(gamma));
            const double got = trace_beam(AxisAnglesd(tilt, 0.0), gamma, 0.0, g).x();
            EXPECT_NEAR(got, want.convert_to<double>(), 1e-13);
        }
}

TEST(Optics, TracePropagatesTirAsBeamLost) {
    LinkGeometry g;
    EXPECT_THROW(trace_beam(AxisAnglesd(0.2, 0.0), 0.5, 0.0, g), BeamLost);
    EXPECT_THROW(trace_beam(AxisAnglesd(0.0, 0.0), 0.0, 0.9, g), TotalInternalReflection);
}

TEST(Optics, BisectedTiltCancelsSlope) {
    // The tilt that nulls the receiver offset is in range and unique.
    LinkGeometry g;
    const double gamma = 0.05;
    double lo = -0.08, hi = 0.08;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (trace_beam(AxisAnglesd(mid, 0.0), gamma, 0.0, g).x() < 0 ? lo : hi) = mid;
    }
    EXPECT_LT(std::abs(trace_beam(AxisAnglesd(lo, 0.0), gamma, 0.0, g).x()), 1e-12);
    EXPECT_LT(lo, 0.0);
}

TEST(Optics, Retroreflection) {
    LinkGeometry g;
    EXPECT_EQ(retroreflect(SpotOffsetd(0.0, 0.0), g), SpotOffsetd(0.0, 0.0));
    EXPECT_EQ(retroreflect(SpotOffsetd(3e-3, 0.0), g), SpotOffsetd(-3e-3, 0.0));
    const SpotOffsetd p(2e-3, -1e-3);
    const SpotOffsetd q = retroreflect(p, g);
    EXPECT_EQ(q, SpotOffsetd(-2e-3, 1e-3));
    EXPECT_NEAR((p - q).norm(), 2 * std::sqrt(5.0) * 1e-3, 1e-15);
    for (const SpotOffsetd& v : {SpotOffsetd(1.234e-3, -7.7e-3), SpotOffsetd(-0.02, 0.01)})
        EXPECT_EQ(retroreflect(retroreflect(v, g), g), v);
    EXPECT_THROW(retroreflect(SpotOffsetd(0.02, 0.02), g), BeamLost);
}

TEST(Optics, FeedbackOffset) {
    LinkGeometry g;
    EXPECT_EQ(feedback_offset(SpotOffsetd(0.0, 0.0), g), SpotOffsetd(0.0, 0.0));
    EXPECT_EQ(feedback_offset(SpotOffsetd(4e-3, 0.0), g), SpotOffsetd(-4e-3, 0.0));
    g.bs_to_pdarray += 1e-3;
    const SpotOffsetd skew = feedback_offset(SpotOffsetd(0.0, 0.0), g, AxisAnglesd(0.02, 0.0));
    EXPECT_NEAR(skew.x(), 1e-3 * std::tan(0.02), 1e-18);
    EXPECT_EQ(skew.y(), 0.0);
}

TEST(Optics, CongruentFeedbackCentersTogether) {
    // If the beam hits the CCR centre, the PD array and the receiver PD are centred too.
    LinkGeometry g;
    for (double gamma : {-0.2, 0.03, 0.25}) {
        double lo = -0.08, hi = 0.08;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (trace_beam(AxisAnglesd(mid, 0.0), gamma, 0.0, g).x() < 0 ? lo : hi) = mid;
        }
        const auto tr = trace_beam_full(AxisAnglesd(lo, 0.0), gamma, 0.0, g);
        const SpotOffsetd at_ccr = ccr_offset(tr, g);
        EXPECT_LT(at_ccr.norm(), 1e-12);
        EXPECT_LT(feedback_offset(at_ccr, g, tr.launch).norm(), 1e-12);
        EXPECT_LT(tr.offset.norm(), 1e-12);
    }
}

TEST(Optics, ReceiverMismatchShiftsCcr) {
    LinkGeometry g;
    g.bs2_to_ccr += 1e-3;
    const auto tr = trace_beam_full(AxisAnglesd(0.0, 0.0), 0.1, 0.0, g);
    EXPECT_NEAR(ccr_offset(tr, g).x() - tr.offset.x(), 1e-3 * std::tan(tr.direction.x()), 1e-15);
}

TEST(Optics, Congruence) {
    LinkGeometry g;
    EXPECT_TRUE(verify_congruence(g).congruent);
    auto tx = g;
    tx.bs_to_pdarray = tx.bs_to_mems + 1e-3;
    auto r = verify_congruence(tx);
    ASSERT_FALSE(r.congruent);
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_EQ(r.violations[0].rfind("transmitter side", 0), 0u);
    auto rx = g;
    rx.bs2_to_ccr = rx.bs2_to_rxpd + 1e-3;
    r = verify_congruence(rx);
    ASSERT_FALSE(r.congruent);
    EXPECT_EQ(r.violations[0].rfind("receiver side", 0), 0u);
}

TEST(Optics, GeometryValidation) {
    auto bad = [](auto mutate) {
        LinkGeometry g;
        mutate(g);
        EXPECT_THROW(g.validate(), InvalidArgument);
    };
    bad([](LinkGeometry& g) { g.n_air = 0.9; });
    bad([](LinkGeometry& g) { g.n_water = 1.0; });
    bad([](LinkGeometry& g) { g.h_air = 0.0; });
    bad([](LinkGeometry& g) { g.l_water = -1.0; });
    bad([](LinkGeometry& g) { g.ccr_aperture_radius = 0.0; });
    bad([](LinkGeometry& g) { g.x0 = NAN; });
    EXPECT_NO_THROW(LinkGeometry{}.validate());
}
