#include "doctest.h"

#include "spinsim/gateset.hpp"

using namespace spinsim;

namespace {
DeviceParams paper_device() { return DeviceParams{}; }
double paper_fr() { return sync_rabi(DeviceParams{}.J, 1); }
}  // namespace

TEST_CASE("gate labels round-trip through names") {
    for (int i = 0; i < kNumGateLabels; ++i) {
        GateLabel g = static_cast<GateLabel>(i);
        auto parsed = parse_gate(gate_name(g));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == g);
    }
    CHECK(!parse_gate("H1").has_value());
}

TEST_CASE("ideal unitaries: CNOT conventions") {
    // CNOT1 flips Q1 when Q2 is down
    Mat4 c1 = ideal_unitary(GateLabel::CNOT1);
    CHECK(std::abs(c1(kDownDown, kUpDown) - 1.0) < 1e-15);
    CHECK(std::abs(c1(kUpUp, kUpUp) - 1.0) < 1e-15);
    CHECK(std::abs(c1(kDownUp, kDownUp) - 1.0) < 1e-15);
    // ZCNOT2 flips Q2 when Q1 is up
    Mat4 z2 = ideal_unitary(GateLabel::ZCNOT2);
    CHECK(std::abs(z2(kUpDown, kUpUp) - 1.0) < 1e-15);
    CHECK(std::abs(z2(kDownDown, kDownDown) - 1.0) < 1e-15);
    // X1 applied to |dd> reaches the hybridized |ud~> slot up to phase
    Vec4 v = ideal_unitary(GateLabel::X1) * basis_ket(kDownDown);
    CHECK(std::abs(v(kUpDown)) == doctest::Approx(1.0));
}

TEST_CASE("primitive pulses: segment structure") {
    DeviceParams p = paper_device();
    double fr = paper_fr();
    for (int i = 0; i < kNumGateLabels; ++i) {
        GateLabel g = static_cast<GateLabel>(i);
        PulseSchedule s = primitive_pulses(p, g, fr);
        if (g == GateLabel::Idle) {
            CHECK(s.drive_segments() == 0);
            CHECK(s.total_duration() == doctest::Approx(2.0 / (4.0 * fr)));
        } else {
            CHECK(s.drive_segments() == 2);  // two sequential CROT segments
        }
    }
    // CNOT duration: 102.7 ns, within 0.5% of 103 ns
    double dur_ns = primitive_pulses(p, GateLabel::CNOT1, fr).total_duration() * 1e3;
    CHECK(dur_ns == doctest::Approx(102.7).epsilon(1e-3));
    CHECK(std::abs(dur_ns - 103.0) / 103.0 < 0.005);
    // full rotations are two pi CROTs
    CHECK(primitive_pulses(p, GateLabel::X1, fr).total_duration() ==
          doctest::Approx(2.0 / (2.0 * fr)));
}

TEST_CASE("calibration reaches the micromotion floor for every primitive") {
    DeviceParams p = paper_device();
    double fr = paper_fr();
    TrotterConfig cfg{};
    GateSet gs = build_gateset(p, fr, cfg);
    for (int i = 0; i < kNumGateLabels; ++i) {
        GateLabel g = static_cast<GateLabel>(i);
        CAPTURE(gate_name(g));
        const PrimitiveGate& prim = gs.get(g);
        // cross-transition leakage bounds the residual at ~1.4e-4 for the
        // worst (inner-line) gates; phase corrections cannot reach it
        CHECK(prim.calibration_residual < 2e-4);
        Mat4 u = gs.simulate(g, nullptr);
        CHECK(average_gate_fidelity(ideal_unitary(g), u) > 0.9998);
        // corrections wrapped into [-pi, pi)
        for (int ax = 0; ax < 3; ++ax) {
            CHECK(std::abs(prim.z.pre[ax]) <= kPi + 1e-12);
            CHECK(std::abs(prim.z.post[ax]) <= kPi + 1e-12);
        }
    }
}

TEST_CASE("calibration of an already-ideal gate returns zero corrections") {
    // the Idle primitive propagates to the exact identity
    DeviceParams p = paper_device();
    CalibrationResult cal = calibrate_phases(p, GateLabel::Idle, paper_fr(), {});
    double total = 0;
    for (int ax = 0; ax < 3; ++ax) total += std::abs(cal.z.pre[ax]) + std::abs(cal.z.post[ax]);
    CHECK(total < 1e-6);
    CHECK(cal.residual_infidelity < 1e-12);
}

TEST_CASE("calibration is deterministic") {
    DeviceParams p = paper_device();
    CalibrationResult a = calibrate_phases(p, GateLabel::CNOT1, paper_fr(), {});
    CalibrationResult b = calibrate_phases(p, GateLabel::CNOT1, paper_fr(), {});
    for (int q = 0; q < 2; ++q) {
        CHECK(a.z.pre[q] == b.z.pre[q]);
        CHECK(a.z.post[q] == b.z.post[q]);
    }
}

TEST_CASE("grid-then-refine oracle agrees with the shipped calibration") {
    // independent coarse scan over the correction space must not beat the
    // deterministic search by more than its own grid resolution
    DeviceParams p = paper_device();
    double fr = paper_fr();
    GateSet gs = build_gateset(p, fr, {});
    Mat4 u_raw = propagate(p, primitive_pulses(p, GateLabel::CNOT1, fr), nullptr, {}).U;
    Mat4 ideal = ideal_unitary(GateLabel::CNOT1);
    double best = 0;
    const int n = 24;
    for (int ia = 0; ia < n; ++ia)
        for (int ib = 0; ib < n; ++ib)
            for (int ic = 0; ic < n; ++ic)
                for (int id = 0; id < n; ++id) {
                    Mat4 cand = rz_qubit(1, -kPi + ia * kTwoPi / n) *
                                rz_qubit(2, -kPi + ib * kTwoPi / n) * u_raw *
                                rz_qubit(1, -kPi + ic * kTwoPi / n) *
                                rz_qubit(2, -kPi + id * kTwoPi / n);
                    best = std::max(best, average_gate_fidelity(ideal, cand));
                }
    double shipped = average_gate_fidelity(ideal, gs.simulate(GateLabel::CNOT1, nullptr));
    CHECK(shipped >= best - 1e-3);
    // the calibrated CNOT1 meets the gate-exactness bar
    CHECK(shipped > 0.9999);
}

TEST_CASE("single-sided per-qubit corrections cannot fix the CNOT") {
    // the pulse pair leaves a conditional phase that post-only Z's cannot
    // reach; this pins why two-sided corrections are used
    DeviceParams p = paper_device();
    double fr = paper_fr();
    Mat4 u_raw = propagate(p, primitive_pulses(p, GateLabel::CNOT1, fr), nullptr, {}).U;
    Mat4 ideal = ideal_unitary(GateLabel::CNOT1);
    double best = 0;
    const int n = 160;
    for (int ia = 0; ia < n; ++ia)
        for (int ib = 0; ib < n; ++ib) {
            Mat4 cand = rz_qubit(1, -kPi + ia * kTwoPi / n) *
                        rz_qubit(2, -kPi + ib * kTwoPi / n) * u_raw;
            best = std::max(best, average_gate_fidelity(ideal, cand));
        }
    CHECK(best < 0.995);
}

TEST_CASE("virtual Z primitives cost no time") {
    DeviceParams p = paper_device();
    GateSet gs = build_gateset(p, paper_fr(), {});
    PulseSchedule s;
    s.shift(1, 0.7);
    CHECK(s.total_duration() == 0.0);
    CHECK(max_abs(Mat4(propagate(p, s, nullptr, {}).U - rz_qubit(1, 0.7))) < 1e-14);
    (void)gs;
}

TEST_CASE("single-tone set: driven-block fidelity with the control fixed") {
    DeviceParams p = paper_device();
    // single-tone gates tolerate arbitrary f_R at fixed J
    double fr = 3.1;
    Transition line{1, Spin::down};
    SingleToneSet st = build_single_tone_set(p, line, fr, {});
    for (int i = 0; i < 7; ++i) {
        Gate1Q g = static_cast<Gate1Q>(i);
        CAPTURE(gate1q_name(g));
        Mat4 u = st.simulate(g, nullptr);
        Mat2 block = driven_block(u, line);
        double t = std::abs((gate1q_unitary(g).adjoint() * block).trace());
        CHECK((t * t + 2.0) / 6.0 > 0.9999);
    }
}
