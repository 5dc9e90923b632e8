#pragma once

#include <map>
#include <optional>
#include <string>

#include "spinsim/evolution.hpp"

namespace spinsim {

// Primitive gate library. Every entry is built from two sequential CROT
// segments (pi/2 pairs for the half rotations and the CNOTs, pi pairs for the
// full rotations) plus virtual-Z corrections; Idle is one primitive duration
// of nothing.
enum class GateLabel : int {
    X1, X1Half, X1HalfM, Y1, Y1Half, Y1HalfM, CNOT1, ZCNOT1,
    X2, X2Half, X2HalfM, Y2, Y2Half, Y2HalfM, CNOT2, ZCNOT2,
    Idle,
};
constexpr int kNumGateLabels = 17;

std::string gate_name(GateLabel g);
std::optional<GateLabel> parse_gate(const std::string& name);
int gate_target_qubit(GateLabel g);  // 0 for Idle

// Single-qubit gate alphabet used by the single-qubit Clifford table.
enum class Gate1Q : int { I, X, Y, XHalf, XHalfM, YHalf, YHalfM };
std::string gate1q_name(Gate1Q g);
Mat2 gate1q_unitary(Gate1Q g);
// two-tone realization of a single-qubit gate on qubit m
GateLabel gate1q_to_label(Gate1Q g, int qubit);

Mat4 ideal_unitary(GateLabel g);

// Virtual phase corrections applied around the pulses: per-qubit Z's plus the
// conditional phase, on each side. Two-sided corrections are required (the
// spectator subspace acquires pulse-order-dependent phases), and the
// conditional term is required because a sequential two-tone half rotation
// leaves a Z1 Z2 phase that per-qubit Z's cannot reach.
struct ZCorrections {
    std::array<double, 3> pre{0, 0, 0};   // Z1, Z2, ZZ
    std::array<double, 3> post{0, 0, 0};
};

struct PrimitiveGate {
    GateLabel label = GateLabel::Idle;
    PulseSchedule schedule;  // includes the correction FrameShifts
    ZCorrections z;
    double duration = 0;
    double calibration_residual = 0;  // 1 - F_avg vs ideal, noiseless
    bool calibrated = true;
};

struct CalibrationResult {
    ZCorrections z;
    double residual_infidelity = 0;
    bool converged = true;
};

// Raw pulse schedule of a primitive (no corrections).
PulseSchedule primitive_pulses(const DeviceParams& p, GateLabel g, double f_R);

// Deterministic search for the pre/post virtual-Z phases minimizing the
// average-gate-infidelity against ideal_unitary(g), noiseless.
CalibrationResult calibrate_phases(const DeviceParams& p, GateLabel g, double f_R,
                                   const TrotterConfig& cfg);

PrimitiveGate build_primitive(const DeviceParams& p, GateLabel g, double f_R,
                              const TrotterConfig& cfg);

// Calibrated primitive library for one device operating point.
struct GateSet {
    DeviceParams device;
    double f_R = 0;
    TrotterConfig trotter;
    std::array<PrimitiveGate, kNumGateLabels> prims;
    double idle_pad = 0;  // extra idle appended per 2-CROT unit (sweep with-idle mode)

    const PrimitiveGate& get(GateLabel g) const { return prims[static_cast<int>(g)]; }
    Mat4 ideal(GateLabel g) const { return ideal_unitary(g); }
    // full primitive operator for one noise sample (corrections included)
    Mat4 simulate(GateLabel g, const NoiseSample* noise) const;
};

GateSet build_gateset(const DeviceParams& p, double f_R, const TrotterConfig& cfg,
                      double idle_pad = 0.0);

// Single-tone variant: one CROT per gate on a fixed EDSR line, for
// benchmarking with the control qubit held in a fixed state.
struct SingleToneGate {
    Gate1Q label = Gate1Q::I;
    PulseSchedule schedule;
    double pre_z = 0, post_z = 0;  // target-qubit phases
    double residual = 0;
};

struct SingleToneSet {
    DeviceParams device;
    Transition line;
    double f_R = 0;
    TrotterConfig trotter;
    std::array<SingleToneGate, 7> gates;

    const SingleToneGate& get(Gate1Q g) const { return gates[static_cast<int>(g)]; }
    Mat4 simulate(Gate1Q g, const NoiseSample* noise) const;
};

SingleToneSet build_single_tone_set(const DeviceParams& p, Transition line, double f_R,
                                    const TrotterConfig& cfg);

// 2x2 block of a 4x4 operator on the driven pair of a transition.
Mat2 driven_block(const Mat4& u, Transition tr);

}  // namespace spinsim
