#pragma once

#include <variant>
#include <vector>

#include "spinsim/device.hpp"
#include "spinsim/noise.hpp"

namespace spinsim {

struct Idle {
    double duration = 0;  // us
};

// Virtual phase gate: advances the reference frame by theta. Zero duration;
// enters the propagator as an exact diagonal at its position in the schedule.
// Axes 1 and 2 are per-qubit Z's; axis 3 is the conditional phase
// exp(-i theta Z1 Z2 / 2), free for the same reason the Z's are: the four
// drive lines carry independent software phases.
inline constexpr int kAxisZ1 = 1;
inline constexpr int kAxisZ2 = 2;
inline constexpr int kAxisZZ = 3;

struct FrameShift {
    int axis = kAxisZ1;
    double theta = 0;
};

// diagonal unitary of one virtual phase gate
Mat4 virtual_phase(int axis, double theta);

using ScheduleOp = std::variant<DriveTone, Idle, FrameShift>;

struct PulseSchedule {
    std::vector<ScheduleOp> ops;

    double total_duration() const;
    // accumulated virtual phase per axis (Z1, Z2, ZZ) over the whole schedule
    std::array<double, 3> frame_offsets() const;
    int drive_segments() const;

    PulseSchedule& drive(const DriveTone& t) { ops.push_back(t); return *this; }
    PulseSchedule& idle(double dur) { ops.push_back(Idle{dur}); return *this; }
    PulseSchedule& shift(int axis, double theta) { ops.push_back(FrameShift{axis, theta}); return *this; }
    PulseSchedule& append(const PulseSchedule& other);
};

struct TrotterConfig {
    int steps_per_halfpi = 1000;  // N: Trotter steps per pi/2 CROT
};

// Synchronized Rabi frequency f_R = J / sqrt(16 k^2 - 1); k = 1 gives J/sqrt(15).
double sync_rabi(double J, int k);

// Single pi/2 (or pi) CROT segment on one EDSR line: duration 1/(4 f_R)
// (resp. 1/(2 f_R)) at the line's resonance frequency.
PulseSchedule crot_halfpi(const DeviceParams& p, Transition tr, double phi, double f_R);
PulseSchedule crot_pi(const DeviceParams& p, Transition tr, double phi, double f_R);

struct PropResult {
    Mat4 U = Mat4::Identity();
    double max_cycles_per_step = 0;  // fastest slot oscillation, cycles per Trotter step
    bool resolution_warning = false; // set when > 0.1 cycles/step
};

// Rotating-frame propagator: left-endpoint product
// U = prod_k exp(-i 2 pi (K(t_k) + dK) dt) over each drive segment, where K is
// the rotating-frame Hamiltonian (zero diagonal, f_R/2 off-diagonals with
// phases exp(i phi - i 2 pi (f_slot - f_MW) t)) and dK is the quasi-static
// noise diagonal. Idles evolve under dK alone (identity when noiseless).
// t0 sets the global time of the first op; drive phases are time-coherent
// across segments.
PropResult propagate(const DeviceParams& p, const PulseSchedule& sched,
                     const NoiseSample* noise, const TrotterConfig& cfg, double t0 = 0.0);

// Propagators of one continuous tone up to each requested burst time
// (times must be increasing; each is rounded to the step grid).
std::vector<Mat4> propagate_snapshots(const DeviceParams& p, const DriveTone& tone,
                                      const NoiseSample* noise, const TrotterConfig& cfg,
                                      const std::vector<double>& times_us);

// Diagonal frame factor F(t0) with U(tone at t0) = F(t0) U(tone at 0) F(t0)^dag;
// exact for any quasi-static noise diagonal.
Vec4 time_shift_frame(const DeviceParams& p, double f_MW, double t0);

// Evolves the schedule in the lab frame (bare energies on the diagonal, in
// the sign convention consistent with the rotating frame) with the same step
// count and compares R(t_end) U_lab R(0)^dag to the rotating-frame result.
// Returns the max-norm residual; first-order in the step size.
double lab_frame_check(const DeviceParams& p, const PulseSchedule& sched,
                       const TrotterConfig& cfg);

// exp(M) for a small anti-Hermitian step matrix; scaled Taylor series, equal
// to the eigendecomposition route to machine precision.
Mat4 expm_step(const Mat4& m);

// Nearest resonance line determines which qubit a tone addresses.
int infer_qubit(const ResonanceTable& table, double f_MW);

}  // namespace spinsim
