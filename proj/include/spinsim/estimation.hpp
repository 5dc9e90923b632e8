#pragma once

#include <optional>
#include <vector>

#include "spinsim/evolution.hpp"
#include "spinsim/fitting.hpp"

namespace spinsim {

struct CoherenceCurve {
    std::vector<double> times_us;
    std::vector<double> values;  // probability or oscillation amplitude
};

struct CoherenceConfig {
    int ensemble = 2000;       // noise samples
    double detuning_mhz = 1.0; // deliberate Ramsey detuning
    int echo_phases = 8;       // final-pulse phase grid for the echo amplitude
    double ou_dt_us = 0.25;    // idle slicing for time-dependent noise
    std::uint64_t seed = 1;
    int threads = 1;
    TrotterConfig trotter;
};

// Ramsey: pi/2 - idle(t) - pi/2, driven `detuning` off resonance; returns the
// target-qubit spin-up probability, ensemble-averaged over the noise model.
CoherenceCurve simulate_ramsey(const DeviceParams& p, Transition tr, const NoiseModel& noise,
                               const std::vector<double>& times_us, double f_R,
                               const CoherenceConfig& cfg);

// Hahn echo: pi/2 - idle - pi - idle - pi/2(phi); the returned value is the
// amplitude of the oscillation in the final-pulse phase. OU noise evolves
// between idle slices; quasi-static noise is refocused up to pulse-duration
// effects.
CoherenceCurve simulate_echo(const DeviceParams& p, Transition tr, const NoiseModel& noise,
                             const std::vector<double>& times_us, double f_R,
                             const CoherenceConfig& cfg);

// Rabi oscillation P_up(t_burst), one continuous drive per noise sample with
// state snapshots at the requested times.
CoherenceCurve simulate_rabi(const DeviceParams& p, Transition tr, const NoiseModel& noise,
                             const std::vector<double>& times_us, double f_R,
                             const CoherenceConfig& cfg);

struct DecayParams {
    enum class Kind { ramsey, echo, rabi } kind = Kind::ramsey;
    double T2 = 0;         // us: T2*, T2_echo or T2_rabi
    double alpha = 1.0;    // echo stretch exponent
    double f = 0;          // fitted oscillation frequency (ramsey), MHz
    double amplitude = 0, offset = 0;
    double T2_err = 0, alpha_err = 0;
    bool converged = false;
};

// Gaussian-decaying cosine A exp(-(t/T2)^2) cos(2 pi f t + phi0) + C.
DecayParams fit_ramsey(const CoherenceCurve& curve);
// Stretched exponential A exp(-(t/T2)^alpha).
DecayParams fit_echo(const CoherenceCurve& curve);
// Envelope R(t) = exp(-t/T2rabi) W(t) with fixed f_R and T2*.
DecayParams fit_rabi_envelope(const CoherenceCurve& curve, double f_R, double t2star_us);

// W(t) = (1 + t^2/(f_R T2*^2)^2)^(-1/4), the quasi-static dephasing part of
// the Rabi envelope.
double rabi_envelope_W(double t_us, double f_R, double t2star_us);
double rabi_envelope_R(double t_us, double f_R, double t2star_us, double t2rabi_us);

struct RabiDecayMetric {
    double D = 0;        // 1 - R(t_hp): decay accumulated over one pi/2 CROT
    double R_thp = 0;    // envelope value itself, also reported
};
RabiDecayMetric rabi_decay_metric(double f_R, double t2star_us, double t2rabi_us);

struct RamseyRecord {
    std::vector<double> times_us;   // default 0.04..4.0 us in 0.04 steps
    std::vector<int> up_counts;
    std::vector<int> shots;         // per time point
};

// Synthetic single-shot record from the fringe model
// P(up | f, t) = 1/2 (1 + alpha_vis exp(-(t/T2*)^2) cos(2 pi f t)).
RamseyRecord synthesize_ramsey_record(double f_mhz, double t2star_us, double alpha_vis,
                                      const std::vector<double>& times_us, int shots_per_point,
                                      std::uint64_t seed);
std::vector<double> default_ramsey_times();

struct BayesResult {
    double f_est = 0;           // posterior mean, MHz
    double posterior_std = 0;
    bool edge_warning = false;  // posterior mass piled at the window edge
};

// Grid posterior over [f_center - window/2, f_center + window/2].
BayesResult bayes_estimate(const RamseyRecord& record, double f_center_mhz, double window_mhz,
                           double grid_mhz, double t2star_us, double alpha_vis);

struct TraceDecomposition {
    std::vector<double> df1, df2, djhalf;
};

// (Delta f1, Delta f2, Delta J/2) from the four per-transition series:
// Delta f_m = (Delta f_{m,up} + Delta f_{m,dn})/2, Delta J/2 = (Delta f_{1,up}
// - Delta f_{1,dn})/2.
TraceDecomposition decompose_trace(const std::vector<double>& f1_dn,
                                   const std::vector<double>& f1_up,
                                   const std::vector<double>& f2_dn,
                                   const std::vector<double>& f2_up);

}  // namespace spinsim
