#pragma once

#include <optional>

#include "spinsim/clifford.hpp"
#include "spinsim/fitting.hpp"
#include "spinsim/readout.hpp"

namespace spinsim {

enum class RBProtocol { standard, differenced };

struct RBConfig {
    int qubits = 2;
    int target_qubit = 1;  // single-qubit benchmarking target
    std::vector<int> lengths;
    int num_sequences = 60;      // 16 single-qubit, 60 two-qubit
    int shots = 400;             // 0 = exact probabilities
    int noise_repeats = 100;     // noise ensemble size in exact mode
    RBProtocol protocol = RBProtocol::differenced;
    std::optional<GateLabel> interleaved;
    NoiseModel noise;
    SpamConfig spam;             // applied only when use_spam
    bool use_spam = false;
    double inject_depol = 0;     // per-primitive depolarizing channel (ideal-gate mode)
    bool rabi_decay_channel = false;  // phenomenological, from T2rabi
    std::uint64_t seed = 1;
    bool single_tone = false;
    Spin single_tone_control = Spin::down;
    int threads = 1;
};

// Raw benchmarking curves: per length, per sequence success probability of
// the up-target dataset and (differenced protocol) the down-target twin.
struct RBCurves {
    std::vector<int> lengths;
    std::vector<std::vector<double>> up;
    std::vector<std::vector<double>> down;
    int shots = 0;
    int qubits = 2;
    RBProtocol protocol = RBProtocol::differenced;
    double avg_primitives = 0;

    std::vector<double> mean_up() const;
    std::vector<double> mean_down() const;
    std::vector<double> sequence_fidelity() const;  // mean_up - mean_down
};

struct CliffordTables {
    const CliffordTable1Q* one = nullptr;
    const CliffordTable2Q* two = nullptr;
};

RBCurves run_rb(const RBConfig& cfg, const GateSet& gs, const CliffordTables& tables);

// default length grids (log-spaced, up to ~300 single-qubit / ~271 two-qubit)
std::vector<int> default_lengths(int qubits);

struct DecayFit {
    double p = 0, amp = 0, offset = 0;   // offset absent (0) for differenced
    double p_err = 0, amp_err = 0, offset_err = 0;
    bool converged = false;
    bool clamped = false;  // p clamped into [0,1]
    RBProtocol protocol = RBProtocol::standard;
    // filled by to_fidelities
    double F_C = 0, F_p = 0;
    std::optional<double> F_interleaved;
};

DecayFit fit_decay(const std::vector<int>& lengths, const std::vector<double>& values,
                   RBProtocol protocol);

// F_C = (1+p)/2 or (1+3p)/4; F_p = 1 - (1-F_C)/avg; interleaved variant uses
// the depolarizing-parameter ratio against the reference fit.
void to_fidelities(DecayFit& fit, int qubits, double avg_primitives,
                   const DecayFit* reference = nullptr);

struct MCUncertainty {
    double p_std = 0, FC_std = 0, Fp_std = 0;
    std::optional<double> Fint_std;
    bool degenerate = false;  // exact-probability input, zero variance
};

// Resamples the per-sequence binomial outcomes, refits, and returns the
// standard deviation of the Gaussian fitted to the fidelity distribution.
MCUncertainty mc_uncertainty(const RBCurves& curves, int resamples, std::uint64_t seed,
                             const RBCurves* interleaved_curves = nullptr);

struct SweepPoint {
    double f_R = 0;
    double J = 0;
    double infidelity = 0;  // primitive infidelity 1 - F_p
    double p = 0;
};

enum class SweepMode { dephasing_only, with_idle };

struct SweepConfig {
    int num_sequences = 60;
    int noise_repeats = 100;
    std::vector<int> lengths;  // empty = default two-qubit grid
    double t2star_us = 3.0;    // sets sigma_f for both qubits
    double sigma_J = 0.015;    // MHz
    std::uint64_t seed = 1;
    int threads = 1;
    TrotterConfig trotter;
};

// J = sqrt(15) f_R at every grid point; with-idle pads every primitive so a
// 2-CROT unit lasts 2/J.
std::vector<SweepPoint> sweep_fr(const DeviceParams& base, const std::vector<double>& fr_grid,
                                 SweepMode mode, const SweepConfig& scfg,
                                 const CliffordTables& tables);

}  // namespace spinsim
