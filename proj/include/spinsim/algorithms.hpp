#pragma once

#include <string>
#include <vector>

#include "spinsim/gateset.hpp"
#include "spinsim/readout.hpp"

namespace spinsim {

// Oracle indices: Deutsch-Jozsa f0..f3 (constant: f0, f1; balanced: f2, f3)
// and Grover f_ij marking the two-bit string ij with 0 = up, 1 = down.
enum class DJOracle : int { f0 = 0, f1, f2, f3 };
enum class GroverOracle : int { f00 = 0, f01, f10, f11 };

// gate lists in time order (first listed acts first)
std::vector<GateLabel> dj_oracle_gates(DJOracle o);
std::vector<GateLabel> grover_oracle_gates(GroverOracle o);
std::vector<GateLabel> grover_diffusion_gates();
std::vector<GateLabel> dj_circuit(DJOracle o);        // prep + oracle + unprep
std::vector<GateLabel> grover_circuit(GroverOracle o);

struct StageReport {
    std::string stage;  // init, input-prepared, post-oracle, output
    Mat4 rho;
    double fidelity = 1.0;  // vs the ideal stage state
    double max_imag = 0.0;  // largest |Im| matrix element
};

struct AlgoNoise {
    bool enabled = false;
    NoiseModel noise;
    SpamConfig spam;
    int ensemble = 300;
    int threads = 1;
};

struct DJResult {
    std::vector<StageReport> stages;
    bool balanced_verdict = false;  // verdict qubit Q1: down = constant, up = balanced
    double verdict_probability = 1.0;
};

struct GroverResult {
    std::vector<StageReport> stages;
    int found = 0;  // two-bit string ij as an integer, 0 = up
    double success_probability = 1.0;
};

DJResult run_dj(DJOracle o, const GateSet& gs, const AlgoNoise& noise_opts);
GroverResult run_grover(GroverOracle o, const GateSet& gs, const AlgoNoise& noise_opts);

// Ideal circuit unitary multiplied from the primitive ideals (time order).
Mat4 ideal_circuit_unitary(const std::vector<GateLabel>& gates);

}  // namespace spinsim
