#pragma once

#include <array>

#include "spinsim/linalg.hpp"
#include "spinsim/rng.hpp"

namespace spinsim {

// State-preparation and measurement error model: initialization weight
// outside |dd> plus independent per-qubit readout flips.
struct SpamConfig {
    double init_error = 0.0;                        // probability mass outside |dd>
    std::array<double, 2> flip_up_to_down{0, 0};    // per qubit
    std::array<double, 2> flip_down_to_up{0, 0};
    int shots = 10000;

    bool trivial_readout() const {
        return flip_up_to_down[0] == 0 && flip_up_to_down[1] == 0 &&
               flip_down_to_up[0] == 0 && flip_down_to_up[1] == 0;
    }
};

// Column-stochastic confusion matrix: measured = C * true populations.
struct ReadoutModel {
    Mat4d C = Mat4d::Identity();
    int shots = 0;
};

// Tensor-product confusion matrix of the per-qubit flips (readout only).
Mat4d confusion_matrix(const SpamConfig& spam);

// (1 - e)|dd><dd| + e/3 over the other basis states.
Mat4 initial_state(const SpamConfig& spam);

// Joint-outcome counts: populations pushed through the confusion matrix, then
// multinomially sampled. Deterministic per seed.
std::array<long, 4> sample_outcomes(const Mat4& rho, const SpamConfig& spam, long shots,
                                    std::uint64_t seed);

// Measured outcome probabilities without sampling.
std::array<double, 4> outcome_probabilities(const Mat4& rho, const SpamConfig& spam);

// Estimates C column-by-column by preparing the four eigenbasis states with
// ideal flips from |dd> (through the init-error channel) and sampling.
ReadoutModel calibrate_C(const SpamConfig& spam, long shots, std::uint64_t seed);

struct CorrectedProbs {
    Eigen::Vector4d P;
    double condition_number = 1.0;
};

// P = C^{-1} P_M; small negatives are left for the MLE to handle.
CorrectedProbs correct_readout(const Eigen::Vector4d& measured, const Mat4d& C);

}  // namespace spinsim
