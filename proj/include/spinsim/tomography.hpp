#pragma once

#include <array>
#include <optional>

#include "spinsim/readout.hpp"

namespace spinsim {

// Measurement pre-rotations; 16 settings = (I, X/2, Y/2, X) on each qubit.
enum class PreRot : int { I = 0, XHalf, YHalf, X };
constexpr int kNumTomoSettings = 16;

Mat2 prerot_unitary(PreRot r);
Mat4 tomo_setting_unitary(int setting);  // (g1 on qubit 1) x (g2 on qubit 2)
std::string tomo_setting_label(int setting);

struct TomoRecord {
    std::array<std::array<long, 4>, kNumTomoSettings> counts{};
    long shots = 0;
};

// Forward simulation: ideal pre-rotations, then sampled joint readout.
TomoRecord take_tomo_record(const Mat4& rho, const SpamConfig& spam, long shots,
                            std::uint64_t seed);

// Exact measured probabilities per setting (infinite-shot limit).
std::array<Eigen::Vector4d, kNumTomoSettings> tomo_probabilities(const Mat4& rho,
                                                                 const SpamConfig& spam);

struct MLEResult {
    Eigen::Matrix<double, 16, 1> t;  // lower-triangular parameters of T
    Mat4 rho = Mat4::Identity() / 4.0;
    double cost = 0;
    bool converged = true;
    std::optional<double> fidelity;  // vs target, when supplied
};

// Maximum-likelihood reconstruction: rho = T T^dag / Tr(T^dag T), minimizing
// sum_v (p_v(t) - P_v)^2 / (2 p_v(t)) over the 16 readout-corrected
// probabilities P_v of the |dd> outcome of each pre-rotation setting.
MLEResult mle_reconstruct(const TomoRecord& rec, const Mat4d& C,
                          const Mat4* target = nullptr);
// Exact-probability entry point (per-setting measured outcome distributions).
MLEResult mle_reconstruct_probs(const std::array<Eigen::Vector4d, kNumTomoSettings>& measured,
                                const Mat4d& C, const Mat4* target = nullptr);

// Multinomial resampling of the record, repeated MLE, Gaussian std of the
// resulting fidelity distribution.
double mc_state_uncertainty(const TomoRecord& rec, const Mat4d& C, const Mat4& target,
                            int resamples, std::uint64_t seed);

}  // namespace spinsim
