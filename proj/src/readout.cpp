#include "spinsim/readout.hpp"

#include <stdexcept>

namespace spinsim {

Mat4d confusion_matrix(const SpamConfig& spam) {
    Mat4d c = Mat4d::Zero();
    Eigen::Matrix2d cq[2];
    for (int q = 0; q < 2; ++q) {
        double a = spam.flip_up_to_down[q], b = spam.flip_down_to_up[q];
        // columns = true state (up, down), rows = measured
        cq[q] << 1 - a, b, a, 1 - b;
    }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            c(i, j) = cq[0](i / 2, j / 2) * cq[1](i % 2, j % 2);
    return c;
}

Mat4 initial_state(const SpamConfig& spam) {
    Mat4 rho = Mat4::Zero();
    rho(kDownDown, kDownDown) = 1.0 - spam.init_error;
    for (int i = 0; i < 3; ++i) rho(i, i) = spam.init_error / 3.0;
    return rho;
}

std::array<double, 4> outcome_probabilities(const Mat4& rho, const SpamConfig& spam) {
    Eigen::Vector4d pop;
    for (int i = 0; i < 4; ++i) pop(i) = std::max(0.0, rho(i, i).real());
    double s = pop.sum();
    if (s <= 0) throw std::invalid_argument("sample_outcomes: state has no population");
    pop /= s;
    Eigen::Vector4d meas = confusion_matrix(spam) * pop;
    return {meas(0), meas(1), meas(2), meas(3)};
}

std::array<long, 4> sample_outcomes(const Mat4& rho, const SpamConfig& spam, long shots,
                                    std::uint64_t seed) {
    auto p = outcome_probabilities(rho, spam);
    Rng rng = Rng::stream(seed, RngStream::readout);
    return rng.multinomial4(shots, p);
}

ReadoutModel calibrate_C(const SpamConfig& spam, long shots, std::uint64_t seed) {
    if (shots <= 0) throw std::invalid_argument("calibrate_C: shots must be > 0");
    ReadoutModel model;
    model.shots = static_cast<int>(shots);
    // Basis states prepared by the ideal eigenbasis flips from |dd>. The
    // preparation is taken as ideal so that C captures readout errors only;
    // folding the initialization error into C would break the correction
    // identity C^{-1} C = 1 on arbitrary population vectors, and leftover
    // preparation error is exactly what the tomography floor reports.
    for (int k = 0; k < 4; ++k) {
        Mat4 rho = basis_ket(k) * basis_ket(k).adjoint();
        Rng rng = Rng::stream(seed, RngStream::spam, {static_cast<std::uint64_t>(k)});
        auto pr = outcome_probabilities(rho, spam);
        auto counts = rng.multinomial4(shots, pr);
        for (int i = 0; i < 4; ++i) model.C(i, k) = double(counts[i]) / double(shots);
    }
    return model;
}

CorrectedProbs correct_readout(const Eigen::Vector4d& measured, const Mat4d& C) {
    Eigen::FullPivLU<Mat4d> lu(C);
    if (!lu.isInvertible()) throw std::invalid_argument("correct_readout: singular C");
    CorrectedProbs out;
    out.P = lu.solve(measured);
    out.condition_number = C.norm() * lu.inverse().norm();
    return out;
}

}  // namespace spinsim
