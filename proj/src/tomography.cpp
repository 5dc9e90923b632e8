#include "spinsim/tomography.hpp"

#include <cmath>
#include <stdexcept>

#include "spinsim/fitting.hpp"

namespace spinsim {

Mat2 prerot_unitary(PreRot r) {
    switch (r) {
        case PreRot::I: return Mat2::Identity();
        case PreRot::XHalf: return rx2(kPi / 2);
        case PreRot::YHalf: return ry2(kPi / 2);
        default: return rx2(kPi);
    }
}

Mat4 tomo_setting_unitary(int setting) {
    PreRot g1 = static_cast<PreRot>(setting / 4);
    PreRot g2 = static_cast<PreRot>(setting % 4);
    return kron(prerot_unitary(g1), prerot_unitary(g2));
}

std::string tomo_setting_label(int setting) {
    static const char* names[4] = {"I", "X/2", "Y/2", "X"};
    return std::string(names[setting / 4]) + "," + names[setting % 4];
}

TomoRecord take_tomo_record(const Mat4& rho, const SpamConfig& spam, long shots,
                            std::uint64_t seed) {
    TomoRecord rec;
    rec.shots = shots;
    for (int v = 0; v < kNumTomoSettings; ++v) {
        Mat4 g = tomo_setting_unitary(v);
        Mat4 rot = g * rho * g.adjoint();
        Rng rng = Rng::stream(seed, RngStream::tomo, {static_cast<std::uint64_t>(v)});
        auto probs = outcome_probabilities(rot, spam);
        rec.counts[v] = rng.multinomial4(shots, probs);
    }
    return rec;
}

std::array<Eigen::Vector4d, kNumTomoSettings> tomo_probabilities(const Mat4& rho,
                                                                 const SpamConfig& spam) {
    std::array<Eigen::Vector4d, kNumTomoSettings> out;
    for (int v = 0; v < kNumTomoSettings; ++v) {
        Mat4 g = tomo_setting_unitary(v);
        Mat4 rot = g * rho * g.adjoint();
        auto p = outcome_probabilities(rot, spam);
        out[v] = Eigen::Vector4d(p[0], p[1], p[2], p[3]);
    }
    return out;
}

namespace {

constexpr double kCostEps = 1e-9;  // denominator guard in the cost function

Mat4 rho_from_t(const Eigen::Matrix<double, 16, 1>& t) {
    Mat4 T = Mat4::Zero();
    T(0, 0) = t(0);
    T(1, 1) = t(1);
    T(2, 2) = t(2);
    T(3, 3) = t(3);
    T(1, 0) = cxd(t(4), t(5));
    T(2, 0) = cxd(t(6), t(7));
    T(2, 1) = cxd(t(8), t(9));
    T(3, 0) = cxd(t(10), t(11));
    T(3, 1) = cxd(t(12), t(13));
    T(3, 2) = cxd(t(14), t(15));
    Mat4 rho = T * T.adjoint();
    double tr = rho.trace().real();
    if (tr < 1e-300) return Mat4::Identity() / 4.0;
    return rho / tr;
}

// |psi_v> = (g1 x g2)^dag |dd> for each setting
std::array<Vec4, kNumTomoSettings> projector_states() {
    std::array<Vec4, kNumTomoSettings> psi;
    for (int v = 0; v < kNumTomoSettings; ++v)
        psi[v] = tomo_setting_unitary(v).adjoint() * basis_ket(kDownDown);
    return psi;
}

MLEResult mle_core(const std::array<double, kNumTomoSettings>& P, const Mat4* target) {
    auto psi = projector_states();
    auto residuals = [&](const Eigen::VectorXd& x) {
        Eigen::Matrix<double, 16, 1> t = x;
        Mat4 rho = rho_from_t(t);
        Eigen::VectorXd r(kNumTomoSettings);
        for (int v = 0; v < kNumTomoSettings; ++v) {
            double pv = std::real(cxd(psi[v].adjoint() * rho * psi[v]));
            r(v) = (pv - P[v]) / std::sqrt(2.0 * std::max(pv, 0.0) + kCostEps);
        }
        return r;
    };

    // fixed deterministic multi-start: maximally mixed plus three
    // basis-weighted diagonals (uu-heavy, dd-heavy, data-weighted)
    std::vector<Eigen::VectorXd> starts;
    auto diag_start = [](const Eigen::Vector4d& w) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(16);
        for (int i = 0; i < 4; ++i) x(i) = std::sqrt(std::max(w(i), 1e-4));
        return x;
    };
    starts.push_back(diag_start(Eigen::Vector4d(0.25, 0.25, 0.25, 0.25)));
    starts.push_back(diag_start(Eigen::Vector4d(0.85, 0.05, 0.05, 0.05)));
    starts.push_back(diag_start(Eigen::Vector4d(0.05, 0.05, 0.05, 0.85)));
    {
        // data-weighted: P[0] is the corrected dd probability of the I,I setting
        double pdd = std::min(1.0, std::max(P[0], 1e-3));
        double rest = std::max(0.0, 1.0 - pdd) / 3.0;
        starts.push_back(diag_start(Eigen::Vector4d(rest, rest, rest, pdd)));
    }

    MLEResult best;
    double best_cost = 1e300;
    for (const auto& x0 : starts) {
        FitResult fr = levenberg_marquardt(residuals, x0, 400, 1e-14);
        if (fr.rss < best_cost) {
            best_cost = fr.rss;
            best.t = fr.params;
            best.converged = fr.converged;
        }
    }
    best.cost = best_cost;
    best.rho = rho_from_t(best.t);
    // initial diagonal guess must not beat the optimized cost
    double init_cost = residuals(starts[0]).squaredNorm();
    if (best_cost > init_cost + 1e-12) best.converged = false;
    if (target) best.fidelity = state_fidelity(best.rho, *target);
    return best;
}

std::array<double, kNumTomoSettings> corrected_dd_probs(
    const std::array<Eigen::Vector4d, kNumTomoSettings>& measured, const Mat4d& C) {
    std::array<double, kNumTomoSettings> P;
    for (int v = 0; v < kNumTomoSettings; ++v)
        P[v] = correct_readout(measured[v], C).P(kDownDown);
    return P;
}

}  // namespace

MLEResult mle_reconstruct_probs(const std::array<Eigen::Vector4d, kNumTomoSettings>& measured,
                                const Mat4d& C, const Mat4* target) {
    return mle_core(corrected_dd_probs(measured, C), target);
}

MLEResult mle_reconstruct(const TomoRecord& rec, const Mat4d& C, const Mat4* target) {
    if (rec.shots <= 0) throw std::invalid_argument("mle_reconstruct: record has no shots");
    std::array<Eigen::Vector4d, kNumTomoSettings> measured;
    for (int v = 0; v < kNumTomoSettings; ++v) {
        long total = 0;
        for (long c : rec.counts[v]) total += c;
        if (total != rec.shots)
            throw std::invalid_argument("mle_reconstruct: setting " + tomo_setting_label(v) +
                                        " counts do not sum to shots");
        for (int i = 0; i < 4; ++i) measured[v](i) = double(rec.counts[v][i]) / double(total);
    }
    return mle_reconstruct_probs(measured, C, target);
}

double mc_state_uncertainty(const TomoRecord& rec, const Mat4d& C, const Mat4& target,
                            int resamples, std::uint64_t seed) {
    std::vector<double> fids;
    for (int r = 0; r < resamples; ++r) {
        TomoRecord boot;
        boot.shots = rec.shots;
        Rng rng = Rng::stream(seed, RngStream::mc_resample, {static_cast<std::uint64_t>(r)});
        for (int v = 0; v < kNumTomoSettings; ++v) {
            std::array<double, 4> p;
            for (int i = 0; i < 4; ++i) p[i] = double(rec.counts[v][i]) / double(rec.shots);
            boot.counts[v] = rng.multinomial4(rec.shots, p);
        }
        MLEResult res = mle_reconstruct(boot, C, &target);
        fids.push_back(*res.fidelity);
    }
    return gaussian_fit(fids).second;
}

}  // namespace spinsim
