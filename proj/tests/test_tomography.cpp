#include "doctest.h"

#include "spinsim/algorithms.hpp"
#include "spinsim/tomography.hpp"

using namespace spinsim;

namespace {
Mat4 pure(const Vec4& psi) { return psi * psi.adjoint(); }

Mat4 bell_like_state() {
    // Y/2 on Q1 then CNOT2, from |dd>
    Vec4 psi = basis_ket(kDownDown);
    psi = (ideal_unitary(GateLabel::Y1Half) * psi).eval();
    psi = (ideal_unitary(GateLabel::CNOT2) * psi).eval();
    return pure(psi);
}
}  // namespace

TEST_CASE("settings cover (I, X/2, Y/2, X) on both qubits") {
    CHECK(tomo_setting_label(0) == "I,I");
    CHECK(tomo_setting_label(6) == "X/2,Y/2");
    CHECK(tomo_setting_label(15) == "X,X");
    // per-qubit projector states span the single-qubit operator space
    Eigen::Matrix4cd gram;
    Vec2 down(0, 1);
    std::array<Vec2, 4> states;
    for (int g = 0; g < 4; ++g)
        states[g] = prerot_unitary(static_cast<PreRot>(g)).adjoint() * down;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            Mat2 pa = states[a] * states[a].adjoint();
            Mat2 pb = states[b] * states[b].adjoint();
            gram(a, b) = (pa.adjoint() * pb).trace();
        }
    CHECK(std::abs(gram.determinant()) > 1e-3);
}

TEST_CASE("exact-data reconstruction of pure states") {
    SpamConfig clean;
    Mat4d cid = Mat4d::Identity();
    Mat4 dd = pure(basis_ket(kDownDown));
    MLEResult res = mle_reconstruct_probs(tomo_probabilities(dd, clean), cid, &dd);
    CHECK(res.converged);
    CHECK(*res.fidelity > 1.0 - 1e-6);
    CHECK(std::abs(res.rho.trace().real() - 1.0) < 1e-10);

    Mat4 bell = bell_like_state();
    MLEResult rb = mle_reconstruct_probs(tomo_probabilities(bell, clean), cid, &bell);
    CHECK(*rb.fidelity > 1.0 - 1e-4);
}

TEST_CASE("reconstruction is idempotent on physical mixed states") {
    SpamConfig clean;
    Mat4d cid = Mat4d::Identity();
    Mat4 rho = 0.6 * bell_like_state() + 0.4 * Mat4::Identity() / 4.0;
    MLEResult res = mle_reconstruct_probs(tomo_probabilities(rho, clean), cid, &rho);
    CHECK(*res.fidelity > 1.0 - 1e-4);
    // parameterization keeps the estimate physical
    validate_density(res.rho);
}

TEST_CASE("sampled data with 2% SPAM reconstructs |dd> at the preparation floor") {
    SpamConfig spam;
    spam.init_error = 0.02;
    spam.flip_up_to_down = {0.02, 0.02};
    spam.flip_down_to_up = {0.02, 0.02};
    Mat4 rho_true = initial_state(spam);  // what the device actually prepares
    ReadoutModel model = calibrate_C(spam, 20000, 41);
    TomoRecord rec = take_tomo_record(rho_true, spam, 10000, 43);
    Mat4 target = pure(basis_ket(kDownDown));
    MLEResult res = mle_reconstruct(rec, model.C, &target);
    REQUIRE(res.fidelity.has_value());
    CHECK(std::abs(*res.fidelity - 0.98) < 0.01);
}

TEST_CASE("readout correction then forward application is the identity") {
    SpamConfig spam;
    spam.flip_up_to_down = {0.03, 0.01};
    spam.flip_down_to_up = {0.02, 0.04};
    Mat4d c = confusion_matrix(spam);
    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        Eigen::Vector4d p;
        for (int i = 0; i < 4; ++i) p(i) = rng.uniform() + 0.01;
        p /= p.sum();
        Eigen::Vector4d back = c * correct_readout(p, c).P;
        CHECK((back - p).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("record bookkeeping and validation") {
    SpamConfig clean;
    Mat4 dd = pure(basis_ket(kDownDown));
    TomoRecord rec = take_tomo_record(dd, clean, 500, 3);
    for (int v = 0; v < kNumTomoSettings; ++v) {
        long total = 0;
        for (long c : rec.counts[v]) total += c;
        CHECK(total == 500);
    }
    rec.counts[3][0] += 1;  // corrupt one setting
    CHECK_THROWS_WITH_AS(mle_reconstruct(rec, Mat4d::Identity()), doctest::Contains("counts"),
                         std::invalid_argument);
}

TEST_CASE("Monte Carlo fidelity uncertainty scales with shot count") {
    SpamConfig spam;
    spam.init_error = 0.02;
    spam.flip_up_to_down = {0.02, 0.02};
    spam.flip_down_to_up = {0.02, 0.02};
    Mat4 rho_true = initial_state(spam);
    Mat4d c = confusion_matrix(spam);
    Mat4 target = pure(basis_ket(kDownDown));

    TomoRecord r_small = take_tomo_record(rho_true, spam, 2500, 51);
    TomoRecord r_big = take_tomo_record(rho_true, spam, 10000, 53);
    double s_small = mc_state_uncertainty(r_small, c, target, 40, 55);
    double s_big = mc_state_uncertainty(r_big, c, target, 40, 57);
    CHECK(s_big > 1e-5);
    CHECK(s_big < 0.02);
    // ~1/sqrt(shots): expect roughly a factor 2, allow generous slack
    CHECK(s_small > 1.2 * s_big);
    CHECK(s_small < 3.5 * s_big);
}
