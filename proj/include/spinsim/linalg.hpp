#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "spinsim/types.hpp"

namespace spinsim {

inline constexpr double kHermTol = 1e-10;
inline constexpr double kPsdTol = 1e-8;     // eigenvalues >= -kPsdTol are clamped
inline constexpr double kTraceTol = 1e-8;

template <class M>
double max_abs(const M& a) {
    return a.cwiseAbs().maxCoeff();
}

template <class M>
bool is_hermitian(const M& a, double tol = kHermTol) {
    return max_abs(M(a - a.adjoint())) <= tol * std::max(1.0, max_abs(a));
}

// exp(i * scale * A) for Hermitian A, via eigendecomposition.
template <class M>
M expm_hermitian(const M& a, double scale) {
    if (!is_hermitian(a))
        throw std::invalid_argument("expm_hermitian: input not Hermitian within tolerance");
    Eigen::SelfAdjointEigenSolver<M> es(a);
    const auto& w = es.eigenvalues();
    const M& v = es.eigenvectors();
    Eigen::Matrix<cxd, M::RowsAtCompileTime, 1> ph(a.rows());
    for (int i = 0; i < a.rows(); ++i) ph(i) = std::polar(1.0, scale * w(i));
    return v * ph.asDiagonal() * v.adjoint();
}

Mat4 kron(const Mat2& a, const Mat2& b);

// Clamps tiny negative eigenvalues (>= -kPsdTol) to zero and renormalizes the
// trace; boundary states from MLE and resampling land here routinely.
Mat4 clamp_psd(const Mat4& rho);

// Throws std::invalid_argument naming the violated invariant.
void validate_density(const Mat4& rho);

Mat4 sqrtm_psd(const Mat4& rho);

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2; both inputs are
// validated as density operators.
double state_fidelity(const Mat4& rho, const Mat4& sigma);

// F_avg = (|Tr(U^dag V)|^2 + d) / (d(d+1))
double average_gate_fidelity(const Mat4& u, const Mat4& v);

// Rescale so the first entry with |.| > tol is real positive.
Mat4 canonical_phase(const Mat4& u, double tol = 1e-8);
Mat2 canonical_phase2(const Mat2& u, double tol = 1e-8);

bool equal_up_to_phase(const Mat4& a, const Mat4& b, double tol);

// single-qubit operators in the (up, down) basis
Mat2 pauli_x();
Mat2 pauli_y();
Mat2 pauli_z();
Mat2 rx2(double theta);
Mat2 ry2(double theta);
Mat2 rz2(double theta);

// embed a single-qubit operator on qubit 1 or 2 of the pair
Mat4 embed(const Mat2& u, int qubit);

// diagonal virtual-Z rotation exp(-i theta Z_q / 2) on qubit q
Mat4 rz_qubit(int qubit, double theta);

Vec4 basis_ket(int i);

}  // namespace spinsim
