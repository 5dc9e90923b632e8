#pragma once

// Test-only oracles, independent of the library's implementation paths.

#include <cmath>
#include <complex>

#include "spinsim/types.hpp"

namespace oracles {

using spinsim::cxd;
using spinsim::Mat2;
using spinsim::Mat4;

// exp(i s A) by direct series summation (20 terms), no eigendecomposition
template <class M>
M expm_series(const M& a, double s, int terms = 20) {
    M sum = M::Identity(), term = M::Identity();
    for (int k = 1; k <= terms; ++k) {
        term = (term * (cxd(0, s) * a) / double(k)).eval();
        sum += term;
    }
    return sum;
}

// 2x2 off-resonant block evolution: H = (1/2) [[-J, fR e^{i phi}], [fR e^{-i phi}, J]]
// for duration t (frequency units, U = exp(-i 2 pi H t)).
inline Mat2 offresonant_block(double J, double fR, double phi, double t) {
    Mat2 h;
    h << -J / 2.0, 0.5 * fR * std::polar(1.0, phi), 0.5 * fR * std::polar(1.0, -phi), J / 2.0;
    // exact 2x2 exponential via half-angle formulas
    double w = std::sqrt(J * J + fR * fR) / 2.0;
    double th = spinsim::kTwoPi * w * t;
    Mat2 u = std::cos(th) * Mat2::Identity();
    if (w > 0) u -= cxd(0, std::sin(th) / w) * h;
    return u;
}

// analytic quasi-static Gaussian dephasing envelope exp(-(t/T2*)^2) with
// T2* = sqrt(2)/(2 pi sigma)
inline double gaussian_ramsey_envelope(double t_us, double sigma_mhz) {
    double t2 = std::sqrt(2.0) / (spinsim::kTwoPi * sigma_mhz);
    return std::exp(-(t_us / t2) * (t_us / t2));
}

// tensor-product readout confusion matrix from per-qubit flip probabilities
inline Eigen::Matrix4d confusion_oracle(double a1, double b1, double a2, double b2) {
    Eigen::Matrix2d c1, c2;
    c1 << 1 - a1, b1, a1, 1 - b1;
    c2 << 1 - a2, b2, a2, 1 - b2;
    Eigen::Matrix4d c;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) c(i, j) = c1(i / 2, j / 2) * c2(i % 2, j % 2);
    return c;
}

// depolarizing composition: per-Clifford parameter for a per-primitive channel
inline double depol_per_clifford(double eps, double avg_primitives) {
    return std::pow(1.0 - eps, avg_primitives);
}

}  // namespace oracles
