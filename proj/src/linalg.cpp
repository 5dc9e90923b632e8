#include "spinsim/linalg.hpp"

namespace spinsim {

Mat4 kron(const Mat2& a, const Mat2& b) {
    Mat4 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

Mat4 clamp_psd(const Mat4& rho) {
    Eigen::SelfAdjointEigenSolver<Mat4> es(rho);
    Vec4d w = es.eigenvalues();
    for (int i = 0; i < 4; ++i) {
        if (w(i) < -kPsdTol)
            throw std::invalid_argument("clamp_psd: eigenvalue below tolerance: " +
                                        std::to_string(w(i)));
        if (w(i) < 0) w(i) = 0;
    }
    double tr = w.sum();
    if (tr <= 0) throw std::invalid_argument("clamp_psd: zero trace after clamping");
    w /= tr;
    return es.eigenvectors() * w.cast<cxd>().asDiagonal() * es.eigenvectors().adjoint();
}

void validate_density(const Mat4& rho) {
    if (!is_hermitian(rho)) throw std::invalid_argument("density operator: not Hermitian");
    double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol)
        throw std::invalid_argument("density operator: trace != 1 (" + std::to_string(tr) + ")");
    Eigen::SelfAdjointEigenSolver<Mat4> es(rho);
    double wmin = es.eigenvalues().minCoeff();
    if (wmin < -kPsdTol)
        throw std::invalid_argument("density operator: not PSD (min eigenvalue " +
                                    std::to_string(wmin) + ")");
}

Mat4 sqrtm_psd(const Mat4& rho) {
    Eigen::SelfAdjointEigenSolver<Mat4> es(rho);
    Vec4d w = es.eigenvalues().cwiseMax(0.0);
    Vec4 s;
    for (int i = 0; i < 4; ++i) s(i) = std::sqrt(w(i));
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

double state_fidelity(const Mat4& rho, const Mat4& sigma) {
    validate_density(rho);
    validate_density(sigma);
    Mat4 r = clamp_psd(rho), s = clamp_psd(sigma);
    Mat4 sr = sqrtm_psd(r);
    Mat4 m = sr * s * sr;
    Eigen::SelfAdjointEigenSolver<Mat4> es(m);
    double t = 0;
    for (int i = 0; i < 4; ++i) t += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
    double f = t * t;
    return std::min(1.0, std::max(0.0, f));
}

double average_gate_fidelity(const Mat4& u, const Mat4& v) {
    double t = std::abs((u.adjoint() * v).trace());
    return (t * t + 4.0) / 20.0;
}

namespace {
template <class M>
M canon(const M& u, double tol) {
    for (int i = 0; i < u.rows(); ++i)
        for (int j = 0; j < u.cols(); ++j) {
            cxd e = u(i, j);
            if (std::abs(e) > tol) return M(u * (std::conj(e) / std::abs(e)));
        }
    return u;
}
}  // namespace

Mat4 canonical_phase(const Mat4& u, double tol) { return canon(u, tol); }
Mat2 canonical_phase2(const Mat2& u, double tol) { return canon(u, tol); }

bool equal_up_to_phase(const Mat4& a, const Mat4& b, double tol) {
    return max_abs(Mat4(canonical_phase(a) - canonical_phase(b))) <= tol;
}

Mat2 pauli_x() { return (Mat2() << 0, 1, 1, 0).finished(); }
Mat2 pauli_y() { return (Mat2() << 0, cxd(0, -1), cxd(0, 1), 0).finished(); }
Mat2 pauli_z() { return (Mat2() << 1, 0, 0, -1).finished(); }

Mat2 rx2(double th) {
    double c = std::cos(th / 2), s = std::sin(th / 2);
    return (Mat2() << c, cxd(0, -s), cxd(0, -s), c).finished();
}
Mat2 ry2(double th) {
    double c = std::cos(th / 2), s = std::sin(th / 2);
    return (Mat2() << c, -s, s, c).finished();
}
Mat2 rz2(double th) {
    return (Mat2() << std::polar(1.0, -th / 2), 0, 0, std::polar(1.0, th / 2)).finished();
}

Mat4 embed(const Mat2& u, int qubit) {
    return qubit == 1 ? kron(u, Mat2::Identity()) : kron(Mat2::Identity(), u);
}

Mat4 rz_qubit(int qubit, double theta) {
    Vec4 d;
    for (int i = 0; i < 4; ++i)
        d(i) = std::polar(1.0, qubit_up(i, qubit) ? -theta / 2 : theta / 2);
    return d.asDiagonal();
}

Vec4 basis_ket(int i) {
    Vec4 v = Vec4::Zero();
    v(i) = 1.0;
    return v;
}

}  // namespace spinsim
