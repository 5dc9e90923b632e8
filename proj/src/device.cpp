#include "spinsim/device.hpp"

#include <cmath>
#include <stdexcept>

namespace spinsim {

std::vector<std::string> DeviceParams::validate() const {
    if (!(E_Z > 0)) throw std::invalid_argument("DeviceParams: E_Z must be > 0");
    if (!(dE_Z > 0)) throw std::invalid_argument("DeviceParams: dE_Z must be > 0");
    if (!(J >= 0)) throw std::invalid_argument("DeviceParams: J must be >= 0");
    for (int i = 0; i < 4; ++i) {
        if (!(T1[i] > 0) || !(T2star[i] > 0) || !(T2rabi[i] > 0))
            throw std::invalid_argument("DeviceParams: coherence times must be > 0 (" +
                                        Transition::from_index(i).label() + ")");
    }
    std::vector<std::string> warnings;
    if (J >= dE_Z)
        warnings.push_back("J >= dE_Z: CROT addressability assumption breaks (J=" +
                           std::to_string(J) + ", dE_Z=" + std::to_string(dE_Z) + ")");
    return warnings;
}

ResonanceTable resonances(const DeviceParams& p) {
    ResonanceTable r;
    r.dEz_tilde = std::sqrt(p.dE_Z * p.dE_Z + p.J * p.J);
    // f_{m,sigma} = E_Z +/- (dEz_tilde +/- J)/2; qubit 2 is the higher line,
    // and within each qubit the control-up line sits J above control-down.
    r.f[Transition{1, Spin::down}.index()] = p.E_Z - (r.dEz_tilde + p.J) / 2.0;
    r.f[Transition{1, Spin::up}.index()] = p.E_Z - (r.dEz_tilde - p.J) / 2.0;
    r.f[Transition{2, Spin::down}.index()] = p.E_Z + (r.dEz_tilde - p.J) / 2.0;
    r.f[Transition{2, Spin::up}.index()] = p.E_Z + (r.dEz_tilde + p.J) / 2.0;
    r.mixing_angle = std::atan2(p.J, p.dE_Z);
    return r;
}

Vec4d bare_energies(const DeviceParams& p) {
    double dt = std::sqrt(p.dE_Z * p.dE_Z + p.J * p.J);
    Vec4d e;
    e << p.E_Z, (-dt - p.J) / 2.0, (dt - p.J) / 2.0, -p.E_Z;
    return e;
}

Mat4 bare_hamiltonian(const DeviceParams& p, const std::optional<DriveTone>& drive, double t) {
    Mat4 h = Mat4::Zero();
    Vec4d e = bare_energies(p);
    for (int i = 0; i < 4; ++i) h(i, i) = e(i);
    if (drive) {
        cxd omega = 0.5 * drive->f_R * std::polar(1.0, kTwoPi * drive->f_MW * t + drive->phi);
        const int slots[4][2] = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
        for (auto& s : slots) {
            h(s[0], s[1]) = omega;
            h(s[1], s[0]) = std::conj(omega);
        }
    }
    return h;
}

Mat4 eigenbasis_in_product(const DeviceParams& p) {
    double th = std::atan2(p.J, p.dE_Z);
    double c = std::cos(th / 2), s = std::sin(th / 2);
    Mat4 v = Mat4::Identity();
    // |ud~> = c|ud> - s|du>, |du~> = s|ud> + c|du>
    v(1, 1) = c;
    v(2, 1) = -s;
    v(1, 2) = s;
    v(2, 2) = c;
    return v;
}

}  // namespace spinsim
