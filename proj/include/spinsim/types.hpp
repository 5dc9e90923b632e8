#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <string>

namespace spinsim {

using cxd = std::complex<double>;

template <class Scalar, int N>
using SquareMat = Eigen::Matrix<std::complex<Scalar>, N, N>;

using Mat2 = SquareMat<double, 2>;
using Mat4 = SquareMat<double, 4>;
using Vec2 = Eigen::Vector2cd;
using Vec4 = Eigen::Vector4cd;
using Vec4d = Eigen::Vector4d;
using Mat4d = Eigen::Matrix4d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Basis ordering of the two-qubit eigenbasis. The middle kets are the
// exchange-hybridized states; the ordering follows the diagonal of the
// system Hamiltonian, with qubit 2 the higher-frequency qubit.
enum BasisState : int { kUpUp = 0, kUpDown = 1, kDownUp = 2, kDownDown = 3 };

enum class Spin : int { down = 0, up = 1 };

inline Spin opposite(Spin s) { return s == Spin::down ? Spin::up : Spin::down; }

// One of the four EDSR lines: rotate qubit `qubit` conditioned on the other
// qubit (the control) being in state `control`.
struct Transition {
    int qubit = 1;  // 1 or 2, the driven (target) qubit
    Spin control = Spin::down;

    // flat index: (1,dn)=0, (1,up)=1, (2,dn)=2, (2,up)=3
    int index() const { return (qubit - 1) * 2 + (control == Spin::up ? 1 : 0); }
    static Transition from_index(int i) {
        return Transition{i / 2 + 1, (i % 2) ? Spin::up : Spin::down};
    }
    std::string label() const {
        return "f" + std::to_string(qubit) + (control == Spin::up ? "_up" : "_down");
    }
    bool operator==(const Transition& o) const {
        return qubit == o.qubit && control == o.control;
    }
};

// Basis-state pair coupled by a transition (row < col of the drive slot).
inline std::array<int, 2> driven_pair(Transition tr) {
    switch (tr.index()) {
        case 0: return {kUpDown, kDownDown};  // (1,dn)
        case 1: return {kUpUp, kDownUp};      // (1,up)
        case 2: return {kDownUp, kDownDown};  // (2,dn)
        default: return {kUpUp, kUpDown};     // (2,up)
    }
}

inline std::array<int, 2> spectator_pair(Transition tr) {
    switch (tr.index()) {
        case 0: return {kUpUp, kDownUp};
        case 1: return {kUpDown, kDownDown};
        case 2: return {kUpUp, kUpDown};
        default: return {kDownUp, kDownDown};
    }
}

// Spin projection of each qubit for a basis state (true = up).
inline bool qubit_up(int basis_state, int qubit) {
    return qubit == 1 ? basis_state < 2 : (basis_state % 2) == 0;
}

}  // namespace spinsim
