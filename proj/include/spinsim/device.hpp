#pragma once

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "spinsim/linalg.hpp"
#include "spinsim/types.hpp"

namespace spinsim {

// A single microwave drive segment. All frequencies in MHz, durations in us,
// phases in rad.
struct DriveTone {
    double f_MW = 0;
    double phi = 0;
    double f_R = 0;
    double duration = 0;
};

// Static parameters of the exchange-coupled two-spin system. Energies are
// stored as frequencies (MHz); h never appears. Coherence times are per
// EDSR transition, indexed by Transition::index().
struct DeviceParams {
    double E_Z = 15700.0;   // average Zeeman frequency, MHz
    double dE_Z = 300.0;    // bare Zeeman difference, MHz
    double J = 18.85;       // exchange coupling, MHz

    std::array<double, 4> T1{inf(), inf(), inf(), inf()};          // us
    std::array<double, 4> T2star{3.0, 3.0, 3.0, 3.0};              // us
    std::array<double, 4> T2rabi{50.0, 50.0, 50.0, 50.0};          // us
    std::array<double, 4> echo_exponent{1.5, 1.2, 1.8, 1.6};

    bool coherence_defaults = true;  // flagged in output metadata when true

    static constexpr double inf() { return std::numeric_limits<double>::infinity(); }

    // Throws on hard invariant violations; returns regime warnings.
    std::vector<std::string> validate() const;
};

// Derived spectrum: hybridized splitting, the four EDSR resonance lines and
// the mixing angle tan(theta) = J / dE_Z.
struct ResonanceTable {
    double dEz_tilde = 0;
    std::array<double, 4> f{};  // indexed by Transition::index()
    double mixing_angle = 0;

    double freq(Transition tr) const { return f[tr.index()]; }
};

ResonanceTable resonances(const DeviceParams& p);

// Diagonal of H/h in MHz in the eigenbasis ordering:
// (2 E_Z, -dEz_tilde - J, dEz_tilde - J, -2 E_Z) / 2.
Vec4d bare_energies(const DeviceParams& p);

// H(t)/h in MHz: the bare diagonal plus, when a drive is supplied, the EDSR
// pattern Omega = f_R exp(i(2 pi f_MW t + phi)) on the four allowed slots.
Mat4 bare_hamiltonian(const DeviceParams& p, const std::optional<DriveTone>& drive, double t);

// Columns are the eigenbasis kets expressed in the product basis
// (uu, ud, du, dd); the middle block mixes by the angle theta/2.
Mat4 eigenbasis_in_product(const DeviceParams& p);

}  // namespace spinsim
