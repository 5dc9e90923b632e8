#pragma once

#include <string>
#include <variant>
#include <vector>

#include "spinsim/rng.hpp"
#include "spinsim/types.hpp"

namespace spinsim {

// Quasi-static resonance-frequency offsets for one shot (MHz).
struct NoiseSample {
    double dEz = 0;   // Delta E_Z
    double ddEz = 0;  // Delta dEz_tilde
    double dJ = 0;    // Delta J

    // diag(2 dEz, -ddEz - dJ, ddEz - dJ, -2 dEz)/2, the noise Hamiltonian in MHz
    Vec4d delta_diag() const {
        Vec4d d;
        d << dEz, (-ddEz - dJ) / 2.0, (ddEz - dJ) / 2.0, -dEz;
        return d;
    }
    // frequency shift of one EDSR line: Delta f_{m,sigma} = Delta f_m +/- dJ/2
    double transition_shift(Transition tr) const {
        Vec4d d = delta_diag();
        auto pr = driven_pair(tr);
        return d(pr[0]) - d(pr[1]);
    }
    bool is_zero() const { return dEz == 0 && ddEz == 0 && dJ == 0; }
};

// Time series of per-qubit frequency offsets and half the exchange offset.
struct NoiseTrace {
    std::vector<double> time_s;
    std::vector<double> df1_mhz, df2_mhz, djhalf_mhz;
    std::size_t size() const { return time_s.size(); }
};

struct QuasiStaticGaussian {
    double sigma_f1 = 0, sigma_f2 = 0, sigma_J = 0;  // MHz
};
struct TraceReplay {
    NoiseTrace trace;
};
struct OrnsteinUhlenbeck {
    double sigma = 0;    // stationary std, MHz (per single-qubit frequency)
    double tau_c = 1.0;  // correlation time, us
};

struct NoiseModel {
    std::variant<QuasiStaticGaussian, TraceReplay, OrnsteinUhlenbeck> kind =
        QuasiStaticGaussian{};
    std::uint64_t seed = 0;

    bool is_trivial() const;
};

// Deterministic given (model.seed, shot_index).
NoiseSample draw_sample(const NoiseModel& model, std::uint64_t shot_index);

// Quasi-static Gaussian sigma reproducing a Gaussian Ramsey envelope
// exp(-(t/T2*)^2): sigma_f = sqrt(2) / (2 pi T2*).
double sigma_from_t2star(double t2star_us);
double t2star_from_sigma(double sigma_mhz);

// CSV with header `time_s,df1_mhz,df2_mhz,djhalf_mhz`; parse errors carry the
// line number.
NoiseTrace load_trace(const std::string& path);
void save_trace(const NoiseTrace& trace, const std::string& path);

// Exact discrete-time OU path for both single-qubit frequencies (independent,
// stationary std = model sigma); djhalf stays zero.
NoiseTrace ou_trace(const OrnsteinUhlenbeck& ou, double duration_us, double dt_us,
                    std::uint64_t seed, std::uint64_t path_index = 0);

// One exact OU update step: x -> x e^{-dt/tau} + sigma sqrt(1 - e^{-2dt/tau}) xi.
double ou_step(double x, double sigma, double tau_c, double dt, Rng& rng);

}  // namespace spinsim
