#include "spinsim/evolution.hpp"

#include <cmath>
#include <stdexcept>

namespace spinsim {

double PulseSchedule::total_duration() const {
    double d = 0;
    for (const auto& op : ops) {
        if (auto* t = std::get_if<DriveTone>(&op)) d += t->duration;
        else if (auto* i = std::get_if<Idle>(&op)) d += i->duration;
    }
    return d;
}

std::array<double, 3> PulseSchedule::frame_offsets() const {
    std::array<double, 3> f{0, 0, 0};
    for (const auto& op : ops)
        if (auto* s = std::get_if<FrameShift>(&op)) f[s->axis - 1] += s->theta;
    return f;
}

Mat4 virtual_phase(int axis, double theta) {
    if (axis == kAxisZ1 || axis == kAxisZ2) return rz_qubit(axis, theta);
    Vec4 d;
    d << std::polar(1.0, -theta / 2), std::polar(1.0, theta / 2), std::polar(1.0, theta / 2),
        std::polar(1.0, -theta / 2);
    return d.asDiagonal();
}

int PulseSchedule::drive_segments() const {
    int n = 0;
    for (const auto& op : ops) n += std::holds_alternative<DriveTone>(op) ? 1 : 0;
    return n;
}

PulseSchedule& PulseSchedule::append(const PulseSchedule& other) {
    ops.insert(ops.end(), other.ops.begin(), other.ops.end());
    return *this;
}

double sync_rabi(double J, int k) {
    if (!(J > 0)) throw std::invalid_argument("sync_rabi: J must be > 0");
    if (k < 1) throw std::invalid_argument("sync_rabi: k must be >= 1");
    return J / std::sqrt(16.0 * k * k - 1.0);
}

PulseSchedule crot_halfpi(const DeviceParams& p, Transition tr, double phi, double f_R) {
    if (!(f_R > 0)) throw std::invalid_argument("crot_halfpi: f_R must be > 0");
    ResonanceTable table = resonances(p);
    PulseSchedule s;
    s.drive(DriveTone{table.freq(tr), phi, f_R, 1.0 / (4.0 * f_R)});
    return s;
}

PulseSchedule crot_pi(const DeviceParams& p, Transition tr, double phi, double f_R) {
    if (!(f_R > 0)) throw std::invalid_argument("crot_pi: f_R must be > 0");
    ResonanceTable table = resonances(p);
    PulseSchedule s;
    s.drive(DriveTone{table.freq(tr), phi, f_R, 1.0 / (2.0 * f_R)});
    return s;
}

Mat4 expm_step(const Mat4& m) {
    double a = max_abs(m);
    int squarings = 0;
    Mat4 x = m;
    while (a > 0.25) {
        x *= 0.5;
        a *= 0.5;
        ++squarings;
    }
    Mat4 sum = Mat4::Identity(), term = Mat4::Identity();
    for (int k = 1; k <= 16; ++k) {
        term = (term * x / double(k)).eval();
        sum += term;
        if (max_abs(term) < 1e-18) break;
    }
    for (int i = 0; i < squarings; ++i) sum = (sum * sum).eval();
    return sum;
}

int infer_qubit(const ResonanceTable& table, double f_MW) {
    double d1 = std::min(std::abs(f_MW - table.f[0]), std::abs(f_MW - table.f[1]));
    double d2 = std::min(std::abs(f_MW - table.f[2]), std::abs(f_MW - table.f[3]));
    return d1 <= d2 ? 1 : 2;
}

namespace {

// H_R drive slots and their resonance lines: (0,1)->f(2,up), (0,2)->f(1,up),
// (1,3)->f(1,dn), (2,3)->f(2,dn).
struct Slot {
    int row, col, tr_index;
};
constexpr Slot kSlots[4] = {
    {0, 1, 3},
    {0, 2, 1},
    {1, 3, 0},
    {2, 3, 2},
};

int tone_steps(const DriveTone& tone, const TrotterConfig& cfg) {
    double n = cfg.steps_per_halfpi * tone.duration * 4.0 * tone.f_R;
    return std::max(1, static_cast<int>(std::llround(n)));
}

}  // namespace

PropResult propagate(const DeviceParams& p, const PulseSchedule& sched,
                     const NoiseSample* noise, const TrotterConfig& cfg, double t0) {
    if (cfg.steps_per_halfpi < 1)
        throw std::invalid_argument("propagate: steps_per_halfpi must be >= 1");
    ResonanceTable table = resonances(p);
    Vec4d dk = noise ? noise->delta_diag() : Vec4d::Zero();
    bool noisy = noise && !noise->is_zero();

    PropResult out;
    double t = t0;
    for (const auto& op : sched.ops) {
        if (auto* fs = std::get_if<FrameShift>(&op)) {
            out.U = (virtual_phase(fs->axis, fs->theta) * out.U).eval();
            continue;
        }
        if (auto* idle = std::get_if<Idle>(&op)) {
            if (noisy) {
                Vec4 d;
                for (int i = 0; i < 4; ++i) d(i) = std::polar(1.0, -kTwoPi * dk(i) * idle->duration);
                out.U = (Mat4(d.asDiagonal()) * out.U).eval();
            }
            t += idle->duration;
            continue;
        }
        const DriveTone& tone = std::get<DriveTone>(op);
        int n = tone_steps(tone, cfg);
        double dt = tone.duration / n;
        double det[4], half_fr = 0.5 * tone.f_R;
        for (int s = 0; s < 4; ++s) {
            det[s] = table.f[kSlots[s].tr_index] - tone.f_MW;
            out.max_cycles_per_step = std::max(out.max_cycles_per_step, std::abs(det[s]) * dt);
        }
        Mat4 k = Mat4::Zero();
        for (int i = 0; i < 4; ++i) k(i, i) = dk(i);
        for (int step = 0; step < n; ++step) {
            double ts = t + step * dt;
            for (int s = 0; s < 4; ++s) {
                double ph = tone.phi - kTwoPi * det[s] * ts;
                cxd e = half_fr * cxd(std::cos(ph), std::sin(ph));
                k(kSlots[s].row, kSlots[s].col) = e;
                k(kSlots[s].col, kSlots[s].row) = std::conj(e);
            }
            out.U = (expm_step(Mat4(cxd(0, -kTwoPi * dt) * k)) * out.U).eval();
        }
        t += tone.duration;
    }
    out.resolution_warning = out.max_cycles_per_step > 0.1;
    return out;
}

std::vector<Mat4> propagate_snapshots(const DeviceParams& p, const DriveTone& tone,
                                      const NoiseSample* noise, const TrotterConfig& cfg,
                                      const std::vector<double>& times_us) {
    ResonanceTable table = resonances(p);
    Vec4d dk = noise ? noise->delta_diag() : Vec4d::Zero();
    double t_end = times_us.back();
    DriveTone full = tone;
    full.duration = t_end;
    int n = tone_steps(full, cfg);
    double dt = t_end / n;
    double det[4], half_fr = 0.5 * tone.f_R;
    for (int s = 0; s < 4; ++s) det[s] = table.f[kSlots[s].tr_index] - tone.f_MW;
    Mat4 k = Mat4::Zero(), u = Mat4::Identity();
    for (int i = 0; i < 4; ++i) k(i, i) = dk(i);
    std::vector<Mat4> out;
    std::size_t next = 0;
    for (int step = 0; step < n && next < times_us.size(); ++step) {
        double ts = step * dt;
        for (int s = 0; s < 4; ++s) {
            double ph = tone.phi - kTwoPi * det[s] * ts;
            cxd e = half_fr * cxd(std::cos(ph), std::sin(ph));
            k(kSlots[s].row, kSlots[s].col) = e;
            k(kSlots[s].col, kSlots[s].row) = std::conj(e);
        }
        u = (expm_step(Mat4(cxd(0, -kTwoPi * dt) * k)) * u).eval();
        while (next < times_us.size() && times_us[next] <= (step + 1) * dt + 1e-15) {
            out.push_back(u);
            ++next;
        }
    }
    while (next++ < times_us.size()) out.push_back(u);
    return out;
}

Vec4 time_shift_frame(const DeviceParams& p, double f_MW, double t0) {
    Vec4d e = bare_energies(p);
    const double w[4] = {1.0, 0.0, 0.0, -1.0};
    Vec4 f;
    for (int i = 0; i < 4; ++i) f(i) = std::polar(1.0, -kTwoPi * (e(i) - f_MW * w[i]) * t0);
    return f;
}

double lab_frame_check(const DeviceParams& p, const PulseSchedule& sched,
                       const TrotterConfig& cfg) {
    // Lab Hamiltonian in the sign convention that the rotating frame
    // R = diag(e^{-i 2 pi E_j t}) actually transforms into the rotating-frame
    // matrix: drive pattern as printed, bare diagonal negated.
    Vec4d e = bare_energies(p);
    Mat4 ulab = Mat4::Identity();
    double t = 0;
    for (const auto& op : sched.ops) {
        if (auto* fs = std::get_if<FrameShift>(&op)) {
            ulab = (virtual_phase(fs->axis, fs->theta) * ulab).eval();
            continue;
        }
        if (auto* idle = std::get_if<Idle>(&op)) {
            Vec4 d;
            for (int i = 0; i < 4; ++i) d(i) = std::polar(1.0, kTwoPi * e(i) * idle->duration);
            ulab = (Mat4(d.asDiagonal()) * ulab).eval();
            t += idle->duration;
            continue;
        }
        const DriveTone& tone = std::get<DriveTone>(op);
        int n = tone_steps(tone, cfg);
        double dt = tone.duration / n;
        for (int step = 0; step < n; ++step) {
            double ts = t + step * dt;
            Mat4 h = Mat4::Zero();
            for (int i = 0; i < 4; ++i) h(i, i) = -e(i);
            cxd omega = 0.5 * tone.f_R * std::polar(1.0, kTwoPi * tone.f_MW * ts + tone.phi);
            const int slots[4][2] = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
            for (auto& s : slots) {
                h(s[0], s[1]) = omega;
                h(s[1], s[0]) = std::conj(omega);
            }
            ulab = (expm_step(Mat4(cxd(0, -kTwoPi * dt) * h)) * ulab).eval();
        }
        t += tone.duration;
    }
    Vec4 rend;
    for (int i = 0; i < 4; ++i) rend(i) = std::polar(1.0, -kTwoPi * e(i) * t);
    Mat4 urot = propagate(p, sched, nullptr, cfg).U;
    return max_abs(Mat4(Mat4(rend.asDiagonal()) * ulab - urot));
}

}  // namespace spinsim
