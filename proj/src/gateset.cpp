#include "spinsim/gateset.hpp"

#include <cmath>
#include <stdexcept>

namespace spinsim {

namespace {

const char* kGateNames[kNumGateLabels] = {
    "X1", "X1/2", "-X1/2", "Y1", "Y1/2", "-Y1/2", "CNOT1", "ZCNOT1",
    "X2", "X2/2", "-X2/2", "Y2", "Y2/2", "-Y2/2", "CNOT2", "ZCNOT2",
    "I",
};

// drive phase selecting the rotation axis: axis (cos phi, -sin phi)
constexpr double kPhiX = 0.0;
constexpr double kPhiXm = kPi;
constexpr double kPhiY = -kPi / 2.0;
constexpr double kPhiYm = kPi / 2.0;

Mat4 swap_with_identity(int a, int b) {
    Mat4 u = Mat4::Identity();
    u(a, a) = u(b, b) = 0;
    u(a, b) = u(b, a) = 1;
    return u;
}

}  // namespace

std::string gate_name(GateLabel g) { return kGateNames[static_cast<int>(g)]; }

std::optional<GateLabel> parse_gate(const std::string& name) {
    for (int i = 0; i < kNumGateLabels; ++i)
        if (name == kGateNames[i]) return static_cast<GateLabel>(i);
    return std::nullopt;
}

int gate_target_qubit(GateLabel g) {
    int i = static_cast<int>(g);
    if (i >= 16) return 0;
    return i < 8 ? 1 : 2;
}

std::string gate1q_name(Gate1Q g) {
    static const char* names[7] = {"I", "X", "Y", "X/2", "-X/2", "Y/2", "-Y/2"};
    return names[static_cast<int>(g)];
}

Mat2 gate1q_unitary(Gate1Q g) {
    switch (g) {
        case Gate1Q::I: return Mat2::Identity();
        case Gate1Q::X: return rx2(kPi);
        case Gate1Q::Y: return ry2(kPi);
        case Gate1Q::XHalf: return rx2(kPi / 2);
        case Gate1Q::XHalfM: return rx2(-kPi / 2);
        case Gate1Q::YHalf: return ry2(kPi / 2);
        default: return ry2(-kPi / 2);
    }
}

GateLabel gate1q_to_label(Gate1Q g, int qubit) {
    int base = qubit == 1 ? 0 : 8;
    switch (g) {
        case Gate1Q::I: return GateLabel::Idle;
        case Gate1Q::X: return static_cast<GateLabel>(base + 0);
        case Gate1Q::XHalf: return static_cast<GateLabel>(base + 1);
        case Gate1Q::XHalfM: return static_cast<GateLabel>(base + 2);
        case Gate1Q::Y: return static_cast<GateLabel>(base + 3);
        case Gate1Q::YHalf: return static_cast<GateLabel>(base + 4);
        default: return static_cast<GateLabel>(base + 5);
    }
}

Mat4 ideal_unitary(GateLabel g) {
    switch (g) {
        case GateLabel::X1: return embed(rx2(kPi), 1);
        case GateLabel::X1Half: return embed(rx2(kPi / 2), 1);
        case GateLabel::X1HalfM: return embed(rx2(-kPi / 2), 1);
        case GateLabel::Y1: return embed(ry2(kPi), 1);
        case GateLabel::Y1Half: return embed(ry2(kPi / 2), 1);
        case GateLabel::Y1HalfM: return embed(ry2(-kPi / 2), 1);
        case GateLabel::X2: return embed(rx2(kPi), 2);
        case GateLabel::X2Half: return embed(rx2(kPi / 2), 2);
        case GateLabel::X2HalfM: return embed(rx2(-kPi / 2), 2);
        case GateLabel::Y2: return embed(ry2(kPi), 2);
        case GateLabel::Y2Half: return embed(ry2(kPi / 2), 2);
        case GateLabel::Y2HalfM: return embed(ry2(-kPi / 2), 2);
        // CNOT_m flips qubit m when the control is down; ZCNOT_m when up.
        case GateLabel::CNOT1: return swap_with_identity(kUpDown, kDownDown);
        case GateLabel::ZCNOT1: return swap_with_identity(kUpUp, kDownUp);
        case GateLabel::CNOT2: return swap_with_identity(kDownUp, kDownDown);
        case GateLabel::ZCNOT2: return swap_with_identity(kUpUp, kUpDown);
        default: return Mat4::Identity();
    }
}

PulseSchedule primitive_pulses(const DeviceParams& p, GateLabel g, double f_R) {
    double thp = 1.0 / (4.0 * f_R);
    auto two_tone = [&](int m, double phi, bool full_pi) {
        Transition dn{m, Spin::down}, up{m, Spin::up};
        PulseSchedule s = full_pi ? crot_pi(p, dn, phi, f_R) : crot_halfpi(p, dn, phi, f_R);
        s.append(full_pi ? crot_pi(p, up, phi, f_R) : crot_halfpi(p, up, phi, f_R));
        return s;
    };
    auto cnot_pair = [&](int m, Spin ctrl) {
        Transition tr{m, ctrl};
        PulseSchedule s = crot_halfpi(p, tr, kPhiX, f_R);
        s.append(crot_halfpi(p, tr, kPhiX, f_R));
        return s;
    };
    switch (g) {
        case GateLabel::X1: return two_tone(1, kPhiX, true);
        case GateLabel::X1Half: return two_tone(1, kPhiX, false);
        case GateLabel::X1HalfM: return two_tone(1, kPhiXm, false);
        case GateLabel::Y1: return two_tone(1, kPhiY, true);
        case GateLabel::Y1Half: return two_tone(1, kPhiY, false);
        case GateLabel::Y1HalfM: return two_tone(1, kPhiYm, false);
        case GateLabel::X2: return two_tone(2, kPhiX, true);
        case GateLabel::X2Half: return two_tone(2, kPhiX, false);
        case GateLabel::X2HalfM: return two_tone(2, kPhiXm, false);
        case GateLabel::Y2: return two_tone(2, kPhiY, true);
        case GateLabel::Y2Half: return two_tone(2, kPhiY, false);
        case GateLabel::Y2HalfM: return two_tone(2, kPhiYm, false);
        case GateLabel::CNOT1: return cnot_pair(1, Spin::down);
        case GateLabel::ZCNOT1: return cnot_pair(1, Spin::up);
        case GateLabel::CNOT2: return cnot_pair(2, Spin::down);
        case GateLabel::ZCNOT2: return cnot_pair(2, Spin::up);
        default: {
            PulseSchedule s;
            s.idle(2.0 * thp);  // one primitive duration
            return s;
        }
    }
}

namespace {

// phase of the diagonal correction exp(-i(z1 Z1 + z2 Z2 + zz Z1Z2)/2) at one
// basis state
double diag_phase(int state, const std::array<double, 3>& z) {
    double s1 = qubit_up(state, 1) ? 1.0 : -1.0;
    double s2 = qubit_up(state, 2) ? 1.0 : -1.0;
    return -0.5 * (z[0] * s1 + z[1] * s2 + z[2] * s1 * s2);
}

// |Tr(ideal^dag D_post U D_pre)| over the six correction phases
struct TraceObjective {
    struct Term {
        int row, col;
        cxd m;
    };
    std::vector<Term> terms;

    TraceObjective(const Mat4& ideal, const Mat4& u) {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                cxd m = std::conj(ideal(i, j)) * u(i, j);
                if (std::abs(m) > 1e-14) terms.push_back({i, j, m});
            }
    }

    double operator()(const std::array<double, 6>& x) const {
        std::array<double, 3> post{x[0], x[1], x[2]}, pre{x[3], x[4], x[5]};
        cxd t = 0;
        for (const auto& term : terms)
            t += term.m *
                 std::polar(1.0, diag_phase(term.row, post) + diag_phase(term.col, pre));
        return std::abs(t);
    }
};

template <class F, std::size_t N>
std::array<double, N> pattern_search(const F& f, std::array<double, N> x, double step,
                                     double tol) {
    double best = f(x);
    while (step > tol) {
        bool improved = false;
        for (std::size_t i = 0; i < N; ++i) {
            for (double sgn : {1.0, -1.0}) {
                auto y = x;
                y[i] += sgn * step;
                double v = f(y);
                if (v > best + 1e-15) {
                    best = v;
                    x = y;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return x;
}

// Solve p_i + q_j = arg(ideal_ij) - arg(u_ij) over the support slots in the
// least-squares sense (p, q full diagonal phase vectors), then convert to the
// (Z1, Z2, ZZ) components on each side.
std::array<double, 6> analytic_phase_solve(const Mat4& ideal, const Mat4& u) {
    std::vector<std::array<int, 2>> slots;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (std::abs(ideal(i, j)) > 0.2 && std::abs(u(i, j)) > 1e-6)
                slots.push_back({i, j});
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<int>(slots.size()), 8);
    Eigen::VectorXd c(static_cast<int>(slots.size()));
    for (std::size_t s = 0; s < slots.size(); ++s) {
        a(s, slots[s][0]) = 1.0;
        a(s, 4 + slots[s][1]) = 1.0;
        c(s) = std::remainder(std::arg(ideal(slots[s][0], slots[s][1])) -
                                  std::arg(u(slots[s][0], slots[s][1])),
                              kTwoPi);
    }
    Eigen::VectorXd x = a.completeOrthogonalDecomposition().solve(c);
    // p_i = -(z1 s1 + z2 s2 + zz s1 s2)/2 + g  =>  z = -(pattern . p)/2
    auto components = [](const Eigen::Vector4d& v) {
        std::array<double, 3> z;
        Eigen::Vector4d s1, s2;
        s1 << 1, 1, -1, -1;
        s2 << 1, -1, 1, -1;
        z[0] = -0.5 * v.dot(s1);
        z[1] = -0.5 * v.dot(s2);
        z[2] = -0.5 * v.dot(Eigen::Vector4d(s1.array() * s2.array()));
        return z;
    };
    auto post = components(x.head<4>());
    auto pre = components(x.tail<4>());
    return {post[0], post[1], post[2], pre[0], pre[1], pre[2]};
}

}  // namespace

CalibrationResult calibrate_phases(const DeviceParams& p, GateLabel g, double f_R,
                                   const TrotterConfig& cfg) {
    Mat4 u = propagate(p, primitive_pulses(p, g, f_R), nullptr, cfg).U;
    Mat4 ideal = ideal_unitary(g);
    TraceObjective obj(ideal, u);

    // analytic slot-phase solution, then deterministic pattern-search polish;
    // a zero start guards against a wrapped-branch miss in the solve
    std::array<double, 6> best{0, 0, 0, 0, 0, 0};
    double best_v = obj(best);
    for (auto start : {analytic_phase_solve(ideal, u), std::array<double, 6>{}}) {
        auto refined = pattern_search(obj, start, kPi / 2, 1e-11);
        double v = obj(refined);
        if (v > best_v) {
            best_v = v;
            best = refined;
        }
    }

    CalibrationResult out;
    for (int k = 0; k < 3; ++k) {
        out.z.post[k] = std::remainder(best[k], kTwoPi);
        out.z.pre[k] = std::remainder(best[k + 3], kTwoPi);
    }
    out.residual_infidelity = 1.0 - (best_v * best_v + 4.0) / 20.0;
    out.converged = out.residual_infidelity < 1e-4;
    return out;
}

PrimitiveGate build_primitive(const DeviceParams& p, GateLabel g, double f_R,
                              const TrotterConfig& cfg) {
    PrimitiveGate prim;
    prim.label = g;
    PulseSchedule pulses = primitive_pulses(p, g, f_R);
    if (g != GateLabel::Idle) {
        CalibrationResult cal = calibrate_phases(p, g, f_R, cfg);
        prim.z = cal.z;
        prim.calibration_residual = cal.residual_infidelity;
        prim.calibrated = cal.converged;
        for (int ax = 0; ax < 3; ++ax)
            if (cal.z.pre[ax] != 0) prim.schedule.shift(ax + 1, cal.z.pre[ax]);
        prim.schedule.append(pulses);
        for (int ax = 0; ax < 3; ++ax)
            if (cal.z.post[ax] != 0) prim.schedule.shift(ax + 1, cal.z.post[ax]);
    } else {
        prim.schedule = pulses;
    }
    prim.duration = prim.schedule.total_duration();
    return prim;
}

Mat4 GateSet::simulate(GateLabel g, const NoiseSample* noise) const {
    return propagate(device, get(g).schedule, noise, trotter).U;
}

GateSet build_gateset(const DeviceParams& p, double f_R, const TrotterConfig& cfg,
                      double idle_pad) {
    GateSet gs;
    gs.device = p;
    gs.f_R = f_R;
    gs.trotter = cfg;
    gs.idle_pad = idle_pad;
    for (int i = 0; i < kNumGateLabels; ++i) {
        GateLabel g = static_cast<GateLabel>(i);
        gs.prims[i] = build_primitive(p, g, f_R, cfg);
        if (idle_pad > 0) {
            // pad to the pulsed-exchange gate time: one pad per 2-CROT unit
            double thp = 1.0 / (4.0 * f_R);
            int units = std::max(1, (int)std::llround(gs.prims[i].schedule.total_duration() /
                                                      (2.0 * thp)));
            PulseSchedule padded;
            for (const auto& op : gs.prims[i].schedule.ops) padded.ops.push_back(op);
            for (int u = 0; u < units; ++u) padded.idle(idle_pad);
            gs.prims[i].schedule = padded;
            gs.prims[i].duration = padded.total_duration();
        }
    }
    return gs;
}

Mat2 driven_block(const Mat4& u, Transition tr) {
    auto pr = driven_pair(tr);
    Mat2 b;
    b << u(pr[0], pr[0]), u(pr[0], pr[1]), u(pr[1], pr[0]), u(pr[1], pr[1]);
    return b;
}

namespace {

double block_trace_fidelity(const Mat2& ideal, const Mat2& b) {
    double t = std::abs((ideal.adjoint() * b).trace());
    return (t * t + 2.0) / 6.0;
}

}  // namespace

SingleToneSet build_single_tone_set(const DeviceParams& p, Transition line, double f_R,
                                    const TrotterConfig& cfg) {
    SingleToneSet st;
    st.device = p;
    st.line = line;
    st.f_R = f_R;
    st.trotter = cfg;
    double thp = 1.0 / (4.0 * f_R);
    for (int i = 0; i < 7; ++i) {
        Gate1Q g = static_cast<Gate1Q>(i);
        SingleToneGate& gate = st.gates[i];
        gate.label = g;
        PulseSchedule pulses;
        switch (g) {
            case Gate1Q::I: pulses.idle(thp); break;
            case Gate1Q::X: pulses = crot_pi(p, line, kPhiX, f_R); break;
            case Gate1Q::Y: pulses = crot_pi(p, line, kPhiY, f_R); break;
            case Gate1Q::XHalf: pulses = crot_halfpi(p, line, kPhiX, f_R); break;
            case Gate1Q::XHalfM: pulses = crot_halfpi(p, line, kPhiXm, f_R); break;
            case Gate1Q::YHalf: pulses = crot_halfpi(p, line, kPhiY, f_R); break;
            case Gate1Q::YHalfM: pulses = crot_halfpi(p, line, kPhiYm, f_R); break;
        }
        if (g == Gate1Q::I) {
            gate.schedule = pulses;
            continue;
        }
        Mat4 u = propagate(p, pulses, nullptr, cfg).U;
        Mat2 block = driven_block(u, line);
        Mat2 ideal = gate1q_unitary(g);
        auto obj = [&](const std::array<double, 2>& x) {
            Mat2 corr = rz2(x[0]) * block * rz2(x[1]);
            return block_trace_fidelity(ideal, corr) ;
        };
        std::array<double, 2> best{0, 0};
        double bv = obj(best);
        const int n = 64;
        for (int ia = 0; ia < n; ++ia)
            for (int ib = 0; ib < n; ++ib) {
                std::array<double, 2> x{-kPi + ia * kTwoPi / n, -kPi + ib * kTwoPi / n};
                double v = obj(x);
                if (v > bv) {
                    bv = v;
                    best = x;
                }
            }
        best = pattern_search(obj, best, kTwoPi / n, 1e-11);
        gate.post_z = std::remainder(best[0], kTwoPi);
        gate.pre_z = std::remainder(best[1], kTwoPi);
        gate.residual = 1.0 - obj(best);
        int tq = line.qubit;
        gate.schedule.shift(tq, gate.pre_z);
        gate.schedule.append(pulses);
        gate.schedule.shift(tq, gate.post_z);
    }
    return st;
}

Mat4 SingleToneSet::simulate(Gate1Q g, const NoiseSample* noise) const {
    return propagate(device, get(g).schedule, noise, trotter).U;
}

}  // namespace spinsim
