#include "spinsim/benchmark.hpp"

#include <cmath>
#include <stdexcept>

#include "spinsim/parallel.hpp"

namespace spinsim {

std::vector<double> RBCurves::mean_up() const {
    std::vector<double> m(lengths.size(), 0.0);
    for (std::size_t l = 0; l < lengths.size(); ++l) {
        for (double v : up[l]) m[l] += v;
        m[l] /= double(up[l].size());
    }
    return m;
}

std::vector<double> RBCurves::mean_down() const {
    std::vector<double> m(lengths.size(), 0.0);
    if (down.empty()) return m;
    for (std::size_t l = 0; l < lengths.size(); ++l) {
        for (double v : down[l]) m[l] += v;
        m[l] /= double(down[l].size());
    }
    return m;
}

std::vector<double> RBCurves::sequence_fidelity() const {
    auto u = mean_up(), d = mean_down();
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) f[i] = u[i] - d[i];
    return f;
}

std::vector<int> default_lengths(int qubits) {
    if (qubits == 1) return {2, 4, 8, 16, 32, 64, 128, 200, 300};
    return {2, 4, 8, 16, 32, 62, 120, 200, 271};
}

namespace {

struct PoolOps {
    // full primitive operators for one noise sample, indexed by GateLabel
    std::array<Mat4, kNumGateLabels> prim;
};

void check_unitary(const Mat4& u, GateLabel g) {
    if (max_abs(Mat4(u.adjoint() * u - Mat4::Identity())) > 1e-8)
        throw std::runtime_error("run_rb: non-unitary propagator for primitive " +
                                 gate_name(g));
}

struct SequencePlan {
    std::vector<int> cliffords;
    int recovery_up = 0, recovery_dn = 0;
};

// pure-state playback through a two-qubit decomposition
void apply_decomp_2q(Vec4& psi, const std::vector<DecompOp>& ops, const PoolOps& pool) {
    for (const auto& op : ops) {
        if (op.kind == DecompOp::kZLayer) {
            for (int i = 0; i < 4; ++i) {
                double th = (qubit_up(i, 1) ? -op.za : op.za) * kPi / 4.0 +
                            (qubit_up(i, 2) ? -op.zb : op.zb) * kPi / 4.0;
                psi(i) *= std::polar(1.0, th);
            }
        } else {
            psi = (pool.prim[static_cast<int>(op.prim)] * psi).eval();
        }
    }
}

void apply_decomp_2q_dm(Mat4& rho, const std::vector<DecompOp>& ops,
                        const std::array<Mat4, kNumGateLabels>& prim, double depol) {
    for (const auto& op : ops) {
        Mat4 u = op.kind == DecompOp::kZLayer
                     ? Mat4(rz_qubit(1, op.za * kPi / 2) * rz_qubit(2, op.zb * kPi / 2))
                     : prim[static_cast<int>(op.prim)];
        rho = (u * rho * u.adjoint()).eval();
        if (op.kind == DecompOp::kPrimitive && op.prim != GateLabel::Idle && depol > 0) {
            double tr = rho.trace().real();
            rho = ((1.0 - depol) * rho).eval();
            for (int i = 0; i < 4; ++i) rho(i, i) += depol * tr / 4.0;
        }
    }
}

}  // namespace

RBCurves run_rb(const RBConfig& cfg, const GateSet& gs, const CliffordTables& tables) {
    if (cfg.lengths.empty()) throw std::invalid_argument("run_rb: empty length grid");
    for (std::size_t i = 1; i < cfg.lengths.size(); ++i)
        if (cfg.lengths[i] <= cfg.lengths[i - 1])
            throw std::invalid_argument("run_rb: lengths must be increasing");
    if (cfg.num_sequences <= 0 || cfg.shots < 0)
        throw std::invalid_argument("run_rb: counts must be positive");
    if (cfg.qubits == 2 && !tables.two)
        throw std::invalid_argument("run_rb: two-qubit table required");
    if (cfg.qubits == 1 && !tables.one)
        throw std::invalid_argument("run_rb: single-qubit table required");

    const bool inject = cfg.inject_depol > 0;
    const bool exact = cfg.shots == 0;
    const int pool_size = inject ? 1 : (cfg.noise.is_trivial() ? 1 : (exact ? cfg.noise_repeats : cfg.shots));
    const int reps = exact ? (cfg.noise.is_trivial() && !inject ? 1 : std::max(1, cfg.noise_repeats))
                           : cfg.shots;

    double depol = cfg.inject_depol;
    if (cfg.rabi_decay_channel) {
        double t2r = 0;
        for (double t : gs.device.T2rabi) t2r += t / 4.0;
        double dur = gs.get(GateLabel::CNOT1).duration;
        depol = std::max(depol, 1.0 - std::exp(-dur / t2r));
    }
    const bool dm_path = inject || cfg.rabi_decay_channel || (cfg.use_spam && exact && cfg.spam.init_error > 0);
    if (dm_path && cfg.single_tone)
        throw std::invalid_argument(
            "run_rb: single-tone runs do not support density-matrix channels");

    // Per-noise-sample primitive operators. draw_sample is deterministic per
    // (seed, shot index), so shot i of every sequence shares sample i.
    std::vector<NoiseSample> samples(pool_size);
    for (int i = 0; i < pool_size; ++i)
        samples[i] = (inject || cfg.noise.is_trivial()) ? NoiseSample{}
                                                        : draw_sample(cfg.noise, i);
    std::vector<PoolOps> pool(pool_size);
    if (!cfg.single_tone) {
        parallel_for(pool_size, cfg.threads, [&](std::size_t i) {
            for (int g = 0; g < kNumGateLabels; ++g) {
                GateLabel label = static_cast<GateLabel>(g);
                pool[i].prim[g] = inject ? ideal_unitary(label)
                                         : gs.simulate(label, &samples[i]);
                check_unitary(pool[i].prim[g], label);
            }
        });
    }

    const bool one_q = cfg.qubits == 1;
    const CliffordTable1Q* t1 = tables.one;
    const CliffordTable2Q* t2 = tables.two;
    SingleToneSet st;
    std::vector<std::array<Mat4, 7>> st_pool;
    Transition st_line{cfg.target_qubit, cfg.single_tone_control};
    if (cfg.single_tone) {
        st = build_single_tone_set(gs.device, st_line, gs.f_R, gs.trotter);
        st_pool.resize(pool_size);
        parallel_for(pool_size, cfg.threads, [&](std::size_t i) {
            for (int g = 0; g < 7; ++g)
                st_pool[i][g] = st.simulate(static_cast<Gate1Q>(g), &samples[i]);
        });
    }

    const bool differenced = cfg.protocol == RBProtocol::differenced;
    const int L = static_cast<int>(cfg.lengths.size());
    RBCurves out;
    out.lengths = cfg.lengths;
    out.shots = cfg.shots;
    out.qubits = cfg.qubits;
    out.protocol = cfg.protocol;
    out.avg_primitives = one_q ? t1->avg_primitives : t2->avg_primitives;
    out.up.assign(L, std::vector<double>(cfg.num_sequences, 0.0));
    if (differenced) out.down.assign(L, std::vector<double>(cfg.num_sequences, 0.0));

    // initial basis state: |dd>, or control prepared for single-tone runs
    int init_basis = kDownDown;
    if (cfg.single_tone && cfg.single_tone_control == Spin::up)
        init_basis = cfg.target_qubit == 1 ? kDownUp : kUpDown;

    // success observable: P(up-up) joint for two qubits, target-qubit-up
    // marginal for single-qubit runs
    auto success_prob = [&](const Eigen::Vector4d& outcome_probs) {
        if (!one_q) return outcome_probs(kUpUp);
        if (cfg.target_qubit == 1) return outcome_probs(0) + outcome_probs(1);
        return outcome_probs(0) + outcome_probs(2);
    };
    Mat4d conf = cfg.use_spam ? confusion_matrix(cfg.spam) : Mat4d::Identity();

    parallel_for(static_cast<std::size_t>(L) * cfg.num_sequences, cfg.threads,
                 [&](std::size_t flat) {
        int li = static_cast<int>(flat) / cfg.num_sequences;
        int s = static_cast<int>(flat) % cfg.num_sequences;
        int n = cfg.lengths[li];
        Rng rng = Rng::stream(cfg.seed, RngStream::rb_sequence,
                              {static_cast<std::uint64_t>(li), static_cast<std::uint64_t>(s)});
        SequencePlan plan;
        plan.cliffords.resize(n);
        int group_size = one_q ? t1->size() : t2->size();
        for (int i = 0; i < n; ++i)
            plan.cliffords[i] = static_cast<int>(rng.uniform_int(group_size));

        // ideal net action (canonical products; global phase irrelevant)
        if (one_q) {
            Mat2 net = Mat2::Identity();
            for (int c : plan.cliffords) {
                net = (t1->canonical[c] * net).eval();
                if (cfg.interleaved) {
                    // interleaving a single-qubit primitive on the target
                    for (int g = 0; g < 7; ++g)
                        if (gate1q_to_label(static_cast<Gate1Q>(g), cfg.target_qubit) ==
                            *cfg.interleaved)
                            net = (gate1q_unitary(static_cast<Gate1Q>(g)) * net).eval();
                }
            }
            Vec2 start;
            start << 0, 1;  // target starts spin-down
            plan.recovery_up = recovery_index_1q(*t1, Vec2(net * start), true);
            if (differenced) plan.recovery_dn = recovery_index_1q(*t1, Vec2(net * start), false);
        } else {
            Mat4 net = Mat4::Identity();
            for (int c : plan.cliffords) {
                net = (t2->canonical[c] * net).eval();
                if (cfg.interleaved)
                    net = (ideal_unitary(*cfg.interleaved) * net).eval();
            }
            Vec4 state = net * basis_ket(init_basis);
            plan.recovery_up = recovery_index_2q(*t2, state, kUpUp);
            if (differenced) plan.recovery_dn = recovery_index_2q(*t2, state, kDownDown);
        }

        // one playback of the full sequence for a given noise index and recovery
        auto playback = [&](int pool_idx, int recovery, Vec4 psi) {
            const PoolOps& ops = pool[cfg.noise.is_trivial() || inject ? 0 : pool_idx];
            auto apply_clifford = [&](int c) {
                if (one_q) {
                    if (cfg.single_tone) {
                        const auto& stp = st_pool[cfg.noise.is_trivial() ? 0 : pool_idx];
                        for (Gate1Q g : t1->decomp[c]) psi = (stp[static_cast<int>(g)] * psi).eval();
                    } else {
                        for (Gate1Q g : t1->decomp[c]) {
                            GateLabel lab = gate1q_to_label(g, cfg.target_qubit);
                            psi = (ops.prim[static_cast<int>(lab)] * psi).eval();
                        }
                    }
                } else {
                    apply_decomp_2q(psi, t2->decomp[c], ops);
                }
            };
            for (int c : plan.cliffords) {
                apply_clifford(c);
                if (cfg.interleaved)
                    psi = (ops.prim[static_cast<int>(*cfg.interleaved)] * psi).eval();
            }
            apply_clifford(recovery);
            return psi;
        };

        auto run_dataset = [&](int recovery, int which) {
            double acc = 0;
            if (dm_path) {
                // one density-matrix walk serves every shot when the ops are
                // shot-independent; outcomes then sample binomially
                const int dm_reps = pool_size == 1 ? 1 : reps;
                for (int r = 0; r < dm_reps; ++r) {
                    Mat4 rho;
                    if (cfg.use_spam && cfg.spam.init_error > 0) {
                        rho = Mat4::Zero();
                        rho(init_basis, init_basis) = 1.0 - cfg.spam.init_error;
                        for (int b = 0; b < 4; ++b)
                            if (b != init_basis) rho(b, b) = cfg.spam.init_error / 3.0;
                    } else {
                        rho = basis_ket(init_basis) * basis_ket(init_basis).adjoint();
                    }
                    const auto& prims = pool[pool_size == 1 ? 0 : r].prim;
                    auto apply_cliff_dm = [&](int c) {
                        if (one_q) {
                            for (Gate1Q g : t1->decomp[c]) {
                                GateLabel lab = gate1q_to_label(g, cfg.target_qubit);
                                Mat4 u = prims[static_cast<int>(lab)];
                                rho = (u * rho * u.adjoint()).eval();
                                if (lab != GateLabel::Idle && depol > 0) {
                                    double tr = rho.trace().real();
                                    rho = ((1.0 - depol) * rho).eval();
                                    for (int i = 0; i < 4; ++i) rho(i, i) += depol * tr / 4.0;
                                }
                            }
                        } else {
                            apply_decomp_2q_dm(rho, t2->decomp[c], prims, depol);
                        }
                    };
                    for (int c : plan.cliffords) {
                        apply_cliff_dm(c);
                        if (cfg.interleaved) {
                            Mat4 u = prims[static_cast<int>(*cfg.interleaved)];
                            rho = (u * rho * u.adjoint()).eval();
                            if (*cfg.interleaved != GateLabel::Idle && depol > 0) {
                                double tr = rho.trace().real();
                                rho = ((1.0 - depol) * rho).eval();
                                for (int i = 0; i < 4; ++i) rho(i, i) += depol * tr / 4.0;
                            }
                        }
                    }
                    apply_cliff_dm(recovery);
                    Eigen::Vector4d popv;
                    for (int i = 0; i < 4; ++i) popv(i) = std::max(0.0, rho(i, i).real());
                    Eigen::Vector4d meas = conf * popv;
                    double p = success_prob(meas);
                    if (exact) {
                        acc += p;
                    } else if (dm_reps == 1) {
                        Rng srng = Rng::stream(cfg.seed, RngStream::readout,
                                               {static_cast<std::uint64_t>(li),
                                                static_cast<std::uint64_t>(s),
                                                static_cast<std::uint64_t>(which)});
                        acc += double(srng.binomial(reps, p));
                    } else {
                        Rng srng = Rng::stream(cfg.seed, RngStream::readout,
                                               {static_cast<std::uint64_t>(li),
                                                static_cast<std::uint64_t>(s),
                                                static_cast<std::uint64_t>(r),
                                                static_cast<std::uint64_t>(which)});
                        acc += srng.uniform() < p ? 1.0 : 0.0;
                    }
                }
                return acc / (exact ? dm_reps : reps);
            }
            for (int r = 0; r < reps; ++r) {
                int basis = init_basis;
                Rng srng = Rng::stream(cfg.seed, RngStream::readout,
                                       {static_cast<std::uint64_t>(li),
                                        static_cast<std::uint64_t>(s),
                                        static_cast<std::uint64_t>(r),
                                        static_cast<std::uint64_t>(which)});
                if (cfg.use_spam && cfg.spam.init_error > 0 && !exact) {
                    double u = srng.uniform();
                    if (u < cfg.spam.init_error) {
                        int alt = static_cast<int>(u / cfg.spam.init_error * 3.0);
                        basis = std::min(alt, 2);
                        if (basis >= init_basis) basis = (basis + 1) % 4;
                    }
                }
                Vec4 psi = playback(r, recovery, basis_ket(basis));
                Eigen::Vector4d popv;
                for (int i = 0; i < 4; ++i) popv(i) = std::norm(psi(i));
                Eigen::Vector4d meas = conf * popv;
                double p = success_prob(meas);
                acc += exact ? p : (srng.uniform() < p ? 1.0 : 0.0);
            }
            return acc / reps;
        };

        out.up[li][s] = run_dataset(plan.recovery_up, 0);
        if (differenced) out.down[li][s] = run_dataset(plan.recovery_dn, 1);
    });
    return out;
}

DecayFit fit_decay(const std::vector<int>& lengths, const std::vector<double>& values,
                   RBProtocol protocol) {
    if (lengths.size() < 3 || lengths.size() != values.size())
        throw std::invalid_argument("fit_decay: need >= 3 length points");
    const bool differenced = protocol == RBProtocol::differenced;
    const int n = static_cast<int>(lengths.size());

    // deterministic initialization: offset from the tail, p from a log-linear
    // regression of the offset-subtracted curve
    double c0 = differenced ? 0.0 : values.back();
    double a0 = values.front() - c0;
    if (std::abs(a0) < 1e-6) a0 = a0 < 0 ? -1e-6 : 1e-6;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int i = 0; i < n; ++i) {
        double d = (values[i] - c0) / a0;
        if (d > 1e-4) {
            double x = lengths[i], y = std::log(d);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++m;
        }
    }
    double p0 = 0.98;
    if (m >= 2) {
        double slope = (m * sxy - sx * sy) / std::max(m * sxx - sx * sx, 1e-12);
        p0 = std::exp(slope);
    }
    p0 = std::min(std::max(p0, 1e-6), 1.0 - 1e-9);

    auto model = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i) {
            double pred = x(1) * std::pow(std::abs(x(0)), double(lengths[i])) +
                          (differenced ? 0.0 : x(2));
            r(i) = pred - values[i];
        }
        return r;
    };
    Eigen::VectorXd x0(differenced ? 2 : 3);
    x0(0) = p0;
    x0(1) = a0;
    if (!differenced) x0(2) = c0;
    FitResult fr = levenberg_marquardt(model, x0);

    DecayFit fit;
    fit.protocol = protocol;
    fit.p = std::abs(fr.params(0));
    fit.amp = fr.params(1);
    fit.offset = differenced ? 0.0 : fr.params(2);
    fit.p_err = fr.stderrs(0);
    fit.amp_err = fr.stderrs(1);
    fit.offset_err = differenced ? 0.0 : fr.stderrs(2);
    fit.converged = fr.converged;
    if (fit.p > 1.0 || fit.p < 0.0) {
        fit.p = std::min(1.0, std::max(0.0, fit.p));
        fit.clamped = true;
    }
    return fit;
}

void to_fidelities(DecayFit& fit, int qubits, double avg_primitives, const DecayFit* reference) {
    fit.F_C = qubits == 2 ? (1.0 + 3.0 * fit.p) / 4.0 : (1.0 + fit.p) / 2.0;
    fit.F_p = 1.0 - (1.0 - fit.F_C) / avg_primitives;
    if (reference) {
        double ratio = fit.p / reference->p;
        fit.F_interleaved = qubits == 2 ? (1.0 + 3.0 * ratio) / 4.0 : (1.0 + ratio) / 2.0;
    }
}

MCUncertainty mc_uncertainty(const RBCurves& curves, int resamples, std::uint64_t seed,
                             const RBCurves* interleaved_curves) {
    MCUncertainty out;
    if (curves.shots == 0) {
        out.degenerate = true;
        return out;
    }
    const int L = static_cast<int>(curves.lengths.size());
    const int S = static_cast<int>(curves.up[0].size());
    const bool differenced = curves.protocol == RBProtocol::differenced;

    auto resample_fit = [&](const RBCurves& c, int rep, std::uint64_t tag) {
        std::vector<double> mean(L, 0.0);
        Rng rng = Rng::stream(seed, RngStream::mc_resample, {tag, static_cast<std::uint64_t>(rep)});
        for (int l = 0; l < L; ++l) {
            double acc = 0;
            for (int s = 0; s < S; ++s) {
                double up = double(rng.binomial(c.shots, c.up[l][s])) / c.shots;
                double dn = differenced
                                ? double(rng.binomial(c.shots, c.down[l][s])) / c.shots
                                : 0.0;
                acc += up - dn;
            }
            mean[l] = acc / S;
        }
        return fit_decay(c.lengths, mean, c.protocol);
    };

    std::vector<double> ps, fcs, fps, fints;
    for (int r = 0; r < resamples; ++r) {
        DecayFit f = resample_fit(curves, r, 0);
        to_fidelities(f, curves.qubits, curves.avg_primitives);
        ps.push_back(f.p);
        fcs.push_back(f.F_C);
        fps.push_back(f.F_p);
        if (interleaved_curves) {
            DecayFit fi = resample_fit(*interleaved_curves, r, 1);
            to_fidelities(fi, curves.qubits, curves.avg_primitives, &f);
            fints.push_back(*fi.F_interleaved);
        }
    }
    out.p_std = gaussian_fit(ps).second;
    out.FC_std = gaussian_fit(fcs).second;
    out.Fp_std = gaussian_fit(fps).second;
    if (interleaved_curves) out.Fint_std = gaussian_fit(fints).second;
    return out;
}

std::vector<SweepPoint> sweep_fr(const DeviceParams& base, const std::vector<double>& fr_grid,
                                 SweepMode mode, const SweepConfig& scfg,
                                 const CliffordTables& tables) {
    std::vector<SweepPoint> points;
    double sigma_f = sigma_from_t2star(scfg.t2star_us);
    for (std::size_t i = 0; i < fr_grid.size(); ++i) {
        double fr = fr_grid[i];
        DeviceParams p = base;
        p.J = std::sqrt(15.0) * fr;  // sync condition held across the sweep
        double pad = mode == SweepMode::with_idle ? (2.0 - std::sqrt(15.0) / 2.0) / p.J : 0.0;
        GateSet gs = build_gateset(p, fr, scfg.trotter, pad);
        RBConfig cfg;
        cfg.qubits = 2;
        cfg.lengths = scfg.lengths.empty() ? default_lengths(2) : scfg.lengths;
        cfg.num_sequences = scfg.num_sequences;
        cfg.shots = 0;
        cfg.noise_repeats = scfg.noise_repeats;
        // offset-free differenced fit: the standard three-parameter fit is
        // ill-conditioned when the grid only samples the top of the decay
        cfg.protocol = RBProtocol::differenced;
        cfg.noise.kind = QuasiStaticGaussian{sigma_f, sigma_f, scfg.sigma_J};
        cfg.noise.seed = scfg.seed + 7919 * i;
        cfg.seed = scfg.seed + i;
        cfg.threads = scfg.threads;
        RBCurves curves = run_rb(cfg, gs, tables);
        DecayFit fit =
            fit_decay(curves.lengths, curves.sequence_fidelity(), RBProtocol::differenced);
        to_fidelities(fit, 2, tables.two->avg_primitives);
        points.push_back({fr, p.J, 1.0 - fit.F_p, fit.p});
    }
    return points;
}

}  // namespace spinsim
