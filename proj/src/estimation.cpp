#include "spinsim/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spinsim/parallel.hpp"
#include "spinsim/rng.hpp"

namespace spinsim {

namespace {

double target_up_marginal(const Vec4& psi, int qubit) {
    double p = 0;
    for (int i = 0; i < 4; ++i)
        if (qubit_up(i, qubit)) p += std::norm(psi(i));
    return p;
}

Vec4 idle_phases(const Vec4d& dk, double dur) {
    Vec4 d;
    for (int i = 0; i < 4; ++i) d(i) = std::polar(1.0, -kTwoPi * dk(i) * dur);
    return d;
}

Mat4 shifted(const Mat4& u0, const Vec4& f) {
    return Mat4(f.asDiagonal()) * u0 * Mat4(f.conjugate().asDiagonal());
}

}  // namespace

CoherenceCurve simulate_ramsey(const DeviceParams& p, Transition tr, const NoiseModel& noise,
                               const std::vector<double>& times_us, double f_R,
                               const CoherenceConfig& cfg) {
    ResonanceTable table = resonances(p);
    double f_MW = table.freq(tr) + cfg.detuning_mhz;
    double thp = 1.0 / (4.0 * f_R);
    DriveTone half{f_MW, 0.0, f_R, thp};
    PulseSchedule sched;
    sched.drive(half);

    int init = driven_pair(tr)[1];  // target down, control in the line's state
    CoherenceCurve out;
    out.times_us = times_us;
    out.values.assign(times_us.size(), 0.0);
    int ens = noise.is_trivial() ? 1 : cfg.ensemble;
    std::vector<std::vector<double>> acc(ens);

    parallel_for(ens, cfg.threads, [&](std::size_t i) {
        NoiseSample s = noise.is_trivial() ? NoiseSample{} : draw_sample(noise, i);
        Mat4 u0 = propagate(p, sched, &s, cfg.trotter).U;
        Vec4d dk = s.delta_diag();
        acc[i].resize(times_us.size());
        for (std::size_t k = 0; k < times_us.size(); ++k) {
            double tau = times_us[k];
            Mat4 u1 = shifted(u0, time_shift_frame(p, f_MW, thp + tau));
            Vec4 psi = u1 * (idle_phases(dk, tau).asDiagonal() * (u0 * basis_ket(init)));
            acc[i][k] = target_up_marginal(psi, tr.qubit);
        }
    });
    for (int i = 0; i < ens; ++i)
        for (std::size_t k = 0; k < times_us.size(); ++k) out.values[k] += acc[i][k] / ens;
    return out;
}

CoherenceCurve simulate_echo(const DeviceParams& p, Transition tr, const NoiseModel& noise,
                             const std::vector<double>& times_us, double f_R,
                             const CoherenceConfig& cfg) {
    ResonanceTable table = resonances(p);
    double f_MW = table.freq(tr);  // on resonance
    double thp = 1.0 / (4.0 * f_R);
    int init = driven_pair(tr)[1];
    const auto* ou = std::get_if<OrnsteinUhlenbeck>(&noise.kind);

    std::vector<double> phis(cfg.echo_phases);
    for (int k = 0; k < cfg.echo_phases; ++k) phis[k] = kTwoPi * k / cfg.echo_phases;

    CoherenceCurve out;
    out.times_us = times_us;
    out.values.assign(times_us.size(), 0.0);
    int ens = noise.is_trivial() ? 1 : cfg.ensemble;
    // P(phi) is ensemble-averaged first; the oscillation amplitude of the
    // averaged signal is what decays (single trajectories stay coherent)
    std::vector<std::vector<double>> psum(ens);

    parallel_for(ens, cfg.threads, [&](std::size_t i) {
        psum[i].assign(times_us.size() * phis.size(), 0.0);
        if (!ou) {
            // quasi-static: one noise value per shot, pulse operators reused
            NoiseSample s = noise.is_trivial() ? NoiseSample{} : draw_sample(noise, i);
            Vec4d dk = s.delta_diag();
            PulseSchedule sh, sp;
            sh.drive(DriveTone{f_MW, 0.0, f_R, thp});
            sp.drive(DriveTone{f_MW, 0.0, f_R, 2 * thp});
            Mat4 uh = propagate(p, sh, &s, cfg.trotter).U;
            Mat4 upi = propagate(p, sp, &s, cfg.trotter).U;
            std::vector<Mat4> ufin(phis.size());
            for (std::size_t k = 0; k < phis.size(); ++k) {
                PulseSchedule sf;
                sf.drive(DriveTone{f_MW, phis[k], f_R, thp});
                ufin[k] = propagate(p, sf, &s, cfg.trotter).U;
            }
            for (std::size_t ti = 0; ti < times_us.size(); ++ti) {
                double tau = times_us[ti] / 2.0;
                Vec4 idle = idle_phases(dk, tau);
                Mat4 u_mid = shifted(upi, time_shift_frame(p, f_MW, thp + tau));
                Vec4 base = Mat4(idle.asDiagonal()) * u_mid *
                            (idle.asDiagonal() * (uh * basis_ket(init)));
                Vec4 fr = time_shift_frame(p, f_MW, 3 * thp + 2 * tau);
                for (std::size_t k = 0; k < phis.size(); ++k) {
                    Vec4 psi = shifted(ufin[k], fr) * base;
                    psum[i][ti * phis.size() + k] = target_up_marginal(psi, tr.qubit);
                }
            }
            return;
        }
        // OU noise: per-shot path; pulses frozen at the path value at their
        // start, idles sliced at ou_dt
        for (std::size_t ti = 0; ti < times_us.size(); ++ti) {
            double tau = times_us[ti] / 2.0;
            Rng rng = Rng::stream(noise.seed, RngStream::ou_path,
                                  {i, static_cast<std::uint64_t>(ti)});
            double x1 = ou->sigma * rng.gauss(), x2 = ou->sigma * rng.gauss();
            auto sample_at = [&](double& a, double& b, double dt) {
                a = ou_step(a, ou->sigma, ou->tau_c, dt, rng);
                b = ou_step(b, ou->sigma, ou->tau_c, dt, rng);
            };
            auto make_sample = [](double a, double b) {
                NoiseSample s;
                s.dEz = (a + b) / 2.0;
                s.ddEz = b - a;
                return s;
            };
            auto idle_walk = [&](double& a, double& b, double dur) {
                Vec4 d = Vec4::Ones();
                int m = std::max(1, static_cast<int>(std::ceil(dur / cfg.ou_dt_us)));
                double slice = dur / m;
                for (int q = 0; q < m; ++q) {
                    Vec4 ph = idle_phases(make_sample(a, b).delta_diag(), slice);
                    d = d.cwiseProduct(ph).eval();
                    sample_at(a, b, slice);
                }
                return d;
            };
            NoiseSample s0 = make_sample(x1, x2);
            PulseSchedule sh0, spi;
            sh0.drive(DriveTone{f_MW, 0.0, f_R, thp});
            Mat4 uh = propagate(p, sh0, &s0, cfg.trotter).U;
            sample_at(x1, x2, thp);
            Vec4 idle1 = idle_walk(x1, x2, tau);
            NoiseSample s1 = make_sample(x1, x2);
            spi.drive(DriveTone{f_MW, 0.0, f_R, 2 * thp});
            Mat4 upi = shifted(propagate(p, spi, &s1, cfg.trotter).U,
                               time_shift_frame(p, f_MW, thp + tau));
            sample_at(x1, x2, 2 * thp);
            Vec4 idle2 = idle_walk(x1, x2, tau);
            NoiseSample s2 = make_sample(x1, x2);
            Vec4 fr = time_shift_frame(p, f_MW, 3 * thp + 2 * tau);
            Vec4 base = idle2.asDiagonal() * (upi * (idle1.asDiagonal() * (uh * basis_ket(init))));
            for (std::size_t k = 0; k < phis.size(); ++k) {
                PulseSchedule sf;
                sf.drive(DriveTone{f_MW, phis[k], f_R, thp});
                Vec4 psi = shifted(propagate(p, sf, &s2, cfg.trotter).U, fr) * base;
                psum[i][ti * phis.size() + k] = target_up_marginal(psi, tr.qubit);
            }
        }
    });
    for (std::size_t ti = 0; ti < times_us.size(); ++ti) {
        cxd fourier = 0;
        for (std::size_t k = 0; k < phis.size(); ++k) {
            double pbar = 0;
            for (int i = 0; i < ens; ++i) pbar += psum[i][ti * phis.size() + k] / ens;
            fourier += pbar * std::polar(1.0, -phis[k]);
        }
        out.values[ti] = 4.0 * std::abs(fourier) / double(phis.size());
    }
    return out;
}

CoherenceCurve simulate_rabi(const DeviceParams& p, Transition tr, const NoiseModel& noise,
                             const std::vector<double>& times_us, double f_R,
                             const CoherenceConfig& cfg) {
    ResonanceTable table = resonances(p);
    DriveTone tone{table.freq(tr), 0.0, f_R, 0.0};
    int init = driven_pair(tr)[1];
    CoherenceCurve out;
    out.times_us = times_us;
    out.values.assign(times_us.size(), 0.0);
    int ens = noise.is_trivial() ? 1 : cfg.ensemble;
    std::vector<std::vector<double>> acc(ens);
    parallel_for(ens, cfg.threads, [&](std::size_t i) {
        NoiseSample s = noise.is_trivial() ? NoiseSample{} : draw_sample(noise, i);
        auto snaps = propagate_snapshots(p, tone, &s, cfg.trotter, times_us);
        acc[i].resize(times_us.size());
        for (std::size_t k = 0; k < times_us.size(); ++k)
            acc[i][k] = target_up_marginal(Vec4(snaps[k] * basis_ket(init)), tr.qubit);
    });
    for (int i = 0; i < ens; ++i)
        for (std::size_t k = 0; k < times_us.size(); ++k) out.values[k] += acc[i][k] / ens;
    return out;
}

DecayParams fit_ramsey(const CoherenceCurve& curve) {
    const auto& t = curve.times_us;
    const auto& y = curve.values;
    const int n = static_cast<int>(t.size());
    double c0 = 0;
    for (double v : y) c0 += v / n;
    // coarse frequency scan with linear quadrature regression (no decay)
    double best_f = 0.1, best_rss = 1e300;
    for (double f = 0.02; f <= 5.0; f += 0.01) {
        double cc = 0, cs = 0, ss = 0, yc = 0, ys = 0;
        for (int i = 0; i < n; ++i) {
            double c = std::cos(kTwoPi * f * t[i]), s = std::sin(kTwoPi * f * t[i]);
            cc += c * c; cs += c * s; ss += s * s;
            yc += (y[i] - c0) * c; ys += (y[i] - c0) * s;
        }
        double det = cc * ss - cs * cs;
        if (std::abs(det) < 1e-12) continue;
        double a = (yc * ss - ys * cs) / det, b = (ys * cc - yc * cs) / det;
        double rss = 0;
        for (int i = 0; i < n; ++i) {
            double pred = c0 + a * std::cos(kTwoPi * f * t[i]) + b * std::sin(kTwoPi * f * t[i]);
            rss += (y[i] - pred) * (y[i] - pred);
        }
        if (rss < best_rss) {
            best_rss = rss;
            best_f = f;
        }
    }
    double ymin = *std::min_element(y.begin(), y.end());
    double ymax = *std::max_element(y.begin(), y.end());
    Eigen::VectorXd x0(5);
    x0 << (ymax - ymin) / 2, t.back() / 2, best_f, 0.0, c0;
    auto model = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i) {
            double env = std::exp(-(t[i] / x(1)) * (t[i] / x(1)));
            r(i) = x(0) * env * std::cos(kTwoPi * x(2) * t[i] + x(3)) + x(4) - y[i];
        }
        return r;
    };
    FitResult fr = levenberg_marquardt(model, x0);
    DecayParams out;
    out.kind = DecayParams::Kind::ramsey;
    out.amplitude = fr.params(0);
    out.T2 = std::abs(fr.params(1));
    out.f = std::abs(fr.params(2));
    out.offset = fr.params(4);
    out.T2_err = fr.stderrs(1);
    out.converged = fr.converged;
    return out;
}

DecayParams fit_echo(const CoherenceCurve& curve) {
    const auto& t = curve.times_us;
    const auto& y = curve.values;
    const int n = static_cast<int>(t.size());
    double a0 = y.front();
    double t0 = t.back() / 2;
    for (int i = 0; i < n; ++i)
        if (y[i] < a0 / std::exp(1.0)) {
            t0 = t[i];
            break;
        }
    Eigen::VectorXd x0(3);
    x0 << a0, t0, 1.5;
    auto model = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i)
            r(i) = x(0) * std::exp(-std::pow(t[i] / std::abs(x(1)), std::abs(x(2)))) - y[i];
        return r;
    };
    FitResult fr = levenberg_marquardt(model, x0);
    DecayParams out;
    out.kind = DecayParams::Kind::echo;
    out.amplitude = fr.params(0);
    out.T2 = std::abs(fr.params(1));
    out.alpha = std::abs(fr.params(2));
    out.T2_err = fr.stderrs(1);
    out.alpha_err = fr.stderrs(2);
    out.converged = fr.converged;
    return out;
}

double rabi_envelope_W(double t_us, double f_R, double t2star_us) {
    double x = t_us / (f_R * t2star_us * t2star_us);
    return std::pow(1.0 + x * x, -0.25);
}

double rabi_envelope_R(double t_us, double f_R, double t2star_us, double t2rabi_us) {
    return std::exp(-t_us / t2rabi_us) * rabi_envelope_W(t_us, f_R, t2star_us);
}

DecayParams fit_rabi_envelope(const CoherenceCurve& curve, double f_R, double t2star_us) {
    const auto& t = curve.times_us;
    const auto& y = curve.values;
    const int n = static_cast<int>(t.size());
    Eigen::VectorXd x0(2);
    x0 << y.front() / rabi_envelope_W(t.front(), f_R, t2star_us), 50.0;
    auto model = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i)
            r(i) = x(0) * rabi_envelope_R(t[i], f_R, t2star_us, std::abs(x(1))) - y[i];
        return r;
    };
    FitResult fr = levenberg_marquardt(model, x0);
    DecayParams out;
    out.kind = DecayParams::Kind::rabi;
    out.amplitude = fr.params(0);
    out.T2 = std::abs(fr.params(1));
    out.T2_err = fr.stderrs(1);
    out.converged = fr.converged;
    return out;
}

RabiDecayMetric rabi_decay_metric(double f_R, double t2star_us, double t2rabi_us) {
    double thp = 1.0 / (4.0 * f_R);
    RabiDecayMetric m;
    m.R_thp = rabi_envelope_R(thp, f_R, t2star_us, t2rabi_us);
    m.D = 1.0 - m.R_thp;
    return m;
}

std::vector<double> default_ramsey_times() {
    std::vector<double> t;
    for (int i = 1; i <= 100; ++i) t.push_back(0.04 * i);
    return t;
}

RamseyRecord synthesize_ramsey_record(double f_mhz, double t2star_us, double alpha_vis,
                                      const std::vector<double>& times_us, int shots_per_point,
                                      std::uint64_t seed) {
    RamseyRecord rec;
    rec.times_us = times_us;
    Rng rng = Rng::stream(seed, RngStream::bayes);
    for (double t : times_us) {
        double pup = 0.5 * (1.0 + alpha_vis * std::exp(-(t / t2star_us) * (t / t2star_us)) *
                                      std::cos(kTwoPi * f_mhz * t));
        rec.up_counts.push_back(static_cast<int>(rng.binomial(shots_per_point, pup)));
        rec.shots.push_back(shots_per_point);
    }
    return rec;
}

BayesResult bayes_estimate(const RamseyRecord& record, double f_center_mhz, double window_mhz,
                           double grid_mhz, double t2star_us, double alpha_vis) {
    if (record.times_us.empty()) throw std::invalid_argument("bayes_estimate: empty record");
    int m = std::max(3, static_cast<int>(std::round(window_mhz / grid_mhz)) + 1);
    std::vector<double> fs(m), logp(m, 0.0);
    for (int g = 0; g < m; ++g)
        fs[g] = f_center_mhz - window_mhz / 2 + g * window_mhz / (m - 1);
    for (int g = 0; g < m; ++g) {
        for (std::size_t i = 0; i < record.times_us.size(); ++i) {
            double t = record.times_us[i];
            double pup = 0.5 * (1.0 + alpha_vis *
                                          std::exp(-(t / t2star_us) * (t / t2star_us)) *
                                          std::cos(kTwoPi * fs[g] * t));
            pup = std::min(1.0 - 1e-12, std::max(1e-12, pup));
            int k = record.up_counts[i], nshots = record.shots[i];
            logp[g] += k * std::log(pup) + (nshots - k) * std::log(1.0 - pup);
        }
    }
    double mx = *std::max_element(logp.begin(), logp.end());
    double norm = 0, mean = 0, m2 = 0, edge = 0;
    std::vector<double> post(m);
    for (int g = 0; g < m; ++g) {
        post[g] = std::exp(logp[g] - mx);
        norm += post[g];
    }
    for (int g = 0; g < m; ++g) {
        post[g] /= norm;
        mean += fs[g] * post[g];
    }
    for (int g = 0; g < m; ++g) m2 += (fs[g] - mean) * (fs[g] - mean) * post[g];
    edge = post[0] + post[1] + post[m - 2] + post[m - 1];
    BayesResult out;
    out.f_est = mean;
    out.posterior_std = std::sqrt(m2);
    out.edge_warning = edge > 0.10;
    return out;
}

TraceDecomposition decompose_trace(const std::vector<double>& f1_dn,
                                   const std::vector<double>& f1_up,
                                   const std::vector<double>& f2_dn,
                                   const std::vector<double>& f2_up) {
    std::size_t n = f1_dn.size();
    if (f1_up.size() != n || f2_dn.size() != n || f2_up.size() != n)
        throw std::invalid_argument("decompose_trace: series length mismatch");
    TraceDecomposition out;
    out.df1.resize(n);
    out.df2.resize(n);
    out.djhalf.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.djhalf[i] = (f1_up[i] - f1_dn[i]) / 2.0;
        out.df1[i] = (f1_up[i] + f1_dn[i]) / 2.0;
        out.df2[i] = (f2_up[i] + f2_dn[i]) / 2.0;
    }
    return out;
}

}  // namespace spinsim
