#include "doctest.h"

#include "oracles.hpp"
#include "spinsim/benchmark.hpp"

using namespace spinsim;

namespace {
struct Fixture {
    DeviceParams p;
    double fr;
    GateSet gs;
    CliffordTable1Q t1;
    CliffordTable2Q t2;
    Fixture()
        : fr(sync_rabi(p.J, 1)),
          gs(build_gateset(p, fr, {})),
          t1(build_clifford_table_1q()),
          t2(build_clifford_table_2q()) {}
    CliffordTables tables() const { return {&t1, &t2}; }
};
Fixture& fx() {
    static Fixture f;
    return f;
}
}  // namespace

TEST_CASE("fit_decay recovers exact synthetic parameters") {
    std::vector<int> lengths{1, 3, 7, 15, 30, 60, 120};
    std::vector<double> standard, diff;
    for (int n : lengths) {
        standard.push_back(0.5 * std::pow(0.98, n) + 0.25);
        diff.push_back(0.5 * std::pow(0.98, n));
    }
    DecayFit fs = fit_decay(lengths, standard, RBProtocol::standard);
    CHECK(fs.p == doctest::Approx(0.98).epsilon(1e-6));
    CHECK(fs.amp == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(fs.offset == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(fs.converged);

    DecayFit fd = fit_decay(lengths, diff, RBProtocol::differenced);
    CHECK(fd.p == doctest::Approx(0.98).epsilon(1e-6));
    CHECK(fd.p == doctest::Approx(fs.p).epsilon(1e-6));
    CHECK(fd.offset == 0.0);

    CHECK_THROWS_AS(fit_decay({1, 2}, {0.5, 0.4}, RBProtocol::standard),
                    std::invalid_argument);
}

TEST_CASE("fidelity conversion formulas reproduce the reference arithmetic") {
    DecayFit fit;
    fit.p = 0.98227;
    to_fidelities(fit, 2, 2.57);
    CHECK(fit.F_C == doctest::Approx(0.9867).epsilon(1e-4));
    CHECK(fit.F_p == doctest::Approx(0.9948).epsilon(1e-4));

    DecayFit ref;
    ref.p = 1.0;
    DecayFit gate;
    gate.p = 0.99347;
    to_fidelities(gate, 2, 2.57, &ref);
    REQUIRE(gate.F_interleaved.has_value());
    CHECK(*gate.F_interleaved == doctest::Approx(0.9951).epsilon(1e-4));

    DecayFit unity;
    unity.p = 1.0;
    to_fidelities(unity, 1, 1.875);
    CHECK(unity.F_C == doctest::Approx(1.0));
    CHECK(unity.F_p == doctest::Approx(1.0));
}

TEST_CASE("noiseless RB stays at unit sequence fidelity") {
    auto& f = fx();
    RBConfig cfg;
    cfg.qubits = 2;
    cfg.lengths = {1, 4, 16, 48};
    cfg.num_sequences = 4;
    cfg.shots = 0;
    cfg.noise.kind = QuasiStaticGaussian{0, 0, 0};
    cfg.protocol = RBProtocol::standard;
    cfg.seed = 3;
    cfg.threads = 2;
    RBCurves curves = run_rb(cfg, f.gs, f.tables());
    auto mean = curves.mean_up();
    for (std::size_t i = 0; i < mean.size(); ++i) {
        // only the calibration-floor leakage (~1e-4 per primitive) decays it
        double budget = 1.0 - 3.0 * 2e-4 * curves.avg_primitives * (cfg.lengths[i] + 1);
        CHECK(mean[i] > std::max(0.97, budget));
    }
    // single-qubit variant
    RBConfig c1 = cfg;
    c1.qubits = 1;
    c1.lengths = {1, 8, 32};
    RBCurves curves1 = run_rb(c1, f.gs, f.tables());
    for (double v : curves1.mean_up()) CHECK(v > 0.995);
}

TEST_CASE("RB curves are deterministic given the seed") {
    auto& f = fx();
    RBConfig cfg;
    cfg.qubits = 2;
    cfg.lengths = {1, 4, 12};
    cfg.num_sequences = 3;
    cfg.shots = 80;
    cfg.noise.kind = QuasiStaticGaussian{0.075, 0.075, 0.015};
    cfg.noise.seed = 21;
    cfg.seed = 9;
    cfg.threads = 2;
    RBCurves a = run_rb(cfg, f.gs, f.tables());
    cfg.threads = 1;
    RBCurves b = run_rb(cfg, f.gs, f.tables());
    for (std::size_t l = 0; l < a.up.size(); ++l)
        for (std::size_t s = 0; s < a.up[l].size(); ++s) {
            CHECK(a.up[l][s] == b.up[l][s]);
            CHECK(a.down[l][s] == b.down[l][s]);
        }
    RBCurves c = run_rb(cfg, f.gs, f.tables());
    CHECK(c.up[1][2] == b.up[1][2]);
}

TEST_CASE("injected depolarizing channel matches the composition oracle") {
    auto& f = fx();
    for (double eps : {0.005, 0.02}) {
        RBConfig cfg;
        cfg.qubits = 2;
        cfg.lengths = {1, 3, 6, 10, 16, 24};
        cfg.num_sequences = 30;
        cfg.shots = 400;
        cfg.inject_depol = eps;
        cfg.protocol = RBProtocol::differenced;
        cfg.seed = 17;
        cfg.threads = 2;
        RBCurves curves = run_rb(cfg, f.gs, f.tables());
        DecayFit fit = fit_decay(curves.lengths, curves.sequence_fidelity(),
                                 RBProtocol::differenced);
        MCUncertainty mc = mc_uncertainty(curves, 120, 5);
        double expected = oracles::depol_per_clifford(eps, curves.avg_primitives);
        CAPTURE(eps);
        CHECK(std::abs(fit.p - expected) < 2.0 * std::max(mc.p_std, 1e-4));
    }
}

TEST_CASE("interleaving the identity leaves the decay untouched") {
    auto& f = fx();
    RBConfig cfg;
    cfg.qubits = 2;
    cfg.lengths = {1, 3, 6, 10, 16};
    cfg.num_sequences = 20;
    cfg.shots = 400;
    cfg.inject_depol = 0.01;
    cfg.protocol = RBProtocol::differenced;
    cfg.seed = 23;
    cfg.threads = 2;
    RBCurves ref = run_rb(cfg, f.gs, f.tables());
    cfg.interleaved = GateLabel::Idle;
    RBCurves inter = run_rb(cfg, f.gs, f.tables());
    DecayFit fr_ = fit_decay(ref.lengths, ref.sequence_fidelity(), RBProtocol::differenced);
    DecayFit fi = fit_decay(inter.lengths, inter.sequence_fidelity(), RBProtocol::differenced);
    to_fidelities(fr_, 2, ref.avg_primitives);
    to_fidelities(fi, 2, ref.avg_primitives, &fr_);
    MCUncertainty mc = mc_uncertainty(ref, 120, 7, &inter);
    REQUIRE(fi.F_interleaved.has_value());
    REQUIRE(mc.Fint_std.has_value());
    CHECK(std::abs(*fi.F_interleaved - 1.0) < 2.0 * std::max(*mc.Fint_std, 1e-4));
}

TEST_CASE("mc_uncertainty: degenerate input and resample stability") {
    auto& f = fx();
    RBConfig cfg;
    cfg.qubits = 2;
    cfg.lengths = {1, 3, 6, 10};
    cfg.num_sequences = 8;
    cfg.shots = 0;
    cfg.inject_depol = 0.01;
    cfg.protocol = RBProtocol::differenced;
    RBCurves exact = run_rb(cfg, f.gs, f.tables());
    MCUncertainty mc0 = mc_uncertainty(exact, 50, 3);
    CHECK(mc0.degenerate);
    CHECK(mc0.Fp_std == 0.0);

    cfg.shots = 200;
    cfg.seed = 31;
    RBCurves sampled = run_rb(cfg, f.gs, f.tables());
    MCUncertainty m500 = mc_uncertainty(sampled, 500, 11);
    MCUncertainty m1000 = mc_uncertainty(sampled, 1000, 11);
    CHECK(m500.Fp_std > 0.0);
    CHECK(std::abs(m1000.Fp_std - m500.Fp_std) / m500.Fp_std < 0.10);
}

TEST_CASE("differenced twin shares sequences and noise with the up-target run") {
    auto& f = fx();
    RBConfig cfg;
    cfg.qubits = 2;
    cfg.lengths = {2, 6};
    cfg.num_sequences = 3;
    cfg.shots = 0;
    cfg.noise.kind = QuasiStaticGaussian{0.075, 0.075, 0.015};
    cfg.noise.seed = 4;
    cfg.noise_repeats = 12;
    cfg.protocol = RBProtocol::differenced;
    RBCurves curves = run_rb(cfg, f.gs, f.tables());
    // both datasets exist and the twin saturates near C while up stays high
    for (std::size_t l = 0; l < curves.up.size(); ++l)
        for (std::size_t s = 0; s < curves.up[l].size(); ++s) {
            CHECK(curves.up[l][s] > 0.5);
            CHECK(curves.down[l][s] < 0.5);
        }
}

TEST_CASE("single-tone fixed-control benchmarking runs at unsynchronized f_R") {
    auto& f = fx();
    RBConfig cfg;
    cfg.qubits = 1;
    cfg.target_qubit = 1;
    cfg.single_tone = true;
    cfg.single_tone_control = Spin::down;
    cfg.lengths = {1, 4, 12};
    cfg.num_sequences = 4;
    cfg.shots = 0;
    cfg.noise.kind = QuasiStaticGaussian{0, 0, 0};
    // fixed control: f_R need not satisfy the sync condition
    GateSet gs = build_gateset(f.p, 3.3, {});
    RBCurves curves = run_rb(cfg, gs, f.tables());
    for (double v : curves.mean_up()) CHECK(v > 0.99);
    // control spin-up variant starts from |du>
    cfg.single_tone_control = Spin::up;
    RBCurves up = run_rb(cfg, gs, f.tables());
    for (double v : up.mean_up()) CHECK(v > 0.99);
}

TEST_CASE("run_rb rejects bad configurations") {
    auto& f = fx();
    RBConfig cfg;
    cfg.lengths = {};
    CHECK_THROWS_AS(run_rb(cfg, f.gs, f.tables()), std::invalid_argument);
    cfg.lengths = {4, 2};
    CHECK_THROWS_AS(run_rb(cfg, f.gs, f.tables()), std::invalid_argument);
    cfg.lengths = {2, 4};
    CHECK_THROWS_AS(run_rb(cfg, f.gs, CliffordTables{&f.t1, nullptr}),
                    std::invalid_argument);
}

TEST_CASE("phenomenological Rabi-decay channel shortens the decay") {
    auto& f = fx();
    RBConfig cfg;
    cfg.qubits = 2;
    cfg.lengths = {1, 4, 10, 20};
    cfg.num_sequences = 10;
    cfg.shots = 0;
    cfg.protocol = RBProtocol::differenced;
    cfg.noise.kind = QuasiStaticGaussian{0, 0, 0};
    cfg.rabi_decay_channel = true;
    cfg.seed = 77;
    cfg.threads = 2;

    DeviceParams short_lived = f.p;
    short_lived.T2rabi = {4.0, 4.0, 4.0, 4.0};
    GateSet gs_short = build_gateset(short_lived, f.fr, {});
    RBCurves curves = run_rb(cfg, gs_short, f.tables());
    DecayFit fit = fit_decay(curves.lengths, curves.sequence_fidelity(),
                             RBProtocol::differenced);
    // expected per-primitive strength 1 - exp(-0.1027/4) ~ 0.025
    double eps = 1.0 - std::exp(-gs_short.get(GateLabel::CNOT1).duration / 4.0);
    double expected = std::pow(1.0 - eps, curves.avg_primitives);
    CHECK(fit.p == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("trace-replay noise drives the benchmark deterministically") {
    auto& f = fx();
    NoiseTrace trace;
    for (int i = 0; i < 7; ++i) {
        trace.time_s.push_back(1.706 * i);
        trace.df1_mhz.push_back(0.05 * std::sin(0.9 * i));
        trace.df2_mhz.push_back(0.04 * std::cos(1.3 * i));
        trace.djhalf_mhz.push_back(0.005 * i);
    }
    RBConfig cfg;
    cfg.qubits = 2;
    cfg.lengths = {2, 8};
    cfg.num_sequences = 3;
    cfg.shots = 0;
    cfg.noise_repeats = 7;
    cfg.protocol = RBProtocol::standard;
    cfg.noise.kind = TraceReplay{trace};
    cfg.seed = 81;
    RBCurves a = run_rb(cfg, f.gs, f.tables());
    RBCurves b = run_rb(cfg, f.gs, f.tables());
    CHECK(a.up[1][2] == b.up[1][2]);
    CHECK(a.mean_up()[0] > 0.9);  // mild noise, shallow decay
    CHECK(a.mean_up()[0] < 1.0);
}
