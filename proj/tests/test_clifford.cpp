#include "doctest.h"

#include <cstdio>
#include <set>

#include "spinsim/clifford.hpp"
#include "spinsim/rng.hpp"

using namespace spinsim;

namespace {
const CliffordTable1Q& table1q() {
    static CliffordTable1Q t = build_clifford_table_1q();
    return t;
}
const CliffordTable2Q& table2q() {
    static CliffordTable2Q t = build_clifford_table_2q();
    return t;
}
}  // namespace

TEST_CASE("single-qubit group: 24 elements, average exactly 45/24") {
    const auto& t = table1q();
    REQUIRE(t.size() == 24);
    CHECK(t.avg_primitives == doctest::Approx(1.875).epsilon(1e-15));
    long total = 0;
    for (int c : t.prim_count) {
        total += c;
        CHECK(c >= 1);
        CHECK(c <= 3);
    }
    CHECK(total == 45);
    // every decomposition multiplies back to its element up to phase
    for (int i = 0; i < t.size(); ++i) {
        Mat2 u = Mat2::Identity();
        for (Gate1Q g : t.decomp[i]) u = (gate1q_unitary(g) * u).eval();
        CHECK(max_abs(Mat2(canonical_phase2(u) - t.canonical[i])) < 1e-9);
    }
}

TEST_CASE("single-qubit group closure") {
    const auto& t = table1q();
    Rng rng(13);
    for (int trial = 0; trial < 300; ++trial) {
        int i = static_cast<int>(rng.uniform_int(t.size()));
        int j = static_cast<int>(rng.uniform_int(t.size()));
        CHECK(t.index_of(Mat2(t.canonical[i] * t.canonical[j])) >= 0);
    }
}

TEST_CASE("two-qubit group: 11520 elements by closure") {
    const auto& t = table2q();
    REQUIRE(t.size() == 11520);
    CHECK(t.avg_primitives > 2.0);
    CHECK(t.avg_primitives < 3.5);
    std::printf("two-qubit Clifford average primitive count: %.6f\n", t.avg_primitives);
}

TEST_CASE("two-qubit decompositions reproduce their elements up to phase") {
    const auto& t = table2q();
    Rng rng(29);
    for (int trial = 0; trial < 400; ++trial) {
        int i = static_cast<int>(rng.uniform_int(t.size()));
        Mat4 u = Mat4::Identity();
        int prims = 0;
        for (const auto& op : t.decomp[i]) {
            u = (op.unitary() * u).eval();
            prims += op.kind == DecompOp::kPrimitive ? 1 : 0;
        }
        CHECK(prims == t.prim_count[i]);
        CHECK(max_abs(Mat4(canonical_phase(u) - t.canonical[i])) < 1e-6);
    }
}

TEST_CASE("two-qubit group closure on sampled products") {
    const auto& t = table2q();
    Rng rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        int i = static_cast<int>(rng.uniform_int(t.size()));
        int j = static_cast<int>(rng.uniform_int(t.size()));
        CHECK(t.contains(Mat4(t.canonical[i] * t.canonical[j])));
    }
}

TEST_CASE("two-qubit group contains the 576 single-qubit products") {
    const auto& t2 = table2q();
    const auto& t1 = table1q();
    std::set<int> seen;
    for (int a = 0; a < t1.size(); ++a)
        for (int b = 0; b < t1.size(); ++b) {
            int idx = t2.index_of(kron(t1.canonical[a], t1.canonical[b]));
            REQUIRE(idx >= 0);
            seen.insert(idx);
        }
    CHECK(seen.size() == 576);
}

TEST_CASE("recovery gates") {
    const auto& t2 = table2q();
    // empty sequence from |dd>: recovery to |dd> is a diagonal element
    int rec = recovery_index_2q(t2, basis_ket(kDownDown), kDownDown);
    CHECK(std::norm(cxd(t2.canonical[rec].row(kDownDown) * basis_ket(kDownDown))) ==
          doctest::Approx(1.0));
    // random 20-element sequences recover to both targets with probability 1
    Rng rng(37);
    for (int trial = 0; trial < 25; ++trial) {
        Mat4 net = Mat4::Identity();
        for (int k = 0; k < 20; ++k)
            net = (t2.canonical[rng.uniform_int(t2.size())] * net).eval();
        Vec4 state = net * basis_ket(kDownDown);
        for (int target : {kUpUp, kDownDown}) {
            int r = recovery_index_2q(t2, state, target);
            CHECK(std::norm(cxd(t2.canonical[r].row(target) * state)) ==
                  doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    // single-qubit recovery: inverse of a single element
    const auto& t1 = table1q();
    Vec2 down;
    down << 0, 1;
    for (int i = 0; i < t1.size(); ++i) {
        Vec2 s = t1.canonical[i] * down;
        int r = recovery_index_1q(t1, s, false);
        CHECK(std::norm(cxd(t1.canonical[r].row(1) * s)) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("table cache round trip") {
    const auto& t = table2q();
    std::string path = "/tmp/spinsim_table_test.bin";
    save_clifford_table_2q(t, path);
    CliffordTable2Q loaded = load_clifford_table_2q(path);
    REQUIRE(loaded.size() == t.size());
    CHECK(loaded.avg_primitives == doctest::Approx(t.avg_primitives).epsilon(1e-15));
    Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        int i = static_cast<int>(rng.uniform_int(t.size()));
        CHECK(max_abs(Mat4(loaded.canonical[i] - t.canonical[i])) == 0.0);
        CHECK(loaded.decomp[i].size() == t.decomp[i].size());
    }
    // corrupt header rejected
    {
        FILE* f = std::fopen(path.c_str(), "r+b");
        std::fputc('X', f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(load_clifford_table_2q(path), std::runtime_error);
    std::remove(path.c_str());
}
