#include "spinsim/clifford.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace spinsim {

namespace {

// Clifford entries are quantized at 1e-6 after phase normalization; the
// discrete entry set keeps every value far from a rounding boundary.
template <class M>
std::string quant_key(const M& u) {
    std::string key(sizeof(std::int32_t) * 2 * u.size(), '\0');
    auto* q = reinterpret_cast<std::int32_t*>(key.data());
    int n = 0;
    for (int i = 0; i < u.rows(); ++i)
        for (int j = 0; j < u.cols(); ++j) {
            cxd e = u(i, j);
            q[n++] = static_cast<std::int32_t>(std::llround(e.real() * 1e6));
            q[n++] = static_cast<std::int32_t>(std::llround(e.imag() * 1e6));
        }
    return key;
}

std::string key2(const Mat2& u) { return quant_key(canonical_phase2(u)); }
std::string key4(const Mat4& u) { return quant_key(canonical_phase(u)); }

}  // namespace

int CliffordTable1Q::index_of(const Mat2& u) const {
    auto it = lookup_.find(key2(u));
    return it == lookup_.end() ? -1 : it->second;
}

CliffordTable1Q build_clifford_table_1q() {
    CliffordTable1Q t;
    const Gate1Q gens[6] = {Gate1Q::XHalf, Gate1Q::XHalfM, Gate1Q::YHalf,
                            Gate1Q::YHalfM, Gate1Q::X, Gate1Q::Y};
    auto add = [&](const Mat2& u, std::vector<Gate1Q> ops) {
        std::string k = key2(u);
        if (t.lookup_.count(k)) return false;
        t.lookup_[k] = t.size();
        t.canonical.push_back(canonical_phase2(u));
        t.decomp.push_back(std::move(ops));
        return true;
    };
    add(Mat2::Identity(), {Gate1Q::I});  // idle realization
    std::vector<int> frontier{0};
    std::vector<Mat2> raw{Mat2::Identity()};
    while (!frontier.empty()) {
        std::vector<int> next;
        for (int idx : frontier) {
            for (Gate1Q g : gens) {
                Mat2 u = gate1q_unitary(g) * raw[idx];
                std::vector<Gate1Q> ops = t.decomp[idx];
                if (ops.size() == 1 && ops[0] == Gate1Q::I) ops.clear();
                ops.push_back(g);
                if (add(u, std::move(ops))) {
                    raw.push_back(u);
                    next.push_back(t.size() - 1);
                }
            }
        }
        frontier = std::move(next);
    }
    if (t.size() != 24)
        throw std::runtime_error("single-qubit Clifford closure found " +
                                 std::to_string(t.size()) + " elements, expected 24");
    long total = 0;
    for (const auto& d : t.decomp) {
        // identity idle counts as one physical primitive
        t.prim_count.push_back(std::max(static_cast<int>(d.size()), 1));
        total += t.prim_count.back();
    }
    t.avg_primitives = double(total) / t.size();
    return t;
}

Mat4 DecompOp::unitary() const {
    if (kind == kPrimitive) return ideal_unitary(prim);
    return rz_qubit(1, za * kPi / 2) * rz_qubit(2, zb * kPi / 2);
}

int CliffordTable2Q::index_of(const Mat4& u) const {
    auto it = lookup_.find(key4(u));
    return it == lookup_.end() ? -1 : it->second;
}

CliffordTable2Q build_clifford_table_2q() {
    CliffordTable2Q t;
    // the 16 physical primitives and the 16 free virtual-Z layers
    std::vector<Mat4> prim_u(16);
    for (int i = 0; i < 16; ++i) prim_u[i] = ideal_unitary(static_cast<GateLabel>(i));
    Mat4 zlayer[4][4];
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            zlayer[a][b] = rz_qubit(1, a * kPi / 2) * rz_qubit(2, b * kPi / 2);

    struct Node {
        int parent;
        std::int8_t g, za, zb;
    };
    std::vector<Node> nodes;
    std::vector<Mat4> raw;
    std::vector<int> depth;
    auto add = [&](const Mat4& u, Node n, int d) {
        std::string k = key4(u);
        if (t.lookup_.count(k)) return -1;
        int idx = t.size();
        t.lookup_[k] = idx;
        t.canonical.push_back(canonical_phase(u));
        nodes.push_back(n);
        raw.push_back(u);
        depth.push_back(d);
        return idx;
    };

    std::vector<int> frontier;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            int idx = add(zlayer[a][b], {-1, -1, (std::int8_t)a, (std::int8_t)b}, 0);
            if (idx >= 0) frontier.push_back(idx);
        }
    while (!frontier.empty()) {
        std::vector<int> next;
        for (int idx : frontier) {
            for (int g = 0; g < 16; ++g) {
                Mat4 w = prim_u[g] * raw[idx];
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) {
                        Mat4 u = zlayer[a][b] * w;
                        int ni = add(u, {idx, (std::int8_t)g, (std::int8_t)a, (std::int8_t)b},
                                     depth[idx] + 1);
                        if (ni >= 0) next.push_back(ni);
                    }
            }
        }
        frontier = std::move(next);
    }
    if (t.size() != 11520)
        throw std::runtime_error("two-qubit Clifford closure found " +
                                 std::to_string(t.size()) + " elements, expected 11520");

    long total = 0;
    t.decomp.resize(t.size());
    t.prim_count.resize(t.size());
    for (int i = 0; i < t.size(); ++i) {
        std::vector<DecompOp> ops;
        int cur = i;
        while (cur >= 0) {
            const Node& n = nodes[cur];
            if (n.za != 0 || n.zb != 0)
                ops.push_back({DecompOp::kZLayer, GateLabel::Idle, n.za, n.zb});
            if (n.g >= 0) ops.push_back({DecompOp::kPrimitive, static_cast<GateLabel>(n.g), 0, 0});
            cur = n.parent;
        }
        std::reverse(ops.begin(), ops.end());  // time order
        t.prim_count[i] = depth[i];
        total += depth[i];
        t.decomp[i] = std::move(ops);
    }
    t.avg_primitives = double(total) / t.size();
    return t;
}

namespace {
constexpr char kCacheMagic[8] = {'S', 'S', 'C', 'T', '2', 'Q', '0', '2'};
}

void save_clifford_table_2q(const CliffordTable2Q& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_clifford_table_2q: cannot open " + path);
    out.write(kCacheMagic, 8);
    std::int64_t n = table.size();
    out.write(reinterpret_cast<const char*>(&n), 8);
    for (int i = 0; i < n; ++i) {
        out.write(reinterpret_cast<const char*>(table.canonical[i].data()), 16 * sizeof(cxd));
        std::int32_t m = static_cast<std::int32_t>(table.decomp[i].size());
        out.write(reinterpret_cast<const char*>(&m), 4);
        for (const auto& op : table.decomp[i]) {
            std::int8_t rec[4] = {(std::int8_t)op.kind, (std::int8_t)op.prim, (std::int8_t)op.za,
                                  (std::int8_t)op.zb};
            out.write(reinterpret_cast<const char*>(rec), 4);
        }
    }
}

CliffordTable2Q load_clifford_table_2q(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_clifford_table_2q: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kCacheMagic, 8) != 0)
        throw std::runtime_error("load_clifford_table_2q: bad header in " + path);
    std::int64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), 8);
    if (n != 11520) throw std::runtime_error("load_clifford_table_2q: bad element count");
    CliffordTable2Q t;
    long total = 0;
    for (int i = 0; i < n; ++i) {
        Mat4 u;
        in.read(reinterpret_cast<char*>(u.data()), 16 * sizeof(cxd));
        std::int32_t m = 0;
        in.read(reinterpret_cast<char*>(&m), 4);
        std::vector<DecompOp> ops;
        int prims = 0;
        for (int k = 0; k < m; ++k) {
            std::int8_t rec[4];
            in.read(reinterpret_cast<char*>(rec), 4);
            DecompOp op;
            op.kind = rec[0] ? DecompOp::kPrimitive : DecompOp::kZLayer;
            op.prim = static_cast<GateLabel>(rec[1]);
            op.za = rec[2];
            op.zb = rec[3];
            prims += op.kind == DecompOp::kPrimitive ? 1 : 0;
            ops.push_back(op);
        }
        if (!in) throw std::runtime_error("load_clifford_table_2q: truncated file");
        t.canonical.push_back(u);
        t.decomp.push_back(std::move(ops));
        t.prim_count.push_back(prims);
        t.lookup_[key4(u)] = i;
        total += prims;
    }
    t.avg_primitives = double(total) / double(n);
    return t;
}

CliffordTable2Q load_or_build_table_2q(const std::string& cache_path) {
    if (!cache_path.empty()) {
        std::ifstream probe(cache_path);
        if (probe.good()) {
            try {
                return load_clifford_table_2q(cache_path);
            } catch (const std::exception&) {
                // stale or corrupt cache: rebuild below
            }
        }
    }
    CliffordTable2Q t = build_clifford_table_2q();
    if (!cache_path.empty()) save_clifford_table_2q(t, cache_path);
    return t;
}

int recovery_index_2q(const CliffordTable2Q& table, const Vec4& state, int target_basis) {
    for (int i = 0; i < table.size(); ++i) {
        cxd amp = table.canonical[i].row(target_basis) * state;
        if (std::norm(amp) > 1.0 - 1e-9) return i;
    }
    throw std::runtime_error("recovery_index_2q: no Clifford maps the state to the target");
}

int recovery_index_1q(const CliffordTable1Q& table, const Vec2& state, bool target_up) {
    int row = target_up ? 0 : 1;
    for (int i = 0; i < table.size(); ++i) {
        cxd amp = table.canonical[i].row(row) * state;
        if (std::norm(amp) > 1.0 - 1e-9) return i;
    }
    throw std::runtime_error("recovery_index_1q: no Clifford maps the state to the target");
}

}  // namespace spinsim
