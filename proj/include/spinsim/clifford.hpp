#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "spinsim/gateset.hpp"

namespace spinsim {

// Single-qubit Clifford group (24 elements) with minimum-length decompositions
// over {+-X/2, +-Y/2, X, Y}; no free phase gates here. The identity element is
// realized as one idle primitive, which is what makes the average primitive
// count exactly 45/24 = 1.875.
struct CliffordTable1Q {
    std::vector<Mat2> canonical;              // global-phase normalized
    std::vector<std::vector<Gate1Q>> decomp;  // time order
    std::vector<int> prim_count;              // physical primitives (identity = 1)
    double avg_primitives = 0;

    int size() const { return static_cast<int>(canonical.size()); }
    int index_of(const Mat2& u) const;  // -1 when absent

  private:
    friend CliffordTable1Q build_clifford_table_1q();
    std::unordered_map<std::string, int> lookup_;
};

CliffordTable1Q build_clifford_table_1q();

// One step of a two-qubit decomposition: either a free virtual-Z layer
// (quarter-turn Z's on each qubit) or one physical primitive.
struct DecompOp {
    enum Kind { kZLayer, kPrimitive } kind = kPrimitive;
    GateLabel prim = GateLabel::Idle;
    int za = 0, zb = 0;  // quarter turns in [0,4)

    Mat4 unitary() const;
};

// Two-qubit Clifford group (11520 elements) generated by closure over the 16
// physical primitives with free virtual-Z layers, each element assigned a
// minimum-primitive-count decomposition by breadth-first search.
struct CliffordTable2Q {
    std::vector<Mat4> canonical;
    std::vector<std::vector<DecompOp>> decomp;  // time order
    std::vector<int> prim_count;
    double avg_primitives = 0;

    int size() const { return static_cast<int>(canonical.size()); }
    int index_of(const Mat4& u) const;
    bool contains(const Mat4& u) const { return index_of(u) >= 0; }

  private:
    friend CliffordTable2Q build_clifford_table_2q();
    friend CliffordTable2Q load_clifford_table_2q(const std::string&);
    std::unordered_map<std::string, int> lookup_;
};

CliffordTable2Q build_clifford_table_2q();

// Versioned binary cache of the two-qubit table.
void save_clifford_table_2q(const CliffordTable2Q& table, const std::string& path);
CliffordTable2Q load_clifford_table_2q(const std::string& path);
// Builds (and caches) unless a valid cache already exists.
CliffordTable2Q load_or_build_table_2q(const std::string& cache_path);

// Recovery element: the first table element whose ideal action maps `state`
// onto the requested computational basis target (up to phase). Throws if no
// exact mapping exists.
int recovery_index_2q(const CliffordTable2Q& table, const Vec4& state, int target_basis);
int recovery_index_1q(const CliffordTable1Q& table, const Vec2& state, bool target_up);

}  // namespace spinsim
