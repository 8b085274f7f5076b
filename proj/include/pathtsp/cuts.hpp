#pragma once

#include <utility>
#include <vector>

#include "pathtsp/instance.hpp"
#include "pathtsp/subtour.hpp"

namespace pathtsp {

/// One narrow cut: an s-t cut Q = delta(U) with x*(Q) < 2. U is the sorted
/// s-side vertex list; edges are the support edge ids crossing the cut.
struct NarrowCut {
    std::vector<int> u_side;
    std::vector<char> side_mask;
    std::vector<int> edges;
    Rat size;
};

/// All narrow cuts, ordered by strict inclusion of their s-sides
/// (the chain starts at delta({s}) and ends at delta(V \ {t})).
struct NarrowCutChain {
    std::vector<NarrowCut> cuts;
    int count() const { return static_cast<int>(cuts.size()); }
};

/// Exact enumeration of every narrow cut of a feasible x*. Works along the
/// chain: starting from {s} and V\{t}, each gap between consecutive known
/// s-sides is probed with one early-terminating max-flow per (inside,
/// outside) vertex pair; a probe either certifies that no narrow cut lies
/// strictly inside the gap or produces one, which splits the gap.
NarrowCutChain find_narrow_cuts(const Instance& inst, const LpSolution& xstar);

/// Layer structure over the distinct narrow cut sizes
/// 2-z1 > 2-z1-z2 > ... > 1.
struct LayerStructure {
    int layer_count = 0;
    std::vector<Rat> sizes;          // distinct narrow sizes, descending
    std::vector<Rat> zeta;           // layer weights, sum 1
    std::vector<Rat> thresholds;     // thresholds[i] = 2 - zeta_1 - ... - zeta_{i+1}
    std::vector<std::vector<int>> families;     // cut indices with size <= threshold
    std::vector<std::vector<int>> layer_edges;  // L_i: support edges in exactly one family cut
    std::vector<std::vector<char>> in_layer;    // membership mask per layer, by edge id
    std::vector<std::vector<std::vector<int>>> levels;  // per layer: vertex partition
    std::vector<std::vector<int>> level_of;     // per layer: vertex -> level index
};

/// Derives weights, nested families, layer edge sets and level sets; asserts
/// that every family cut meets its layer edge set and that each level set
/// induces a connected subgraph of the support.
LayerStructure build_layers(const Instance& inst, const LpSolution& xstar,
                            const NarrowCutChain& chain);

struct IdentityReport {
    Rat lhs;
    Rat rhs;
    bool holds() const { return lhs == rhs; }
};

/// x*(d(A)) + x*(d(B)) versus x*(d(A∩B)) + x*(d(A∪B)) + 2 x*(A\B, B\A);
/// the two sides are always equal.
IdentityReport check_submodular_identity(const Instance& inst, const LpSolution& xstar,
                                         const std::vector<char>& a,
                                         const std::vector<char>& b);

/// (x*(Q1 ∩ Q2), (x*(Q1)+x*(Q2))/2 - 1) for two distinct narrow cuts;
/// the first never exceeds the second.
std::pair<Rat, Rat> intersection_bound(const LpSolution& xstar,
                                       const NarrowCutChain& chain, int q1, int q2);

}  // namespace pathtsp
