#pragma once

#include <optional>
#include <vector>

#include "pathtsp/cuts.hpp"
#include "pathtsp/instance.hpp"
#include "pathtsp/subtour.hpp"

namespace pathtsp {

/// One spanning tree of a convex combination of x*.
struct TreeEntry {
    std::vector<int> edges;   // sorted packed edge ids, a spanning tree
    Rat lambda;               // positive coefficient
    int group = 0;            // layer index i(S), 0-based
    std::vector<int> lonely_cuts;     // chain indices of the lonely cuts Q(S)
    std::vector<int> lonely_edge_of;  // parallel: unique tree edge in that cut
    std::vector<int> lonely_edges;    // sorted union of lonely_edge_of
    std::vector<int> path_edges;      // edges of the s-t path of the tree

    std::vector<int> forest_edges() const;  // S minus its lonely edges
};

struct TreeCombination {
    std::vector<TreeEntry> trees;
    bool layered = false;
    int layer_count = 1;
};

/// Derived vectors of a combination: the per-cut lonely-edge vectors x^Q with
/// x^Q(e) = sum of lambda_S over trees where Q is lonely with tree edge e,
/// and the path split p* + q* = x*.
struct CombinationStats {
    std::vector<std::vector<Rat>> xq;  // per chain cut, dense by edge id
    std::vector<Rat> pstar, qstar;
    Rat xq_of(int cut, int edge) const { return xq[cut][edge]; }
};

/// Rank of X in the layer-i matroid: forests of G_i plus at most one layer
/// edge per family cut; computed as
///   |V| - components(X restricted to G_i) + #{family cuts met by X within L_i}.
int rank_oracle(const Instance& inst, const NarrowCutChain& chain,
                const LayerStructure& layers, int layer, const std::vector<int>& x_edges);

struct MatroidPartitionResult {
    bool success = false;
    // On success: one edge list per slot, slots ordered group 1 first.
    std::vector<std::vector<int>> slots;
    std::vector<int> slot_layer;
    // On failure: a set X violating the fractional partition condition.
    std::vector<int> violating_set;
    Rat violating_lhs, violating_rhs;  // sum zeta_i r_i(X) < x*(X)
};

/// Capacitated matroid partition at scale K = lcd(x*): places K*x*(e) copies
/// of each support edge into K*zeta_i bases of the layer-i matroid, by
/// breadth-first augmentation over the exchange graph. The failure branch is
/// unreachable for feasible x* and signals a bug upstream.
MatroidPartitionResult matroid_partition(const Instance& inst, const LpSolution& xstar,
                                         const NarrowCutChain& chain,
                                         const LayerStructure& layers,
                                         int64_t lcd_cap);

struct DecompositionOptions {
    int64_t lcd_cap = 1 << 16;
};

/// Layered convex combination of x* into spanning trees, with lonely edges
/// L(S) = S ∩ L_{i(S)} and layer families as lonely cuts. All combination
/// invariants are asserted before returning.
std::pair<TreeCombination, CombinationStats> decompose_layered(
    const Instance& inst, const LpSolution& xstar, const NarrowCutChain& chain,
    const LayerStructure& layers, const DecompositionOptions& options = {});

/// Plain convex combination (no layering): K bases of the graphic matroid of
/// the support. Lonely cuts are taken with equality and then trimmed per cut
/// so that x^Q(Q) = 2 - x*(Q) holds exactly, splitting trees when needed.
std::pair<TreeCombination, CombinationStats> decompose_generic(
    const Instance& inst, const LpSolution& xstar, const NarrowCutChain& chain,
    const DecompositionOptions& options = {});

/// Stats of an arbitrary combination (layered or not); checks the exact
/// reconstruction sum(lambda_S * S) = x* and sum(lambda) = 1, and that every
/// lonely edge lies on its tree's s-t path.
CombinationStats combination_stats(const Instance& inst, const LpSolution& xstar,
                                   const NarrowCutChain& chain,
                                   const TreeCombination& combo,
                                   bool require_xq_equality);

/// An explicitly listed matroid on ground elements 0..ground_size-1.
struct ExplicitMatroid {
    int ground_size = 0;
    std::vector<std::vector<int>> bases;
};

struct CutRestrictionReport {
    bool is_matroid = false;
    int restricted_basis_count = 0;
    std::string failure;  // empty when the exchange axiom holds
};

/// Checks by full enumeration that B_C = {B basis : |B ∩ C| <= 1 for all C}
/// again satisfies the basis exchange axiom. Throws if B_C is empty.
CutRestrictionReport verify_cut_restricted_matroid(
    const ExplicitMatroid& matroid, const std::vector<std::vector<int>>& cut_family);

}  // namespace pathtsp
