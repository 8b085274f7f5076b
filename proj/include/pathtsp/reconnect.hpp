#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pathtsp/cuts.hpp"
#include "pathtsp/instance.hpp"
#include "pathtsp/joins.hpp"
#include "pathtsp/subtour.hpp"
#include "pathtsp/treedecomp.hpp"

namespace pathtsp {

/// Bad edges of a tree: support edges lying in at least two of its lonely
/// cuts. r[j] = 1 - x*(Q_j \ B(S)) per lonely cut position j.
struct BadEdgeIndex {
    std::vector<int> bad_edges;             // sorted support edge ids
    std::vector<std::vector<int>> cuts_of;  // parallel: lonely-cut positions holding it
    std::vector<Rat> r;                     // per lonely-cut position of the tree
};

BadEdgeIndex bad_edges(const Instance& inst, const LpSolution& xstar,
                       const NarrowCutChain& chain, const TreeEntry& tree);

enum class DropRule { MostExpensive, Leftmost };

/// Modified costs c' that charge reconnection ahead of time: on each bad
/// edge, add twice the cost of every lonely edge of its cuts except the
/// dropped one (the most expensive by default, the leftmost for the
/// all-small special-case analysis); c' = c off B(S), and c' >= c >= 0.
/// Joins priced under c' must stay inside the LP support, where every edge
/// crossing two or more lonely cuts is a bad edge.
std::vector<Rat> modified_costs(const Instance& inst, const NarrowCutChain& chain,
                                const TreeEntry& tree, const BadEdgeIndex& bad,
                                DropRule rule = DropRule::MostExpensive);

/// Edges of a minimum spanning tree of the contracted component graph
/// (cheapest connecting pair per component pair); empty for one component.
/// The caller doubles them to preserve parities.
std::vector<int> doubled_mst(const Instance& inst, const std::vector<int>& component_of);

/// Feasible point of the reconnection system, found by phase-1 simplex:
///   (D0) x(b,Q) >= 0,  (D1) sum_Q x(b,Q) <= 1 per bad edge b,
///   (D2) sum_{b in B cap Q} x*(b) x(b,Q) >= r_Q per lonely cut Q.
struct ReconnectionPlan {
    bool feasible = false;
    // prob[i] lists (lonely-cut position, value) for bad_edges[i].
    std::vector<std::vector<std::pair<int, Rat>>> prob;
    std::string infeasibility;  // violating-subset certificate when infeasible
};

ReconnectionPlan solve_reconnection_lp(const Instance& inst, const LpSolution& xstar,
                                       const TreeEntry& tree, const BadEdgeIndex& bad);

/// Exhaustive check of the Koenig-Hall-type feasibility condition over all
/// subsets of the tree's lonely cuts:
///   sum_{Q in Q'} r_Q <= x*(union of Q cap B(S))   and
///   x*(union of Q') >= |Q'|.
/// Enumeration runs when the tree has at most `cap` lonely cuts; beyond the
/// cap only singletons and pairs are checked and `complete` is false.
struct KhReport {
    bool claim1_ok = true;
    bool claim2_ok = true;
    bool complete = true;
    std::vector<int> violating_positions;  // lonely-cut positions of a failure
};

KhReport check_kh_condition(const Instance& inst, const LpSolution& xstar,
                            const NarrowCutChain& chain, const TreeEntry& tree,
                            const BadEdgeIndex& bad, int cap = 20);

/// Executable form of the layering guarantee: for every narrow cut that is
/// not lonely in the tree, x^Q puts no mass on the tree's bad edges.
/// Returns the offending (cut, edge) pair if any.
std::optional<std::pair<int, int>> completion_mass_on_bad_edges(
    const NarrowCutChain& chain, const CombinationStats& stats, const TreeEntry& tree,
    const BadEdgeIndex& bad);

}  // namespace pathtsp
