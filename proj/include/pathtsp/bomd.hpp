#pragma once

#include <vector>

#include "pathtsp/cuts.hpp"
#include "pathtsp/instance.hpp"
#include "pathtsp/joins.hpp"
#include "pathtsp/reconnect.hpp"
#include "pathtsp/subtour.hpp"
#include "pathtsp/treedecomp.hpp"

namespace pathtsp {

/// Connected spanning multigraph with odd degrees exactly at s and t, plus
/// its shortcut Hamiltonian s-t path.
struct StTour {
    std::vector<int> edges;  // packed ids; doubled edges appear twice
    Rat multigraph_cost;
    std::vector<int> path;  // vertex sequence s ... t
    Rat path_cost;
};

/// Audits parity and connectivity, computes the Eulerian shortcut, and
/// checks that shortcutting never increased the cost.
StTour make_st_tour(const Instance& inst, std::vector<int> edges);

/// Shortcut vertex sequence of an Eulerian s-t walk: first occurrences kept,
/// the terminal t kept last.
std::vector<int> shortcut(const Instance& inst, const std::vector<int>& edges,
                          int s, int t);

struct RunOptions {
    Rat gamma = rat(1, 16);
    int threads = 1;
    int64_t lcd_cap = 1 << 16;
    int matching_cap = 20;
    int kh_cap = 20;
};

/// Everything the ledger needs about one tree of the combination.
struct TreeRun {
    int tree_index = 0;
    Rat c_tree, c_forest;
    BadEdgeIndex bad;
    std::vector<Rat> cprime;  // reconnection-anticipating costs
    Join join_forest;         // J*_F under c'
    Rat c_join_forest;        // same join priced under c
    Rat cprime_join_forest;   // = join_forest.cost
    StTour forest_based;      // P1(S)
    Join join_tree;           // J_S under c
    StTour christofides;      // P2(S)
    ParityCorrectionVector yf;
    Rat c_yf, cprime_yf;
    Rat surcharge_lhs, surcharge_rhs;  // deterministic reconnection bound
    ReconnectionPlan plan;
    KhReport kh;
    // Outcome records of the per-tree checks (all must end true; run_tree
    // throws otherwise).
    bool yf_in_polyhedron = false;
    bool completion_avoids_bad = false;
    bool plan_feasible = false;
    bool kh_passed = false;
};

struct PipelineResult {
    Instance inst;
    Rat gamma;
    LpSolution xstar;
    NarrowCutChain chain;
    LayerStructure layers;
    TreeCombination combo;
    CombinationStats stats;
    std::vector<TreeRun> runs;
    StTour best;
    int best_tree = -1;
    bool best_is_forest_based = false;
};

/// P1(S) = F + J*_F + doubled spanning tree over the components of F + J*_F.
StTour forest_tour(const Instance& inst, const TreeEntry& tree, const Join& join);

/// P2(S) = S + J_S.
StTour christofides_tour(const Instance& inst, const TreeEntry& tree, const Join& join);

/// All per-tree artifacts, with every per-tree inequality checked on the way
/// (violations throw InternalError; the analysis proves they cannot happen).
TreeRun run_tree(const Instance& inst, const LpSolution& xstar, const NarrowCutChain& chain,
                 const CombinationStats& stats, const TreeCombination& combo,
                 int tree_index, const RunOptions& options);

/// Full deterministic pipeline: subtour LP, narrow cuts, layers, layered
/// decomposition, per-tree tours (parallel map when threads > 1, output
/// independent of the thread count), best-tour selection.
PipelineResult run_bomd(const Instance& inst, const RunOptions& options = {});

/// Single spanning tree plus parity correction; the classical comparison
/// point, reported alongside but never asserted against the BOMD tour.
StTour hoogeveen_baseline(const Instance& inst, int matching_cap = 20);

}  // namespace pathtsp
