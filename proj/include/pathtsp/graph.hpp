#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pathtsp/rational.hpp"

namespace pathtsp {

/// Undirected max-flow via BFS augmentation (Edmonds-Karp), exact over the
/// capacity type (int64_t on the scaled fast path, Rat as fallback).
template <typename Cap>
struct FlowNetwork {
    struct Arc {
        int to;
        Cap cap;
        int rev;
    };
    int node_count = 0;
    std::vector<std::vector<Arc>> adj;

    explicit FlowNetwork(int nodes) : node_count(nodes), adj(nodes) {}

    void add_undirected(int u, int v, const Cap& cap) {
        adj[u].push_back({v, cap, static_cast<int>(adj[v].size())});
        adj[v].push_back({u, cap, static_cast<int>(adj[u].size()) - 1});
    }

    struct Result {
        Cap flow{};
        bool hit_cutoff = false;
        std::vector<char> source_side;  // inclusion-minimal min cut side
    };

    /// Augments until no path remains or the flow reaches `cutoff` (then
    /// hit_cutoff is set and the cut side is not meaningful).
    Result max_flow(int s, int t, const Cap* cutoff = nullptr);
};

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (b < a) std::swap(a, b);  // keep the smaller label as root
        parent[b] = a;
        return true;
    }
};

/// Weighted undirected graph given as parallel edge lists.
template <typename Cap>
struct WeightedEdges {
    int node_count = 0;
    std::vector<int> from, to;
    std::vector<Cap> weight;
};

/// Gomory-Hu cut tree (Gusfield's contraction-free construction): parent[v]
/// and weight[v] for v >= 1 describe the tree rooted at 0; the fundamental
/// cut of tree edge (v, parent[v]) is a minimum v-parent[v] cut.
template <typename Cap>
struct GomoryHuTree {
    std::vector<int> parent;
    std::vector<Cap> weight;

    /// Vertex side containing `v` when tree edge (v,parent[v]) is removed.
    std::vector<char> fundamental_side(int v) const;
};

template <typename Cap>
GomoryHuTree<Cap> gomory_hu(const WeightedEdges<Cap>& graph);

/// Minimum weight cut delta(U) with |U ∩ odd_set| odd, via the Gomory-Hu
/// tree (Padberg-Rao): some optimal odd cut is a fundamental tree cut.
/// Returns {weight, U}; odd_set must be nonempty of even size.
template <typename Cap>
std::pair<Cap, std::vector<char>> min_odd_cut(const WeightedEdges<Cap>& graph,
                                              const std::vector<char>& odd_set);

/// Eulerian s-t walk of a connected multigraph whose odd-degree vertices are
/// exactly {s,t} (s==t allowed for the all-even case). Edges are (u,v) pairs;
/// the walk starts at s and greedily prefers the lowest-indexed neighbor.
std::vector<int> euler_walk(int node_count, const std::vector<std::pair<int, int>>& edges,
                            int s, int t);

}  // namespace pathtsp
