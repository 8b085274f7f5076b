#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "pathtsp/cuts.hpp"
#include "pathtsp/instance.hpp"
#include "pathtsp/lp.hpp"
#include "pathtsp/subtour.hpp"
#include "pathtsp/treedecomp.hpp"

namespace pathtsp::testing {

// ---------------------------------------------------------------------------
// The worked 8-vertex example used across the suite: an LP vector over a
// 12-edge support with narrow cut sizes (1, 5/3, 5/3, 5/3, 5/3, 1), plus its
// known layered and non-layered decompositions into three spanning trees.
// Vertices: s=0, inner 1..6, t=7.
// ---------------------------------------------------------------------------

struct Fixture {
    Instance inst;           // unit shortest-path closure of the support
    LpSolution xstar;        // the fractional vector itself
    std::vector<std::pair<std::pair<int, int>, Rat>> support_values;
};

inline Fixture make_fixture() {
    Fixture fixture;
    const int n = 8;
    fixture.support_values = {
        {{0, 1}, rat(2, 3)}, {{0, 3}, rat(1, 3)}, {{1, 2}, rat(1)},
        {{1, 3}, rat(1, 3)}, {{2, 4}, rat(1, 3)}, {{2, 5}, rat(1, 3)},
        {{2, 7}, rat(1, 3)}, {{3, 4}, rat(1)},    {{3, 6}, rat(1, 3)},
        {{4, 5}, rat(2, 3)}, {{5, 6}, rat(1)},    {{6, 7}, rat(2, 3)},
    };
    PartialCosts raw(n * (n - 1) / 2);
    Instance& inst = fixture.inst;
    inst.n = n;
    inst.s = 0;
    inst.t = 7;
    auto id = [n](int u, int v) {
        if (u > v) std::swap(u, v);
        return u * (2 * n - u - 1) / 2 + (v - u - 1);
    };
    for (const auto& [pair, value] : fixture.support_values)
        raw[id(pair.first, pair.second)] = rat(1);
    inst.costs = metric_closure(n, raw);
    inst.validate();

    std::vector<Rat> x(inst.edge_count(), Rat(0));
    for (const auto& [pair, value] : fixture.support_values)
        x[inst.edge_id(pair.first, pair.second)] = value;
    fixture.xstar = LpSolution::from_vector(inst, std::move(x));
    return fixture;
}

inline std::vector<int> edge_list(const Instance& inst,
                                  const std::vector<std::pair<int, int>>& pairs) {
    std::vector<int> ids;
    for (auto [u, v] : pairs) ids.push_back(inst.edge_id(u, v));
    std::sort(ids.begin(), ids.end());
    return ids;
}

/// The layered three-tree combination of the fixture: one tree crossing all
/// six narrow cuts once (group 1, weight 1/3), two trees lonely exactly at
/// the endpoint cuts (group 2, weight 1/3 each).
inline std::vector<std::vector<std::pair<int, int>>> fixture_layered_trees() {
    return {
        {{0, 1}, {1, 2}, {2, 4}, {3, 4}, {4, 5}, {5, 6}, {6, 7}},
        {{1, 2}, {3, 4}, {5, 6}, {6, 7}, {0, 3}, {2, 5}, {3, 6}},
        {{0, 1}, {1, 2}, {3, 4}, {4, 5}, {5, 6}, {1, 3}, {2, 7}},
    };
}

/// A non-layered decomposition of the same vector (each tree weight 1/3).
inline std::vector<std::vector<std::pair<int, int>>> fixture_plain_trees() {
    return {
        {{0, 1}, {1, 2}, {2, 5}, {3, 4}, {4, 5}, {5, 6}, {6, 7}},
        {{0, 3}, {1, 2}, {2, 4}, {3, 4}, {4, 5}, {5, 6}, {6, 7}},
        {{0, 1}, {1, 2}, {1, 3}, {2, 7}, {3, 4}, {3, 6}, {5, 6}},
    };
}

// ---------------------------------------------------------------------------
// Independent oracles (exhaustive, implementation-free).
// ---------------------------------------------------------------------------

/// Every proper vertex subset as a 0/1 mask, skipping empty and full.
inline void for_each_proper_subset(int n, const std::function<void(const std::vector<char>&)>& fn) {
    for (uint64_t bits = 1; bits + 1 < (uint64_t(1) << n); ++bits) {
        std::vector<char> side(n, 0);
        for (int v = 0; v < n; ++v) side[v] = bits >> v & 1;
        fn(side);
    }
}

/// Exhaustive list of narrow cut s-sides, sorted by side size.
inline std::vector<std::vector<int>> brute_narrow_cuts(const Instance& inst,
                                                       const LpSolution& xstar) {
    std::vector<std::vector<int>> found;
    for_each_proper_subset(inst.n, [&](const std::vector<char>& side) {
        if (!side[inst.s] || side[inst.t]) return;
        if (xstar.cut_value(inst, side) < 2) {
            std::vector<int> members;
            for (int v = 0; v < inst.n; ++v)
                if (side[v]) members.push_back(v);
            found.push_back(std::move(members));
        }
    });
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return found;
}

/// Full subtour LP with every cut constraint listed explicitly.
inline LpModel exhaustive_subtour_model(const Instance& inst) {
    std::vector<std::vector<char>> sides;
    for_each_proper_subset(inst.n, [&](const std::vector<char>& side) {
        if (side[inst.s]) sides.push_back(side);  // each cut once, s inside
    });
    return subtour_model(inst, sides);
}

/// Feasibility of a vector for the full exponential subtour LP.
inline bool brute_subtour_feasible(const Instance& inst, const std::vector<Rat>& x) {
    LpModel model = exhaustive_subtour_model(inst);
    return check_feasible_point(model, x).empty();
}

/// Exact minimum T-join by enumerating all subsets of the listed edges.
inline std::optional<Rat> brute_min_tjoin(int n, const std::vector<std::pair<int, int>>& edges,
                                          const std::vector<Rat>& costs,
                                          const std::vector<int>& parity_set) {
    std::vector<char> want(n, 0);
    for (int v : parity_set) want[v] = 1;
    std::optional<Rat> best;
    for (uint64_t bits = 0; bits < (uint64_t(1) << edges.size()); ++bits) {
        std::vector<int> degree(n, 0);
        Rat cost = 0;
        for (size_t e = 0; e < edges.size(); ++e)
            if (bits >> e & 1) {
                ++degree[edges[e].first];
                ++degree[edges[e].second];
                cost += costs[e];
            }
        bool ok = true;
        for (int v = 0; v < n && ok; ++v) ok = (degree[v] % 2) == (want[v] != 0);
        if (ok && (!best || cost < *best)) best = cost;
    }
    return best;
}

/// Exact minimum Hamiltonian s-t path cost by permutation scan.
inline Rat brute_opt_path(const Instance& inst) {
    std::vector<int> inner;
    for (int v = 0; v < inst.n; ++v)
        if (v != inst.s && v != inst.t) inner.push_back(v);
    std::sort(inner.begin(), inner.end());
    std::optional<Rat> best;
    do {
        Rat cost = 0;
        int prev = inst.s;
        for (int v : inner) {
            cost += inst.cost(prev, v);
            prev = v;
        }
        cost += inst.cost(prev, inst.t);
        if (!best || cost < *best) best = cost;
    } while (std::next_permutation(inner.begin(), inner.end()));
    return *best;
}

/// Largest independent subset of X in the layer matroid, by enumeration.
inline int brute_layer_rank(const Instance& inst, const NarrowCutChain& chain,
                            const LayerStructure& layers, int layer,
                            const std::vector<int>& x_edges) {
    const auto& family = layers.families[layer];
    int best = 0;
    for (uint64_t bits = 0; bits < (uint64_t(1) << x_edges.size()); ++bits) {
        std::vector<int> cut_count(family.size(), 0);
        std::vector<int> parent(inst.n);
        for (int v = 0; v < inst.n; ++v) parent[v] = v;
        std::function<int(int)> find = [&](int v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        bool ok = true;
        int size = 0;
        for (size_t e = 0; e < x_edges.size() && ok; ++e) {
            if (!(bits >> e & 1)) continue;
            ++size;
            int id = x_edges[e];
            int crossings = 0, slot = -1;
            for (size_t j = 0; j < family.size(); ++j) {
                const auto& cut = chain.cuts[family[j]];
                if (std::binary_search(cut.edges.begin(), cut.edges.end(), id)) {
                    ++crossings;
                    slot = static_cast<int>(j);
                }
            }
            if (crossings == 0) {
                auto [u, v] = inst.edge_vertices(id);
                int ru = find(u), rv = find(v);
                if (ru == rv)
                    ok = false;
                else
                    parent[ru] = rv;
            } else if (crossings == 1) {
                if (++cut_count[slot] > 1) ok = false;
            } else {
                ok = false;
            }
        }
        if (ok) best = std::max(best, size);
    }
    return best;
}

/// Deterministic small-int pseudo-random stream for tests.
struct TestRng {
    uint64_t state;
    explicit TestRng(uint64_t seed) : state(seed) {}
    uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    uint64_t below(uint64_t bound) { return next() % bound; }
};

}  // namespace pathtsp::testing
