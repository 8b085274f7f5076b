#include "pathtsp/joins.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "pathtsp/errors.hpp"
#include "pathtsp/graph.hpp"

namespace pathtsp {

std::vector<int> odd_vertices(const Instance& inst, const std::vector<int>& edges) {
    std::vector<int> degree(inst.n, 0);
    for (int id : edges) {
        auto [u, v] = inst.edge_vertices(id);
        ++degree[u];
        ++degree[v];
    }
    std::vector<int> odd;
    for (int v = 0; v < inst.n; ++v)
        if (degree[v] % 2 == 1) odd.push_back(v);
    return odd;
}

std::vector<int> wrong_parity_set(const Instance& inst, const std::vector<int>& edges) {
    std::vector<int> odd = odd_vertices(inst, edges);
    std::vector<char> in(inst.n, 0);
    for (int v : odd) in[v] = 1;
    in[inst.s] ^= 1;
    in[inst.t] ^= 1;
    std::vector<int> out;
    for (int v = 0; v < inst.n; ++v)
        if (in[v]) out.push_back(v);
    return out;
}

Join min_tjoin(int n, const std::vector<std::optional<Rat>>& pair_costs,
               const std::vector<int>& parity_set, int matching_cap) {
    if (parity_set.size() % 2 != 0)
        throw InternalError("min_tjoin: parity set must have even size");
    if (static_cast<int>(parity_set.size()) > matching_cap)
        throw LimitError("min_tjoin: |T| = " + std::to_string(parity_set.size()) +
                         " exceeds the matching cap " + std::to_string(matching_cap));
    Join join;
    join.cost = 0;
    if (parity_set.empty()) return join;

    auto pack = [n](int u, int v) {
        if (u > v) std::swap(u, v);
        return u * (2 * n - u - 1) / 2 + (v - u - 1);
    };

    // All-pairs shortest paths over the usable edges, with successor pointers
    // for path expansion.
    std::vector<std::vector<std::optional<Rat>>> dist(n, std::vector<std::optional<Rat>>(n));
    std::vector<std::vector<int>> next(n, std::vector<int>(n, -1));
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            if (u == v) continue;
            const auto& c = pair_costs[pack(u, v)];
            if (c) {
                dist[u][v] = *c;
                next[u][v] = v;
            }
        }
    for (int k = 0; k < n; ++k)
        for (int u = 0; u < n; ++u) {
            if (u == k || !dist[u][k]) continue;
            for (int v = 0; v < n; ++v) {
                if (v == u || v == k || !dist[k][v]) continue;
                Rat through = *dist[u][k] + *dist[k][v];
                if (!dist[u][v] || through < *dist[u][v]) {
                    dist[u][v] = through;
                    next[u][v] = next[u][k];
                }
            }
        }

    const int m = static_cast<int>(parity_set.size());
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (!dist[parity_set[i]][parity_set[j]])
                throw InternalError("min_tjoin: parity vertices are disconnected");

    // Minimum perfect matching on T: pair the lowest unmatched vertex.
    const int full = 1 << m;
    std::vector<std::optional<Rat>> best(full);
    std::vector<int> choice(full, -1);
    best[0] = Rat(0);
    for (int mask = 1; mask < full; ++mask) {
        int i = 0;
        while (!(mask >> i & 1)) ++i;
        for (int j = i + 1; j < m; ++j) {
            if (!(mask >> j & 1)) continue;
            int rest = mask & ~(1 << i) & ~(1 << j);
            if (!best[rest]) continue;
            Rat cand = *best[rest] + *dist[parity_set[i]][parity_set[j]];
            if (!best[mask] || cand < *best[mask]) {
                best[mask] = cand;
                choice[mask] = j;
            }
        }
    }
    if (!best[full - 1]) throw InternalError("min_tjoin: matching DP failed");

    // Expand matched pairs along shortest paths and reduce mod 2.
    std::set<int> selected;
    int mask = full - 1;
    while (mask) {
        int i = 0;
        while (!(mask >> i & 1)) ++i;
        int j = choice[mask];
        int u = parity_set[i], v = parity_set[j];
        while (u != v) {
            int w = next[u][v];
            int id = pack(u, w);
            if (selected.count(id))
                selected.erase(id);
            else
                selected.insert(id);
            u = w;
        }
        mask &= ~(1 << i) & ~(1 << j);
    }
    join.edges.assign(selected.begin(), selected.end());
    for (int id : join.edges) join.cost += *pair_costs[id];

    // Mod-2 reduction never increases cost, so the DP value stays an upper
    // bound; the result is itself a T-join, so it cannot go below the DP
    // optimum either.
    if (join.cost > *best[full - 1])
        throw InternalError("min_tjoin: reduction increased cost");
    return join;
}

Join min_tjoin_complete(const Instance& inst, const std::vector<Rat>& costs,
                        const std::vector<int>& parity_set, int matching_cap) {
    std::vector<std::optional<Rat>> table(costs.size());
    for (size_t i = 0; i < costs.size(); ++i) {
        if (costs[i] < 0) throw InternalError("min_tjoin: negative cost");
        table[i] = costs[i];
    }
    return min_tjoin(inst.n, table, parity_set, matching_cap);
}

std::vector<Rat> ParityCorrectionVector::total() const {
    std::vector<Rat> out(basic.size());
    for (size_t i = 0; i < basic.size(); ++i)
        out[i] = basic[i] + empty_cut[i] + even_cut[i];
    return out;
}

ParityCorrectionVector build_yf(const Instance& inst, const LpSolution& xstar,
                                const NarrowCutChain& chain, const CombinationStats& stats,
                                const TreeEntry& tree, const Rat& gamma) {
    if (gamma < 0 || gamma > rat(1, 2))
        throw ParseError("gamma must lie in [0, 1/2]");
    ParityCorrectionVector y;
    y.gamma = gamma;
    y.basic.assign(inst.edge_count(), Rat(0));
    y.empty_cut.assign(inst.edge_count(), Rat(0));
    y.even_cut.assign(inst.edge_count(), Rat(0));

    for (int id : xstar.support) y.basic[id] = xstar.x[id] / 2;
    for (int id : tree.path_edges) y.basic[id] += gamma;

    Rat threshold = 2 - 2 * gamma;
    for (size_t j = 0; j < tree.lonely_cuts.size(); ++j) {
        const NarrowCut& cut = chain.cuts[tree.lonely_cuts[j]];
        if (cut.size > threshold) continue;
        y.empty_cut[tree.lonely_edge_of[j]] += 1 - cut.size / 2 - gamma;
    }

    std::vector<int> forest = tree.forest_edges();
    std::vector<char> in_forest(inst.edge_count(), 0);
    for (int id : forest) in_forest[id] = 1;
    for (int q = 0; q < chain.count(); ++q) {
        const NarrowCut& cut = chain.cuts[q];
        if (cut.size > threshold) continue;
        int crossings = 0;
        for (int id : cut.edges) crossings += in_forest[id];
        if (crossings < 2 || crossings % 2 != 0) continue;
        Rat coef = (1 - cut.size / 2 - gamma) / (2 - cut.size);
        for (int id : cut.edges)
            if (stats.xq[q][id] != 0) y.even_cut[id] += coef * stats.xq[q][id];
    }
    return y;
}

std::optional<OddCutViolation> check_tjoin_polyhedron(int n, const std::vector<Rat>& y,
                                                      const std::vector<int>& parity_set) {
    if (parity_set.empty()) return std::nullopt;
    if (parity_set.size() % 2 != 0)
        throw InternalError("check_tjoin_polyhedron: odd parity set");
    std::vector<char> odd(n, 0);
    for (int v : parity_set) odd[v] = 1;

    auto unpack = [n](int id) {
        int u = 0, row = n - 1;
        while (id >= row) {
            id -= row;
            --row;
            ++u;
        }
        return std::pair<int, int>{u, u + 1 + id};
    };

    std::vector<Rat> weights;
    std::vector<std::pair<int, int>> pairs;
    for (int id = 0; id < static_cast<int>(y.size()); ++id) {
        if (y[id] == 0) continue;
        if (y[id] < 0) throw InternalError("check_tjoin_polyhedron: negative weight");
        weights.push_back(y[id]);
        pairs.push_back(unpack(id));
    }

    Int lcd = lcm_denominator(weights);
    auto lcd64 = to_int64(lcd);
    Rat cut_weight;
    std::vector<char> side;
    if (lcd64 && *lcd64 <= (int64_t(1) << 44)) {
        WeightedEdges<int64_t> graph;
        graph.node_count = n;
        for (size_t i = 0; i < pairs.size(); ++i) {
            graph.from.push_back(pairs[i].first);
            graph.to.push_back(pairs[i].second);
            graph.weight.push_back(*to_int64(scale_to_int(weights[i], lcd)));
        }
        auto [w, u_side] = min_odd_cut(graph, odd);
        cut_weight = Rat(Int(w)) / Rat(lcd);
        side = std::move(u_side);
    } else {
        WeightedEdges<Rat> graph;
        graph.node_count = n;
        for (size_t i = 0; i < pairs.size(); ++i) {
            graph.from.push_back(pairs[i].first);
            graph.to.push_back(pairs[i].second);
            graph.weight.push_back(weights[i]);
        }
        auto [w, u_side] = min_odd_cut(graph, odd);
        cut_weight = w;
        side = std::move(u_side);
    }
    if (cut_weight >= 1) return std::nullopt;
    OddCutViolation violation;
    violation.weight = cut_weight;
    for (int v = 0; v < n; ++v)
        if (side[v]) violation.u_side.push_back(v);
    return violation;
}

}  // namespace pathtsp
