#include "pathtsp/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "pathtsp/errors.hpp"

namespace pathtsp {

template <typename Cap>
typename FlowNetwork<Cap>::Result FlowNetwork<Cap>::max_flow(int s, int t,
                                                             const Cap* cutoff) {
    Result res;
    res.flow = Cap{};
    std::vector<int> prev_node(node_count), prev_arc(node_count);
    while (true) {
        if (cutoff && !(res.flow < *cutoff)) {
            res.hit_cutoff = true;
            return res;
        }
        std::fill(prev_node.begin(), prev_node.end(), -1);
        prev_node[s] = s;
        std::deque<int> queue{s};
        while (!queue.empty() && prev_node[t] < 0) {
            int u = queue.front();
            queue.pop_front();
            for (int k = 0; k < static_cast<int>(adj[u].size()); ++k) {
                const Arc& arc = adj[u][k];
                if (prev_node[arc.to] >= 0 || !(Cap{} < arc.cap)) continue;
                prev_node[arc.to] = u;
                prev_arc[arc.to] = k;
                queue.push_back(arc.to);
            }
        }
        if (prev_node[t] < 0) break;
        // Bottleneck along the BFS path, then push.
        Cap push{};
        bool first = true;
        for (int v = t; v != s; v = prev_node[v]) {
            const Arc& arc = adj[prev_node[v]][prev_arc[v]];
            if (first || arc.cap < push) push = arc.cap;
            first = false;
        }
        if (cutoff) {
            Cap room = *cutoff - res.flow;
            if (room < push) push = room;
        }
        for (int v = t; v != s; v = prev_node[v]) {
            Arc& arc = adj[prev_node[v]][prev_arc[v]];
            arc.cap -= push;
            adj[arc.to][arc.rev].cap += push;
        }
        res.flow += push;
    }
    res.source_side.assign(node_count, 0);
    res.source_side[s] = 1;
    std::deque<int> queue{s};
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (const Arc& arc : adj[u])
            if (!res.source_side[arc.to] && Cap{} < arc.cap) {
                res.source_side[arc.to] = 1;
                queue.push_back(arc.to);
            }
    }
    return res;
}

template struct FlowNetwork<int64_t>;
template struct FlowNetwork<Rat>;

template <typename Cap>
std::vector<char> GomoryHuTree<Cap>::fundamental_side(int v) const {
    const int n = static_cast<int>(parent.size());
    std::vector<std::vector<int>> children(n);
    for (int u = 1; u < n; ++u) children[parent[u]].push_back(u);
    std::vector<char> side(n, 0);
    std::deque<int> queue{v};
    side[v] = 1;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int c : children[u])
            if (!side[c]) {
                side[c] = 1;
                queue.push_back(c);
            }
    }
    return side;
}

template <typename Cap>
GomoryHuTree<Cap> gomory_hu(const WeightedEdges<Cap>& graph) {
    const int n = graph.node_count;
    GomoryHuTree<Cap> tree;
    tree.parent.assign(n, 0);
    tree.weight.assign(n, Cap{});
    for (int i = 1; i < n; ++i) {
        FlowNetwork<Cap> net(n);
        for (size_t e = 0; e < graph.from.size(); ++e)
            net.add_undirected(graph.from[e], graph.to[e], graph.weight[e]);
        auto res = net.max_flow(i, tree.parent[i]);
        tree.weight[i] = res.flow;
        for (int j = 0; j < n; ++j)
            if (j != i && res.source_side[j] && tree.parent[j] == tree.parent[i])
                tree.parent[j] = i;
        // Gusfield's reparenting step keeps the cut-tree property.
        int p = tree.parent[i];
        if (p != 0 && res.source_side[tree.parent[p]]) {
            tree.parent[i] = tree.parent[p];
            tree.parent[p] = i;
            tree.weight[i] = tree.weight[p];
            tree.weight[p] = res.flow;
        }
    }
    return tree;
}

template struct GomoryHuTree<int64_t>;
template struct GomoryHuTree<Rat>;
template GomoryHuTree<int64_t> gomory_hu(const WeightedEdges<int64_t>&);
template GomoryHuTree<Rat> gomory_hu(const WeightedEdges<Rat>&);

template <typename Cap>
std::pair<Cap, std::vector<char>> min_odd_cut(const WeightedEdges<Cap>& graph,
                                              const std::vector<char>& odd_set) {
    int odd_count = 0;
    for (char c : odd_set) odd_count += c;
    if (odd_count == 0 || odd_count % 2 != 0)
        throw InternalError("min_odd_cut needs a nonempty even odd_set");
    GomoryHuTree<Cap> tree = gomory_hu(graph);
    bool have = false;
    Cap best{};
    std::vector<char> best_side;
    for (int v = 1; v < graph.node_count; ++v) {
        std::vector<char> side = tree.fundamental_side(v);
        int inside = 0;
        for (int u = 0; u < graph.node_count; ++u)
            if (side[u] && odd_set[u]) ++inside;
        if (inside % 2 == 0) continue;
        if (!have || tree.weight[v] < best) {
            have = true;
            best = tree.weight[v];
            best_side = std::move(side);
        }
    }
    if (!have) throw InternalError("min_odd_cut found no odd fundamental cut");
    return {best, best_side};
}

template std::pair<int64_t, std::vector<char>> min_odd_cut(
    const WeightedEdges<int64_t>&, const std::vector<char>&);
template std::pair<Rat, std::vector<char>> min_odd_cut(const WeightedEdges<Rat>&,
                                                       const std::vector<char>&);

std::vector<int> euler_walk(int node_count, const std::vector<std::pair<int, int>>& edges,
                            int s, int t) {
    std::vector<int> degree(node_count, 0);
    // Adjacency as (neighbor, edge index); sorted so ties break toward the
    // lowest-indexed neighbor, for reproducibility.
    std::vector<std::vector<std::pair<int, int>>> adj(node_count);
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        auto [u, v] = edges[e];
        adj[u].emplace_back(v, e);
        adj[v].emplace_back(u, e);
        ++degree[u];
        ++degree[v];
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
    for (int v = 0; v < node_count; ++v) {
        bool expect_odd = (v == s) != (v == t);
        if ((degree[v] % 2 == 1) != expect_odd)
            throw InternalError("euler_walk: parity violation at vertex " +
                                std::to_string(v));
    }
    std::vector<char> used(edges.size(), 0);
    std::vector<size_t> cursor(node_count, 0);
    std::vector<int> stack{s}, walk;
    while (!stack.empty()) {
        int u = stack.back();
        while (cursor[u] < adj[u].size() && used[adj[u][cursor[u]].second]) ++cursor[u];
        if (cursor[u] == adj[u].size()) {
            walk.push_back(u);
            stack.pop_back();
        } else {
            auto [v, e] = adj[u][cursor[u]];
            used[e] = 1;
            stack.push_back(v);
        }
    }
    std::reverse(walk.begin(), walk.end());
    if (walk.size() != edges.size() + 1 || walk.front() != s || walk.back() != t)
        throw InternalError("euler_walk: multigraph is not connected s-t Eulerian");
    return walk;
}

}  // namespace pathtsp
