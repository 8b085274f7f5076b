#include "pathtsp/treedecomp.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "pathtsp/errors.hpp"
#include "pathtsp/graph.hpp"

namespace pathtsp {

std::vector<int> TreeEntry::forest_edges() const {
    std::vector<int> out;
    for (int e : edges)
        if (!std::binary_search(lonely_edges.begin(), lonely_edges.end(), e))
            out.push_back(e);
    return out;
}

namespace {

// Element classification inside the layer-i matroid.
enum class EdgeClass { Loop, Free, LayerEdge };

// Per-layer matroid over the support edges: independent sets are forests of
// G_i (edges crossing no family cut) together with at most one layer edge
// per family cut.
struct LayerMatroidView {
    const Instance* inst = nullptr;
    int family_size = 0;
    std::vector<EdgeClass> edge_class;  // by support position
    std::vector<int> cut_slot;          // for LayerEdge: position within the family

    bool independent(const std::vector<int>& members,
                     const std::vector<std::pair<int, int>>& endpoints) const {
        std::vector<char> cut_used(family_size, 0);
        Dsu dsu(inst->n);
        for (int pos : members) {
            switch (edge_class[pos]) {
                case EdgeClass::Loop:
                    return false;
                case EdgeClass::LayerEdge: {
                    int slot = cut_slot[pos];
                    if (cut_used[slot]) return false;
                    cut_used[slot] = 1;
                    break;
                }
                case EdgeClass::Free:
                    if (!dsu.unite(endpoints[pos].first, endpoints[pos].second))
                        return false;
                    break;
            }
        }
        return true;
    }
};

LayerMatroidView make_layer_view(const Instance& inst, const NarrowCutChain& chain,
                                 const LayerStructure& layers, int layer,
                                 const std::vector<int>& support) {
    LayerMatroidView view;
    view.inst = &inst;
    view.family_size = static_cast<int>(layers.families[layer].size());
    view.edge_class.assign(support.size(), EdgeClass::Free);
    view.cut_slot.assign(support.size(), -1);
    std::vector<int> crossings(inst.edge_count(), 0);
    std::vector<int> slot_of(inst.edge_count(), -1);
    for (size_t j = 0; j < layers.families[layer].size(); ++j)
        for (int id : chain.cuts[layers.families[layer][j]].edges) {
            ++crossings[id];
            slot_of[id] = static_cast<int>(j);
        }
    for (size_t pos = 0; pos < support.size(); ++pos) {
        int id = support[pos];
        if (crossings[id] == 0)
            view.edge_class[pos] = EdgeClass::Free;
        else if (crossings[id] == 1) {
            view.edge_class[pos] = EdgeClass::LayerEdge;
            view.cut_slot[pos] = slot_of[id];
        } else
            view.edge_class[pos] = EdgeClass::Loop;
    }
    return view;
}

// Trivial view whose matroid is the graphic matroid of the support.
LayerMatroidView make_graphic_view(const Instance& inst, const std::vector<int>& support) {
    LayerMatroidView view;
    view.inst = &inst;
    view.family_size = 0;
    view.edge_class.assign(support.size(), EdgeClass::Free);
    view.cut_slot.assign(support.size(), -1);
    return view;
}

struct PartitionProblem {
    const Instance& inst;
    std::vector<int> support;                     // edge ids
    std::vector<std::pair<int, int>> endpoints;   // by support position
    std::vector<LayerMatroidView> views;          // per layer
    std::vector<int> slot_layer;
    std::vector<int64_t> demand;                  // copies left, by support position

    std::vector<std::vector<int>> slots;          // members as support positions
    std::vector<std::vector<char>> in_slot;

    bool slot_accepts(int slot, int pos, int evict_pos) const {
        std::vector<int> candidate;
        candidate.reserve(slots[slot].size() + 1);
        for (int q : slots[slot])
            if (q != evict_pos) candidate.push_back(q);
        candidate.push_back(pos);
        return views[slot_layer[slot]].independent(candidate, endpoints);
    }

    // One breadth-first augmentation placing another copy of `start`.
    // Returns false when no augmenting exchange sequence exists.
    bool augment(int start) {
        const int positions = static_cast<int>(support.size());
        std::vector<int> parent_edge(positions, -2), parent_slot(positions, -1);
        parent_edge[start] = -1;
        std::deque<int> queue{start};
        int final_pos = -1, final_slot = -1;
        while (!queue.empty() && final_pos < 0) {
            int g = queue.front();
            queue.pop_front();
            for (int j = 0; j < static_cast<int>(slots.size()) && final_pos < 0; ++j) {
                if (in_slot[j][g]) continue;
                if (slot_accepts(j, g, -1)) {
                    final_pos = g;
                    final_slot = j;
                    break;
                }
                // Scan evictable members lowest-edge-first for reproducibility.
                std::vector<int> members(slots[j]);
                std::sort(members.begin(), members.end());
                for (int f : members) {
                    if (parent_edge[f] != -2) continue;
                    if (slot_accepts(j, g, f)) {
                        parent_edge[f] = g;
                        parent_slot[f] = j;
                        queue.push_back(f);
                    }
                }
            }
        }
        if (final_pos < 0) {
            reachable.assign(positions, 0);
            for (int p = 0; p < positions; ++p) reachable[p] = parent_edge[p] != -2;
            return false;
        }
        // Unwind: insert the terminal edge, then replay the evictions.
        slots[final_slot].push_back(final_pos);
        in_slot[final_slot][final_pos] = 1;
        int walk = final_pos;
        while (parent_edge[walk] >= 0) {
            int enter = parent_edge[walk];
            int j = parent_slot[walk];
            auto& members = slots[j];
            members.erase(std::find(members.begin(), members.end(), walk));
            in_slot[j][walk] = 0;
            members.push_back(enter);
            in_slot[j][enter] = 1;
            walk = enter;
        }
        for (int j = 0; j < static_cast<int>(slots.size()); ++j)
            if (!views[slot_layer[j]].independent(slots[j], endpoints))
                throw InternalError("matroid partition: exchange left a dependent slot");
        return true;
    }

    std::vector<char> reachable;
};

}  // namespace

int rank_oracle(const Instance& inst, const NarrowCutChain& chain,
                const LayerStructure& layers, int layer, const std::vector<int>& x_edges) {
    std::vector<int> crossings(inst.edge_count(), 0);
    for (int q : layers.families[layer])
        for (int id : chain.cuts[q].edges) ++crossings[id];
    Dsu dsu(inst.n);
    int components = inst.n;
    std::vector<char> cut_met(layers.families[layer].size(), 0);
    for (int id : x_edges) {
        if (crossings[id] == 0) {
            auto [u, v] = inst.edge_vertices(id);
            if (dsu.unite(u, v)) --components;
        } else if (crossings[id] == 1 && layers.in_layer[layer][id]) {
            for (size_t j = 0; j < layers.families[layer].size(); ++j) {
                const auto& cut = chain.cuts[layers.families[layer][j]];
                if (std::binary_search(cut.edges.begin(), cut.edges.end(), id))
                    cut_met[j] = 1;
            }
        }
    }
    int met = 0;
    for (char c : cut_met) met += c;
    return inst.n - components + met;
}

MatroidPartitionResult matroid_partition(const Instance& inst, const LpSolution& xstar,
                                         const NarrowCutChain& chain,
                                         const LayerStructure& layers,
                                         int64_t lcd_cap) {
    auto lcd64 = to_int64(xstar.lcd);
    if (!lcd64 || *lcd64 > lcd_cap)
        throw LimitError("LP denominator " + xstar.lcd.get_str() +
                         " exceeds the configured cap " + std::to_string(lcd_cap));
    const int64_t scale = *lcd64;

    PartitionProblem problem{inst, xstar.support, {}, {}, {}, {}, {}, {}, {}};
    for (int id : xstar.support) problem.endpoints.push_back(inst.edge_vertices(id));
    for (int i = 0; i < layers.layer_count; ++i)
        problem.views.push_back(make_layer_view(inst, chain, layers, i, xstar.support));
    for (int i = 0; i < layers.layer_count; ++i) {
        Int count = scale_to_int(layers.zeta[i], xstar.lcd);
        auto c64 = to_int64(count);
        for (int64_t rep = 0; rep < *c64; ++rep) problem.slot_layer.push_back(i);
    }
    if (static_cast<int64_t>(problem.slot_layer.size()) != scale)
        throw InternalError("slot count must equal the common denominator");
    problem.demand.resize(problem.support.size());
    for (size_t pos = 0; pos < problem.support.size(); ++pos)
        problem.demand[pos] =
            *to_int64(scale_to_int(xstar.x[problem.support[pos]], xstar.lcd));
    problem.slots.assign(problem.slot_layer.size(), {});
    problem.in_slot.assign(problem.slot_layer.size(),
                           std::vector<char>(problem.support.size(), 0));

    for (size_t pos = 0; pos < problem.support.size(); ++pos) {
        while (problem.demand[pos] > 0) {
            if (!problem.augment(static_cast<int>(pos))) {
                MatroidPartitionResult res;
                res.success = false;
                std::vector<int> x_edges;
                for (size_t p = 0; p < problem.support.size(); ++p)
                    if (problem.reachable[p]) x_edges.push_back(problem.support[p]);
                res.violating_set = x_edges;
                res.violating_lhs = 0;
                for (int i = 0; i < layers.layer_count; ++i)
                    res.violating_lhs +=
                        layers.zeta[i] * rank_oracle(inst, chain, layers, i, x_edges);
                res.violating_rhs = 0;
                for (int id : x_edges) res.violating_rhs += xstar.x[id];
                return res;
            }
            --problem.demand[pos];
        }
    }

    MatroidPartitionResult res;
    res.success = true;
    res.slot_layer = problem.slot_layer;
    for (const auto& members : problem.slots) {
        std::vector<int> edges;
        for (int pos : members) edges.push_back(problem.support[pos]);
        std::sort(edges.begin(), edges.end());
        res.slots.push_back(std::move(edges));
    }
    return res;
}

namespace {

std::vector<int> tree_path_edges(const Instance& inst, const std::vector<int>& edges,
                                 int from, int to) {
    std::vector<std::vector<std::pair<int, int>>> adj(inst.n);
    for (int id : edges) {
        auto [u, v] = inst.edge_vertices(id);
        adj[u].emplace_back(v, id);
        adj[v].emplace_back(u, id);
    }
    std::vector<int> prev_vertex(inst.n, -1), prev_edge(inst.n, -1);
    std::deque<int> queue{from};
    prev_vertex[from] = from;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (auto [v, id] : adj[u])
            if (prev_vertex[v] < 0) {
                prev_vertex[v] = u;
                prev_edge[v] = id;
                queue.push_back(v);
            }
    }
    if (prev_vertex[to] < 0) throw InternalError("tree_path_edges: disconnected tree");
    std::vector<int> path;
    for (int v = to; v != from; v = prev_vertex[v]) path.push_back(prev_edge[v]);
    std::sort(path.begin(), path.end());
    return path;
}

void check_spanning_tree(const Instance& inst, const std::vector<int>& edges) {
    if (static_cast<int>(edges.size()) != inst.n - 1)
        throw InternalError("slot is not a spanning tree: wrong edge count");
    Dsu dsu(inst.n);
    for (int id : edges) {
        auto [u, v] = inst.edge_vertices(id);
        if (!dsu.unite(u, v)) throw InternalError("slot is not a spanning tree: cycle");
    }
}

// Shared finishing pass: path edges, identical-tree merging, stats.
TreeCombination finish_combination(const Instance& inst, std::vector<TreeEntry> entries,
                                   bool layered, int layer_count) {
    std::map<std::pair<int, std::vector<int>>, size_t> index;
    TreeCombination combo;
    combo.layered = layered;
    combo.layer_count = layer_count;
    for (TreeEntry& entry : entries) {
        auto key = std::make_pair(entry.group, entry.edges);
        auto it = index.find(key);
        if (it != index.end() &&
            combo.trees[it->second].lonely_cuts == entry.lonely_cuts) {
            combo.trees[it->second].lambda += entry.lambda;
            continue;
        }
        index.emplace(std::move(key), combo.trees.size());
        combo.trees.push_back(std::move(entry));
    }
    for (TreeEntry& entry : combo.trees) {
        entry.path_edges = tree_path_edges(inst, entry.edges, inst.s, inst.t);
        entry.lonely_edges = entry.lonely_edge_of;
        std::sort(entry.lonely_edges.begin(), entry.lonely_edges.end());
        if (std::adjacent_find(entry.lonely_edges.begin(), entry.lonely_edges.end()) !=
            entry.lonely_edges.end())
            throw InternalError("one edge is the unique tree edge of two lonely cuts");
    }
    return combo;
}

}  // namespace

CombinationStats combination_stats(const Instance& inst, const LpSolution& xstar,
                                   const NarrowCutChain& chain,
                                   const TreeCombination& combo,
                                   bool require_xq_equality) {
    CombinationStats stats;
    stats.xq.assign(chain.count(), std::vector<Rat>(inst.edge_count(), Rat(0)));
    stats.pstar.assign(inst.edge_count(), Rat(0));
    stats.qstar.assign(inst.edge_count(), Rat(0));

    Rat mass = 0;
    std::vector<Rat> recon(inst.edge_count(), Rat(0));
    for (const TreeEntry& entry : combo.trees) {
        if (entry.lambda <= 0) throw InternalError("nonpositive tree coefficient");
        mass += entry.lambda;
        for (int id : entry.edges) recon[id] += entry.lambda;
        std::vector<char> on_path(inst.edge_count(), 0);
        for (int id : entry.path_edges) {
            stats.pstar[id] += entry.lambda;
            on_path[id] = 1;
        }
        for (size_t j = 0; j < entry.lonely_cuts.size(); ++j) {
            int edge = entry.lonely_edge_of[j];
            if (!on_path[edge])
                throw InternalError("lonely edge off the tree's s-t path");
            stats.xq[entry.lonely_cuts[j]][edge] += entry.lambda;
        }
    }
    if (mass != 1) throw InternalError("tree coefficients must sum to 1");
    for (int id = 0; id < inst.edge_count(); ++id) {
        if (recon[id] != xstar.x[id])
            throw InternalError("combination does not reconstruct x* on edge " +
                                std::to_string(id));
        stats.qstar[id] = xstar.x[id] - stats.pstar[id];
        if (stats.qstar[id] < 0) throw InternalError("p* exceeds x* on an edge");
    }
    for (int q = 0; q < chain.count(); ++q) {
        Rat total = 0;
        for (int id : chain.cuts[q].edges) total += stats.xq[q][id];
        for (int id = 0; id < inst.edge_count(); ++id)
            if (stats.xq[q][id] != 0 &&
                !std::binary_search(chain.cuts[q].edges.begin(),
                                    chain.cuts[q].edges.end(), id))
                throw InternalError("x^Q has mass outside its cut");
        Rat want = 2 - chain.cuts[q].size;
        if (require_xq_equality ? total != want : total < want)
            throw InternalError("x^Q(Q) = " + rat_to_string(total) +
                                " misses 2 - x*(Q) = " + rat_to_string(want) +
                                " on cut " + std::to_string(q));
    }
    for (int id = 0; id < inst.edge_count(); ++id) {
        Rat sum = 0;
        for (int q = 0; q < chain.count(); ++q) sum += stats.xq[q][id];
        if (sum > stats.pstar[id])
            throw InternalError("sum of x^Q exceeds p* on edge " + std::to_string(id));
    }
    return stats;
}

std::pair<TreeCombination, CombinationStats> decompose_layered(
    const Instance& inst, const LpSolution& xstar, const NarrowCutChain& chain,
    const LayerStructure& layers, const DecompositionOptions& options) {
    MatroidPartitionResult part =
        matroid_partition(inst, xstar, chain, layers, options.lcd_cap);
    if (!part.success) {
        std::string edges;
        for (int id : part.violating_set) edges += " " + std::to_string(id);
        throw InternalError(
            "matroid partition infeasible (bug upstream): violating X ={" + edges +
            " }, sum zeta_i r_i(X) = " + rat_to_string(part.violating_lhs) +
            " < x*(X) = " + rat_to_string(part.violating_rhs));
    }

    Rat unit = Rat(1) / Rat(xstar.lcd);
    std::vector<TreeEntry> entries;
    for (size_t j = 0; j < part.slots.size(); ++j) {
        const int layer = part.slot_layer[j];
        check_spanning_tree(inst, part.slots[j]);
        TreeEntry entry;
        entry.edges = part.slots[j];
        entry.lambda = unit;
        entry.group = layer;
        for (int q : layers.families[layer]) {
            const NarrowCut& cut = chain.cuts[q];
            int unique_edge = -1;
            for (int id : entry.edges)
                if (std::binary_search(cut.edges.begin(), cut.edges.end(), id)) {
                    if (unique_edge >= 0)
                        throw InternalError("group-" + std::to_string(layer + 1) +
                                            " tree crosses a family cut twice");
                    unique_edge = id;
                }
            if (unique_edge < 0 || !layers.in_layer[layer][unique_edge])
                throw InternalError("family cut not crossed by a layer edge");
            entry.lonely_cuts.push_back(q);
            entry.lonely_edge_of.push_back(unique_edge);
        }
        entries.push_back(std::move(entry));
    }

    TreeCombination combo =
        finish_combination(inst, std::move(entries), true, layers.layer_count);

    // Group masses must telescope to the zeta prefix sums (groups ascending).
    Rat seen = 0;
    int prev_group = 0;
    std::vector<Rat> group_mass(layers.layer_count, Rat(0));
    for (const TreeEntry& entry : combo.trees) {
        if (entry.group < prev_group)
            throw InternalError("layered combination out of group order");
        prev_group = entry.group;
        group_mass[entry.group] += entry.lambda;
        seen += entry.lambda;
    }
    for (int i = 0; i < layers.layer_count; ++i)
        if (group_mass[i] != layers.zeta[i])
            throw InternalError("group " + std::to_string(i + 1) +
                                " mass differs from its layer weight");

    CombinationStats stats = combination_stats(inst, xstar, chain, combo, true);
    return {std::move(combo), std::move(stats)};
}

std::pair<TreeCombination, CombinationStats> decompose_generic(
    const Instance& inst, const LpSolution& xstar, const NarrowCutChain& chain,
    const DecompositionOptions& options) {
    auto lcd64 = to_int64(xstar.lcd);
    if (!lcd64 || *lcd64 > options.lcd_cap)
        throw LimitError("LP denominator exceeds the configured cap");
    const int64_t scale = *lcd64;

    // K bases of the graphic matroid of the support.
    PartitionProblem problem{inst, xstar.support, {}, {}, {}, {}, {}, {}, {}};
    for (int id : xstar.support) problem.endpoints.push_back(inst.edge_vertices(id));
    problem.views.push_back(make_graphic_view(inst, xstar.support));
    problem.slot_layer.assign(scale, 0);
    problem.demand.resize(problem.support.size());
    for (size_t pos = 0; pos < problem.support.size(); ++pos)
        problem.demand[pos] =
            *to_int64(scale_to_int(xstar.x[problem.support[pos]], xstar.lcd));
    problem.slots.assign(scale, {});
    problem.in_slot.assign(scale, std::vector<char>(problem.support.size(), 0));
    for (size_t pos = 0; pos < problem.support.size(); ++pos)
        while (problem.demand[pos] > 0) {
            if (!problem.augment(static_cast<int>(pos)))
                throw InternalError("spanning tree decomposition of x* failed");
            --problem.demand[pos];
        }

    Rat unit = Rat(1) / Rat(xstar.lcd);
    std::vector<TreeEntry> entries;
    for (const auto& members : problem.slots) {
        TreeEntry entry;
        for (int pos : members) entry.edges.push_back(problem.support[pos]);
        std::sort(entry.edges.begin(), entry.edges.end());
        check_spanning_tree(inst, entry.edges);
        entry.lambda = unit;
        entry.group = 0;
        // Lonely with equality: every narrow cut crossed exactly once.
        for (int q = 0; q < chain.count(); ++q) {
            const NarrowCut& cut = chain.cuts[q];
            int unique_edge = -1;
            int crossings = 0;
            for (int id : entry.edges)
                if (std::binary_search(cut.edges.begin(), cut.edges.end(), id)) {
                    ++crossings;
                    unique_edge = id;
                }
            if (crossings == 1) {
                entry.lonely_cuts.push_back(q);
                entry.lonely_edge_of.push_back(unique_edge);
            }
        }
        entries.push_back(std::move(entry));
    }

    // Trim per cut until Pr(Q lonely) is exactly 2 - x*(Q); trees carrying
    // excess loneliness are split so the kept mass is hit exactly.
    for (int q = 0; q < chain.count(); ++q) {
        Rat target = 2 - chain.cuts[q].size;
        Rat kept = 0;
        std::vector<TreeEntry> next;
        for (TreeEntry& entry : entries) {
            auto it = std::find(entry.lonely_cuts.begin(), entry.lonely_cuts.end(), q);
            if (it == entry.lonely_cuts.end()) {
                next.push_back(std::move(entry));
                continue;
            }
            size_t idx = it - entry.lonely_cuts.begin();
            if (kept + entry.lambda <= target) {
                kept += entry.lambda;
                next.push_back(std::move(entry));
            } else if (kept < target) {
                TreeEntry keep_part = entry;
                keep_part.lambda = target - kept;
                TreeEntry drop_part = std::move(entry);
                drop_part.lambda -= keep_part.lambda;
                drop_part.lonely_cuts.erase(drop_part.lonely_cuts.begin() + idx);
                drop_part.lonely_edge_of.erase(drop_part.lonely_edge_of.begin() + idx);
                kept = target;
                next.push_back(std::move(keep_part));
                next.push_back(std::move(drop_part));
            } else {
                entry.lonely_cuts.erase(entry.lonely_cuts.begin() + idx);
                entry.lonely_edge_of.erase(entry.lonely_edge_of.begin() + idx);
                next.push_back(std::move(entry));
            }
        }
        if (kept != target)
            throw InternalError("cannot trim cut " + std::to_string(q) +
                                " to equality: only " + rat_to_string(kept) +
                                " of " + rat_to_string(target) + " available");
        entries = std::move(next);
    }

    TreeCombination combo = finish_combination(inst, std::move(entries), false, 1);
    CombinationStats stats = combination_stats(inst, xstar, chain, combo, true);
    return {std::move(combo), std::move(stats)};
}

CutRestrictionReport verify_cut_restricted_matroid(
    const ExplicitMatroid& matroid, const std::vector<std::vector<int>>& cut_family) {
    auto to_mask = [&](const std::vector<int>& elems) {
        uint32_t mask = 0;
        for (int e : elems) {
            if (e < 0 || e >= matroid.ground_size || matroid.ground_size > 31)
                throw InternalError("verify_cut_restricted_matroid: bad element");
            mask |= 1u << e;
        }
        return mask;
    };
    std::vector<uint32_t> bases;
    for (const auto& b : matroid.bases) bases.push_back(to_mask(b));
    std::vector<uint32_t> cuts;
    for (const auto& c : cut_family) cuts.push_back(to_mask(c));

    std::vector<uint32_t> restricted;
    for (uint32_t b : bases) {
        bool ok = true;
        for (uint32_t c : cuts) ok &= __builtin_popcount(b & c) <= 1;
        if (ok) restricted.push_back(b);
    }
    CutRestrictionReport report;
    report.restricted_basis_count = static_cast<int>(restricted.size());
    if (restricted.empty())
        throw InternalError("restricted basis family is empty; the lemma needs B_C nonempty");
    std::set<uint32_t> family(restricted.begin(), restricted.end());
    for (uint32_t b1 : restricted)
        for (uint32_t b2 : restricted) {
            uint32_t fresh = b2 & ~b1;
            for (int e = 0; e < matroid.ground_size; ++e) {
                if (!(fresh >> e & 1)) continue;
                bool swapped = false;
                for (int f = 0; f < matroid.ground_size && !swapped; ++f) {
                    if (!(b1 >> f & 1)) continue;
                    uint32_t candidate = (b1 & ~(1u << f)) | (1u << e);
                    swapped = family.count(candidate) > 0;
                }
                if (!swapped) {
                    report.is_matroid = false;
                    report.failure = "no exchange for element " + std::to_string(e);
                    return report;
                }
            }
        }
    report.is_matroid = true;
    return report;
}

}  // namespace pathtsp
