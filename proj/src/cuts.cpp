#include "pathtsp/cuts.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "pathtsp/errors.hpp"
#include "pathtsp/graph.hpp"

namespace pathtsp {

namespace {

struct ScaledSupport {
    const Instance& inst;
    const LpSolution& xstar;
    bool use_int;

    ScaledSupport(const Instance& i, const LpSolution& x)
        : inst(i), xstar(x) {
        auto as64 = to_int64(x.lcd);
        use_int = as64.has_value() && *as64 <= (int64_t(1) << 40);
    }

    // Min cut between two contracted vertex sets, cut off at 2 (narrowness
    // threshold). Returns (found, side over original vertices): found only
    // when the min cut is < 2, in which case side is the inclusion-minimal
    // source side.
    std::pair<bool, std::vector<char>> narrow_cut_between(
        const std::vector<char>& src_set, const std::vector<char>& dst_set) const {
        const int n = inst.n;
        std::vector<int> node_of(n);
        int next = 2;  // 0 = source, 1 = sink
        for (int v = 0; v < n; ++v) {
            if (src_set[v])
                node_of[v] = 0;
            else if (dst_set[v])
                node_of[v] = 1;
            else
                node_of[v] = next++;
        }
        auto expand = [&](const std::vector<char>& side) {
            std::vector<char> out(n, 0);
            for (int v = 0; v < n; ++v) out[v] = side[node_of[v]];
            return out;
        };
        if (use_int) {
            FlowNetwork<int64_t> net(next);
            int64_t lcd = *to_int64(xstar.lcd);
            for (int id : xstar.support) {
                auto [u, v] = inst.edge_vertices(id);
                if (node_of[u] == node_of[v]) continue;
                net.add_undirected(node_of[u], node_of[v],
                                   *to_int64(scale_to_int(xstar.x[id], xstar.lcd)));
            }
            int64_t cutoff = 2 * lcd;
            auto res = net.max_flow(0, 1, &cutoff);
            if (res.hit_cutoff || res.flow >= cutoff) return {false, {}};
            return {true, expand(res.source_side)};
        }
        FlowNetwork<Rat> net(next);
        for (int id : xstar.support) {
            auto [u, v] = inst.edge_vertices(id);
            if (node_of[u] == node_of[v]) continue;
            net.add_undirected(node_of[u], node_of[v], xstar.x[id]);
        }
        Rat cutoff = rat(2);
        auto res = net.max_flow(0, 1, &cutoff);
        if (res.hit_cutoff || res.flow >= cutoff) return {false, {}};
        return {true, expand(res.source_side)};
    }
};

NarrowCut make_cut(const Instance& inst, const LpSolution& xstar,
                   std::vector<char> side) {
    NarrowCut cut;
    cut.side_mask = std::move(side);
    for (int v = 0; v < inst.n; ++v)
        if (cut.side_mask[v]) cut.u_side.push_back(v);
    cut.size = 0;
    for (int id : xstar.support) {
        auto [u, v] = inst.edge_vertices(id);
        if (cut.side_mask[u] != cut.side_mask[v]) {
            cut.edges.push_back(id);
            cut.size += xstar.x[id];
        }
    }
    return cut;
}

}  // namespace

NarrowCutChain find_narrow_cuts(const Instance& inst, const LpSolution& xstar) {
    const int n = inst.n;
    ScaledSupport support(inst, xstar);

    // Chain as a list of s-side masks ordered by inclusion (equivalently by
    // size of the side, since narrow cuts of a feasible vector never cross).
    std::vector<std::vector<char>> sides;
    {
        std::vector<char> only_s(n, 0);
        only_s[inst.s] = 1;
        sides.push_back(only_s);
        std::vector<char> all_but_t(n, 1);
        all_but_t[inst.t] = 0;
        if (all_but_t != only_s) sides.push_back(all_but_t);
    }

    // Refine every gap until no strictly intermediate narrow cut remains.
    size_t gap = 0;
    while (gap + 1 < sides.size()) {
        const std::vector<char>& lo = sides[gap];
        const std::vector<char>& hi = sides[gap + 1];
        std::vector<int> middle;
        for (int v = 0; v < n; ++v)
            if (!lo[v] && hi[v]) middle.push_back(v);
        bool found = false;
        if (middle.size() >= 2) {
            for (size_t vi = 0; vi < middle.size() && !found; ++vi)
                for (size_t di = 0; di < middle.size() && !found; ++di) {
                    if (vi == di) continue;
                    std::vector<char> src(lo), dst(n, 0);
                    src[middle[vi]] = 1;
                    for (int v = 0; v < n; ++v) dst[v] = !hi[v];
                    dst[middle[di]] = 1;
                    auto [ok, side] = support.narrow_cut_between(src, dst);
                    if (ok) {
                        sides.insert(sides.begin() + gap + 1, std::move(side));
                        found = true;
                    }
                }
        }
        if (!found) ++gap;
    }

    NarrowCutChain chain;
    for (auto& side : sides) chain.cuts.push_back(make_cut(inst, xstar, std::move(side)));

    // Chain sanity: strictly nested sides, all sizes in [1,2), endpoints 1.
    for (int i = 0; i < chain.count(); ++i) {
        const NarrowCut& cut = chain.cuts[i];
        if (!(cut.size >= 1 && cut.size < 2))
            throw InternalError("narrow cut with size " + rat_to_string(cut.size) +
                                " outside [1,2)");
        if (i == 0 || i + 1 == chain.count()) {
            if (cut.size != 1)
                throw InternalError("endpoint narrow cut must have size 1");
        }
        if (i > 0) {
            const NarrowCut& prev = chain.cuts[i - 1];
            bool strict = prev.u_side.size() < cut.u_side.size();
            for (int v = 0; v < n && strict; ++v)
                if (prev.side_mask[v] && !cut.side_mask[v]) strict = false;
            if (!strict)
                throw InternalError("narrow cuts do not form a chain");
        }
    }
    return chain;
}

LayerStructure build_layers(const Instance& inst, const LpSolution& xstar,
                            const NarrowCutChain& chain) {
    if (chain.count() == 0) throw InternalError("build_layers: empty chain");
    LayerStructure layers;

    std::vector<Rat> sizes;
    for (const NarrowCut& cut : chain.cuts) sizes.push_back(cut.size);
    std::sort(sizes.begin(), sizes.end(), std::greater<Rat>());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    layers.sizes = sizes;
    layers.layer_count = static_cast<int>(sizes.size());
    if (sizes.back() != 1)
        throw InternalError("smallest narrow size must be 1");

    Rat prev = 2;
    for (const Rat& size : sizes) {
        layers.zeta.push_back(prev - size);
        layers.thresholds.push_back(size);
        prev = size;
    }
    Rat zeta_sum = 0;
    for (const Rat& z : layers.zeta) zeta_sum += z;
    if (zeta_sum != 1) throw InternalError("layer weights must sum to 1");

    for (int i = 0; i < layers.layer_count; ++i) {
        std::vector<int> family;
        for (int q = 0; q < chain.count(); ++q)
            if (chain.cuts[q].size <= layers.thresholds[i]) family.push_back(q);
        layers.families.push_back(std::move(family));
    }

    for (int i = 0; i < layers.layer_count; ++i) {
        std::vector<int> crossings(inst.edge_count(), 0);
        for (int q : layers.families[i])
            for (int id : chain.cuts[q].edges) ++crossings[id];
        std::vector<int> layer_edge_list;
        std::vector<char> mask(inst.edge_count(), 0);
        for (int id : xstar.support)
            if (crossings[id] == 1) {
                layer_edge_list.push_back(id);
                mask[id] = 1;
            }
        for (int q : layers.families[i]) {
            bool meets = false;
            for (int id : chain.cuts[q].edges) meets |= (crossings[id] == 1);
            if (!meets)
                throw InternalError("layer " + std::to_string(i) +
                                    " has a family cut with no layer edge");
        }
        layers.layer_edges.push_back(std::move(layer_edge_list));
        layers.in_layer.push_back(std::move(mask));
    }

    // Level sets per layer: consecutive differences along the family chain.
    for (int i = 0; i < layers.layer_count; ++i) {
        const auto& family = layers.families[i];
        std::vector<int> level_of(inst.n, -1);
        std::vector<std::vector<int>> levels;
        int level_count = static_cast<int>(family.size()) + 1;
        for (int v = 0; v < inst.n; ++v) {
            int level = level_count - 1;
            for (size_t j = 0; j < family.size(); ++j)
                if (chain.cuts[family[j]].side_mask[v]) {
                    level = static_cast<int>(j);
                    break;
                }
            level_of[v] = level;
        }
        levels.assign(level_count, {});
        for (int v = 0; v < inst.n; ++v) levels[level_of[v]].push_back(v);
        for (int level = 0; level < level_count; ++level) {
            const auto& members = levels[level];
            if (members.empty())
                throw InternalError("empty level set in layer " + std::to_string(i));
            Dsu dsu(inst.n);
            for (int id : xstar.support) {
                auto [u, v] = inst.edge_vertices(id);
                if (level_of[u] == level && level_of[v] == level) dsu.unite(u, v);
            }
            for (int v : members)
                if (dsu.find(v) != dsu.find(members[0]))
                    throw InternalError("level set does not induce a connected subgraph");
        }
        layers.levels.push_back(std::move(levels));
        layers.level_of.push_back(std::move(level_of));
    }
    return layers;
}

IdentityReport check_submodular_identity(const Instance& inst, const LpSolution& xstar,
                                         const std::vector<char>& a,
                                         const std::vector<char>& b) {
    Rat lhs = xstar.cut_value(inst, a) + xstar.cut_value(inst, b);
    std::vector<char> inter(inst.n, 0), uni(inst.n, 0);
    for (int v = 0; v < inst.n; ++v) {
        inter[v] = a[v] && b[v];
        uni[v] = a[v] || b[v];
    }
    Rat crossing = 0;
    for (int id : xstar.support) {
        auto [u, v] = inst.edge_vertices(id);
        bool u_in_amb = a[u] && !b[u], v_in_amb = a[v] && !b[v];
        bool u_in_bma = b[u] && !a[u], v_in_bma = b[v] && !a[v];
        if ((u_in_amb && v_in_bma) || (u_in_bma && v_in_amb)) crossing += xstar.x[id];
    }
    Rat rhs = xstar.cut_value(inst, inter) + xstar.cut_value(inst, uni) + 2 * crossing;
    return {lhs, rhs};
}

std::pair<Rat, Rat> intersection_bound(const LpSolution& xstar,
                                       const NarrowCutChain& chain, int q1, int q2) {
    if (q1 == q2) throw InternalError("intersection_bound needs distinct cuts");
    const NarrowCut& a = chain.cuts[q1];
    const NarrowCut& b = chain.cuts[q2];
    std::vector<char> in_b(xstar.x.size(), 0);
    for (int id : b.edges) in_b[id] = 1;
    Rat lhs = 0;
    for (int id : a.edges)
        if (in_b[id]) lhs += xstar.x[id];
    Rat rhs = (a.size + b.size) / 2 - 1;
    return {lhs, rhs};
}

}  // namespace pathtsp
