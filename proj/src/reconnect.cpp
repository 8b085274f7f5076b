#include "pathtsp/reconnect.hpp"

#include <algorithm>
#include <map>

#include "pathtsp/errors.hpp"
#include "pathtsp/graph.hpp"
#include "pathtsp/lp.hpp"

namespace pathtsp {

BadEdgeIndex bad_edges(const Instance& inst, const LpSolution& xstar,
                       const NarrowCutChain& chain, const TreeEntry& tree) {
    BadEdgeIndex index;
    const int m = static_cast<int>(tree.lonely_cuts.size());
    std::vector<std::vector<int>> holding(inst.edge_count());
    for (int j = 0; j < m; ++j)
        for (int id : chain.cuts[tree.lonely_cuts[j]].edges) holding[id].push_back(j);
    std::vector<char> is_bad(inst.edge_count(), 0);
    for (int id : xstar.support)
        if (holding[id].size() >= 2) {
            is_bad[id] = 1;
            index.bad_edges.push_back(id);
            index.cuts_of.push_back(holding[id]);
        }
    for (int j = 0; j < m; ++j) {
        Rat outside = 0;
        for (int id : chain.cuts[tree.lonely_cuts[j]].edges)
            if (!is_bad[id]) outside += xstar.x[id];
        index.r.push_back(1 - outside);
    }
    return index;
}

std::vector<Rat> modified_costs(const Instance& inst, const NarrowCutChain& chain,
                                const TreeEntry& tree, const BadEdgeIndex& bad,
                                DropRule rule) {
    (void)chain;
    std::vector<Rat> cprime(inst.costs);
    for (size_t i = 0; i < bad.bad_edges.size(); ++i) {
        Rat total = 0, dropped;
        bool first = true;
        for (int j : bad.cuts_of[i]) {  // positions in chain order
            Rat twice = 2 * inst.edge_cost(tree.lonely_edge_of[j]);
            total += twice;
            if (rule == DropRule::MostExpensive) {
                if (first || twice > dropped) dropped = twice;
            } else if (first) {
                dropped = twice;  // leftmost crossed cut
            }
            first = false;
        }
        cprime[bad.bad_edges[i]] += total - dropped;
    }
    return cprime;
}

std::vector<int> doubled_mst(const Instance& inst, const std::vector<int>& component_of) {
    int comp_count = 0;
    for (int c : component_of) comp_count = std::max(comp_count, c + 1);
    if (comp_count <= 1) return {};
    // Cheapest connecting pair per component pair, ties toward the smaller id.
    std::map<std::pair<int, int>, int> cheapest;
    for (int id = 0; id < inst.edge_count(); ++id) {
        auto [u, v] = inst.edge_vertices(id);
        int a = component_of[u], b = component_of[v];
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        auto it = cheapest.find({a, b});
        if (it == cheapest.end() || inst.edge_cost(id) < inst.edge_cost(it->second))
            cheapest[{a, b}] = id;
    }
    std::vector<std::pair<std::pair<int, int>, int>> candidates(cheapest.begin(),
                                                                cheapest.end());
    std::sort(candidates.begin(), candidates.end(),
              [&inst](const auto& lhs, const auto& rhs) {
                  if (inst.edge_cost(lhs.second) != inst.edge_cost(rhs.second))
                      return inst.edge_cost(lhs.second) < inst.edge_cost(rhs.second);
                  return lhs.second < rhs.second;
              });
    Dsu dsu(comp_count);
    std::vector<int> chosen;
    for (const auto& [pair, id] : candidates)
        if (dsu.unite(pair.first, pair.second)) chosen.push_back(id);
    if (static_cast<int>(chosen.size()) != comp_count - 1)
        throw InternalError("doubled_mst: contracted graph is disconnected");
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

ReconnectionPlan solve_reconnection_lp(const Instance& inst, const LpSolution& xstar,
                                       const TreeEntry& tree, const BadEdgeIndex& bad) {
    (void)inst;
    const int m = static_cast<int>(tree.lonely_cuts.size());
    LpModel model;
    // One variable per (bad edge, lonely cut holding it).
    std::vector<std::vector<int>> var(bad.bad_edges.size());
    for (size_t i = 0; i < bad.bad_edges.size(); ++i)
        for (size_t k = 0; k < bad.cuts_of[i].size(); ++k) {
            (void)k;
            var[i].push_back(model.add_var());
        }
    for (size_t i = 0; i < bad.bad_edges.size(); ++i) {
        std::vector<std::pair<int, Rat>> row;
        for (int v : var[i]) row.emplace_back(v, rat(1));
        model.add_row(std::move(row), Rel::Le, rat(1));
    }
    for (int j = 0; j < m; ++j) {
        std::vector<std::pair<int, Rat>> row;
        for (size_t i = 0; i < bad.bad_edges.size(); ++i)
            for (size_t k = 0; k < bad.cuts_of[i].size(); ++k)
                if (bad.cuts_of[i][k] == j)
                    row.emplace_back(var[i][k], xstar.x[bad.bad_edges[i]]);
        model.add_row(std::move(row), Rel::Ge, bad.r[j]);
    }
    LpOutcome out = solve_lp(model);
    ReconnectionPlan plan;
    if (out.status != LpStatus::Optimal) {
        plan.feasible = false;
        plan.infeasibility = "reconnection system infeasible for this tree";
        return plan;
    }
    plan.feasible = true;
    plan.prob.resize(bad.bad_edges.size());
    for (size_t i = 0; i < bad.bad_edges.size(); ++i)
        for (size_t k = 0; k < bad.cuts_of[i].size(); ++k)
            if (out.values[var[i][k]] != 0)
                plan.prob[i].emplace_back(bad.cuts_of[i][k], out.values[var[i][k]]);
    return plan;
}

KhReport check_kh_condition(const Instance& inst, const LpSolution& xstar,
                            const NarrowCutChain& chain, const TreeEntry& tree,
                            const BadEdgeIndex& bad, int cap) {
    KhReport report;
    const int m = static_cast<int>(tree.lonely_cuts.size());
    if (m == 0) return report;

    // Everything compared is a multiple of 1/K, so the scan runs on scaled
    // 64-bit integers: nu(e) = K x*(e), r scaled likewise.
    auto lcd64 = to_int64(xstar.lcd);
    if (!lcd64) throw LimitError("check_kh_condition: denominator too large");
    const int64_t scale = *lcd64;
    const int support_size = static_cast<int>(xstar.support.size());
    const int words = (support_size + 63) / 64;
    std::vector<int64_t> nu(support_size);
    std::vector<int> pos_of(inst.edge_count(), -1);
    for (int p = 0; p < support_size; ++p) {
        pos_of[xstar.support[p]] = p;
        nu[p] = *to_int64(scale_to_int(xstar.x[xstar.support[p]], xstar.lcd));
    }
    std::vector<char> is_bad(inst.edge_count(), 0);
    for (int id : bad.bad_edges) is_bad[id] = 1;

    std::vector<std::vector<uint64_t>> cut_mask(m, std::vector<uint64_t>(words, 0));
    std::vector<std::vector<uint64_t>> cut_bad_mask(m, std::vector<uint64_t>(words, 0));
    std::vector<int64_t> r_scaled(m);
    for (int j = 0; j < m; ++j) {
        r_scaled[j] = *to_int64(scale_to_int(bad.r[j], xstar.lcd));
        for (int id : chain.cuts[tree.lonely_cuts[j]].edges) {
            int p = pos_of[id];
            cut_mask[j][p / 64] |= uint64_t(1) << (p % 64);
            if (is_bad[id]) cut_bad_mask[j][p / 64] |= uint64_t(1) << (p % 64);
        }
    }

    auto mask_value = [&](const std::vector<uint64_t>& mask) {
        int64_t total = 0;
        for (int w = 0; w < words; ++w) {
            uint64_t bits = mask[w];
            while (bits) {
                int b = __builtin_ctzll(bits);
                bits &= bits - 1;
                total += nu[w * 64 + b];
            }
        }
        return total;
    };

    auto check_subset = [&](const std::vector<int>& positions) {
        std::vector<uint64_t> uni(words, 0), uni_bad(words, 0);
        int64_t r_sum = 0;
        for (int j : positions) {
            r_sum += r_scaled[j];
            for (int w = 0; w < words; ++w) {
                uni[w] |= cut_mask[j][w];
                uni_bad[w] |= cut_bad_mask[j][w];
            }
        }
        if (r_sum > mask_value(uni_bad)) {
            report.claim1_ok = false;
            report.violating_positions = positions;
            return false;
        }
        if (mask_value(uni) < scale * static_cast<int64_t>(positions.size())) {
            report.claim2_ok = false;
            report.violating_positions = positions;
            return false;
        }
        return true;
    };

    if (m <= cap) {
        for (uint64_t st = 1; st < (uint64_t(1) << m); ++st) {
            std::vector<int> positions;
            for (int j = 0; j < m; ++j)
                if (st >> j & 1) positions.push_back(j);
            if (!check_subset(positions)) return report;
        }
    } else {
        report.complete = false;
        for (int a = 0; a < m; ++a) {
            if (!check_subset({a})) return report;
            for (int b = a + 1; b < m; ++b)
                if (!check_subset({a, b})) return report;
        }
    }
    return report;
}

std::optional<std::pair<int, int>> completion_mass_on_bad_edges(
    const NarrowCutChain& chain, const CombinationStats& stats, const TreeEntry& tree,
    const BadEdgeIndex& bad) {
    std::vector<char> lonely(chain.count(), 0);
    for (int q : tree.lonely_cuts) lonely[q] = 1;
    for (int q = 0; q < chain.count(); ++q) {
        if (lonely[q]) continue;
        for (int id : bad.bad_edges)
            if (stats.xq[q][id] != 0) return std::make_pair(q, id);
    }
    return std::nullopt;
}

}  // namespace pathtsp
