#include "pathtsp/bomd.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "pathtsp/errors.hpp"
#include "pathtsp/graph.hpp"

namespace pathtsp {

std::vector<int> shortcut(const Instance& inst, const std::vector<int>& edges,
                          int s, int t) {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(edges.size());
    for (int id : edges) pairs.push_back(inst.edge_vertices(id));
    std::vector<int> walk = euler_walk(inst.n, pairs, s, t);
    std::vector<char> seen(inst.n, 0);
    std::vector<int> path;
    for (int v : walk) {
        if (v == t || seen[v]) continue;
        seen[v] = 1;
        path.push_back(v);
    }
    path.push_back(t);
    if (static_cast<int>(path.size()) != inst.n)
        throw InternalError("shortcut: walk does not visit every vertex");
    return path;
}

StTour make_st_tour(const Instance& inst, std::vector<int> edges) {
    StTour tour;
    tour.edges = std::move(edges);
    std::sort(tour.edges.begin(), tour.edges.end());
    tour.multigraph_cost = 0;
    Dsu dsu(inst.n);
    std::vector<int> degree(inst.n, 0);
    for (int id : tour.edges) {
        tour.multigraph_cost += inst.edge_cost(id);
        auto [u, v] = inst.edge_vertices(id);
        dsu.unite(u, v);
        ++degree[u];
        ++degree[v];
    }
    for (int v = 0; v < inst.n; ++v) {
        bool expect_odd = (v == inst.s) != (v == inst.t);
        if ((degree[v] % 2 == 1) != expect_odd)
            throw InternalError("s-t tour parity audit failed at vertex " +
                                std::to_string(v));
        if (dsu.find(v) != dsu.find(inst.s))
            throw InternalError("s-t tour is not connected");
    }
    tour.path = shortcut(inst, tour.edges, inst.s, inst.t);
    tour.path_cost = 0;
    for (size_t i = 0; i + 1 < tour.path.size(); ++i)
        tour.path_cost += inst.cost(tour.path[i], tour.path[i + 1]);
    if (tour.path_cost > tour.multigraph_cost)
        throw InternalError("shortcutting increased the cost");
    return tour;
}

StTour forest_tour(const Instance& inst, const TreeEntry& tree, const Join& join) {
    std::vector<int> edges = tree.forest_edges();
    edges.insert(edges.end(), join.edges.begin(), join.edges.end());
    Dsu dsu(inst.n);
    for (int id : edges) {
        auto [u, v] = inst.edge_vertices(id);
        dsu.unite(u, v);
    }
    std::vector<int> component_of(inst.n);
    std::vector<int> label(inst.n, -1);
    int comp_count = 0;
    for (int v = 0; v < inst.n; ++v) {
        int root = dsu.find(v);
        if (label[root] < 0) label[root] = comp_count++;
        component_of[v] = label[root];
    }
    for (int id : doubled_mst(inst, component_of)) {
        edges.push_back(id);
        edges.push_back(id);
    }
    return make_st_tour(inst, std::move(edges));
}

StTour christofides_tour(const Instance& inst, const TreeEntry& tree, const Join& join) {
    std::vector<int> edges = tree.edges;
    edges.insert(edges.end(), join.edges.begin(), join.edges.end());
    return make_st_tour(inst, std::move(edges));
}

namespace {

Rat price(const std::vector<Rat>& costs, const std::vector<int>& edges) {
    Rat total = 0;
    for (int id : edges) total += costs[id];
    return total;
}

Rat price_vector(const std::vector<Rat>& costs, const std::vector<Rat>& vec) {
    Rat total = 0;
    for (size_t i = 0; i < vec.size(); ++i)
        if (vec[i] != 0) total += costs[i] * vec[i];
    return total;
}

}  // namespace

TreeRun run_tree(const Instance& inst, const LpSolution& xstar, const NarrowCutChain& chain,
                 const CombinationStats& stats, const TreeCombination& combo,
                 int tree_index, const RunOptions& options) {
    const TreeEntry& tree = combo.trees[tree_index];
    TreeRun run;
    run.tree_index = tree_index;
    run.c_tree = price(inst.costs, tree.edges);
    std::vector<int> forest = tree.forest_edges();
    run.c_forest = price(inst.costs, forest);

    run.bad = bad_edges(inst, xstar, chain, tree);
    run.cprime = modified_costs(inst, chain, tree, run.bad, DropRule::MostExpensive);

    // The forest join must stay inside the LP support: there every edge in
    // two or more lonely cuts is a bad edge and carries its reconnection
    // surcharge, which is what the P1 price bound rests on.
    std::vector<int> parity_forest = wrong_parity_set(inst, forest);
    std::vector<std::optional<Rat>> support_cprime(inst.edge_count());
    for (int id : xstar.support) support_cprime[id] = run.cprime[id];
    run.join_forest = min_tjoin(inst.n, support_cprime, parity_forest,
                                options.matching_cap);
    run.cprime_join_forest = run.join_forest.cost;
    run.c_join_forest = price(inst.costs, run.join_forest.edges);
    run.forest_based = forest_tour(inst, tree, run.join_forest);

    std::vector<int> parity_tree = wrong_parity_set(inst, tree.edges);
    run.join_tree = min_tjoin_complete(inst, inst.costs, parity_tree, options.matching_cap);
    run.christofides = christofides_tour(inst, tree, run.join_tree);

    // The off-path part of the tree is itself a valid parity fix, so the
    // minimum join can never cost more.
    {
        Rat off_path = run.c_tree - price(inst.costs, tree.path_edges);
        if (run.join_tree.cost > off_path)
            throw InternalError("tree join beats its off-path bound");
    }

    run.yf = build_yf(inst, xstar, chain, stats, tree, options.gamma);
    std::vector<Rat> y_total = run.yf.total();
    run.c_yf = price_vector(inst.costs, y_total);
    run.cprime_yf = price_vector(run.cprime, y_total);

    if (auto violation = check_tjoin_polyhedron(inst.n, y_total, parity_forest)) {
        throw InternalError("parity correction vector leaves an odd cut short: weight " +
                            rat_to_string(violation->weight) + " on tree " +
                            std::to_string(tree_index));
    }
    run.yf_in_polyhedron = true;

    // Only basic parity correction may touch bad edges, and there it is
    // exactly x*(b)/2 (bad edges are never tree edges).
    std::vector<char> in_tree(inst.edge_count(), 0);
    for (int id : tree.edges) in_tree[id] = 1;
    for (int b : run.bad.bad_edges) {
        if (in_tree[b]) throw InternalError("bad edge inside its own tree");
        if (run.yf.empty_cut[b] != 0 || run.yf.even_cut[b] != 0)
            throw InternalError("parity completion puts mass on a bad edge");
        if (run.yf.basic[b] != xstar.x[b] / 2)
            throw InternalError("basic parity correction differs from x*/2 on a bad edge");
    }
    if (auto offender = completion_mass_on_bad_edges(chain, stats, tree, run.bad))
        throw InternalError("x^Q mass on a bad edge for a non-lonely cut (cut " +
                            std::to_string(offender->first) + ", edge " +
                            std::to_string(offender->second) + ")");
    run.completion_avoids_bad = true;

    // Deterministic reconnection bound: the surcharge y_F pays on bad edges
    // is covered by the per-cut allowance (x*(Q)-1) c(e_S^Q).
    run.surcharge_lhs = 0;
    for (size_t i = 0; i < run.bad.bad_edges.size(); ++i) {
        int b = run.bad.bad_edges[i];
        Rat total = 0, biggest = 0;
        for (int j : run.bad.cuts_of[i]) {
            Rat twice = 2 * inst.edge_cost(tree.lonely_edge_of[j]);
            total += twice;
            biggest = std::max(biggest, twice);
        }
        run.surcharge_lhs += y_total[b] * (total - biggest);
    }
    run.surcharge_rhs = 0;
    for (size_t j = 0; j < tree.lonely_cuts.size(); ++j)
        run.surcharge_rhs += (chain.cuts[tree.lonely_cuts[j]].size - 1) *
                             inst.edge_cost(tree.lonely_edge_of[j]);
    if (run.surcharge_lhs > run.surcharge_rhs)
        throw InternalError("reconnection surcharge exceeds its allowance on tree " +
                            std::to_string(tree_index));

    run.plan = solve_reconnection_lp(inst, xstar, tree, run.bad);
    if (!run.plan.feasible)
        throw InternalError("reconnection probabilities infeasible on tree " +
                            std::to_string(tree_index) + ": " + run.plan.infeasibility);
    run.plan_feasible = true;
    // Per-cut drop bound implied by (D2).
    for (size_t j = 0; j < tree.lonely_cuts.size(); ++j) {
        Rat lhs = 0;
        for (size_t i = 0; i < run.bad.bad_edges.size(); ++i) {
            bool holds = std::find(run.bad.cuts_of[i].begin(), run.bad.cuts_of[i].end(),
                                   static_cast<int>(j)) != run.bad.cuts_of[i].end();
            if (!holds) continue;
            Rat prob = 0;
            for (const auto& [cut, value] : run.plan.prob[i])
                if (cut == static_cast<int>(j)) prob = value;
            lhs += xstar.x[run.bad.bad_edges[i]] / 2 * (1 - prob);
        }
        Rat rhs = (chain.cuts[tree.lonely_cuts[j]].size - 1) / 2;
        if (lhs > rhs)
            throw InternalError("plan violates the per-cut reconnection bound");
    }

    run.kh = check_kh_condition(inst, xstar, chain, tree, run.bad, options.kh_cap);
    if (!run.kh.claim1_ok || !run.kh.claim2_ok)
        throw InternalError("subset-enumeration feasibility condition failed on tree " +
                            std::to_string(tree_index));
    run.kh_passed = true;

    // Forest-based tour never beats its own price decomposition:
    // c(P1) <= c(F) + c'(J*_F) <= c(F) + c'(y_F).
    if (run.forest_based.multigraph_cost > run.c_forest + run.cprime_join_forest)
        throw InternalError("P1 exceeds c(F) + c'(J*) on tree " + std::to_string(tree_index));
    if (run.cprime_join_forest > run.cprime_yf)
        throw InternalError("minimum c'-join exceeds c'(y_F) on tree " +
                            std::to_string(tree_index));
    if (run.bad.bad_edges.empty() &&
        run.forest_based.multigraph_cost != run.c_forest + run.c_join_forest)
        throw InternalError("bad-edge-free join still required reconnection");
    return run;
}

PipelineResult run_bomd(const Instance& inst, const RunOptions& options) {
    if (options.gamma < 0 || options.gamma > rat(1, 2))
        throw ParseError("gamma must lie in [0, 1/2]");
    inst.validate();
    PipelineResult result;
    result.inst = inst;
    result.gamma = options.gamma;
    result.xstar = solve_subtour_lp(inst);
    result.chain = find_narrow_cuts(inst, result.xstar);
    result.layers = build_layers(inst, result.xstar, result.chain);
    DecompositionOptions dopt;
    dopt.lcd_cap = options.lcd_cap;
    auto [combo, stats] =
        decompose_layered(inst, result.xstar, result.chain, result.layers, dopt);
    result.combo = std::move(combo);
    result.stats = std::move(stats);

    const int tree_count = static_cast<int>(result.combo.trees.size());
    result.runs.resize(tree_count);
    int threads = std::max(1, options.threads);
    if (threads <= 1 || tree_count <= 1) {
        for (int i = 0; i < tree_count; ++i)
            result.runs[i] = run_tree(inst, result.xstar, result.chain, result.stats,
                                      result.combo, i, options);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> cursor{0};
        std::vector<std::exception_ptr> errors(threads);
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                try {
                    while (true) {
                        int i = cursor.fetch_add(1);
                        if (i >= tree_count) break;
                        result.runs[i] = run_tree(inst, result.xstar, result.chain,
                                                  result.stats, result.combo, i, options);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& err : errors)
            if (err) std::rethrow_exception(err);
    }

    result.best_tree = -1;
    for (int i = 0; i < tree_count; ++i) {
        const TreeRun& run = result.runs[i];
        auto offer = [&](const StTour& tour, bool forest_based) {
            if (result.best_tree < 0 || tour.multigraph_cost < result.best.multigraph_cost) {
                result.best = tour;
                result.best_tree = i;
                result.best_is_forest_based = forest_based;
            }
        };
        offer(run.forest_based, true);
        offer(run.christofides, false);
    }
    return result;
}

StTour hoogeveen_baseline(const Instance& inst, int matching_cap) {
    std::vector<int> ids(inst.edge_count());
    for (int i = 0; i < inst.edge_count(); ++i) ids[i] = i;
    std::sort(ids.begin(), ids.end(), [&inst](int a, int b) {
        if (inst.edge_cost(a) != inst.edge_cost(b))
            return inst.edge_cost(a) < inst.edge_cost(b);
        return a < b;
    });
    Dsu dsu(inst.n);
    std::vector<int> tree;
    for (int id : ids) {
        auto [u, v] = inst.edge_vertices(id);
        if (dsu.unite(u, v)) tree.push_back(id);
    }
    Join join = min_tjoin_complete(inst, inst.costs, wrong_parity_set(inst, tree),
                                   matching_cap);
    std::vector<int> edges = tree;
    edges.insert(edges.end(), join.edges.begin(), join.edges.end());
    return make_st_tour(inst, std::move(edges));
}

}  // namespace pathtsp
