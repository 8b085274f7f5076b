#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "pathtsp/errors.hpp"
#include "pathtsp/graph.hpp"
#include "pathtsp/joins.hpp"
#include "pathtsp/reconnect.hpp"
#include "pathtsp/treedecomp.hpp"

using namespace pathtsp;
using namespace pathtsp::testing;

namespace {

struct FixtureRun {
    Fixture fixture;
    NarrowCutChain chain;
    LayerStructure layers;
    TreeCombination combo;
    CombinationStats stats;
};

FixtureRun fixture_run() {
    FixtureRun run{make_fixture(), {}, {}, {}, {}};
    run.chain = find_narrow_cuts(run.fixture.inst, run.fixture.xstar);
    run.layers = build_layers(run.fixture.inst, run.fixture.xstar, run.chain);
    auto [combo, stats] =
        decompose_layered(run.fixture.inst, run.fixture.xstar, run.chain, run.layers);
    run.combo = std::move(combo);
    run.stats = std::move(stats);
    return run;
}

const TreeEntry& group_one_tree(const FixtureRun& run) {
    for (const TreeEntry& tree : run.combo.trees)
        if (tree.group == 0) return tree;
    throw std::logic_error("no group-1 tree");
}

}  // namespace

TEST_CASE("odd_vertices basics") {
    Fixture fixture = make_fixture();
    const Instance& inst = fixture.inst;
    CHECK(odd_vertices(inst, {inst.edge_id(2, 5)}) == std::vector<int>{2, 5});
    // A triangle has no odd vertex.
    std::vector<int> cycle{inst.edge_id(1, 2), inst.edge_id(2, 4), inst.edge_id(1, 4)};
    CHECK(odd_vertices(inst, cycle).empty());
    // The all-cuts tree of the worked example is an s-t path plus one branch
    // vertex pair.
    auto tree = edge_list(inst, fixture_layered_trees()[0]);
    CHECK(odd_vertices(inst, tree) == std::vector<int>{0, 3, 4, 7});
}

TEST_CASE("min_tjoin: empty set and forced pair") {
    Instance inst;
    inst.n = 3;
    inst.s = 0;
    inst.t = 2;
    inst.costs = {rat(1), rat(3), rat(2)};  // (0,1), (0,2), (1,2)
    inst.validate();
    Join empty = min_tjoin_complete(inst, inst.costs, {});
    CHECK(empty.edges.empty());
    CHECK(empty.cost == 0);
    Join pair = min_tjoin_complete(inst, inst.costs, {0, 1});
    CHECK(pair.edges == std::vector<int>{inst.edge_id(0, 1)});
    CHECK(pair.cost == 1);
    CHECK_THROWS_AS(min_tjoin_complete(inst, inst.costs, {0}), InternalError);
}

TEST_CASE("min_tjoin: matches exhaustive enumeration on random graphs") {
    TestRng rng(2025);
    int checked = 0;
    while (checked < 12) {
        int n = 5 + static_cast<int>(rng.below(3));
        std::vector<std::pair<int, int>> edges;
        std::vector<Rat> weights;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (rng.below(10) < 6) {
                    edges.emplace_back(u, v);
                    weights.push_back(rat(1 + static_cast<long>(rng.below(9))));
                }
        if (edges.size() > 16) continue;
        // Connected?
        Dsu dsu(n);
        for (auto [u, v] : edges) dsu.unite(u, v);
        bool connected = true;
        for (int v = 1; v < n; ++v) connected &= dsu.find(v) == dsu.find(0);
        if (!connected) continue;
        std::vector<int> parity;
        int want = 2 + 2 * static_cast<int>(rng.below(2));
        for (int k = 0; k < want;) {
            int v = static_cast<int>(rng.below(n));
            if (std::find(parity.begin(), parity.end(), v) == parity.end()) {
                parity.push_back(v);
                ++k;
            }
        }
        std::sort(parity.begin(), parity.end());
        std::vector<std::optional<Rat>> table(n * (n - 1) / 2);
        auto pack = [n](int u, int v) {
            if (u > v) std::swap(u, v);
            return u * (2 * n - u - 1) / 2 + (v - u - 1);
        };
        for (size_t e = 0; e < edges.size(); ++e)
            table[pack(edges[e].first, edges[e].second)] = weights[e];
        Join join = min_tjoin(n, table, parity);
        auto brute = brute_min_tjoin(n, edges, weights, parity);
        REQUIRE(brute.has_value());
        CHECK(join.cost == *brute);
        // The returned edge set is itself a T-join of that cost.
        std::vector<int> degree(n, 0);
        Rat total = 0;
        for (int id : join.edges) {
            REQUIRE(table[id].has_value());
            total += *table[id];
            int u = 0, row = n - 1, rem = id;
            while (rem >= row) {
                rem -= row;
                --row;
                ++u;
            }
            ++degree[u];
            ++degree[u + 1 + rem];
        }
        CHECK(total == join.cost);
        for (int v = 0; v < n; ++v)
            CHECK((degree[v] % 2 == 1) ==
                  std::binary_search(parity.begin(), parity.end(), v));
        ++checked;
    }
}

TEST_CASE("build_yf: gamma = 1/2 leaves no completion terms") {
    auto run = fixture_run();
    for (const TreeEntry& tree : run.combo.trees) {
        auto y = build_yf(run.fixture.inst, run.fixture.xstar, run.chain, run.stats,
                          tree, rat(1, 2));
        for (int id = 0; id < run.fixture.inst.edge_count(); ++id) {
            CHECK(y.empty_cut[id] == 0);
            CHECK(y.even_cut[id] == 0);
        }
        // Basic part is x*/2 + path/2.
        for (int id : tree.path_edges)
            CHECK(y.basic[id] == run.fixture.xstar.x[id] / 2 + rat(1, 2));
    }
}

TEST_CASE("build_yf: known coefficient on the all-cuts tree at gamma = 1/16") {
    auto run = fixture_run();
    const TreeEntry& tree = group_one_tree(run);
    auto y = build_yf(run.fixture.inst, run.fixture.xstar, run.chain, run.stats, tree,
                      rat(1, 16));
    // Each 5/3-cut contributes 1 - 5/6 - 1/16 = 5/48 on its lonely edge.
    for (size_t j = 0; j < tree.lonely_cuts.size(); ++j) {
        const NarrowCut& cut = run.chain.cuts[tree.lonely_cuts[j]];
        Rat expected = cut.size == rat(5, 3) ? rat(5, 48) : rat(1, 2) - rat(1, 16);
        CHECK(y.empty_cut[tree.lonely_edge_of[j]] == expected);
    }
    CHECK_THROWS_AS(build_yf(run.fixture.inst, run.fixture.xstar, run.chain, run.stats,
                             tree, rat(3, 4)),
                    ParseError);
}

TEST_CASE("check_tjoin_polyhedron: classical membership and zero vector") {
    auto run = fixture_run();
    const Instance& inst = run.fixture.inst;
    for (const TreeEntry& tree : run.combo.trees) {
        // x*/2 + path/2 is in the join polyhedron for any even parity set.
        std::vector<Rat> y(inst.edge_count(), Rat(0));
        for (int id : run.fixture.xstar.support) y[id] = run.fixture.xstar.x[id] / 2;
        for (int id : tree.path_edges) y[id] += rat(1, 2);
        auto parity = wrong_parity_set(inst, tree.edges);
        CHECK(!check_tjoin_polyhedron(inst.n, y, parity).has_value());
    }
    std::vector<Rat> zero(inst.edge_count(), Rat(0));
    auto violation = check_tjoin_polyhedron(inst.n, zero, {0, 7});
    REQUIRE(violation.has_value());
    CHECK(violation->weight == 0);
}

TEST_CASE("y_F polyhedron membership at gamma = 1/16 across instances") {
    auto run = fixture_run();
    for (const TreeEntry& tree : run.combo.trees) {
        auto y = build_yf(run.fixture.inst, run.fixture.xstar, run.chain, run.stats,
                          tree, rat(1, 16));
        auto parity = wrong_parity_set(run.fixture.inst, tree.forest_edges());
        CHECK(!check_tjoin_polyhedron(run.fixture.inst.n, y.total(), parity).has_value());
    }
    for (uint64_t seed = 1; seed <= 6; ++seed) {
        Instance inst = gen_random_metric(6 + seed % 3, seed, GenKind::Euclidean);
        LpSolution sol = solve_subtour_lp(inst);
        NarrowCutChain chain = find_narrow_cuts(inst, sol);
        LayerStructure layers = build_layers(inst, sol, chain);
        auto [combo, stats] = decompose_layered(inst, sol, chain, layers);
        for (const TreeEntry& tree : combo.trees) {
            auto y = build_yf(inst, sol, chain, stats, tree, rat(1, 16));
            auto parity = wrong_parity_set(inst, tree.forest_edges());
            CHECK(!check_tjoin_polyhedron(inst.n, y.total(), parity).has_value());
        }
    }
}

TEST_CASE("bad_edges: the all-cuts tree has the known bad set") {
    auto run = fixture_run();
    const Instance& inst = run.fixture.inst;
    const TreeEntry& tree = group_one_tree(run);
    BadEdgeIndex bad = bad_edges(inst, run.fixture.xstar, run.chain, tree);
    CHECK(bad.bad_edges ==
          edge_list(inst, {{0, 3}, {1, 3}, {2, 5}, {2, 7}, {3, 6}}));
    // r for the endpoint cuts: 1 - x*(Q \ B) with the non-bad edge mass.
    // Q_1 = {01, 03}: bad part {03}, so r = 1 - 2/3 = 1/3.
    CHECK(bad.r[0] == rat(1, 3));

    // Trees whose lonely cuts are disjoint have no bad edges.
    for (const TreeEntry& other : run.combo.trees) {
        if (other.group == 0) continue;
        BadEdgeIndex none = bad_edges(inst, run.fixture.xstar, run.chain, other);
        CHECK(none.bad_edges.empty());
    }
}

TEST_CASE("modified_costs: displayed formula on fabricated bad edges") {
    // A bad edge in two lonely cuts whose lonely edges cost 2 and 5, with
    // c(b) = 1: c'(b) = 1 + (4 + 10) - 10 = 5.
    std::istringstream doc(R"({"n":4,"s":0,"t":3,
        "costs":[[0,1,2],[1,2,5],[2,3,1],[0,2,7],[1,3,6],[0,3,8]]})");
    Instance inst = load_instance(doc, InstanceFormat::Json);
    TreeEntry tree;
    tree.lonely_cuts = {0, 1};
    tree.lonely_edge_of = {inst.edge_id(0, 1), inst.edge_id(1, 2)};  // costs 2, 5
    BadEdgeIndex bad;
    bad.bad_edges = {inst.edge_id(2, 3)};  // cost 1, cast as the bad edge
    bad.cuts_of = {{0, 1}};
    auto cprime = modified_costs(inst, NarrowCutChain{}, tree, bad);
    CHECK(cprime[inst.edge_id(2, 3)] == 5);
    // Everything off B(S) keeps its metric cost.
    CHECK(cprime[inst.edge_id(0, 2)] == 7);
    CHECK(cprime[inst.edge_id(0, 1)] == 2);
    // The leftmost rule drops the first cut's lonely edge instead.
    auto left = modified_costs(inst, NarrowCutChain{}, tree, bad, DropRule::Leftmost);
    CHECK(left[inst.edge_id(2, 3)] == 1 + 14 - 4);
}

TEST_CASE("modified_costs: equal lonely costs add exactly 2w") {
    auto run = fixture_run();
    const Instance& inst = run.fixture.inst;
    const TreeEntry& tree = group_one_tree(run);
    BadEdgeIndex bad = bad_edges(inst, run.fixture.xstar, run.chain, tree);
    auto cprime = modified_costs(inst, run.chain, tree, bad);
    // (1,3) crosses two lonely cuts whose lonely edges both cost 1.
    CHECK(cprime[inst.edge_id(1, 3)] == inst.cost(1, 3) + 2);
    // (0,3) crosses three unit-cost lonely cuts: surcharge 6 - 2 = 4.
    CHECK(cprime[inst.edge_id(0, 3)] == inst.cost(0, 3) + 4);
    // Non-bad edges keep the metric cost.
    CHECK(cprime[inst.edge_id(3, 4)] == inst.cost(3, 4));
    CHECK(cprime[inst.edge_id(0, 1)] == inst.cost(0, 1));
}

TEST_CASE("doubled_mst: component contraction") {
    auto run = fixture_run();
    const Instance& inst = run.fixture.inst;
    CHECK(doubled_mst(inst, std::vector<int>(inst.n, 0)).empty());
    // Two components: the cheapest crossing pair is chosen.
    std::vector<int> two(inst.n, 0);
    two[7] = 1;
    auto edges = doubled_mst(inst, two);
    REQUIRE(edges.size() == 1);
    Rat best = inst.cost(0, 7);
    for (int v = 0; v < 7; ++v) best = std::min(best, inst.cost(v, 7));
    CHECK(inst.edge_cost(edges[0]) == best);
    // The four components from the worked example need three connectors of
    // cost one each (unit closure).
    std::vector<int> comp(inst.n, 0);
    comp[1] = 1;
    comp[2] = 2;
    comp[5] = 3;
    auto three = doubled_mst(inst, comp);
    REQUIRE(three.size() == 3);
    Rat total = 0;
    for (int id : three) total += inst.edge_cost(id);
    CHECK(2 * total <= 6);
}

TEST_CASE("solve_reconnection_lp: empty system and forced point") {
    auto run = fixture_run();
    // Trees without bad edges produce a vacuously feasible empty plan.
    for (const TreeEntry& tree : run.combo.trees) {
        if (tree.group == 0) continue;
        BadEdgeIndex bad = bad_edges(run.fixture.inst, run.fixture.xstar, run.chain, tree);
        auto plan = solve_reconnection_lp(run.fixture.inst, run.fixture.xstar, tree, bad);
        CHECK(plan.feasible);
        CHECK(plan.prob.empty());
    }
    // Single bad edge with x*(b) = 1/2 and r = 1/4 on both cuts forces
    // probability 1/2 each.
    Instance tiny;
    tiny.n = 4;
    tiny.s = 0;
    tiny.t = 3;
    tiny.costs.assign(6, rat(1));
    LpSolution xs;
    xs.x.assign(6, Rat(0));
    xs.x[tiny.edge_id(0, 2)] = rat(1, 2);
    xs.support = {tiny.edge_id(0, 2)};
    xs.value = rat(1, 2);
    xs.lcd = 2;
    TreeEntry entry;
    entry.lonely_cuts = {0, 1};
    BadEdgeIndex bad;
    bad.bad_edges = {tiny.edge_id(0, 2)};
    bad.cuts_of = {{0, 1}};
    bad.r = {rat(1, 4), rat(1, 4)};
    auto plan = solve_reconnection_lp(tiny, xs, entry, bad);
    REQUIRE(plan.feasible);
    REQUIRE(plan.prob.size() == 1);
    REQUIRE(plan.prob[0].size() == 2);
    CHECK(plan.prob[0][0].second == rat(1, 2));
    CHECK(plan.prob[0][1].second == rat(1, 2));
}

TEST_CASE("reconnection LP feasible for every tree of solved instances") {
    for (uint64_t seed = 1; seed <= 8; ++seed) {
        Instance inst = gen_random_metric(5 + seed % 4, seed * 3 + 1,
                                          seed % 2 ? GenKind::GraphMetric
                                                   : GenKind::Euclidean);
        LpSolution sol = solve_subtour_lp(inst);
        NarrowCutChain chain = find_narrow_cuts(inst, sol);
        LayerStructure layers = build_layers(inst, sol, chain);
        auto [combo, stats] = decompose_layered(inst, sol, chain, layers);
        for (const TreeEntry& tree : combo.trees) {
            BadEdgeIndex bad = bad_edges(inst, sol, chain, tree);
            CHECK(solve_reconnection_lp(inst, sol, tree, bad).feasible);
            KhReport kh = check_kh_condition(inst, sol, chain, tree, bad);
            CHECK(kh.claim1_ok);
            CHECK(kh.claim2_ok);
            CHECK(kh.complete);
            CHECK(!completion_mass_on_bad_edges(chain, stats, tree, bad).has_value());
        }
    }
}

TEST_CASE("check_kh_condition: full subset scan on the all-cuts tree") {
    auto run = fixture_run();
    const TreeEntry& tree = group_one_tree(run);
    BadEdgeIndex bad = bad_edges(run.fixture.inst, run.fixture.xstar, run.chain, tree);
    KhReport report =
        check_kh_condition(run.fixture.inst, run.fixture.xstar, run.chain, tree, bad);
    CHECK(report.claim1_ok);
    CHECK(report.claim2_ok);
    CHECK(report.complete);
    // Beyond the cap only singletons and pairs run.
    KhReport partial =
        check_kh_condition(run.fixture.inst, run.fixture.xstar, run.chain, tree, bad, 3);
    CHECK(partial.claim1_ok);
    CHECK(!partial.complete);
}
