#include "pathtsp/certify.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "pathtsp/errors.hpp"
#include "pathtsp/graph.hpp"

namespace pathtsp {

using nlohmann::json;

Rat brute_force_opt(const Instance& inst, int size_cap) {
    if (inst.n > size_cap)
        throw LimitError("brute_force_opt: n = " + std::to_string(inst.n) +
                         " exceeds cap " + std::to_string(size_cap));
    if (inst.n == 2) return inst.cost(inst.s, inst.t);
    // Held-Karp over the inner vertices, from s to t.
    std::vector<int> inner;
    for (int v = 0; v < inst.n; ++v)
        if (v != inst.s && v != inst.t) inner.push_back(v);
    const int m = static_cast<int>(inner.size());
    const int full = 1 << m;
    std::vector<std::vector<std::optional<Rat>>> best(
        full, std::vector<std::optional<Rat>>(m));
    for (int i = 0; i < m; ++i)
        best[1 << i][i] = inst.cost(inst.s, inner[i]);
    for (int mask = 1; mask < full; ++mask)
        for (int last = 0; last < m; ++last) {
            if (!(mask >> last & 1) || !best[mask][last]) continue;
            for (int nxt = 0; nxt < m; ++nxt) {
                if (mask >> nxt & 1) continue;
                Rat cand = *best[mask][last] + inst.cost(inner[last], inner[nxt]);
                auto& cell = best[mask | 1 << nxt][nxt];
                if (!cell || cand < *cell) cell = cand;
            }
        }
    std::optional<Rat> opt;
    for (int last = 0; last < m; ++last) {
        if (!best[full - 1][last]) continue;
        Rat cand = *best[full - 1][last] + inst.cost(inner[last], inst.t);
        if (!opt || cand < *opt) opt = cand;
    }
    return *opt;
}

Rat multiplier(const Rat& x, const Rat& gamma) {
    if (!(x >= 1 && x < 2)) throw InternalError("multiplier needs x in [1,2)");
    return (2 - x - 2 * gamma) / (2 * (2 - x)) + x - 2;
}

Rat bomc85_coefficient(const Rat& x, const Rat& gamma) {
    if (!(x >= 1 && x < 2)) throw InternalError("bomc85_coefficient needs x in [1,2)");
    return (x - 1) * (1 - gamma - x / 2) / (2 - x);
}

SpecialCaseFlags detect_flags(const NarrowCutChain& chain) {
    SpecialCaseFlags flags;
    std::map<int, int> edge_cuts;
    for (const NarrowCut& cut : chain.cuts)
        for (int id : cut.edges) ++edge_cuts[id];
    int max_cuts = 0;
    for (const auto& [id, count] : edge_cuts) max_cuts = std::max(max_cuts, count);
    flags.disjoint_narrow_cuts = max_cuts <= 1;
    flags.at_most_two_cuts_per_edge = max_cuts <= 2;
    Rat small = rat(3, 2);
    flags.all_small = true;
    std::vector<Rat> not_small;
    for (const NarrowCut& cut : chain.cuts)
        if (cut.size > small) {
            flags.all_small = false;
            if (std::find(not_small.begin(), not_small.end(), cut.size) ==
                not_small.end())
                not_small.push_back(cut.size);
        }
    flags.one_not_small = not_small.size() == 1;
    return flags;
}

namespace {

Rat price(const Instance& inst, const std::vector<int>& edges) {
    Rat total = 0;
    for (int id : edges) total += inst.edge_cost(id);
    return total;
}

Rat price_vector(const std::vector<Rat>& costs, const std::vector<Rat>& vec) {
    Rat total = 0;
    for (size_t i = 0; i < vec.size(); ++i)
        if (vec[i] != 0) total += costs[i] * vec[i];
    return total;
}

void require(std::vector<LedgerEntry>& checks, std::string name, Rat lhs, Rat rhs) {
    bool pass = lhs <= rhs;
    checks.push_back({name, lhs, rhs, pass});
    if (!pass)
        throw InternalError("ledger check '" + name + "' failed: " + rat_to_string(lhs) +
                            " > " + rat_to_string(rhs));
}

}  // namespace

TourCertificate certify_ratio(const PipelineResult& pipeline) {
    const Instance& inst = pipeline.inst;
    TourCertificate cert;
    cert.gamma = pipeline.gamma;
    cert.c_xstar = pipeline.xstar.value;
    cert.c_pstar = price_vector(inst.costs, pipeline.stats.pstar);
    cert.c_qstar = price_vector(inst.costs, pipeline.stats.qstar);
    if (cert.c_pstar + cert.c_qstar != cert.c_xstar)
        throw InternalError("c(p*) + c(q*) must equal c(x*)");

    cert.b1 = rat(3, 2) * cert.c_xstar + cert.gamma * cert.c_pstar;
    cert.b2 = 2 * cert.c_xstar - cert.c_pstar;
    cert.bound_coeff = (3 + 4 * cert.gamma) / (2 + 2 * cert.gamma);
    cert.bound_value = cert.bound_coeff * cert.c_xstar;
    cert.flags = detect_flags(pipeline.chain);

    Rat forest_total = 0, christofides_total = 0;
    for (const TreeRun& run : pipeline.runs) {
        const TreeEntry& tree = pipeline.combo.trees[run.tree_index];
        TreeLedger ledger;
        ledger.tree_index = run.tree_index;
        ledger.lambda = tree.lambda;
        ledger.group = tree.group;
        ledger.c_tree = run.c_tree;
        ledger.c_forest = run.c_forest;
        ledger.c_yf = run.c_yf;
        ledger.cprime_yf = run.cprime_yf;
        ledger.cprime_join = run.cprime_join_forest;
        ledger.c_p1 = run.forest_based.multigraph_cost;
        ledger.c_p2 = run.christofides.multigraph_cost;
        ledger.surcharge_lhs = run.surcharge_lhs;
        ledger.surcharge_rhs = run.surcharge_rhs;
        cert.trees.push_back(ledger);

        std::string tag = " (tree " + std::to_string(run.tree_index) + ")";
        require(cert.checks, "ii.a: c(P1) <= c(F) + c'(J*)" + tag,
                ledger.c_p1, ledger.c_forest + ledger.cprime_join);
        require(cert.checks, "ii.b: c'(J*) <= c'(y_F)" + tag, ledger.cprime_join,
                ledger.cprime_yf);
        require(cert.checks, "vi: surcharge within allowance" + tag,
                ledger.surcharge_lhs, ledger.surcharge_rhs);

        forest_total += tree.lambda * (ledger.c_forest + ledger.cprime_yf);
        christofides_total += tree.lambda * ledger.c_p2;
    }

    // B1 only bounds the forest-based average when the per-cut multiplier is
    // nonpositive, i.e. for gamma >= 1/16; below that, only the B2 side of
    // the balance is certified. min(B1,B2) <= bound is algebra, valid always.
    const bool b1_certified = cert.gamma >= rat(1, 16);
    if (b1_certified)
        require(cert.checks, "i: avg c(F) + c'(y_F) <= B1", forest_total, cert.b1);
    require(cert.checks, "iii: avg c(P2) <= B2", christofides_total, cert.b2);
    Rat best_bound = std::min(cert.b1, cert.b2);
    require(cert.checks, "iv: min(B1,B2) within the ratio bound", best_bound,
            cert.bound_value);
    if (b1_certified)
        require(cert.checks, "v: output tour <= min(B1,B2)",
                pipeline.best.multigraph_cost, best_bound);
    else
        require(cert.checks, "v: output tour <= B2", pipeline.best.multigraph_cost,
                cert.b2);

    cert.tour_edges = pipeline.best.edges;
    cert.tour_cost = pipeline.best.multigraph_cost;
    cert.tour_path = pipeline.best.path;
    cert.tour_path_cost = pipeline.best.path_cost;
    return cert;
}

std::string TourCertificate::to_json(const Instance& inst) const {
    json doc;
    doc["gamma"] = rat_to_string(gamma);
    doc["c_xstar"] = rat_to_string(c_xstar);
    doc["c_pstar"] = rat_to_string(c_pstar);
    doc["c_qstar"] = rat_to_string(c_qstar);
    doc["b1"] = rat_to_string(b1);
    doc["b2"] = rat_to_string(b2);
    doc["bound_coeff"] = rat_to_string(bound_coeff);
    doc["bound_value"] = rat_to_string(bound_value);
    json trees_json = json::array();
    for (const TreeLedger& tree : trees) {
        json entry;
        entry["tree"] = tree.tree_index;
        entry["lambda"] = rat_to_string(tree.lambda);
        entry["group"] = tree.group + 1;
        entry["c_tree"] = rat_to_string(tree.c_tree);
        entry["c_forest"] = rat_to_string(tree.c_forest);
        entry["c_yf"] = rat_to_string(tree.c_yf);
        entry["cprime_yf"] = rat_to_string(tree.cprime_yf);
        entry["cprime_join"] = rat_to_string(tree.cprime_join);
        entry["c_p1"] = rat_to_string(tree.c_p1);
        entry["c_p2"] = rat_to_string(tree.c_p2);
        entry["surcharge_lhs"] = rat_to_string(tree.surcharge_lhs);
        entry["surcharge_rhs"] = rat_to_string(tree.surcharge_rhs);
        trees_json.push_back(std::move(entry));
    }
    doc["trees"] = std::move(trees_json);
    json checks_json = json::array();
    for (const LedgerEntry& entry : checks)
        checks_json.push_back({{"name", entry.name},
                               {"lhs", rat_to_string(entry.lhs)},
                               {"rhs", rat_to_string(entry.rhs)},
                               {"pass", entry.pass}});
    doc["checks"] = std::move(checks_json);
    doc["flags"] = {{"disjoint_narrow_cuts", flags.disjoint_narrow_cuts},
                    {"at_most_two_cuts_per_edge", flags.at_most_two_cuts_per_edge},
                    {"all_small", flags.all_small},
                    {"one_not_small", flags.one_not_small}};
    json tour_json = json::array();
    for (int id : tour_edges) {
        auto [u, v] = inst.edge_vertices(id);
        tour_json.push_back({u, v});
    }
    doc["tour"] = {{"edges", std::move(tour_json)},
                   {"cost", rat_to_string(tour_cost)},
                   {"path", tour_path},
                   {"path_cost", rat_to_string(tour_path_cost)}};
    if (opt_brute) doc["opt"] = rat_to_string(*opt_brute);
    return doc.dump(2) + "\n";
}

std::string verify_certificate_json(const Instance& inst, std::istream& cert_json) {
    json doc;
    try {
        doc = json::parse(cert_json);
    } catch (const json::exception& ex) {
        return std::string("invalid certificate JSON: ") + ex.what();
    }
    try {
        Rat c_xstar = rat_from_string(doc.at("c_xstar").get<std::string>());
        Rat c_pstar = rat_from_string(doc.at("c_pstar").get<std::string>());
        Rat c_qstar = rat_from_string(doc.at("c_qstar").get<std::string>());
        Rat gamma = rat_from_string(doc.at("gamma").get<std::string>());
        Rat b1 = rat_from_string(doc.at("b1").get<std::string>());
        Rat b2 = rat_from_string(doc.at("b2").get<std::string>());
        Rat bound_value = rat_from_string(doc.at("bound_value").get<std::string>());
        if (c_pstar + c_qstar != c_xstar) return "c(p*) + c(q*) != c(x*)";
        if (b1 != rat(3, 2) * c_xstar + gamma * c_pstar) return "B1 formula mismatch";
        if (b2 != 2 * c_xstar - c_pstar) return "B2 formula mismatch";
        for (const auto& check : doc.at("checks")) {
            Rat lhs = rat_from_string(check.at("lhs").get<std::string>());
            Rat rhs = rat_from_string(check.at("rhs").get<std::string>());
            if (!check.at("pass").get<bool>() || lhs > rhs)
                return "recorded check fails: " + check.at("name").get<std::string>();
        }
        // Re-price and re-audit the stored tour against the instance.
        std::vector<int> edges;
        for (const auto& pair : doc.at("tour").at("edges"))
            edges.push_back(inst.edge_id(pair.at(0).get<int>(), pair.at(1).get<int>()));
        StTour tour = make_st_tour(inst, std::move(edges));
        if (tour.multigraph_cost != rat_from_string(doc.at("tour").at("cost").get<std::string>()))
            return "stored tour cost does not match the instance";
        Rat tour_cost = tour.multigraph_cost;
        if (tour_cost > std::min(b1, b2)) return "tour exceeds min(B1,B2)";
        if (std::min(b1, b2) > bound_value) return "min(B1,B2) exceeds the bound";
    } catch (const json::exception& ex) {
        return std::string("certificate structure: ") + ex.what();
    } catch (const Error& ex) {
        return std::string("certificate invalid: ") + ex.what();
    }
    return {};
}

Bomc85Report certify_bomc_85(const Instance& inst, const LpSolution& xstar,
                             const NarrowCutChain& chain, const TreeCombination& combo,
                             const CombinationStats& stats, int matching_cap) {
    const Rat gamma = rat(1, 8);
    Bomc85Report report;
    report.c_xstar = xstar.value;
    report.c_pstar = price_vector(inst.costs, stats.pstar);
    report.tree_count = static_cast<int>(combo.trees.size());
    report.avg_tour_cost = 0;

    Rat threshold = 2 - 2 * gamma;
    for (const TreeEntry& tree : combo.trees) {
        // Parity correction without deletion: basic part plus even-cut
        // completion by x^Q.
        std::vector<Rat> y(inst.edge_count(), Rat(0));
        for (int id : xstar.support) y[id] = xstar.x[id] / 2;
        for (int id : tree.path_edges) y[id] += gamma;
        std::vector<char> in_tree(inst.edge_count(), 0);
        for (int id : tree.edges) in_tree[id] = 1;
        for (int q = 0; q < chain.count(); ++q) {
            const NarrowCut& cut = chain.cuts[q];
            if (cut.size > threshold) continue;
            int crossings = 0;
            for (int id : cut.edges) crossings += in_tree[id];
            if (crossings % 2 != 0) continue;
            Rat coef = (1 - gamma - cut.size / 2) / (2 - cut.size);
            for (int id : cut.edges)
                if (stats.xq[q][id] != 0) y[id] += coef * stats.xq[q][id];
        }
        std::vector<int> parity = wrong_parity_set(inst, tree.edges);
        if (auto violation = check_tjoin_polyhedron(inst.n, y, parity))
            throw InternalError("no-deletion parity vector infeasible: odd cut of weight " +
                                rat_to_string(violation->weight));
        Join join = min_tjoin_complete(inst, inst.costs, parity, matching_cap);
        Rat c_y = price_vector(inst.costs, y);
        if (join.cost > c_y)
            throw InternalError("minimum join exceeds the parity vector cost");
        report.avg_tour_cost += tree.lambda * (price(inst, tree.edges) + join.cost);
    }

    report.bound1 = rat(3, 2) * report.c_xstar + rat(1, 4) * report.c_pstar;
    report.bound2 = 2 * report.c_xstar - report.c_pstar;
    Rat best = std::min(report.bound1, report.bound2);
    if (report.avg_tour_cost > best)
        throw InternalError("no-deletion average exceeds min(bounds): " +
                            rat_to_string(report.avg_tour_cost) + " > " +
                            rat_to_string(best));
    if (best > rat(8, 5) * report.c_xstar)
        throw InternalError("no-deletion bounds exceed 8/5 c(x*)");
    return report;
}

namespace {

// Support-restricted join costs: pairs outside the LP support are unusable.
std::vector<std::optional<Rat>> support_costs(const Instance& inst,
                                              const LpSolution& xstar) {
    std::vector<std::optional<Rat>> costs(inst.edge_count());
    for (int id : xstar.support) costs[id] = inst.edge_cost(id);
    return costs;
}

}  // namespace

SpecialCaseReport detect_special_cases(const PipelineResult& pipeline, int matching_cap) {
    const Instance& inst = pipeline.inst;
    const LpSolution& xstar = pipeline.xstar;
    const NarrowCutChain& chain = pipeline.chain;
    SpecialCaseReport report;
    report.flags = detect_flags(chain);
    report.three_halves = rat(3, 2) * xstar.value;

    // gamma = 0 deletion pipeline with the leftmost-drop rule. Joins are
    // restricted to the LP support so that disjoint lonely cuts really do
    // make reconnection empty.
    if (report.flags.all_small) {
        // Small cuts overlap by at most 1/2: the adjacent-pair form of the
        // intersection bound, which is what prices the leftmost-drop rule.
        for (const TreeEntry& tree : pipeline.combo.trees)
            for (size_t j = 0; j + 1 < tree.lonely_cuts.size(); ++j) {
                auto [lhs, rhs] = intersection_bound(xstar, chain, tree.lonely_cuts[j],
                                                     tree.lonely_cuts[j + 1]);
                if (lhs > rat(1, 2))
                    throw InternalError("adjacent small cuts overlap by more than 1/2");
                if (lhs > rhs) throw InternalError("intersection bound violated");
            }
    }
    if (report.flags.disjoint_narrow_cuts || report.flags.all_small) {
        Rat avg = 0, avg_tours = 0;
        for (const TreeEntry& tree : pipeline.combo.trees) {
            ParityCorrectionVector y0 =
                build_yf(inst, xstar, chain, pipeline.stats, tree, Rat(0));
            std::vector<Rat> y_total = y0.total();
            std::vector<int> forest = tree.forest_edges();
            std::vector<int> parity = wrong_parity_set(inst, forest);
            if (auto violation = check_tjoin_polyhedron(inst.n, y_total, parity))
                throw InternalError("gamma=0 parity vector infeasible");
            BadEdgeIndex bad = bad_edges(inst, xstar, chain, tree);
            std::vector<Rat> cprime_left =
                modified_costs(inst, chain, tree, bad, DropRule::Leftmost);
            // Joins stay in the support, where the surcharges live.
            std::vector<std::optional<Rat>> costs(inst.edge_count());
            for (int id : xstar.support) costs[id] = cprime_left[id];
            Join join = min_tjoin(inst.n, costs, parity, matching_cap);
            StTour p1 = forest_tour(inst, tree, join);
            Rat c_forest = price(inst, forest);
            Rat cprime_y = price_vector(cprime_left, y_total);
            if (join.cost > cprime_y)
                throw InternalError("leftmost-drop join exceeds its fractional bound");
            if (p1.multigraph_cost > c_forest + join.cost)
                throw InternalError("gamma=0 tour exceeds c(F) + c'(J)");
            if (report.flags.disjoint_narrow_cuts) {
                if (!bad.bad_edges.empty())
                    throw InternalError("disjoint narrow cuts but bad edges exist");
                if (p1.multigraph_cost != c_forest + price(inst, join.edges))
                    throw InternalError("disjoint narrow cuts but reconnection is nonempty");
            }
            avg += tree.lambda * (c_forest + cprime_y);
            avg_tours += tree.lambda * p1.multigraph_cost;
        }
        if (avg > report.three_halves)
            throw InternalError("gamma=0 ledger exceeds 3/2 c(x*): " +
                                rat_to_string(avg));
        if (avg_tours > report.three_halves)
            throw InternalError("gamma=0 tours exceed 3/2 c(x*)");
        report.deletion_certificate = true;
        report.deletion_avg = avg_tours;
    }

    // Two-branch alternating deletion: remove lonely edges of odd- or
    // even-numbered narrow cuts only. With every support edge in at most two
    // (necessarily consecutive) narrow cuts, neither branch can have a bad
    // edge, so reconnection is structurally empty.
    if (report.flags.at_most_two_cuts_per_edge) {
        // Untrimmed lonely-edge vectors: every single-crossing counts.
        std::vector<std::vector<Rat>> xq_raw(chain.count(),
                                             std::vector<Rat>(inst.edge_count(), Rat(0)));
        std::vector<std::vector<std::pair<int, int>>> lonely_by_tree(
            pipeline.combo.trees.size());
        for (size_t ti = 0; ti < pipeline.combo.trees.size(); ++ti) {
            const TreeEntry& tree = pipeline.combo.trees[ti];
            std::vector<char> in_tree(inst.edge_count(), 0);
            for (int id : tree.edges) in_tree[id] = 1;
            for (int q = 0; q < chain.count(); ++q) {
                int unique_edge = -1, crossings = 0;
                for (int id : chain.cuts[q].edges)
                    if (in_tree[id]) {
                        ++crossings;
                        unique_edge = id;
                    }
                if (crossings == 1) {
                    xq_raw[q][unique_edge] += tree.lambda;
                    lonely_by_tree[ti].emplace_back(q, unique_edge);
                }
            }
        }
        Rat avg = 0, avg_tours = 0;
        auto costs = support_costs(inst, xstar);
        for (size_t ti = 0; ti < pipeline.combo.trees.size(); ++ti) {
            const TreeEntry& tree = pipeline.combo.trees[ti];
            for (int branch = 0; branch < 2; ++branch) {
                std::vector<char> drop(inst.edge_count(), 0);
                std::vector<char> dropped_cut(chain.count(), 0);
                for (auto [q, e] : lonely_by_tree[ti])
                    if (q % 2 == branch) {
                        drop[e] = 1;
                        dropped_cut[q] = 1;
                    }
                // No support edge may cross two dropped cuts.
                for (int id : xstar.support) {
                    int crossed = 0;
                    auto [u, v] = inst.edge_vertices(id);
                    for (int q = 0; q < chain.count(); ++q)
                        if (dropped_cut[q] &&
                            chain.cuts[q].side_mask[u] != chain.cuts[q].side_mask[v])
                            ++crossed;
                    if (crossed >= 2)
                        throw InternalError("branch deletion produced a bad edge");
                }
                std::vector<int> forest;
                for (int id : tree.edges)
                    if (!drop[id]) forest.push_back(id);
                std::vector<int> parity = wrong_parity_set(inst, forest);
                std::vector<char> in_forest(inst.edge_count(), 0);
                for (int id : forest) in_forest[id] = 1;
                std::vector<Rat> y(inst.edge_count(), Rat(0));
                for (int id : xstar.support) y[id] = xstar.x[id] / 2;
                for (int q = 0; q < chain.count(); ++q) {
                    int crossings = 0;
                    for (int id : chain.cuts[q].edges) crossings += in_forest[id];
                    if (crossings % 2 != 0) continue;
                    for (int id : chain.cuts[q].edges)
                        if (xq_raw[q][id] != 0) y[id] += xq_raw[q][id] / 2;
                }
                if (auto violation = check_tjoin_polyhedron(inst.n, y, parity))
                    throw InternalError("branch parity vector infeasible");
                Join join = min_tjoin(inst.n, costs, parity, matching_cap);
                Rat c_y = price_vector(inst.costs, y);
                if (join.cost > c_y)
                    throw InternalError("branch join exceeds its fractional bound");
                std::vector<int> edges = forest;
                edges.insert(edges.end(), join.edges.begin(), join.edges.end());
                StTour p1 = make_st_tour(inst, std::move(edges));  // connectivity audit
                avg += tree.lambda * (price(inst, forest) + c_y) / 2;
                avg_tours += tree.lambda * p1.multigraph_cost / 2;
            }
        }
        if (avg > report.three_halves)
            throw InternalError("alternating-deletion ledger exceeds 3/2 c(x*): " +
                                rat_to_string(avg));
        if (avg_tours > report.three_halves)
            throw InternalError("alternating-deletion tours exceed 3/2 c(x*)");
        report.alternate_certificate = true;
        report.alternate_avg = avg_tours;
    }
    return report;
}

}  // namespace pathtsp
