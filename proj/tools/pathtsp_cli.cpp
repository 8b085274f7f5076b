#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pathtsp/bomd.hpp"
#include "pathtsp/certify.hpp"
#include "pathtsp/errors.hpp"

using namespace pathtsp;
using nlohmann::json;

namespace {

struct CommonInput {
    std::string path;
    std::string format = "json";
    bool closure = false;
    int s_override = -1;
    int t_override = -1;
};

void add_input_flags(CLI::App* cmd, CommonInput& input) {
    cmd->add_option("--in", input.path, "instance file")->required();
    cmd->add_option("--format", input.format, "json or tsplib")
        ->check(CLI::IsMember({"json", "tsplib"}));
    cmd->add_flag("--closure", input.closure,
                  "repair non-metric input via shortest-path closure");
    cmd->add_option("--s", input.s_override, "override start vertex (0-based)");
    cmd->add_option("--t", input.t_override, "override end vertex (0-based)");
}

Instance load_common(const CommonInput& input) {
    LoadOptions options;
    options.apply_closure = input.closure;
    if (input.s_override >= 0) options.s_override = input.s_override;
    if (input.t_override >= 0) options.t_override = input.t_override;
    return load_instance_file(
        input.path, input.format == "json" ? InstanceFormat::Json : InstanceFormat::Tsplib,
        options);
}

json edge_json(const Instance& inst, int id) {
    auto [u, v] = inst.edge_vertices(id);
    return json::array({u, v});
}

void dump_lp(const Instance& inst, const LpSolution& xstar, const std::string& path) {
    json doc = json::array();
    for (int id : xstar.support)
        doc.push_back({inst.edge_vertices(id).first, inst.edge_vertices(id).second,
                       rat_to_string(xstar.x[id])});
    std::ofstream out(path);
    out << doc.dump(2) << "\n";
}

void dump_cuts(const Instance& inst, const NarrowCutChain& chain, const std::string& path) {
    (void)inst;
    json doc = json::array();
    for (const NarrowCut& cut : chain.cuts)
        doc.push_back({{"u_side", cut.u_side}, {"size", rat_to_string(cut.size)}});
    std::ofstream out(path);
    out << doc.dump(2) << "\n";
}

void dump_decomposition(const Instance& inst, const PipelineResult& result,
                        const std::string& path) {
    json doc;
    json trees = json::array();
    for (const TreeEntry& tree : result.combo.trees) {
        json entry;
        entry["lambda"] = rat_to_string(tree.lambda);
        entry["group"] = tree.group + 1;
        json edges = json::array();
        for (int id : tree.edges) edges.push_back(edge_json(inst, id));
        entry["edges"] = std::move(edges);
        json lonely = json::array();
        for (int id : tree.lonely_edges) lonely.push_back(edge_json(inst, id));
        entry["lonely_edges"] = std::move(lonely);
        entry["lonely_cuts"] = tree.lonely_cuts;
        trees.push_back(std::move(entry));
    }
    doc["trees"] = std::move(trees);
    json xq = json::array();
    for (int q = 0; q < result.chain.count(); ++q) {
        json rows = json::array();
        for (int id = 0; id < inst.edge_count(); ++id)
            if (result.stats.xq[q][id] != 0)
                rows.push_back({inst.edge_vertices(id).first,
                                inst.edge_vertices(id).second,
                                rat_to_string(result.stats.xq[q][id])});
        xq.push_back({{"cut", q}, {"entries", std::move(rows)}});
    }
    doc["xq"] = std::move(xq);
    std::ofstream out(path);
    out << doc.dump(2) << "\n";
}

void dump_parity(const Instance& inst, const PipelineResult& result,
                 const std::string& path) {
    json doc = json::array();
    for (const TreeRun& run : result.runs) {
        json entry;
        entry["tree"] = run.tree_index;
        auto emit = [&inst](const std::vector<Rat>& vec) {
            json rows = json::array();
            for (int id = 0; id < static_cast<int>(vec.size()); ++id)
                if (vec[id] != 0)
                    rows.push_back({inst.edge_vertices(id).first,
                                    inst.edge_vertices(id).second,
                                    rat_to_string(vec[id])});
            return rows;
        };
        entry["basic"] = emit(run.yf.basic);
        entry["empty_cut"] = emit(run.yf.empty_cut);
        entry["even_cut"] = emit(run.yf.even_cut);
        doc.push_back(std::move(entry));
    }
    std::ofstream out(path);
    out << doc.dump(2) << "\n";
}

void dump_reconnect(const Instance& inst, const PipelineResult& result,
                    const std::string& path) {
    json doc = json::array();
    for (const TreeRun& run : result.runs) {
        json entry;
        entry["tree"] = run.tree_index;
        json bad = json::array();
        for (size_t i = 0; i < run.bad.bad_edges.size(); ++i) {
            json probs = json::array();
            for (const auto& [cut, value] : run.plan.prob[i])
                probs.push_back({cut, rat_to_string(value)});
            bad.push_back({{"edge", edge_json(inst, run.bad.bad_edges[i])},
                           {"lonely_cut_positions", run.bad.cuts_of[i]},
                           {"drop_probabilities", std::move(probs)}});
        }
        entry["bad_edges"] = std::move(bad);
        json rs = json::array();
        for (const Rat& r : run.bad.r) rs.push_back(rat_to_string(r));
        entry["r"] = std::move(rs);
        entry["surcharge_lhs"] = rat_to_string(run.surcharge_lhs);
        entry["surcharge_rhs"] = rat_to_string(run.surcharge_rhs);
        doc.push_back(std::move(entry));
    }
    std::ofstream out(path);
    out << doc.dump(2) << "\n";
}

struct StageClock {
    using Clock = std::chrono::steady_clock;
    Clock::time_point last = Clock::now();
    void report(const std::string& stage) {
        auto now = Clock::now();
        double ms = std::chrono::duration<double, std::milli>(now - last).count();
        std::cerr << "  [" << stage << "] " << ms << " ms\n";
        last = now;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact solver and certification toolkit for the metric s-t path TSP"};
    app.require_subcommand(1);

    CommonInput input;
    std::string gamma_text = "1/16";
    int threads = 1;
    int64_t lcd_cap = 1 << 16;
    int matching_cap = 20;
    int brute_cap = 16;
    std::string out_path, lp_dump, cuts_dump, parity_dump, reconnect_dump;

    auto* solve = app.add_subcommand("solve", "run the solver and emit a certificate");
    add_input_flags(solve, input);
    solve->add_option("--gamma", gamma_text, "deletion parameter in [0,1/2], e.g. 1/16");
    solve->add_option("--threads", threads, "per-tree parallelism");
    solve->add_option("--lcd-cap", lcd_cap, "cap on the LP common denominator");
    solve->add_option("--matching-cap", matching_cap, "cap on |T| for join matching");
    solve->add_option("--out", out_path, "certificate JSON path");
    solve->add_option("--lp-dump", lp_dump, "write x* as JSON");
    solve->add_option("--dump-parity", parity_dump, "write per-tree y_F vectors");
    solve->add_option("--dump-reconnect", reconnect_dump, "write per-tree reconnection data");

    auto* certify = app.add_subcommand(
        "certify", "solve plus the no-deletion 8/5 ledger and special-case 3/2 checks");
    add_input_flags(certify, input);
    certify->add_option("--gamma", gamma_text, "deletion parameter");
    certify->add_option("--threads", threads, "per-tree parallelism");
    certify->add_option("--lcd-cap", lcd_cap, "cap on the LP common denominator");
    certify->add_option("--matching-cap", matching_cap, "cap on |T| for join matching");
    certify->add_option("--brute-cap", brute_cap, "cap on n for the exact-optimum check");
    certify->add_option("--out", out_path, "certificate JSON path");
    certify->add_option("--lp-dump", lp_dump, "write x* as JSON");
    certify->add_option("--dump-cuts", cuts_dump, "write the narrow-cut chain");
    certify->add_option("--dump-parity", parity_dump, "write per-tree y_F vectors");
    certify->add_option("--dump-reconnect", reconnect_dump,
                        "write per-tree reconnection data");

    auto* decompose = app.add_subcommand("decompose",
                                         "emit the layered convex combination as JSON");
    add_input_flags(decompose, input);
    decompose->add_option("--out", out_path, "decomposition JSON path")->required();
    decompose->add_option("--lp-dump", lp_dump, "write x* as JSON");
    decompose->add_option("--lcd-cap", lcd_cap, "cap on the LP common denominator");

    auto* gen = app.add_subcommand("gen", "generate a random metric instance");
    int gen_n = 8;
    uint64_t gen_seed = 1;
    std::string gen_kind = "euclidean";
    gen->add_option("--n", gen_n, "vertex count (>= 3)")->required();
    gen->add_option("--seed", gen_seed, "seed")->required();
    gen->add_option("--kind", gen_kind, "euclidean or graph-metric")
        ->check(CLI::IsMember({"euclidean", "graph-metric"}));
    gen->add_option("--out", out_path, "instance JSON path")->required();

    auto* verify = app.add_subcommand("verify", "re-validate a stored certificate");
    add_input_flags(verify, input);
    std::string cert_path;
    verify->add_option("--cert", cert_path, "certificate JSON path")->required();

    auto* bench = app.add_subcommand("bench", "seed sweep with a summary table");
    int bench_nmin = 5, bench_nmax = 12, bench_seeds = 200;
    bench->add_option("--n-min", bench_nmin, "smallest n");
    bench->add_option("--n-max", bench_nmax, "largest n");
    bench->add_option("--seeds", bench_seeds, "number of seeds");
    bench->add_option("--gamma", gamma_text, "deletion parameter");
    bench->add_option("--threads", threads, "per-tree parallelism");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            Instance inst = gen_random_metric(
                gen_n, gen_seed,
                gen_kind == "euclidean" ? GenKind::Euclidean : GenKind::GraphMetric);
            std::ofstream out(out_path);
            if (!out) throw ParseError("cannot write '" + out_path + "'");
            inst.write_json(out);
            return 0;
        }

        if (verify->parsed()) {
            Instance inst = load_common(input);
            std::ifstream cert(cert_path);
            if (!cert) throw ParseError("cannot open '" + cert_path + "'");
            std::string failure = verify_certificate_json(inst, cert);
            if (!failure.empty()) {
                std::cerr << "certificate invalid: " << failure << "\n";
                return 1;
            }
            std::cout << "certificate valid\n";
            return 0;
        }

        if (bench->parsed()) {
            RunOptions options;
            options.gamma = rat_from_string(gamma_text);
            options.threads = threads;
            Rat worst_ratio = 0;
            uint64_t done = 0;
            double t_lp = 0, t_cuts = 0, t_decomp = 0, t_trees = 0, t_cert = 0;
            using Clock = std::chrono::steady_clock;
            auto tick = [](Clock::time_point& mark) {
                auto now = Clock::now();
                double ms = std::chrono::duration<double, std::milli>(now - mark).count();
                mark = now;
                return ms;
            };
            for (int seed = 1; seed <= bench_seeds; ++seed) {
                int n = bench_nmin + (seed - 1) % (bench_nmax - bench_nmin + 1);
                GenKind kind = seed % 2 == 0 ? GenKind::Euclidean : GenKind::GraphMetric;
                Instance inst = gen_random_metric(n, seed, kind);
                auto mark = Clock::now();
                PipelineResult result;
                result.inst = inst;
                result.gamma = options.gamma;
                result.xstar = solve_subtour_lp(inst);
                t_lp += tick(mark);
                result.chain = find_narrow_cuts(inst, result.xstar);
                result.layers = build_layers(inst, result.xstar, result.chain);
                t_cuts += tick(mark);
                DecompositionOptions dopt;
                dopt.lcd_cap = options.lcd_cap;
                auto [combo, stats] = decompose_layered(inst, result.xstar, result.chain,
                                                        result.layers, dopt);
                result.combo = std::move(combo);
                result.stats = std::move(stats);
                t_decomp += tick(mark);
                for (int i = 0; i < static_cast<int>(result.combo.trees.size()); ++i) {
                    result.runs.push_back(run_tree(inst, result.xstar, result.chain,
                                                   result.stats, result.combo, i,
                                                   options));
                    const TreeRun& run = result.runs.back();
                    auto offer = [&](const StTour& tour, bool forest_based) {
                        if (result.best_tree < 0 ||
                            tour.multigraph_cost < result.best.multigraph_cost) {
                            result.best = tour;
                            result.best_tree = i;
                            result.best_is_forest_based = forest_based;
                        }
                    };
                    offer(run.forest_based, true);
                    offer(run.christofides, false);
                }
                t_trees += tick(mark);
                TourCertificate cert = certify_ratio(result);
                t_cert += tick(mark);
                Rat ratio = cert.tour_cost / cert.c_xstar;
                if (ratio > worst_ratio) worst_ratio = ratio;
                ++done;
            }
            std::cout << "instances: " << done << "\n";
            std::cout << "max tour / OPT_LP ratio: " << rat_to_string(worst_ratio)
                      << " (~" << worst_ratio.get_d() << ")\n";
            std::cout << "certified bound per instance: "
                      << rat_to_string((3 + 4 * options.gamma) / (2 + 2 * options.gamma))
                      << "\n";
            std::printf("stage totals: lp %.0f ms | cuts+layers %.0f ms | "
                        "decomposition %.0f ms | trees+checks %.0f ms | ledger %.0f ms\n",
                        t_lp, t_cuts, t_decomp, t_trees, t_cert);
            return 0;
        }

        // solve / certify / decompose share the pipeline.
        Instance inst = load_common(input);
        RunOptions options;
        options.gamma = rat_from_string(gamma_text);
        if (options.gamma < 0 || options.gamma > rat(1, 2))
            throw ParseError("gamma must lie in [0, 1/2]");
        options.threads = threads;
        options.lcd_cap = lcd_cap;
        options.matching_cap = matching_cap;

        StageClock clock;
        PipelineResult result = run_bomd(inst, options);
        clock.report("pipeline");

        if (!lp_dump.empty()) dump_lp(inst, result.xstar, lp_dump);
        if (!cuts_dump.empty()) dump_cuts(inst, result.chain, cuts_dump);
        if (!parity_dump.empty()) dump_parity(inst, result, parity_dump);
        if (!reconnect_dump.empty()) dump_reconnect(inst, result, reconnect_dump);

        if (decompose->parsed()) {
            dump_decomposition(inst, result, out_path);
            return 0;
        }

        TourCertificate cert = certify_ratio(result);
        clock.report("certify");

        if (certify->parsed()) {
            if (inst.n <= brute_cap) {
                cert.opt_brute = brute_force_opt(inst, brute_cap);
                if (result.xstar.value > *cert.opt_brute)
                    throw InternalError("LP value exceeds the exact optimum");
                if (*cert.opt_brute > cert.tour_cost)
                    throw InternalError("exact optimum exceeds the tour cost");
            }
            DecompositionOptions dopt;
            dopt.lcd_cap = lcd_cap;
            auto [generic, generic_stats] =
                decompose_generic(inst, result.xstar, result.chain, dopt);
            Bomc85Report bomc = certify_bomc_85(inst, result.xstar, result.chain, generic,
                                                generic_stats, matching_cap);
            SpecialCaseReport special = detect_special_cases(result, matching_cap);
            StTour baseline = hoogeveen_baseline(inst, matching_cap);
            clock.report("extended ledger");
            std::cout << "single-tree baseline: " << rat_to_string(baseline.multigraph_cost)
                      << " (reported only; no relation to the BOMD tour is asserted)\n";
            std::cout << "no-deletion average: " << rat_to_string(bomc.avg_tour_cost)
                      << " <= min(" << rat_to_string(bomc.bound1) << ", "
                      << rat_to_string(bomc.bound2) << ") <= 8/5 c(x*)\n";
            if (special.deletion_certificate)
                std::cout << "special case: 3/2 certificate (deletion) holds, avg "
                          << rat_to_string(special.deletion_avg) << " <= "
                          << rat_to_string(special.three_halves) << "\n";
            if (special.alternate_certificate)
                std::cout << "special case: 3/2 certificate (alternating) holds, avg "
                          << rat_to_string(special.alternate_avg) << " <= "
                          << rat_to_string(special.three_halves) << "\n";
        }

        if (!out_path.empty()) {
            std::ofstream out(out_path);
            if (!out) throw ParseError("cannot write '" + out_path + "'");
            out << cert.to_json(inst);
        }
        std::cout << "tour cost: " << rat_to_string(cert.tour_cost) << "\n";
        std::cout << "OPT_LP:    " << rat_to_string(cert.c_xstar) << "\n";
        if (options.gamma >= rat(1, 16))
            std::cout << "bound:     " << rat_to_string(cert.bound_value) << " = "
                      << rat_to_string(cert.bound_coeff) << " * OPT_LP\n";
        else
            std::cout << "bound:     " << rat_to_string(cert.b2)
                      << " = 2 c(x*) - c(p*) (gamma below 1/16: only the "
                         "no-deletion side is certified)\n";
        Rat ratio = cert.tour_cost / cert.c_xstar;
        std::cout << "ratio:     " << rat_to_string(ratio) << " (~" << ratio.get_d()
                  << ")\n";
        return 0;
    } catch (const InternalError& ex) {
        std::cerr << "certification failure: " << ex.what() << "\n";
        return 1;
    } catch (const Error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
}
