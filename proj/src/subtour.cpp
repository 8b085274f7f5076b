#include "pathtsp/subtour.hpp"

#include <algorithm>
#include <set>

#include "pathtsp/errors.hpp"
#include "pathtsp/graph.hpp"

namespace pathtsp {

Rat cut_requirement(const Instance& inst, const std::vector<char>& side) {
    return side[inst.s] != side[inst.t] ? rat(1) : rat(2);
}

Rat LpSolution::cut_value(const Instance& inst, const std::vector<char>& side) const {
    Rat total = 0;
    for (int id : support) {
        auto [u, v] = inst.edge_vertices(id);
        if (side[u] != side[v]) total += x[id];
    }
    return total;
}

LpSolution LpSolution::from_vector(const Instance& inst, std::vector<Rat> x) {
    if (static_cast<int>(x.size()) != inst.edge_count())
        throw InternalError("LpSolution::from_vector: wrong vector size");
    LpSolution sol;
    sol.x = std::move(x);
    sol.value = 0;
    for (int id = 0; id < inst.edge_count(); ++id) {
        if (sol.x[id] < 0) throw InternalError("LpSolution: negative coordinate");
        if (sol.x[id] > 0) sol.support.push_back(id);
        sol.value += sol.x[id] * inst.edge_cost(id);
    }
    for (int v = 0; v < inst.n; ++v) {
        Rat deg = 0;
        for (int u = 0; u < inst.n; ++u)
            if (u != v) deg += sol.x[inst.edge_id(u, v)];
        Rat want = (v == inst.s || v == inst.t) ? rat(1) : rat(2);
        if (deg != want)
            throw InternalError("LpSolution: degree constraint fails at vertex " +
                                std::to_string(v));
    }
    sol.lcd = lcm_denominator(sol.x);
    return sol;
}

namespace {

// Support graph of x under a vertex contraction map, with capacities scaled
// to int64 when the common denominator allows it.
struct CutProbe {
    int nodes = 0;
    std::vector<std::tuple<int, int, Rat>> edges;  // super-node endpoints
    Int lcd = 1;
    bool use_int = false;
    int64_t cutoff_hint = 0;

    CutProbe(const Instance& inst, const std::vector<Rat>& x,
             const std::vector<int>& node_of, int node_count) {
        nodes = node_count;
        for (int id = 0; id < inst.edge_count(); ++id) {
            if (x[id] == 0) continue;
            auto [u, v] = inst.edge_vertices(id);
            int a = node_of[u], b = node_of[v];
            if (a != b) edges.emplace_back(a, b, x[id]);
        }
        std::vector<Rat> weights;
        weights.reserve(edges.size());
        for (auto& [a, b, w] : edges) weights.push_back(w);
        lcd = lcm_denominator(weights);
        use_int = to_int64(lcd).has_value() && *to_int64(lcd) <= (int64_t(1) << 40);
    }

    // Minimum a-b cut: value and inclusion-minimal source side. With a cutoff
    // c, stops early once the flow reaches c (value/side then unusable, and
    // hit_cutoff certifies min cut >= c).
    struct Answer {
        Rat value;
        std::vector<char> side;
        bool hit_cutoff = false;
    };
    Answer min_cut(int a, int b, const Rat* cutoff = nullptr) const {
        Answer ans;
        if (use_int) {
            FlowNetwork<int64_t> net(nodes);
            for (const auto& [u, v, w] : edges)
                net.add_undirected(u, v, scale_to_int(w, lcd).get_si());
            int64_t icut = 0;
            const int64_t* pc = nullptr;
            if (cutoff) {
                Rat scaled = *cutoff * Rat(lcd);
                // Round the cutoff up so flow == cutoff certifies >= cutoff.
                Int ceil_num = scaled.get_num() / scaled.get_den() +
                               (scaled.get_den() != 1 ? 1 : 0);
                icut = *to_int64(ceil_num);
                pc = &icut;
            }
            auto res = net.max_flow(a, b, pc);
            ans.hit_cutoff = res.hit_cutoff;
            if (!res.hit_cutoff) {
                ans.value = Rat(Int(res.flow)) / Rat(lcd);
                ans.side = std::move(res.source_side);
            } else {
                ans.value = Rat(Int(res.flow)) / Rat(lcd);
            }
            return ans;
        }
        FlowNetwork<Rat> net(nodes);
        for (const auto& [u, v, w] : edges) net.add_undirected(u, v, w);
        auto res = net.max_flow(a, b, cutoff);
        ans.hit_cutoff = res.hit_cutoff;
        ans.value = res.flow;
        if (!res.hit_cutoff) ans.side = std::move(res.source_side);
        return ans;
    }
};

std::vector<int> side_to_sorted(const std::vector<char>& side,
                                const std::vector<int>& node_of, int n,
                                bool complement) {
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
        if ((side[node_of[v]] != 0) != complement) out.push_back(v);
    return out;
}

}  // namespace

std::optional<SeparatedCut> separate(const std::vector<Rat>& x, const Instance& inst) {
    const int n = inst.n;
    std::vector<int> identity(n);
    for (int v = 0; v < n; ++v) identity[v] = v;

    std::optional<SeparatedCut> best;
    auto consider = [&](std::vector<int> u_side, const Rat& value, const Rat& req) {
        if (value >= req) return;
        SeparatedCut cand{std::move(u_side), req - value, req};
        if (!best || cand.violation > best->violation ||
            (cand.violation == best->violation && cand.u_side < best->u_side))
            best = std::move(cand);
    };

    {
        CutProbe probe(inst, x, identity, n);
        auto ans = probe.min_cut(inst.s, inst.t);
        consider(side_to_sorted(ans.side, identity, n, false), ans.value, rat(1));
    }
    if (n >= 3) {
        // Cuts with both endpoints on one side = cuts of the graph with s and
        // t identified; global min cut there via n-2 rooted flows.
        std::vector<int> merged(n);
        int next = 0;
        for (int v = 0; v < n; ++v)
            merged[v] = (v == inst.s || v == inst.t) ? -1 : next++;
        int root = next;
        for (int v = 0; v < n; ++v)
            if (merged[v] < 0) merged[v] = root;
        CutProbe probe(inst, x, merged, next + 1);
        for (int target = 0; target < next; ++target) {
            auto ans = probe.min_cut(root, target);
            // Report the side away from {s,t}.
            consider(side_to_sorted(ans.side, merged, n, true), ans.value, rat(2));
        }
    }
    return best;
}

LpModel subtour_model(const Instance& inst,
                      const std::vector<std::vector<char>>& cut_sides) {
    LpModel model;
    model.var_count = inst.edge_count();
    model.sense = Sense::Min;
    for (int id = 0; id < inst.edge_count(); ++id)
        if (inst.edge_cost(id) != 0) model.objective.emplace_back(id, inst.edge_cost(id));
    for (int v = 0; v < inst.n; ++v) {
        std::vector<std::pair<int, Rat>> row;
        for (int u = 0; u < inst.n; ++u)
            if (u != v) row.emplace_back(inst.edge_id(u, v), rat(1));
        model.add_row(std::move(row),
                      Rel::Eq, (v == inst.s || v == inst.t) ? rat(1) : rat(2));
    }
    for (const auto& side : cut_sides) {
        std::vector<std::pair<int, Rat>> row;
        for (int id = 0; id < inst.edge_count(); ++id) {
            auto [u, v] = inst.edge_vertices(id);
            if (side[u] != side[v]) row.emplace_back(id, rat(1));
        }
        model.add_row(std::move(row), Rel::Ge, cut_requirement(inst, side));
    }
    return model;
}

LpSolution solve_subtour_lp(const Instance& inst) {
    std::vector<std::vector<char>> cut_sides;
    {
        std::vector<char> only_s(inst.n, 0), all_but_t(inst.n, 1);
        only_s[inst.s] = 1;
        all_but_t[inst.t] = 0;
        cut_sides.push_back(only_s);
        if (inst.n > 2) cut_sides.push_back(all_but_t);
    }
    std::set<std::vector<int>> seen;
    while (true) {
        LpModel model = subtour_model(inst, cut_sides);
        LpOutcome out = solve_lp(model);
        if (out.status != LpStatus::Optimal)
            throw InternalError("subtour LP relaxation must stay solvable");
        auto violated = separate(out.values, inst);
        if (!violated) {
            // Closing audit: the point satisfies every row it was built from.
            if (!check_feasible_point(model, out.values).empty())
                throw InternalError("final LP point violates its own constraint set");
            LpSolution sol = LpSolution::from_vector(inst, std::move(out.values));
            if (sol.value != out.objective)
                throw InternalError("subtour LP objective mismatch");
            return sol;
        }
        if (!seen.insert(violated->u_side).second)
            throw InternalError("separation returned a repeated cut");
        std::vector<char> side(inst.n, 0);
        for (int v : violated->u_side) side[v] = 1;
        cut_sides.push_back(std::move(side));
    }
}

}  // namespace pathtsp
