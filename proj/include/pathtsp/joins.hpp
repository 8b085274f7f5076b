#pragma once

#include <optional>
#include <vector>

#include "pathtsp/cuts.hpp"
#include "pathtsp/instance.hpp"
#include "pathtsp/subtour.hpp"
#include "pathtsp/treedecomp.hpp"

namespace pathtsp {

/// Vertices of odd degree in an edge multiset (packed ids, repeats allowed).
std::vector<int> odd_vertices(const Instance& inst, const std::vector<int>& edges);

/// parity_set(edges) symmetric-differenced with {s,t}: the set whose join
/// fixes the multigraph to odd degree exactly at the endpoints.
std::vector<int> wrong_parity_set(const Instance& inst, const std::vector<int>& edges);

struct Join {
    std::vector<int> edges;  // sorted packed ids, multiplicity one
    Rat cost;                // under the costs it was computed with
};

/// Exact minimum-cost T-join on the graph whose usable pairs carry a cost
/// (absent entries are unusable). All-pairs shortest paths, then perfect
/// matching on T by subset dynamic programming, then mod-2 path expansion.
/// |T| must be even and at most matching_cap.
Join min_tjoin(int n, const std::vector<std::optional<Rat>>& pair_costs,
               const std::vector<int>& parity_set, int matching_cap = 20);

/// Convenience: T-join on the complete instance graph under arbitrary costs.
Join min_tjoin_complete(const Instance& inst, const std::vector<Rat>& costs,
                        const std::vector<int>& parity_set, int matching_cap = 20);

/// Fractional parity correction for the forest F = S \ L(S):
///   y_F = x*/2 + gamma * S(s,t)
///       + sum over lonely cuts Q with x*(Q) <= 2-2gamma of
///             (1 - x*(Q)/2 - gamma) * e_S^Q
///       + sum over narrow cuts Q with x*(Q) <= 2-2gamma and |F cap Q| even,
///         nonzero, of ((1 - x*(Q)/2 - gamma) / (2 - x*(Q))) * x^Q.
/// The three provenance parts are kept separate; reconnection needs the fact
/// that only the basic part can touch bad edges.
struct ParityCorrectionVector {
    Rat gamma;
    std::vector<Rat> basic, empty_cut, even_cut;  // dense by edge id

    Rat at(int edge) const { return basic[edge] + empty_cut[edge] + even_cut[edge]; }
    std::vector<Rat> total() const;
};

ParityCorrectionVector build_yf(const Instance& inst, const LpSolution& xstar,
                                const NarrowCutChain& chain, const CombinationStats& stats,
                                const TreeEntry& tree, const Rat& gamma);

struct OddCutViolation {
    std::vector<int> u_side;
    Rat weight;  // < 1
};

/// Minimum-weight odd cut membership test for the T-join polyhedron
/// { y >= 0 : y(delta(U)) >= 1 whenever |U cap T| is odd }. Returns the
/// violated cut of smallest weight, or nothing when y is a member.
std::optional<OddCutViolation> check_tjoin_polyhedron(int n, const std::vector<Rat>& y,
                                                      const std::vector<int>& parity_set);

}  // namespace pathtsp
