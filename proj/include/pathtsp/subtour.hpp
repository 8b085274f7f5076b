#pragma once

#include <optional>
#include <vector>

#include "pathtsp/instance.hpp"
#include "pathtsp/lp.hpp"
#include "pathtsp/rational.hpp"

namespace pathtsp {

/// Optimal subtour-LP vector for an instance. x is indexed by packed edge id
/// over the complete graph; support lists the ids with x > 0.
struct LpSolution {
    std::vector<Rat> x;
    std::vector<int> support;
    Rat value;
    Int lcd;  // least common denominator K of all x(e)

    /// x(delta(U)) for the 0/1 side mask U.
    Rat cut_value(const Instance& inst, const std::vector<char>& side) const;

    /// Wraps a raw vector: computes support/value/lcd and checks degree
    /// equalities and nonnegativity (full cut feasibility is the caller's
    /// business; exhaustive checks live in the tests).
    static LpSolution from_vector(const Instance& inst, std::vector<Rat> x);
};

/// f(U): 1 when U separates s from t, else 2.
Rat cut_requirement(const Instance& inst, const std::vector<char>& side);

struct SeparatedCut {
    std::vector<int> u_side;  // sorted vertex list
    Rat violation;            // f(U) - x(delta(U)) > 0
    Rat requirement;          // f(U)
};

/// Exact most-violated subtour cut, or nothing iff x is feasible. Probes the
/// minimum s-t cut against threshold 1 and the minimum cut of the graph with
/// s,t identified against threshold 2; assumes x >= 0 with degrees satisfied.
std::optional<SeparatedCut> separate(const std::vector<Rat>& x, const Instance& inst);

/// Cutting-plane solve of the full (exponential) subtour LP: starts from the
/// degree system, adds one most-violated cut per round, and stops on a
/// no-violation certificate from `separate`.
LpSolution solve_subtour_lp(const Instance& inst);

/// Explicit LP with the degree equalities plus the given cut rows; used to
/// re-check final solutions and by the exhaustive-constraint test oracle.
LpModel subtour_model(const Instance& inst, const std::vector<std::vector<char>>& cut_sides);

}  // namespace pathtsp
