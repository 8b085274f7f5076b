#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pathtsp/bomd.hpp"

namespace pathtsp {

/// Exact minimum Hamiltonian s-t path cost by subset dynamic programming.
Rat brute_force_opt(const Instance& inst, int size_cap = 16);

/// Per-cut coefficient of c(x^Q) in the forest-based total:
///   (2 - x - 2*gamma) / (2 (2 - x)) + x - 2   for x = x*(Q) in [1,2).
/// Nonpositive for every x exactly when gamma >= 1/16, with equality only at
/// x = 7/4 when gamma = 1/16.
Rat multiplier(const Rat& x, const Rat& gamma);

/// Coefficient of c(x^Q) in the no-deletion analysis:
///   (x - 1) (1 - gamma - x/2) / (2 - x); at gamma = 1/8 it is at most 1/8,
/// met exactly at x = 3/2.
Rat bomc85_coefficient(const Rat& x, const Rat& gamma);

struct LedgerEntry {
    std::string name;
    Rat lhs, rhs;  // asserted lhs <= rhs
    bool pass = false;
};

struct TreeLedger {
    int tree_index = 0;
    Rat lambda;
    int group = 0;
    Rat c_tree, c_forest, c_yf, cprime_yf, cprime_join, c_p1, c_p2;
    Rat surcharge_lhs, surcharge_rhs;
};

struct SpecialCaseFlags {
    bool disjoint_narrow_cuts = false;      // pairwise edge-disjoint
    bool at_most_two_cuts_per_edge = false;
    bool all_small = false;                 // every x*(Q) <= 3/2
    bool one_not_small = false;             // exactly one distinct size > 3/2
};

/// The machine-checked inequality ledger for one pipeline run.
struct TourCertificate {
    Rat gamma;
    Rat c_xstar, c_pstar, c_qstar;
    Rat b1;           // 3/2 c(x*) + gamma c(p*)
    Rat b2;           // 2 c(x*) - c(p*)
    Rat bound_coeff;  // (3+4g)/(2+2g); 26/17 at gamma = 1/16
    Rat bound_value;  // bound_coeff * c(x*)
    std::vector<TreeLedger> trees;
    std::vector<LedgerEntry> checks;
    SpecialCaseFlags flags;
    std::vector<int> tour_edges;
    Rat tour_cost;
    std::vector<int> tour_path;
    Rat tour_path_cost;
    std::optional<Rat> opt_brute;  // filled when Held-Karp is in range

    std::string to_json(const Instance& inst) const;
};

/// Assembles the certificate and asserts, exactly:
///  (i)  sum lambda_S [c(F) + c'(y_F)] <= B1        (needs gamma >= 1/16)
///  (ii) per tree: c(P1) <= c(F)+c'(J*) <= c(F)+c'(y_F)
///  (iii) sum lambda_S c(P2) <= B2
///  (iv) min(B1,B2) <= bound_coeff c(x*)            (needs gamma >= 1/16)
///  (v)  best tour <= min(B1,B2)
///  (vi) per tree: the reconnection surcharge bound.
/// Any failure throws InternalError naming the tree or cut.
TourCertificate certify_ratio(const PipelineResult& pipeline);

SpecialCaseFlags detect_flags(const NarrowCutChain& chain);

/// Re-validates a stored certificate against its instance: internal
/// identities, every recorded inequality, and the tour itself (cost, parity,
/// connectivity, shortcut cost). Returns the failure message, empty if valid.
std::string verify_certificate_json(const Instance& inst, std::istream& cert_json);

struct Bomc85Report {
    Rat c_xstar, c_pstar;
    Rat avg_tour_cost;  // sum lambda_S c(S + J_S)
    Rat bound1;         // 3/2 c(x*) + 1/4 c(p*)
    Rat bound2;         // 2 c(x*) - c(p*)
    int tree_count = 0;
};

/// No-deletion analysis at gamma = 1/8 over a plain (non-layered, trimmed)
/// combination: per-tree parity vectors are polyhedron-checked and the 8/5
/// chain avg <= min(bound1, bound2) <= 8/5 c(x*) is asserted exactly.
Bomc85Report certify_bomc_85(const Instance& inst, const LpSolution& xstar,
                             const NarrowCutChain& chain, const TreeCombination& combo,
                             const CombinationStats& stats, int matching_cap = 20);

struct SpecialCaseReport {
    SpecialCaseFlags flags;
    bool deletion_certificate = false;   // 3/2 bound via gamma = 0 + leftmost drop
    bool alternate_certificate = false;  // 3/2 bound via odd/even branch deletion
    Rat deletion_avg, alternate_avg;     // certified averages, when run
    Rat three_halves;                    // (3/2) c(x*)
};

/// Runs the special-case 3/2 certificates that apply to this pipeline:
/// the gamma = 0 deletion pipeline with the leftmost-drop rule when the
/// narrow cuts are disjoint or all small (reconnection must be empty in the
/// disjoint case), and the two-branch alternating deletion when no support
/// edge lies in more than two narrow cuts.
SpecialCaseReport detect_special_cases(const PipelineResult& pipeline,
                                       int matching_cap = 20);

}  // namespace pathtsp
