#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pathtsp/rational.hpp"

namespace pathtsp {

enum class InstanceFormat { Json, Tsplib };
enum class GenKind { Euclidean, GraphMetric };

/// A complete metric s-t path TSP instance. Costs are exact rationals over
/// the packed upper-triangular edge list; immutable after construction.
struct Instance {
    int n = 0;
    int s = 0;
    int t = 1;
    std::vector<Rat> costs;  // size n*(n-1)/2, packed by edge_id

    int edge_count() const { return n * (n - 1) / 2; }

    /// Packed id of the unordered pair {u,v}, u != v.
    int edge_id(int u, int v) const;
    std::pair<int, int> edge_vertices(int id) const;

    const Rat& cost(int u, int v) const { return costs[edge_id(u, v)]; }
    const Rat& edge_cost(int id) const { return costs[id]; }

    /// Full O(n^3) scan: symmetry is structural, checks nonnegativity and
    /// every triangle. Throws MetricError naming the violating triple.
    void validate() const;

    void write_json(std::ostream& out) const;
    std::string to_json() const;
};

/// Pairwise costs with absent entries; closure fills them in.
using PartialCosts = std::vector<std::optional<Rat>>;

/// All-pairs shortest-path distances of the given nonnegative costs.
/// Throws MetricError if the defined edges do not connect all vertices.
std::vector<Rat> metric_closure(int n, const PartialCosts& raw);

struct LoadOptions {
    bool apply_closure = false;  // repair non-metric input via shortest paths
    std::optional<int> s_override;
    std::optional<int> t_override;  // 0-based vertex indices
};

Instance load_instance(std::istream& in, InstanceFormat format,
                       const LoadOptions& options = {});
Instance load_instance_file(const std::string& path, InstanceFormat format,
                            const LoadOptions& options = {});

/// Deterministic in (n, seed, kind). Euclidean draws distinct integer grid
/// points and rounds pairwise distances to the nearest integer; graph-metric
/// draws a random connected weighted graph. Both finish with metric_closure,
/// so every generated instance is metric by construction.
Instance gen_random_metric(int n, uint64_t seed, GenKind kind);

/// splitmix64; the generation contract depends on this exact sequence.
struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed) {}
    uint64_t next();
    /// Uniform-ish value in [0, bound); bound > 0.
    uint64_t next_below(uint64_t bound);
};

}  // namespace pathtsp
