#include "pathtsp/instance.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "pathtsp/errors.hpp"

namespace pathtsp {

using nlohmann::json;

int Instance::edge_id(int u, int v) const {
    if (u == v || u < 0 || v < 0 || u >= n || v >= n)
        throw InternalError("edge_id: bad pair (" + std::to_string(u) + "," +
                            std::to_string(v) + ")");
    if (u > v) std::swap(u, v);
    // Row u of the upper triangle starts after rows 0..u-1.
    return u * (2 * n - u - 1) / 2 + (v - u - 1);
}

std::pair<int, int> Instance::edge_vertices(int id) const {
    int u = 0;
    int row = n - 1;
    while (id >= row) {
        id -= row;
        --row;
        ++u;
    }
    return {u, u + 1 + id};
}

void Instance::validate() const {
    if (n < 2) throw MetricError("instance needs at least two vertices");
    if (s == t || s < 0 || t < 0 || s >= n || t >= n)
        throw MetricError("endpoints s,t must be distinct vertices");
    if (static_cast<int>(costs.size()) != edge_count())
        throw MetricError("cost table has wrong size");
    for (int id = 0; id < edge_count(); ++id) {
        if (costs[id] < 0) {
            auto [u, v] = edge_vertices(id);
            throw MetricError("negative cost on edge (" + std::to_string(u) +
                              "," + std::to_string(v) + ")");
        }
    }
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            if (v == u) continue;
            for (int w = v + 1; w < n; ++w) {
                if (w == u) continue;
                if (cost(v, w) > cost(v, u) + cost(u, w))
                    throw MetricError(
                        "triangle inequality violated on (" +
                        std::to_string(v) + "," + std::to_string(u) + "," +
                        std::to_string(w) + "): c(" + std::to_string(v) + "," +
                        std::to_string(w) + ")=" + rat_to_string(cost(v, w)) +
                        " > " + rat_to_string(cost(v, u) + cost(u, w)));
            }
        }
}

std::vector<Rat> metric_closure(int n, const PartialCosts& raw) {
    if (static_cast<int>(raw.size()) != n * (n - 1) / 2)
        throw InternalError("metric_closure: bad table size");
    auto id = [n](int u, int v) {
        if (u > v) std::swap(u, v);
        return u * (2 * n - u - 1) / 2 + (v - u - 1);
    };
    std::vector<std::optional<Rat>> dist(raw);
    for (const auto& d : dist)
        if (d && *d < 0) throw MetricError("metric_closure: negative cost");
    for (int k = 0; k < n; ++k)
        for (int u = 0; u < n; ++u) {
            if (u == k) continue;
            const auto& du = dist[id(u, k)];
            if (!du) continue;
            for (int v = u + 1; v < n; ++v) {
                if (v == k) continue;
                const auto& dv = dist[id(k, v)];
                if (!dv) continue;
                Rat through = *du + *dv;
                auto& cur = dist[id(u, v)];
                if (!cur || through < *cur) cur = through;
            }
        }
    std::vector<Rat> out(dist.size());
    for (size_t i = 0; i < dist.size(); ++i) {
        if (!dist[i]) throw MetricError("metric_closure: support is disconnected");
        out[i] = *dist[i];
    }
    return out;
}

uint64_t Rng::next() {
    // splitmix64
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

uint64_t Rng::next_below(uint64_t bound) { return next() % bound; }

namespace {

Rat parse_json_rat(const json& v) {
    if (v.is_number_integer()) return rat(v.get<long long>());
    if (v.is_string()) return rat_from_string(v.get<std::string>());
    throw ParseError("expected integer or \"p/q\" string, got " + v.dump());
}

int parse_json_vertex(const json& v, int n) {
    long idx;
    if (v.is_number_integer())
        idx = v.get<long>();
    else if (v.is_string())
        idx = std::stol(v.get<std::string>());
    else
        throw ParseError("bad vertex index " + v.dump());
    if (idx < 0 || idx >= n) throw ParseError("vertex index out of range");
    return static_cast<int>(idx);
}

Instance load_json_instance(std::istream& in, const LoadOptions& options) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& ex) {
        throw ParseError(std::string("invalid JSON: ") + ex.what());
    }
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("costs"))
        throw ParseError("instance JSON needs fields n, s, t, costs");
    Instance inst;
    inst.n = doc["n"].get<int>();
    if (inst.n < 2) throw ParseError("n must be at least 2");
    inst.s = doc.contains("s") ? parse_json_vertex(doc["s"], inst.n) : 0;
    inst.t = doc.contains("t") ? parse_json_vertex(doc["t"], inst.n) : 1;
    if (options.s_override) inst.s = *options.s_override;
    if (options.t_override) inst.t = *options.t_override;

    PartialCosts table(inst.n * (inst.n - 1) / 2);
    for (const auto& entry : doc["costs"]) {
        if (!entry.is_array() || entry.size() != 3)
            throw ParseError("cost entries must be [u, v, cost]");
        int u = parse_json_vertex(entry[0], inst.n);
        int v = parse_json_vertex(entry[1], inst.n);
        if (u == v) throw ParseError("cost entry with u == v");
        int id = (u > v ? v * (2 * inst.n - v - 1) / 2 + (u - v - 1)
                        : u * (2 * inst.n - u - 1) / 2 + (v - u - 1));
        Rat c = parse_json_rat(entry[2]);
        if (table[id] && *table[id] != c)
            throw ParseError("conflicting costs for one edge");
        table[id] = c;
    }
    if (options.apply_closure) {
        inst.costs = metric_closure(inst.n, table);
    } else {
        inst.costs.resize(table.size());
        for (size_t i = 0; i < table.size(); ++i) {
            if (!table[i]) throw ParseError("missing cost for some edge; use --closure for partial inputs");
            inst.costs[i] = *table[i];
        }
    }
    inst.validate();
    return inst;
}

// Decimal literal (with optional exponent) as an exact rational.
Rat parse_decimal(const std::string& text) {
    size_t pos = 0;
    bool neg = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        neg = text[pos] == '-';
        ++pos;
    }
    std::string digits;
    long frac_len = 0;
    bool any = false;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        digits += text[pos++];
        any = true;
    }
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            digits += text[pos++];
            ++frac_len;
            any = true;
        }
    }
    long exp = 0;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        bool eneg = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            eneg = text[pos] == '-';
            ++pos;
        }
        if (pos >= text.size()) throw ParseError("bad number '" + text + "'");
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
            exp = exp * 10 + (text[pos++] - '0');
        if (eneg) exp = -exp;
    }
    if (!any || pos != text.size()) throw ParseError("bad number '" + text + "'");
    Int mantissa(digits.empty() ? "0" : digits);
    if (neg) mantissa = -mantissa;
    long power = exp - frac_len;
    Int pow10 = 1;
    for (long i = 0; i < std::abs(power); ++i) pow10 *= 10;
    Rat value = power >= 0 ? Rat(mantissa * pow10) : Rat(mantissa, pow10);
    value.canonicalize();
    return value;
}

// TSPLIB EUC_2D rounding: nearest integer to sqrt(d), half rounding up.
Int nint_sqrt(const Rat& d) {
    if (d < 0) throw InternalError("nint_sqrt of negative value");
    Int floor_d = d.get_num() / d.get_den();
    Int base;
    mpz_sqrt(base.get_mpz_t(), floor_d.get_mpz_t());
    for (Int m = base > 1 ? base - 1 : Int(0);; ++m) {
        // m = floor(sqrt(d) + 1/2)  <=>  (2m-1)^2 <= 4d < (2m+1)^2
        Rat four_d = 4 * d;
        Int lo = 2 * m - 1, hi = 2 * m + 1;
        bool lower_ok = m == 0 || Rat(lo * lo) <= four_d;
        bool upper_ok = four_d < Rat(hi * hi);
        if (lower_ok && upper_ok) return m;
        if (m > base + 2) throw InternalError("nint_sqrt search failed");
    }
}

Instance load_tsplib_instance(std::istream& in, const LoadOptions& options) {
    int dimension = -1;
    std::string weight_type, weight_format;
    std::vector<std::pair<Rat, Rat>> coords;
    std::vector<Rat> matrix;
    std::string line;
    auto trim = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\r\n");
        size_t b = s.find_last_not_of(" \t\r\n");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    enum class Section { None, Coords, Weights } section = Section::None;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty()) continue;
        std::string upper = t;
        std::transform(upper.begin(), upper.end(), upper.begin(), ::toupper);
        if (upper == "EOF") break;
        auto colon = t.find(':');
        std::string key = upper.substr(0, colon == std::string::npos ? upper.size() : colon);
        key = trim(key);
        if (key == "NAME" || key == "COMMENT" || key == "TYPE") {
            section = Section::None;
            continue;
        }
        if (key == "DIMENSION") {
            dimension = std::stoi(trim(t.substr(colon + 1)));
            continue;
        }
        if (key == "EDGE_WEIGHT_TYPE") {
            weight_type = trim(upper.substr(colon + 1));
            continue;
        }
        if (key == "EDGE_WEIGHT_FORMAT") {
            weight_format = trim(upper.substr(colon + 1));
            continue;
        }
        if (key == "NODE_COORD_SECTION") {
            section = Section::Coords;
            continue;
        }
        if (key == "EDGE_WEIGHT_SECTION") {
            section = Section::Weights;
            continue;
        }
        if (section == Section::Coords) {
            std::istringstream row(t);
            std::string idx, xs, ys;
            if (!(row >> idx >> xs >> ys)) throw ParseError("bad coordinate line: " + t);
            coords.emplace_back(parse_decimal(xs), parse_decimal(ys));
        } else if (section == Section::Weights) {
            std::istringstream row(t);
            std::string w;
            while (row >> w) matrix.push_back(parse_decimal(w));
        } else {
            throw ParseError("unsupported TSPLIB line: " + t);
        }
    }
    if (dimension < 2) throw ParseError("TSPLIB file missing DIMENSION");

    Instance inst;
    inst.n = dimension;
    inst.s = options.s_override.value_or(0);  // TSPLIB nodes 1,2 by default
    inst.t = options.t_override.value_or(1);
    PartialCosts table(inst.n * (inst.n - 1) / 2);
    auto id = [&inst](int u, int v) {
        if (u > v) std::swap(u, v);
        return u * (2 * inst.n - u - 1) / 2 + (v - u - 1);
    };
    if (weight_type == "EUC_2D") {
        if (static_cast<int>(coords.size()) != dimension)
            throw ParseError("NODE_COORD_SECTION has wrong number of rows");
        for (int u = 0; u < inst.n; ++u)
            for (int v = u + 1; v < inst.n; ++v) {
                Rat dx = coords[u].first - coords[v].first;
                Rat dy = coords[u].second - coords[v].second;
                table[id(u, v)] = Rat(nint_sqrt(dx * dx + dy * dy));
            }
    } else if (weight_type == "EXPLICIT") {
        if (weight_format != "FULL_MATRIX")
            throw ParseError("only EDGE_WEIGHT_FORMAT FULL_MATRIX is supported");
        if (static_cast<int>(matrix.size()) != dimension * dimension)
            throw ParseError("EDGE_WEIGHT_SECTION has wrong number of entries");
        for (int u = 0; u < inst.n; ++u)
            for (int v = u + 1; v < inst.n; ++v) {
                const Rat& a = matrix[u * dimension + v];
                const Rat& b = matrix[v * dimension + u];
                if (a != b) throw ParseError("asymmetric FULL_MATRIX entry");
                table[id(u, v)] = a;
            }
    } else {
        throw ParseError("unsupported EDGE_WEIGHT_TYPE '" + weight_type + "'");
    }
    if (options.apply_closure) {
        inst.costs = metric_closure(inst.n, table);
    } else {
        inst.costs.resize(table.size());
        for (size_t i = 0; i < table.size(); ++i) inst.costs[i] = *table[i];
    }
    inst.validate();
    return inst;
}

}  // namespace

Instance load_instance(std::istream& in, InstanceFormat format,
                       const LoadOptions& options) {
    return format == InstanceFormat::Json ? load_json_instance(in, options)
                                          : load_tsplib_instance(in, options);
}

Instance load_instance_file(const std::string& path, InstanceFormat format,
                            const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return load_instance(in, format, options);
}

void Instance::write_json(std::ostream& out) const {
    json doc;
    doc["n"] = n;
    doc["s"] = s;
    doc["t"] = t;
    json costs_json = json::array();
    for (int idx = 0; idx < edge_count(); ++idx) {
        auto [u, v] = edge_vertices(idx);
        costs_json.push_back({u, v, rat_to_string(costs[idx])});
    }
    doc["costs"] = std::move(costs_json);
    out << doc.dump(2) << "\n";
}

std::string Instance::to_json() const {
    std::ostringstream out;
    write_json(out);
    return out.str();
}

Instance gen_random_metric(int n, uint64_t seed, GenKind kind) {
    if (n < 3) throw ParseError("gen_random_metric needs n >= 3");
    Rng rng(seed * 0x100000001b3ULL + static_cast<uint64_t>(n) * 1099511628211ULL +
            (kind == GenKind::Euclidean ? 0 : 0x517cc1b727220a95ULL));
    Instance inst;
    inst.n = n;
    inst.s = 0;
    inst.t = 1;
    PartialCosts table(n * (n - 1) / 2);
    auto id = [n](int u, int v) {
        if (u > v) std::swap(u, v);
        return u * (2 * n - u - 1) / 2 + (v - u - 1);
    };
    if (kind == GenKind::Euclidean) {
        uint64_t box = std::max<uint64_t>(12, 4 * static_cast<uint64_t>(n));
        std::vector<std::pair<long, long>> pts;
        while (static_cast<int>(pts.size()) < n) {
            long x = static_cast<long>(rng.next_below(box));
            long y = static_cast<long>(rng.next_below(box));
            bool dup = false;
            for (auto& p : pts) dup |= (p.first == x && p.second == y);
            if (!dup) pts.emplace_back(x, y);
        }
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) {
                Rat dx = rat(pts[u].first - pts[v].first);
                Rat dy = rat(pts[u].second - pts[v].second);
                table[id(u, v)] = Rat(nint_sqrt(dx * dx + dy * dy));
            }
        // Rounding can dent the triangle inequality; the closure repairs it
        // without moving any already-metric distance.
    } else {
        for (int v = 1; v < n; ++v) {
            int parent = static_cast<int>(rng.next_below(v));
            table[id(parent, v)] = rat(1 + static_cast<long>(rng.next_below(9)));
        }
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) {
                if (table[id(u, v)]) continue;
                if (rng.next_below(100) < 35)
                    table[id(u, v)] = rat(1 + static_cast<long>(rng.next_below(9)));
            }
    }
    inst.costs = metric_closure(n, table);
    inst.validate();
    return inst;
}

}  // namespace pathtsp
