#pragma once

// Simple undirected graphs on 0-based contiguous vertices, plus seeded
// G(n,p) generation, random edge partitioning, degree statistics and
// edge-list / JSON I/O.
//
// Graph values are immutable after construction and safe to share across
// threads. Adjacency is kept both as sorted neighbor lists and, for
// n <= 4096, as bitset rows for O(1) membership tests.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"

namespace hamcover {

using Vertex = int;
using Edge = std::pair<Vertex, Vertex>; // normalized u < v

inline Edge make_edge(Vertex a, Vertex b) {
    return a < b ? Edge{a, b} : Edge{b, a};
}

inline constexpr int kDenseLimit = 4096;

class Graph {
public:
    Graph() = default;

    explicit Graph(int n) : n_(n), adj_(n) {
        if (n < 0) throw std::invalid_argument("Graph: negative vertex count");
        init_bits();
    }

    // Validates: indices in range, no self-loops, no duplicates.
    static Graph from_edges(int n, std::vector<Edge> edges) {
        Graph g(n);
        for (auto& e : edges) e = make_edge(e.first, e.second);
        std::sort(edges.begin(), edges.end());
        for (std::size_t i = 0; i < edges.size(); ++i) {
            auto [u, v] = edges[i];
            if (u == v) throw std::invalid_argument("Graph: self-loop " + std::to_string(u));
            if (u < 0 || v >= n)
                throw std::invalid_argument("Graph: vertex out of range in edge (" +
                                            std::to_string(u) + "," + std::to_string(v) + ")");
            if (i > 0 && edges[i] == edges[i - 1])
                throw std::invalid_argument("Graph: duplicate edge (" + std::to_string(u) + "," +
                                            std::to_string(v) + ")");
        }
        g.edges_ = std::move(edges);
        g.rebuild_adjacency();
        return g;
    }

    int n() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Vertex>& neighbors(Vertex v) const { return adj_[v]; }
    int degree(Vertex v) const { return static_cast<int>(adj_[v].size()); }

    bool has_edge(Vertex a, Vertex b) const {
        if (a == b) return false;
        if (!bits_.empty())
            return (bits_[static_cast<std::size_t>(a) * words_ + (b >> 6)] >> (b & 63)) & 1u;
        const auto& na = adj_[a];
        return std::binary_search(na.begin(), na.end(), b);
    }

    // Bitset row access for subset counting; empty when n > kDenseLimit.
    const std::uint64_t* row(Vertex v) const {
        return bits_.empty() ? nullptr : bits_.data() + static_cast<std::size_t>(v) * words_;
    }
    std::size_t row_words() const { return words_; }

    bool operator==(const Graph& o) const { return n_ == o.n_ && edges_ == o.edges_; }

    Graph with_edges_added(const std::vector<Edge>& extra) const {
        std::vector<Edge> all = edges_;
        for (auto e : extra) all.push_back(make_edge(e.first, e.second));
        return from_edges(n_, std::move(all));
    }

    Graph with_edges_removed(const std::vector<Edge>& gone) const {
        std::vector<Edge> norm;
        norm.reserve(gone.size());
        for (auto e : gone) norm.push_back(make_edge(e.first, e.second));
        std::sort(norm.begin(), norm.end());
        std::vector<Edge> kept;
        kept.reserve(edges_.size());
        for (auto e : edges_)
            if (!std::binary_search(norm.begin(), norm.end(), e)) kept.push_back(e);
        return from_edges(n_, std::move(kept));
    }

    // Drops vertex v and relabels w > v to w-1. old_of maps new ids back.
    Graph without_vertex(Vertex v, std::vector<Vertex>* old_of = nullptr) const {
        std::vector<Edge> kept;
        for (auto [a, b] : edges_) {
            if (a == v || b == v) continue;
            kept.push_back(make_edge(a > v ? a - 1 : a, b > v ? b - 1 : b));
        }
        if (old_of) {
            old_of->clear();
            for (Vertex w = 0; w < n_; ++w)
                if (w != v) old_of->push_back(w);
        }
        return from_edges(n_ - 1, std::move(kept));
    }

    static Graph complete(int n) {
        std::vector<Edge> e;
        e.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) e.push_back({u, v});
        return from_edges(n, std::move(e));
    }

    static Graph cycle(int n) {
        if (n < 3) throw std::invalid_argument("cycle: need n >= 3");
        std::vector<Edge> e;
        for (int v = 0; v < n; ++v) e.push_back(make_edge(v, (v + 1) % n));
        return from_edges(n, std::move(e));
    }

    static Graph path(int n) {
        std::vector<Edge> e;
        for (int v = 0; v + 1 < n; ++v) e.push_back({v, v + 1});
        return from_edges(n, std::move(e));
    }

    static Graph star(int leaves) {
        std::vector<Edge> e;
        for (int v = 1; v <= leaves; ++v) e.push_back({0, v});
        return from_edges(leaves + 1, std::move(e));
    }

private:
    void init_bits() {
        if (n_ > 0 && n_ <= kDenseLimit) {
            words_ = static_cast<std::size_t>((n_ + 63) / 64);
            bits_.assign(static_cast<std::size_t>(n_) * words_, 0);
        } else {
            words_ = 0;
            bits_.clear();
        }
    }

    void rebuild_adjacency() {
        adj_.assign(n_, {});
        init_bits();
        for (auto [u, v] : edges_) {
            adj_[u].push_back(v);
            adj_[v].push_back(u);
            if (!bits_.empty()) {
                bits_[static_cast<std::size_t>(u) * words_ + (v >> 6)] |= 1ULL << (v & 63);
                bits_[static_cast<std::size_t>(v) * words_ + (u >> 6)] |= 1ULL << (u & 63);
            }
        }
        for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
    }

    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<Vertex>> adj_;
    std::vector<std::uint64_t> bits_;
    std::size_t words_ = 0;
};

struct DegreeProfile {
    int min_degree = 0;
    int max_degree = 0;
    std::vector<Vertex> argmax_vertices;
    std::vector<Vertex> argmin_vertices;
    // Delta minus the second-largest degree; 0 when the maximum is not unique.
    int downjump_gap = 0;
};

inline DegreeProfile degree_profile(const Graph& g) {
    if (g.n() < 1) throw std::invalid_argument("degree_profile: empty graph");
    DegreeProfile p;
    p.min_degree = g.degree(0);
    p.max_degree = g.degree(0);
    for (Vertex v = 0; v < g.n(); ++v) {
        p.min_degree = std::min(p.min_degree, g.degree(v));
        p.max_degree = std::max(p.max_degree, g.degree(v));
    }
    int second = -1;
    for (Vertex v = 0; v < g.n(); ++v) {
        int d = g.degree(v);
        if (d == p.max_degree) p.argmax_vertices.push_back(v);
        if (d == p.min_degree) p.argmin_vertices.push_back(v);
        if (d < p.max_degree) second = std::max(second, d);
    }
    if (p.argmax_vertices.size() == 1 && second >= 0)
        p.downjump_gap = p.max_degree - second;
    else if (p.argmax_vertices.size() == 1) // single vertex graph
        p.downjump_gap = p.max_degree;
    return p;
}

// --- seeded generation -------------------------------------------------

namespace stream_id {
inline constexpr std::uint64_t gnp = 0x01;
inline constexpr std::uint64_t partition = 0x02;
inline constexpr std::uint64_t search = 0x03;
inline constexpr std::uint64_t sampling = 0x04;
inline constexpr std::uint64_t pipeline = 0x05;
inline constexpr std::uint64_t experiment = 0x06;
} // namespace stream_id

inline Graph generate_gnp(int n, double p, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate_gnp: need n >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("generate_gnp: p outside [0,1]");
    auto rng = substream(seed, stream_id::gnp);
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (p >= 1.0 || (p > 0.0 && unit_real(rng) < p)) edges.push_back({u, v});
    return Graph::from_edges(n, std::move(edges));
}

struct EdgePartition {
    Graph parent;
    std::vector<Graph> parts;
    // part index per parent edge, -1 when unassigned; parallel to parent.edges().
    std::vector<int> part_of;
};

inline EdgePartition partition_edges(const Graph& g, const std::vector<double>& weights,
                                     std::uint64_t seed) {
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("partition_edges: negative weight");
        total += w;
    }
    if (total > 1.0 + 1e-12) throw std::invalid_argument("partition_edges: weights sum above 1");
    auto rng = substream(seed, stream_id::partition);
    std::vector<std::vector<Edge>> part_edges(weights.size());
    EdgePartition out;
    out.part_of.assign(g.edge_count(), -1);
    for (std::size_t i = 0; i < g.edge_count(); ++i) {
        double x = unit_real(rng);
        double acc = 0.0;
        for (std::size_t k = 0; k < weights.size(); ++k) {
            acc += weights[k];
            if (x < acc) {
                part_edges[k].push_back(g.edges()[i]);
                out.part_of[i] = static_cast<int>(k);
                break;
            }
        }
    }
    out.parent = g;
    for (auto& pe : part_edges) out.parts.push_back(Graph::from_edges(g.n(), std::move(pe)));
    return out;
}

// --- I/O ----------------------------------------------------------------

// Text format: first line n, then one "u v" per line with 0 <= u < v < n.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

inline Graph read_edge_list(std::istream& in) {
    std::string line;
    int lineno = 0;
    long n = -1;
    std::vector<Edge> edges;
    std::vector<char> seen; // duplicate detection via flat bitmap when feasible
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        if (n < 0) {
            if (!(ls >> n) || n < 1) throw ParseError(lineno, "expected vertex count");
            std::string rest;
            if (ls >> rest) throw ParseError(lineno, "trailing tokens after vertex count");
            continue;
        }
        long u, v;
        if (!(ls >> u)) {
            bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
            if (blank) continue;
            throw ParseError(lineno, "malformed edge line");
        }
        if (!(ls >> v)) throw ParseError(lineno, "malformed edge line");
        std::string rest;
        if (ls >> rest) throw ParseError(lineno, "trailing tokens after edge");
        if (u < 0 || v >= n || u >= v)
            throw ParseError(lineno, "edge (" + std::to_string(u) + "," + std::to_string(v) +
                                         ") violates 0 <= u < v < n");
        if (n <= 1 << 14) {
            if (seen.empty()) seen.assign(static_cast<std::size_t>(n) * n, 0);
            auto& flag = seen[static_cast<std::size_t>(u) * n + v];
            if (flag) throw ParseError(lineno, "duplicate edge");
            flag = 1;
        }
        edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
    }
    if (n < 0) throw ParseError(lineno + 1, "empty input");
    try {
        return Graph::from_edges(static_cast<int>(n), std::move(edges));
    } catch (const std::invalid_argument& e) {
        throw ParseError(lineno, e.what());
    }
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
    out << g.n() << "\n";
    for (auto [u, v] : g.edges()) out << u << " " << v << "\n";
}

} // namespace hamcover
