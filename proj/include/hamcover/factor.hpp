#pragma once

// f-factors via Tutte's criterion: exact solving through a gadget reduction
// to maximum matching, deficiency evaluation for infeasibility certificates,
// and the regularization step (extend H to a Delta(H)-regular graph using
// edges of a second, edge-disjoint graph).

#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"
#include "matching.hpp"

namespace hamcover {

struct FFactorInstance {
    Graph graph;
    std::vector<int> demand; // f(v) per vertex
    // set when some f(v) > degree(v); such instances are infeasible outright
    std::optional<Vertex> pointwise_violation;

    FFactorInstance(Graph g, std::vector<int> f) : graph(std::move(g)), demand(std::move(f)) {
        if (static_cast<int>(demand.size()) != graph.n())
            throw std::invalid_argument("FFactorInstance: demand size mismatch");
        for (Vertex v = 0; v < graph.n(); ++v) {
            if (demand[v] < 0) throw std::invalid_argument("FFactorInstance: negative demand");
            if (demand[v] > graph.degree(v) && !pointwise_violation) pointwise_violation = v;
        }
    }
};

struct FFactorSolution {
    Graph subgraph;
};

struct TutteCertificate {
    std::vector<Vertex> X;
    std::vector<Vertex> Y;
    long long alpha = 0; // odd components of G-X-Y
    long long beta = 0;  // sum_X f + sum_Y (d-f) - e(X,Y)
    bool violating() const { return alpha > beta; }
};

inline TutteCertificate tutte_deficiency(const FFactorInstance& inst,
                                         const std::vector<Vertex>& X,
                                         const std::vector<Vertex>& Y) {
    const Graph& g = inst.graph;
    std::vector<char> in_x(g.n(), 0), in_y(g.n(), 0);
    for (Vertex v : X) in_x[v] = 1;
    for (Vertex v : Y) {
        if (in_x[v]) throw std::invalid_argument("tutte_deficiency: X and Y overlap");
        in_y[v] = 1;
    }

    TutteCertificate cert;
    cert.X = X;
    cert.Y = Y;
    for (Vertex y : Y) cert.beta += g.degree(y) - inst.demand[y];
    for (Vertex x : X) {
        cert.beta += inst.demand[x];
        for (Vertex w : g.neighbors(x))
            if (in_y[w]) --cert.beta; // e(X,Y)
    }

    // component scan of G - X - Y, tracking sum f(K) + e(K,Y) parity
    std::vector<char> visited(g.n(), 0);
    std::vector<Vertex> stack;
    for (Vertex s = 0; s < g.n(); ++s) {
        if (visited[s] || in_x[s] || in_y[s]) continue;
        long long parity = 0;
        stack.push_back(s);
        visited[s] = 1;
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            parity += inst.demand[v];
            for (Vertex w : g.neighbors(v)) {
                if (in_y[w]) ++parity;
                if (!visited[w] && !in_x[w] && !in_y[w]) {
                    visited[w] = 1;
                    stack.push_back(w);
                }
            }
        }
        if (parity % 2 != 0) ++cert.alpha;
    }
    return cert;
}

struct FFactorResult {
    std::optional<FFactorSolution> solution;
    std::optional<TutteCertificate> certificate; // may be absent for large n
    bool feasible() const { return solution.has_value(); }
};

namespace detail {

// Exhaustive (X,Y) scan; 3^n assignments, intended for n <= 12.
inline std::optional<TutteCertificate> search_certificate_exhaustive(const FFactorInstance& inst) {
    const int n = inst.graph.n();
    std::vector<int> assign(n, 0); // 0 = out, 1 = X, 2 = Y
    std::vector<Vertex> X, Y;
    std::optional<TutteCertificate> best;
    for (;;) {
        X.clear();
        Y.clear();
        for (int v = 0; v < n; ++v) {
            if (assign[v] == 1) X.push_back(v);
            if (assign[v] == 2) Y.push_back(v);
        }
        TutteCertificate c = tutte_deficiency(inst, X, Y);
        if (c.violating() && (!best || c.alpha - c.beta > best->alpha - best->beta)) best = c;
        int i = 0;
        while (i < n && assign[i] == 2) assign[i++] = 0;
        if (i == n) break;
        ++assign[i];
    }
    return best;
}

inline std::optional<TutteCertificate> search_certificate_heuristic(const FFactorInstance& inst) {
    const Graph& g = inst.graph;
    auto try_cert = [&](const std::vector<Vertex>& X,
                        const std::vector<Vertex>& Y) -> std::optional<TutteCertificate> {
        TutteCertificate c = tutte_deficiency(inst, X, Y);
        if (c.violating()) return c;
        return std::nullopt;
    };
    if (auto c = try_cert({}, {})) return c;
    for (Vertex v = 0; v < g.n(); ++v) {
        if (auto c = try_cert({v}, {})) return c;
        if (auto c = try_cert({}, {v})) return c;
    }
    // vertices whose demand leaves no slack tend to appear in Y
    std::vector<Vertex> tight;
    for (Vertex v = 0; v < g.n(); ++v)
        if (g.degree(v) - inst.demand[v] <= 1) tight.push_back(v);
    if (!tight.empty() && tight.size() <= 20)
        if (auto c = try_cert({}, tight)) return c;
    return std::nullopt;
}

} // namespace detail

// Gadget reduction (per DESIGN: complete bipartite core per vertex between
// d(v) edge-end nodes and d(v)-f(v) slack nodes; original edges join the two
// endpoints' edge-ends). Perfect matching <=> f-factor.
inline FFactorResult find_f_factor(const FFactorInstance& inst, long deadline_ms = 0) {
    const Graph& g = inst.graph;
    const int n = g.n();
    FFactorResult out;

    if (inst.pointwise_violation) {
        Vertex v = *inst.pointwise_violation;
        out.certificate = tutte_deficiency(inst, {}, {v}); // beta = d-f < 0 <= alpha
        return out;
    }
    long long fsum = std::accumulate(inst.demand.begin(), inst.demand.end(), 0LL);
    if (fsum % 2 != 0) {
        out.certificate = tutte_deficiency(inst, {}, {});
        return out;
    }
    if (fsum == 0) {
        out.solution = FFactorSolution{Graph(n)};
        return out;
    }

    // node layout: per vertex, stubs then slacks, in vertex order
    std::vector<int> stub_base(n + 1, 0), slack_base(n + 1, 0);
    int total = 0;
    std::vector<int> stub_off(n, 0);
    for (Vertex v = 0; v < n; ++v) {
        stub_base[v] = total;
        total += g.degree(v);
        slack_base[v] = total;
        total += g.degree(v) - inst.demand[v];
    }
    stub_base[n] = slack_base[n] = total;

    BlossomMatcher matcher(total);
    // edge stubs: position of an edge in each endpoint's sorted neighbor list
    std::vector<std::pair<int, int>> edge_stubs;
    edge_stubs.reserve(g.edge_count());
    for (auto [u, v] : g.edges()) {
        int su = stub_base[u] + stub_off[u]++;
        int sv = stub_base[v] + stub_off[v]++;
        edge_stubs.push_back({su, sv});
        matcher.add_edge(su, sv);
    }
    for (Vertex v = 0; v < n; ++v)
        for (int i = 0; i < g.degree(v); ++i)
            for (int j = 0; j < g.degree(v) - inst.demand[v]; ++j)
                matcher.add_edge(stub_base[v] + i, slack_base[v] + j);

    std::vector<int> mate = matcher.solve(deadline_ms);
    bool perfect = true;
    for (int i = 0; i < total && perfect; ++i) perfect = mate[i] != -1;

    if (perfect) {
        std::vector<Edge> chosen;
        for (std::size_t e = 0; e < g.edge_count(); ++e)
            if (mate[edge_stubs[e].first] == edge_stubs[e].second)
                chosen.push_back(g.edges()[e]);
        Graph sub = Graph::from_edges(n, std::move(chosen));
        for (Vertex v = 0; v < n; ++v)
            if (sub.degree(v) != inst.demand[v])
                throw std::logic_error("find_f_factor: gadget extraction degree mismatch");
        out.solution = FFactorSolution{std::move(sub)};
        return out;
    }

    if (n <= 12)
        out.certificate = detail::search_certificate_exhaustive(inst);
    else
        out.certificate = detail::search_certificate_heuristic(inst);
    return out;
}

// Lemma-style diagnostic: components(G - B) <= |B|.
inline bool component_count_check(const Graph& g, const std::vector<Vertex>& B) {
    if (B.empty()) throw std::invalid_argument("component_count_check: B must be nonempty");
    std::vector<char> banned(g.n(), 0), visited(g.n(), 0);
    for (Vertex v : B) banned[v] = 1;
    int components = 0;
    std::vector<Vertex> stack;
    for (Vertex s = 0; s < g.n(); ++s) {
        if (visited[s] || banned[s]) continue;
        ++components;
        stack.push_back(s);
        visited[s] = 1;
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            for (Vertex w : g.neighbors(v))
                if (!visited[w] && !banned[w]) {
                    visited[w] = 1;
                    stack.push_back(w);
                }
        }
    }
    return components <= static_cast<int>(B.size());
}

struct RegularizeDiagnostics {
    double assumed_p = 0.0; // empirical density of the donor graph
    bool downjumping_hypothesis = false;  // gap(H) >= sqrt(np)
    bool spread_hypothesis = false;       // Delta(H)-delta(H) <= (np log n)^(5/7)
    bool density_hypothesis = false;      // pn >= log^21 n
};

struct RegularizeResult {
    std::optional<Graph> result;
    std::optional<TutteCertificate> certificate;
    RegularizeDiagnostics diagnostics;
    bool ok() const { return result.has_value(); }
};

// Extends H to a Delta(H)-regular H' with H <= H' <= H u G, drawing the
// complementing f-factor (f(v) = Delta(H) - d_H(v), f(x0) = 0) from G.
// The corollary's asymptotic hypotheses are reported, not enforced.
inline RegularizeResult regularize(const Graph& H, const Graph& G, Vertex x0,
                                   long deadline_ms = 0) {
    if (H.n() != G.n()) throw std::invalid_argument("regularize: vertex count mismatch");
    DegreeProfile prof = degree_profile(H);
    if (prof.argmax_vertices.size() != 1 || prof.argmax_vertices[0] != x0)
        throw std::invalid_argument("regularize: x0 is not the unique maximum-degree vertex of H");
    if (prof.max_degree % 2 != 0)
        throw std::invalid_argument("regularize: Delta(H) must be even");
    for (auto [u, v] : H.edges())
        if (u != x0 && v != x0 && G.has_edge(u, v))
            throw std::invalid_argument("regularize: H-x0 and G-x0 share an edge");

    RegularizeResult out;
    const int n = G.n();
    const double np = n > 1 ? 2.0 * static_cast<double>(G.edge_count()) / (n - 1) : 0.0;
    out.diagnostics.assumed_p = n > 1 ? np / n : 0.0;
    const double logn = std::log(static_cast<double>(std::max(n, 2)));
    out.diagnostics.downjumping_hypothesis = prof.downjump_gap >= std::sqrt(np);
    out.diagnostics.spread_hypothesis =
        prof.max_degree - prof.min_degree <= std::pow(np * logn, 5.0 / 7.0);
    out.diagnostics.density_hypothesis = np >= std::pow(logn, 21.0);

    // donor = G minus any edges shared with H (possible only at x0)
    std::vector<Edge> shared;
    for (Vertex w : H.neighbors(x0))
        if (G.has_edge(x0, w)) shared.push_back(make_edge(x0, w));
    Graph donor = shared.empty() ? G : G.with_edges_removed(shared);

    std::vector<int> f(n);
    for (Vertex v = 0; v < n; ++v) f[v] = prof.max_degree - H.degree(v);
    FFactorInstance inst(donor, std::move(f));
    FFactorResult fac = find_f_factor(inst, deadline_ms);
    if (!fac.feasible()) {
        out.certificate = fac.certificate;
        return out;
    }
    Graph merged = H.with_edges_added(fac.solution->subgraph.edges());
    for (Vertex v = 0; v < n; ++v)
        if (merged.degree(v) != prof.max_degree)
            throw std::logic_error("regularize: output not regular");
    if (fac.solution->subgraph.degree(x0) != 0)
        throw std::logic_error("regularize: factor touched x0");
    out.result = std::move(merged);
    return out;
}

} // namespace hamcover
