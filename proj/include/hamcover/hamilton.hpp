#pragma once

// Hamilton cycle and path search (Posa rotation-extension with restarts and
// seeded tie-breaking), even-regular spanning subgraph extraction, packing,
// and covering a regular graph with edge-disjoint Hamilton cycles drawn
// from the graph plus a pool of donor slices.

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "factor.hpp"
#include "graph.hpp"
#include "matching.hpp"
#include "rng.hpp"

namespace hamcover {

struct SearchBudget {
    long long max_backtrack_nodes = 1'000'000; // per restart
    long long max_rotations = 10'000;          // per rotation phase
    long long time_cap_ms = 60'000;
    int restarts = 10;

    void validate() const {
        if (max_backtrack_nodes <= 0 || max_rotations <= 0 || time_cap_ms <= 0 || restarts <= 0)
            throw std::invalid_argument("SearchBudget: all fields must be positive");
    }
};

struct HamiltonCycle {
    std::vector<Vertex> order; // cyclic; order[i] adjacent to order[i+1 mod n]
};

inline bool verify_hamilton_cycle(const Graph& g, const HamiltonCycle& c) {
    const int n = g.n();
    if (static_cast<int>(c.order.size()) != n || n < 3) return false;
    std::vector<char> seen(n, 0);
    for (Vertex v : c.order) {
        if (v < 0 || v >= n || seen[v]) return false;
        seen[v] = 1;
    }
    for (int i = 0; i < n; ++i)
        if (!g.has_edge(c.order[i], c.order[(i + 1) % n])) return false;
    return true;
}

inline std::vector<Edge> cycle_edges(const HamiltonCycle& c) {
    std::vector<Edge> e;
    const int n = static_cast<int>(c.order.size());
    e.reserve(n);
    for (int i = 0; i < n; ++i) e.push_back(make_edge(c.order[i], c.order[(i + 1) % n]));
    return e;
}

enum class SearchOutcome { found, exhausted, none };

struct CycleSearchResult {
    SearchOutcome outcome = SearchOutcome::exhausted;
    std::optional<HamiltonCycle> cycle;
    bool found() const { return outcome == SearchOutcome::found; }
};

struct PathSearchResult {
    SearchOutcome outcome = SearchOutcome::exhausted;
    std::optional<std::vector<Vertex>> path;
    bool found() const { return outcome == SearchOutcome::found; }
};

namespace detail {

inline std::uint64_t ekey(Vertex u, Vertex v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
}

using Deadline = std::chrono::steady_clock::time_point;
inline Deadline deadline_in(long long ms) {
    return std::chrono::steady_clock::now() + std::chrono::milliseconds(ms);
}
inline bool expired(Deadline d) { return std::chrono::steady_clock::now() >= d; }

// Rotation-extension search over a plain adjacency structure. Preference:
// extension candidates are ordered by descending pref(u,v) with seeded
// shuffle as tie-break, so callers can bias the walk (e.g. toward uncovered
// edges) without changing the algorithm.
class HamSearch {
public:
    HamSearch(const std::vector<std::vector<Vertex>>& adj, std::mt19937_64& rng)
        : n_(static_cast<int>(adj.size())), adj_(adj), rng_(rng) {}

    template <typename PrefFn>
    bool run(Vertex start, const SearchBudget& budget, Deadline deadline, PrefFn&& pref,
             std::vector<Vertex>& out) {
        pos_.assign(n_, -1);
        path_.clear();
        path_.push_back(start);
        pos_[start] = 0;
        long long nodes = 0;
        int stall_checks = 0;

        while (nodes < budget.max_backtrack_nodes) {
            if (((++stall_checks) & 1023) == 0 && expired(deadline)) return false;
            Vertex u = path_.back();

            // extension step
            Vertex next = -1;
            long best_score = 0;
            int ties = 0;
            for (Vertex v : adj_[u]) {
                if (pos_[v] != -1) continue;
                long score = pref(u, v);
                if (next == -1 || score > best_score) {
                    next = v;
                    best_score = score;
                    ties = 1;
                } else if (score == best_score && static_cast<long long>(below(rng_, ++ties)) == 0) {
                    next = v; // reservoir pick among equals
                }
            }
            if (next != -1) {
                pos_[next] = static_cast<int>(path_.size());
                path_.push_back(next);
                ++nodes;
                if (static_cast<int>(path_.size()) == n_ && has(path_.back(), path_[0])) {
                    out = path_;
                    return true;
                }
                continue;
            }

            if (static_cast<int>(path_.size()) == n_ && has(u, path_[0])) {
                out = path_;
                return true;
            }

            // rotation phase
            if (rotate_phase(budget, deadline)) {
                if (static_cast<int>(path_.size()) == n_ && has(path_.back(), path_[0])) {
                    out = path_;
                    return true;
                }
                continue;
            }

            // backtrack a short suffix and keep going
            if (static_cast<int>(path_.size()) > 2) {
                int k = 1 + static_cast<int>(below(rng_, 3));
                k = std::min(k, static_cast<int>(path_.size()) - 1);
                for (int i = 0; i < k; ++i) {
                    pos_[path_.back()] = -1;
                    path_.pop_back();
                }
                nodes += k;
                continue;
            }
            return false;
        }
        return false;
    }

private:
    bool has(Vertex a, Vertex b) const {
        for (Vertex w : adj_[a])
            if (w == b) return true;
        return false;
    }

    // Reverse path_[i+1..end]; endpoint becomes old path_[i+1].
    void apply_rotation(int i) {
        int lo = i + 1, hi = static_cast<int>(path_.size()) - 1;
        while (lo < hi) {
            std::swap(path_[lo], path_[hi]);
            pos_[path_[lo]] = lo;
            pos_[path_[hi]] = hi;
            ++lo;
            --hi;
        }
        if (lo == hi) pos_[path_[lo]] = lo;
    }

    // Posa rotations until the endpoint can extend (or, on a full path,
    // close). Returns true when progress is possible.
    bool rotate_phase(const SearchBudget& budget, Deadline deadline) {
        const bool full = static_cast<int>(path_.size()) == n_;
        seen_.assign(n_, 0);
        seen_[path_.back()] = 1;
        for (long long r = 0; r < budget.max_rotations; ++r) {
            if ((r & 255) == 0 && expired(deadline)) return false;
            Vertex u = path_.back();
            int sz = static_cast<int>(path_.size());
            int fallback_i = -1;
            int options = 0;
            for (Vertex v : adj_[u]) {
                int i = pos_[v];
                if (i < 0 || i + 1 >= sz - 1) continue; // absent, or no-op pivot
                Vertex w = path_[i + 1];
                if (full) {
                    if (has(w, path_[0])) {
                        apply_rotation(i);
                        return true;
                    }
                } else {
                    for (Vertex x : adj_[w])
                        if (pos_[x] == -1) {
                            apply_rotation(i);
                            return true;
                        }
                }
                if (!seen_[w] && (fallback_i == -1 ||
                                  static_cast<long long>(below(rng_, ++options)) == 0))
                    fallback_i = i;
            }
            if (fallback_i == -1) return false; // endpoint set exhausted
            seen_[path_[fallback_i + 1]] = 1;
            apply_rotation(fallback_i);
        }
        return false;
    }

    int n_;
    const std::vector<std::vector<Vertex>>& adj_;
    std::mt19937_64& rng_;
    std::vector<int> pos_;
    std::vector<Vertex> path_;
    std::vector<char> seen_;
};

// connectivity + bipartite parity obstructions that prove non-Hamiltonicity
inline bool hamilton_impossible(const std::vector<std::vector<Vertex>>& adj) {
    const int n = static_cast<int>(adj.size());
    if (n < 3) return true;
    for (int v = 0; v < n; ++v)
        if (adj[v].size() < 2) return true;
    std::vector<int> color(n, -1);
    std::vector<Vertex> stack{0};
    color[0] = 0;
    int visited = 1;
    bool bipartite = true;
    int side0 = 1;
    while (!stack.empty()) {
        Vertex v = stack.back();
        stack.pop_back();
        for (Vertex w : adj[v]) {
            if (color[w] == -1) {
                color[w] = color[v] ^ 1;
                side0 += color[w] == 0;
                ++visited;
                stack.push_back(w);
            } else if (color[w] == color[v]) {
                bipartite = false;
            }
        }
    }
    if (visited < n) return true; // disconnected
    if (bipartite && (n % 2 != 0 || side0 != n - side0)) return true;
    return false;
}

// Bounded exact DFS for small n: 1 = found, 0 = proven none, -1 = node cap
// hit. Branches explore higher-preference edges first.
template <typename PrefFn>
inline int exact_cycle_dfs(const std::vector<std::vector<Vertex>>& adj, long long cap,
                           PrefFn&& pref, std::mt19937_64& rng, std::vector<Vertex>& out) {
    const int n = static_cast<int>(adj.size());
    std::vector<std::vector<Vertex>> ordered(n);
    for (int v = 0; v < n; ++v) {
        ordered[v] = adj[v];
        shuffle_vec(ordered[v], rng); // seeded tie-break below the preference
        std::stable_sort(ordered[v].begin(), ordered[v].end(),
                         [&](Vertex a, Vertex b) { return pref(v, a) > pref(v, b); });
    }
    std::vector<Vertex> path{0};
    std::vector<char> used(n, 0);
    used[0] = 1;
    long long nodes = 0;
    bool capped = false;
    std::function<bool()> dfs = [&]() -> bool {
        if (++nodes > cap) {
            capped = true;
            return false;
        }
        Vertex u = path.back();
        if (static_cast<int>(path.size()) == n) {
            for (Vertex w : ordered[u])
                if (w == 0) {
                    out = path;
                    return true;
                }
            return false;
        }
        for (Vertex w : ordered[u]) {
            if (used[w]) continue;
            used[w] = 1;
            path.push_back(w);
            if (dfs()) return true;
            if (capped) return false;
            path.pop_back();
            used[w] = 0;
        }
        return false;
    };
    if (dfs()) return 1;
    return capped ? -1 : 0;
}

template <typename PrefFn>
inline CycleSearchResult search_cycle(const std::vector<std::vector<Vertex>>& adj,
                                      const SearchBudget& budget, std::uint64_t seed,
                                      PrefFn&& pref, Deadline deadline,
                                      Vertex forced_start = -1) {
    CycleSearchResult res;
    const int n = static_cast<int>(adj.size());
    if (hamilton_impossible(adj)) {
        res.outcome = SearchOutcome::none;
        return res;
    }
    if (n <= 12) { // small instances: decide exactly when affordable
        auto rng = substream(seed, stream_id::search + 0xE);
        std::vector<Vertex> order;
        int verdict = exact_cycle_dfs(adj, 300'000, pref, rng, order);
        if (verdict == 1) {
            res.outcome = SearchOutcome::found;
            res.cycle = HamiltonCycle{std::move(order)};
            return res;
        }
        if (verdict == 0) {
            res.outcome = SearchOutcome::none;
            return res;
        }
    }
    Vertex min_v = 0;
    for (int v = 0; v < n; ++v)
        if (adj[v].size() < adj[min_v].size()) min_v = v;
    for (int restart = 0; restart < budget.restarts; ++restart) {
        if (expired(deadline)) break;
        auto rng = substream(seed, stream_id::search + (static_cast<std::uint64_t>(restart) << 8));
        Vertex start = forced_start != -1 ? forced_start
                       : restart == 0    ? min_v
                                         : static_cast<Vertex>(below(rng, n));
        HamSearch search(adj, rng);
        std::vector<Vertex> order;
        if (search.run(start, budget, deadline, pref, order)) {
            res.outcome = SearchOutcome::found;
            res.cycle = HamiltonCycle{std::move(order)};
            return res;
        }
    }
    res.outcome = SearchOutcome::exhausted;
    return res;
}

inline std::vector<std::vector<Vertex>> adjacency_of(const Graph& g) {
    std::vector<std::vector<Vertex>> adj(g.n());
    for (int v = 0; v < g.n(); ++v) adj[v] = g.neighbors(v);
    return adj;
}

} // namespace detail

inline CycleSearchResult find_hamilton_cycle(const Graph& g, const SearchBudget& budget,
                                             std::uint64_t seed) {
    if (g.n() < 3) throw std::invalid_argument("find_hamilton_cycle: need n >= 3");
    budget.validate();
    auto deadline = detail::deadline_in(budget.time_cap_ms);
    auto res = detail::search_cycle(detail::adjacency_of(g), budget, seed,
                                    [](Vertex, Vertex) { return 0L; }, deadline);
    if (res.found() && !verify_hamilton_cycle(g, *res.cycle))
        throw std::logic_error("find_hamilton_cycle: produced an invalid cycle");
    return res;
}

// Hamilton path with prescribed endpoints, via a cycle search in G plus a
// virtual vertex adjacent to exactly {x, y}.
inline PathSearchResult hamilton_path_between(const Graph& g, Vertex x, Vertex y,
                                              const SearchBudget& budget, std::uint64_t seed) {
    if (x == y) throw std::invalid_argument("hamilton_path_between: endpoints must differ");
    budget.validate();
    PathSearchResult res;
    const int n = g.n();
    if (n == 2) {
        if (g.has_edge(x, y)) {
            res.outcome = SearchOutcome::found;
            res.path = std::vector<Vertex>{x, y};
        } else {
            res.outcome = SearchOutcome::none;
        }
        return res;
    }
    auto adj = detail::adjacency_of(g);
    adj.push_back({x, y});
    adj[x].push_back(n);
    adj[y].push_back(n);
    auto deadline = detail::deadline_in(budget.time_cap_ms);
    auto cyc = detail::search_cycle(adj, budget, seed, [](Vertex, Vertex) { return 0L; },
                                    deadline, n);
    res.outcome = cyc.outcome;
    if (!cyc.found()) return res;
    std::vector<Vertex>& o = cyc.cycle->order; // starts at the virtual vertex
    std::vector<Vertex> path(o.begin() + 1, o.end());
    if (path.front() != x) std::reverse(path.begin(), path.end());
    res.path = std::move(path);
    for (std::size_t i = 0; i + 1 < res.path->size(); ++i)
        if (!g.has_edge((*res.path)[i], (*res.path)[i + 1]))
            throw std::logic_error("hamilton_path_between: produced an invalid path");
    if (res.path->front() != x || res.path->back() != y)
        throw std::logic_error("hamilton_path_between: wrong endpoints");
    return res;
}

struct EvenRegularResult {
    std::optional<Graph> subgraph;
    std::optional<TutteCertificate> certificate;
    int degree = 0;
    bool ok() const { return subgraph.has_value(); }
};

// r-regular spanning subgraph with r = delta(G) rounded down to even.
inline EvenRegularResult even_regular_spanning_subgraph(const Graph& g) {
    DegreeProfile prof = degree_profile(g);
    if (prof.min_degree < 2)
        throw std::invalid_argument("even_regular_spanning_subgraph: need delta(G) >= 2");
    EvenRegularResult out;
    out.degree = prof.min_degree - (prof.min_degree % 2);
    FFactorInstance inst(g, std::vector<int>(g.n(), out.degree));
    FFactorResult fac = find_f_factor(inst);
    if (fac.feasible())
        out.subgraph = std::move(fac.solution->subgraph);
    else
        out.certificate = fac.certificate;
    return out;
}

// --- packing --------------------------------------------------------------

inline std::vector<HamiltonCycle> pack_hamilton_cycles(const Graph& g, int target,
                                                       const SearchBudget& budget,
                                                       std::uint64_t seed) {
    if (target < 0) throw std::invalid_argument("pack_hamilton_cycles: negative target");
    budget.validate();
    std::vector<HamiltonCycle> cycles;
    if (g.n() < 3) return cycles;
    const int cap = degree_profile(g).min_degree / 2;
    auto deadline = detail::deadline_in(budget.time_cap_ms);
    auto adj = detail::adjacency_of(g);
    std::vector<int> deg(g.n());
    for (int v = 0; v < g.n(); ++v) deg[v] = static_cast<int>(adj[v].size());

    int round = 0;
    while (static_cast<int>(cycles.size()) < target && !detail::expired(deadline)) {
        // route through scarce vertices first: prefer low residual degree
        auto pref = [&](Vertex, Vertex v) { return -static_cast<long>(deg[v]); };
        auto res = detail::search_cycle(adj, budget, mix64(seed) + (++round), pref, deadline);
        if (!res.found()) break;
        for (auto [u, v] : cycle_edges(*res.cycle)) {
            std::erase(adj[u], v);
            std::erase(adj[v], u);
            --deg[u];
            --deg[v];
        }
        cycles.push_back(std::move(*res.cycle));
    }
    if (static_cast<int>(cycles.size()) > cap)
        throw std::logic_error("pack_hamilton_cycles: packing exceeded floor(delta/2)");
    return cycles;
}

// --- covering H0 by edge-disjoint Hamilton cycles -------------------------

struct CoverWithResult {
    std::vector<HamiltonCycle> cycles;
    std::optional<Graph> residual; // uncovered part of H0 on failure
    bool success = false;
};

namespace detail {

// Working view of H0 plus pool with lazy edge removal.
struct AvailGraph {
    int n = 0;
    std::vector<std::vector<Vertex>> adj;
    std::unordered_set<std::uint64_t> used;

    explicit AvailGraph(int n_) : n(n_), adj(n_) {}

    void add_edge(Vertex u, Vertex v) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    bool usable(Vertex u, Vertex v) const { return !used.count(ekey(u, v)); }
    void mark_used(Vertex u, Vertex v) { used.insert(ekey(u, v)); }

    std::vector<std::vector<Vertex>> filtered_adjacency() const {
        std::vector<std::vector<Vertex>> out(n);
        for (int v = 0; v < n; ++v) {
            out[v].reserve(adj[v].size());
            for (Vertex w : adj[v])
                if (usable(v, w)) out[v].push_back(w);
        }
        return out;
    }
};

// 2-factor of an even-degree graph: Euler orientation per component, then a
// perfect matching between out- and in-sides. Empty result on failure.
inline std::vector<Edge> euler_two_factor(int n, const std::vector<std::vector<Vertex>>& adj,
                                          std::mt19937_64& rng) {
    std::vector<Edge> arcs; // oriented u -> v
    std::vector<std::vector<std::pair<Vertex, int>>> inc(n); // (other, edge id)
    int eid = 0;
    for (int v = 0; v < n; ++v)
        for (Vertex w : adj[v])
            if (v < w) {
                inc[v].push_back({w, eid});
                inc[w].push_back({v, eid});
                ++eid;
            }
    for (int v = 0; v < n; ++v)
        if (inc[v].size() % 2 != 0 || inc[v].empty()) return {};
    std::vector<char> edge_done(eid, 0);
    std::vector<std::size_t> it(n, 0);
    std::vector<int> order(n);
    for (int v = 0; v < n; ++v) order[v] = v;
    shuffle_vec(order, rng);
    for (int s : order) {
        if (it[s] >= inc[s].size()) continue;
        // Hierholzer walk; every closed walk orients its edges consistently
        std::vector<Vertex> stack{s};
        std::vector<Vertex> walk;
        while (!stack.empty()) {
            Vertex v = stack.back();
            while (it[v] < inc[v].size() && edge_done[inc[v][it[v]].second]) ++it[v];
            if (it[v] == inc[v].size()) {
                walk.push_back(v);
                stack.pop_back();
            } else {
                auto [w, id] = inc[v][it[v]];
                edge_done[id] = 1;
                stack.push_back(w);
            }
        }
        for (std::size_t i = 0; i + 1 < walk.size(); ++i)
            arcs.push_back({walk[i + 1], walk[i]}); // walk is recorded reversed
    }
    // bipartite: left = out-side of each vertex, right = in-side
    std::vector<std::vector<int>> b(n);
    for (auto [u, v] : arcs) b[u].push_back(v);
    auto [ml, mr] = hopcroft_karp(n, n, b);
    std::vector<Edge> factor;
    for (int u = 0; u < n; ++u) {
        if (ml[u] == -1) return {};
        factor.push_back(make_edge(u, ml[u]));
    }
    return factor;
}

// Split a degree-2 edge set into its cycles (as vertex lists).
inline std::vector<std::vector<Vertex>> two_factor_cycles(int n, const std::vector<Edge>& fac) {
    std::vector<std::vector<Vertex>> nb(n);
    for (auto [u, v] : fac) {
        nb[u].push_back(v);
        nb[v].push_back(u);
    }
    std::vector<char> seen(n, 0);
    std::vector<std::vector<Vertex>> cycles;
    for (int s = 0; s < n; ++s) {
        if (seen[s]) continue;
        if (nb[s].size() != 2) return {}; // not a 2-factor
        std::vector<Vertex> cyc{s};
        seen[s] = 1;
        Vertex prev = s, cur = nb[s][0];
        while (cur != s) {
            cyc.push_back(cur);
            seen[cur] = 1;
            Vertex nxt = nb[cur][0] == prev ? nb[cur][1] : nb[cur][0];
            prev = cur;
            cur = nxt;
        }
        cycles.push_back(std::move(cyc));
    }
    return cycles;
}

} // namespace detail

inline CoverWithResult cover_with_hamilton_cycles(const Graph& H0,
                                                  const std::vector<Graph>& pool,
                                                  const SearchBudget& budget,
                                                  std::uint64_t seed);

namespace detail {

// One peel-and-merge round: pick a 2-factor of (uncovered ∪ minimal
// patches), then merge its cycles into one Hamilton cycle using spare
// available edges as crossings. Returns an empty vector when the round
// cannot complete.
class PeelMergeRound {
public:
    PeelMergeRound(AvailGraph& avail, const std::unordered_set<std::uint64_t>& uncovered,
                   std::mt19937_64& rng)
        : avail_(avail), uncovered_(uncovered), rng_(rng), n_(avail.n) {}

    std::vector<Vertex> attempt(int enrichment) {
        auto cand = build_candidate(enrichment);
        if (cand.empty()) return {};
        auto factor = euler_two_factor(n_, cand, rng_);
        if (factor.empty()) return {};
        return merge_into_hamilton(factor);
    }

private:
    bool cand_has(const std::vector<std::vector<Vertex>>& cand, Vertex u, Vertex v) const {
        for (Vertex w : cand[u])
            if (w == v) return true;
        return false;
    }

    // uncovered edges plus patch edges making every degree even and >= 2
    std::vector<std::vector<Vertex>> build_candidate(int enrichment) {
        std::vector<std::vector<Vertex>> cand(n_);
        for (std::uint64_t key : uncovered_) {
            Vertex u = static_cast<Vertex>(key >> 32), v = static_cast<Vertex>(key & 0xffffffff);
            cand[u].push_back(v);
            cand[v].push_back(u);
        }
        auto add = [&](Vertex u, Vertex v) {
            cand[u].push_back(v);
            cand[v].push_back(u);
        };
        auto patchable = [&](Vertex u, Vertex v) {
            return avail_.usable(u, v) && !uncovered_.count(ekey(u, v)) && !cand_has(cand, u, v);
        };

        // random extra patch edges widen the candidate on retries
        if (enrichment > 0) {
            int want = enrichment;
            for (int tries = 0; tries < enrichment * 20 && want > 0; ++tries) {
                Vertex u = static_cast<Vertex>(below(rng_, n_));
                if (avail_.adj[u].empty()) continue;
                Vertex v = avail_.adj[u][below(rng_, avail_.adj[u].size())];
                if (!patchable(u, v)) continue;
                add(u, v);
                --want;
            }
        }

        // isolated vertices first: route a 2-path through them
        for (Vertex v = 0; v < n_; ++v) {
            if (!cand[v].empty()) continue;
            Vertex w1 = -1, w2 = -1;
            // prefer endpoints that are currently odd
            for (Vertex w : avail_.adj[v]) {
                if (!patchable(v, w)) continue;
                if (cand[w].size() % 2 == 1 && w1 == -1) w1 = w;
            }
            for (Vertex w : avail_.adj[v]) {
                if (w == w1 || !patchable(v, w)) continue;
                if (cand[w].size() % 2 == 1 && w2 == -1 && w != w1) w2 = w;
            }
            for (Vertex w : avail_.adj[v]) {
                if (!patchable(v, w)) continue;
                if (w1 == -1 && w != w2) w1 = w;
                else if (w2 == -1 && w != w1) w2 = w;
            }
            if (w1 == -1 || w2 == -1) return {};
            add(v, w1);
            add(v, w2);
        }

        // parity repair: pair odd vertices by a direct patch edge, then by
        // 2-paths through an even vertex
        auto odd_list = [&]() {
            std::vector<Vertex> odd;
            for (Vertex v = 0; v < n_; ++v)
                if (cand[v].size() % 2 == 1) odd.push_back(v);
            return odd;
        };
        for (int pass = 0; pass < 2; ++pass) {
            for (Vertex v : odd_list()) {
                if (cand[v].size() % 2 == 0) continue;
                bool fixed = false;
                for (Vertex w : avail_.adj[v]) {
                    if (cand[w].size() % 2 == 1 && patchable(v, w)) {
                        add(v, w);
                        fixed = true;
                        break;
                    }
                }
                if (fixed || pass == 0) continue;
                for (Vertex x : avail_.adj[v]) {
                    if (!patchable(v, x) || cand[x].size() % 2 == 1) continue;
                    for (Vertex w : avail_.adj[x]) {
                        if (w != v && cand[w].size() % 2 == 1 && patchable(x, w)) {
                            add(v, x);
                            add(x, w);
                            fixed = true;
                            break;
                        }
                    }
                    if (fixed) break;
                }
            }
        }
        if (!odd_list().empty()) return {};
        for (Vertex v = 0; v < n_; ++v)
            if (cand[v].empty()) return {};
        return cand;
    }

    // Merge the 2-factor's cycles with crossing exchanges; crossing edges
    // come from spare available edges, dropped edges simply stay uncovered.
    std::vector<Vertex> merge_into_hamilton(std::vector<Edge>& factor) {
        auto cycles = two_factor_cycles(n_, factor);
        if (cycles.empty()) return {};
        std::unordered_set<std::uint64_t> in_struct;
        for (auto [u, v] : factor) in_struct.insert(ekey(u, v));
        std::vector<int> cyc_of(n_);
        // successor maps per cycle orientation
        std::vector<Vertex> nxt(n_), prv(n_);
        for (std::size_t ci = 0; ci < cycles.size(); ++ci) {
            auto& c = cycles[ci];
            for (std::size_t i = 0; i < c.size(); ++i) {
                cyc_of[c[i]] = static_cast<int>(ci);
                nxt[c[i]] = c[(i + 1) % c.size()];
                prv[c[i]] = c[(i + c.size() - 1) % c.size()];
            }
        }
        std::vector<char> alive(cycles.size(), 1);
        int remaining = static_cast<int>(cycles.size());

        auto structural = [&](Vertex a, Vertex b) { return in_struct.count(ekey(a, b)) > 0; };
        auto cross_ok = [&](Vertex a, Vertex b) {
            return avail_.usable(a, b) && !structural(a, b) && avail_has(a, b);
        };

        while (remaining > 1) {
            // smallest alive cycle
            int best = -1;
            for (std::size_t ci = 0; ci < cycles.size(); ++ci)
                if (alive[ci] && (best == -1 || cycles[ci].size() < cycles[best].size()))
                    best = static_cast<int>(ci);
            bool merged = false;
            auto& c1 = cycles[best];
            // prefer dropping already-covered (non-uncovered) structure edges
            for (int prefer_covered = 1; prefer_covered >= 0 && !merged; --prefer_covered) {
                for (std::size_t i = 0; i < c1.size() && !merged; ++i) {
                    Vertex a = c1[i], b = nxt[a];
                    bool drop1_covered = !uncovered_.count(ekey(a, b));
                    if (prefer_covered && !drop1_covered) continue;
                    for (Vertex c : avail_.adj[a]) {
                        if (cyc_of[c] == best || !alive[cyc_of[c]]) continue;
                        if (!cross_ok(a, c)) continue;
                        for (Vertex d : {nxt[c], prv[c]}) {
                            if (!cross_ok(b, d)) continue;
                            if (prefer_covered && uncovered_.count(ekey(c, d))) continue;
                            apply_merge(cycles, cyc_of, nxt, prv, alive, best, a, b, c, d,
                                        in_struct);
                            --remaining;
                            merged = true;
                            break;
                        }
                        if (merged) break;
                    }
                }
            }
            if (!merged) return {};
        }
        // read off the single remaining cycle
        int ci = 0;
        while (!alive[ci]) ++ci;
        std::vector<Vertex> order;
        Vertex s = cycles[ci][0], cur = s;
        do {
            order.push_back(cur);
            cur = nxt[cur];
        } while (cur != s && static_cast<int>(order.size()) <= n_);
        if (static_cast<int>(order.size()) != n_) return {};
        return order;
    }

    bool avail_has(Vertex a, Vertex b) const {
        for (Vertex w : avail_.adj[a])
            if (w == b) return true;
        return false;
    }

    // replace (a,b),(c,d) by (a,c),(b,d); cycle of c/d absorbs into best
    void apply_merge(std::vector<std::vector<Vertex>>& cycles, std::vector<int>& cyc_of,
                     std::vector<Vertex>& nxt, std::vector<Vertex>& prv,
                     std::vector<char>& alive, int best, Vertex a, Vertex b, Vertex c, Vertex d,
                     std::unordered_set<std::uint64_t>& in_struct) {
        int other = cyc_of[c];
        // orient the other cycle so that c -> d becomes d -> ... -> c
        if (nxt[c] == d) {
            // reverse other cycle
            Vertex start = c, cur = c;
            do {
                std::swap(nxt[cur], prv[cur]);
                cur = prv[cur]; // old nxt
            } while (cur != start);
        }
        // now nxt[d] == c (d precedes c); splice: a -> c ... d -> b
        in_struct.erase(ekey(a, b));
        in_struct.erase(ekey(c, d));
        in_struct.insert(ekey(a, c));
        in_struct.insert(ekey(b, d));
        // a's successor chain: a -> c, walk other cycle from c to d, then d -> b
        // other cycle currently satisfies nxt[d] = c; break it
        nxt[a] = c;
        prv[c] = a;
        nxt[d] = b;
        prv[b] = d;
        for (Vertex v : cycles[other]) cyc_of[v] = best;
        auto& cb = cycles[best];
        cb.insert(cb.end(), cycles[other].begin(), cycles[other].end());
        alive[other] = 0;
    }

    AvailGraph& avail_;
    const std::unordered_set<std::uint64_t>& uncovered_;
    std::mt19937_64& rng_;
    int n_;
};

} // namespace detail

// Covers every edge of the even-regular H0 by pairwise edge-disjoint
// Hamilton cycles inside H0 ∪ pool. Strategy per round: peel a 2-factor of
// the uncovered residual (patched even with pool edges) and merge it into a
// Hamilton cycle; fall back to a rotation-extension search biased toward
// uncovered edges. Failure reports the uncovered residual.
inline CoverWithResult cover_with_hamilton_cycles(const Graph& H0,
                                                  const std::vector<Graph>& pool,
                                                  const SearchBudget& budget,
                                                  std::uint64_t seed) {
    budget.validate();
    const int n = H0.n();
    {
        DegreeProfile prof = degree_profile(H0);
        if (prof.min_degree != prof.max_degree || prof.max_degree % 2 != 0)
            throw std::invalid_argument("cover_with_hamilton_cycles: H0 must be even-regular");
    }
    std::unordered_set<std::uint64_t> all_edges;
    for (auto [u, v] : H0.edges()) all_edges.insert(detail::ekey(u, v));
    for (const auto& g : pool) {
        if (g.n() != n)
            throw std::invalid_argument("cover_with_hamilton_cycles: pool vertex count mismatch");
        for (auto [u, v] : g.edges())
            if (!all_edges.insert(detail::ekey(u, v)).second)
                throw std::invalid_argument(
                    "cover_with_hamilton_cycles: pool graphs not edge-disjoint");
    }

    detail::AvailGraph avail(n);
    for (auto [u, v] : H0.edges()) avail.add_edge(u, v);
    for (const auto& g : pool)
        for (auto [u, v] : g.edges()) avail.add_edge(u, v);

    std::unordered_set<std::uint64_t> uncovered;
    for (auto [u, v] : H0.edges()) uncovered.insert(detail::ekey(u, v));

    CoverWithResult out;
    auto deadline = detail::deadline_in(budget.time_cap_ms);
    auto rng = substream(seed, stream_id::search + 0x77);
    const long long max_cycles =
        static_cast<long long>(all_edges.size()) / std::max(1, n) + 4;

    auto fail_with_residual = [&]() {
        std::vector<Edge> rem;
        for (std::uint64_t key : uncovered)
            rem.push_back({static_cast<Vertex>(key >> 32),
                           static_cast<Vertex>(key & 0xffffffff)});
        std::sort(rem.begin(), rem.end());
        out.residual = Graph::from_edges(n, std::move(rem));
        out.success = false;
        return out;
    };

    while (!uncovered.empty()) {
        if (detail::expired(deadline) ||
            static_cast<long long>(out.cycles.size()) >= max_cycles)
            return fail_with_residual();

        std::vector<Vertex> order;
        for (int enrich = 0; enrich < 3 && order.empty(); ++enrich) {
            detail::PeelMergeRound round(avail, uncovered, rng);
            order = round.attempt(enrich * (n / 4 + 4));
        }
        if (order.empty()) {
            // rotation fallback biased toward uncovered edges
            auto adj = avail.filtered_adjacency();
            auto pref = [&](Vertex u, Vertex v) {
                return uncovered.count(detail::ekey(u, v)) ? 1L : 0L;
            };
            auto res = detail::search_cycle(adj, budget, rng(), pref, deadline);
            if (!res.found()) return fail_with_residual();
            order = std::move(res.cycle->order);
        }

        HamiltonCycle cyc{std::move(order)};
        std::size_t newly = 0;
        for (auto [u, v] : cycle_edges(cyc)) {
            avail.mark_used(u, v);
            newly += uncovered.erase(detail::ekey(u, v));
        }
        out.cycles.push_back(std::move(cyc));
        if (newly == 0) return fail_with_residual(); // no progress
    }
    out.success = true;
    return out;
}

} // namespace hamcover
