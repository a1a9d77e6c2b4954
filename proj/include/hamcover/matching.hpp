#pragma once

// Maximum matching engines.
//
// BlossomMatcher: Edmonds' algorithm on general graphs (array-based blossom
// contraction, greedy initialization, one BFS per augmentation). Used by the
// f-factor gadget reduction, where instances reach tens of thousands of
// nodes, so the implementation avoids per-phase allocations.
//
// hopcroft_karp: bipartite maximum matching, used to split even-degree
// graphs into 2-factors via Euler orientations.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

namespace hamcover {

class BlossomMatcher {
public:
    explicit BlossomMatcher(int n) : n_(n), adj_(n) {}

    void add_edge(int a, int b) {
        adj_[a].push_back(b);
        adj_[b].push_back(a);
    }

    // Returns the mate array (-1 for unmatched). deadline_ms <= 0 disables
    // the time cap; on timeout the matching found so far is returned.
    std::vector<int> solve(long deadline_ms = 0) {
        const auto start = std::chrono::steady_clock::now();
        match_.assign(n_, -1);
        p_.assign(n_, -1);
        base_.resize(n_);
        used_.assign(n_, 0);
        blossom_.assign(n_, 0);

        // Greedy initialization: usually leaves few augmentations.
        for (int v = 0; v < n_; ++v) {
            if (match_[v] != -1) continue;
            for (int to : adj_[v]) {
                if (match_[to] == -1) {
                    match_[v] = to;
                    match_[to] = v;
                    break;
                }
            }
        }
        for (int v = 0; v < n_; ++v) {
            if (match_[v] != -1) continue;
            if (deadline_ms > 0) {
                auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - start)
                              .count();
                if (ms > deadline_ms) break;
            }
            int u = find_path(v);
            while (u != -1) { // unroll augmenting path
                int pv = p_[u], ppv = match_[pv];
                match_[u] = pv;
                match_[pv] = u;
                u = ppv;
            }
        }
        return match_;
    }

private:
    int lca(int a, int b) {
        thread_local std::vector<char> seen;
        seen.assign(n_, 0);
        for (;;) {
            a = base_[a];
            seen[a] = 1;
            if (match_[a] == -1) break;
            a = p_[match_[a]];
        }
        for (;;) {
            b = base_[b];
            if (seen[b]) return b;
            b = p_[match_[b]];
        }
    }

    void mark_path(int v, int b, int child) {
        while (base_[v] != b) {
            blossom_[base_[v]] = 1;
            blossom_[base_[match_[v]]] = 1;
            p_[v] = child;
            child = match_[v];
            v = p_[match_[v]];
        }
    }

    // BFS for an augmenting path from root; returns its free endpoint or -1.
    int find_path(int root) {
        std::fill(used_.begin(), used_.end(), 0);
        std::fill(p_.begin(), p_.end(), -1);
        std::iota(base_.begin(), base_.end(), 0);
        used_[root] = 1;
        std::queue<int> q;
        q.push(root);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int to : adj_[v]) {
                if (base_[v] == base_[to] || match_[v] == to) continue;
                if (to == root || (match_[to] != -1 && p_[match_[to]] != -1)) {
                    int curbase = lca(v, to);
                    std::fill(blossom_.begin(), blossom_.end(), 0);
                    mark_path(v, curbase, to);
                    mark_path(to, curbase, v);
                    for (int i = 0; i < n_; ++i) {
                        if (blossom_[base_[i]]) {
                            base_[i] = curbase;
                            if (!used_[i]) {
                                used_[i] = 1;
                                q.push(i);
                            }
                        }
                    }
                } else if (p_[to] == -1) {
                    p_[to] = v;
                    if (match_[to] == -1) return to;
                    used_[match_[to]] = 1;
                    q.push(match_[to]);
                }
            }
        }
        return -1;
    }

    int n_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> match_, p_, base_;
    std::vector<char> used_, blossom_;
};

// Bipartite maximum matching; adj maps left vertices to right vertices.
// Returns (match_left, match_right) with -1 for unmatched.
inline std::pair<std::vector<int>, std::vector<int>>
hopcroft_karp(int n_left, int n_right, const std::vector<std::vector<int>>& adj) {
    constexpr int INF = 1 << 30;
    std::vector<int> ml(n_left, -1), mr(n_right, -1), dist(n_left);

    auto bfs = [&]() {
        std::queue<int> q;
        for (int u = 0; u < n_left; ++u) {
            if (ml[u] == -1) {
                dist[u] = 0;
                q.push(u);
            } else {
                dist[u] = INF;
            }
        }
        bool reachable = false;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : adj[u]) {
                int w = mr[v];
                if (w == -1) {
                    reachable = true;
                } else if (dist[w] == INF) {
                    dist[w] = dist[u] + 1;
                    q.push(w);
                }
            }
        }
        return reachable;
    };

    std::function<bool(int)> dfs = [&](int u) {
        for (int v : adj[u]) {
            int w = mr[v];
            if (w == -1 || (dist[w] == dist[u] + 1 && dfs(w))) {
                ml[u] = v;
                mr[v] = u;
                return true;
            }
        }
        dist[u] = INF;
        return false;
    };

    while (bfs())
        for (int u = 0; u < n_left; ++u)
            if (ml[u] == -1) dfs(u);
    return {ml, mr};
}

} // namespace hamcover
