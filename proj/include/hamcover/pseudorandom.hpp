#pragma once

// Certification of the pseudorandomness property battery on concrete
// graphs: (p,beta)-jumbledness, the P1-P6 / SP1-SP6 bundles, strong
// 2-jumping, u-downjumping and the HP1/HP2 Hamilton-connectivity criterion.
//
// Subset-quantified properties are checked exactly by enumeration for
// n <= kExactCap and otherwise by a sampled protocol: all singletons, all
// pairs for n <= 64, random subsets per size class, plus a greedy
// adversarial descent on the checked slack. For n <= kSampledExhaustive the
// sampled protocol degenerates to full enumeration, so the two modes agree
// on small graphs by construction.
//
// Every fail verdict carries a witness; re-evaluating the defining
// inequality on the witness reproduces the violation.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"
#include "rng.hpp"

namespace hamcover {

inline constexpr int kExactCap = 18;
inline constexpr int kSampledExhaustive = 14;

class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PropertyId {
    JUMBLED,
    P1, P2, P3, P4, P5, P6,
    SP1, SP2, SP3, SP4, SP5, SP6,
    DOWNJUMP,
    STRONG2JUMP,
    HP1, HP2,
};

inline const char* property_name(PropertyId id) {
    switch (id) {
        case PropertyId::JUMBLED: return "JUMBLED";
        case PropertyId::P1: return "P1";
        case PropertyId::P2: return "P2";
        case PropertyId::P3: return "P3";
        case PropertyId::P4: return "P4";
        case PropertyId::P5: return "P5";
        case PropertyId::P6: return "P6";
        case PropertyId::SP1: return "SP1";
        case PropertyId::SP2: return "SP2";
        case PropertyId::SP3: return "SP3";
        case PropertyId::SP4: return "SP4";
        case PropertyId::SP5: return "SP5";
        case PropertyId::SP6: return "SP6";
        case PropertyId::DOWNJUMP: return "DOWNJUMP";
        case PropertyId::STRONG2JUMP: return "STRONG2JUMP";
        case PropertyId::HP1: return "HP1";
        case PropertyId::HP2: return "HP2";
    }
    return "?";
}

enum class Verdict { pass, fail, unknown };

struct CheckMode {
    bool exact = true;
    int samples = 2000;
    std::uint64_t seed = 0;
    static CheckMode Exact() { return CheckMode{true, 0, 0}; }
    static CheckMode Sampled(int k, std::uint64_t seed) { return CheckMode{false, k, seed}; }
};

struct Witness {
    std::vector<Vertex> S;
    std::vector<Vertex> T; // empty unless the property quantifies over pairs
};

struct PropertyReport {
    PropertyId property = PropertyId::JUMBLED;
    Verdict verdict = Verdict::unknown;
    CheckMode mode;
    std::optional<Witness> witness;
    // slack of the tightest inequality checked; negative iff violated
    double margin = std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::string, double>> clauses; // named per-clause margins
    bool passed() const { return verdict == Verdict::pass; }
};

namespace detail {

inline std::vector<Vertex> mask_to_set(std::uint64_t mask) {
    std::vector<Vertex> s;
    for (int v = 0; mask; ++v, mask >>= 1)
        if (mask & 1) s.push_back(v);
    return s;
}

inline std::uint64_t adj_mask(const Graph& g, Vertex v) { return g.row(v)[0]; }

inline int popcount(std::uint64_t x) { return __builtin_popcountll(x); }

// edges inside a vertex set given as a single-word mask
inline long long edges_inside(const Graph& g, std::uint64_t mask) {
    long long e = 0;
    std::uint64_t rest = mask;
    while (rest) {
        int v = __builtin_ctzll(rest);
        rest &= rest - 1;
        e += popcount(adj_mask(g, v) & rest);
    }
    return e;
}

inline long long edges_inside_set(const Graph& g, const std::vector<Vertex>& S) {
    long long e = 0;
    std::vector<char> in(g.n(), 0);
    for (Vertex v : S) in[v] = 1;
    for (Vertex v : S)
        for (Vertex w : g.neighbors(v))
            if (w > v && in[w]) ++e;
    return e;
}

inline long long edges_between_sets(const Graph& g, const std::vector<Vertex>& S,
                                    const std::vector<Vertex>& T) {
    std::vector<char> in_t(g.n(), 0);
    for (Vertex v : T) in_t[v] = 1;
    long long e = 0;
    for (Vertex v : S)
        for (Vertex w : g.neighbors(v))
            if (in_t[w]) ++e;
    return e;
}

struct SlackTracker {
    double slack = std::numeric_limits<double>::infinity();
    Witness witness;
    void offer(double s, std::vector<Vertex> S, std::vector<Vertex> T = {}) {
        if (s < slack) {
            slack = s;
            witness.S = std::move(S);
            witness.T = std::move(T);
        }
    }
};

// single-set enumeration with an incremental e(S) table; bound(s, e) -> slack
template <typename BoundFn>
inline void enumerate_subsets(const Graph& g, SlackTracker& track, BoundFn&& slack_of) {
    const int n = g.n();
    std::vector<int> ecount(std::size_t(1) << n, 0);
    for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
        int v = __builtin_ctzll(mask);
        std::uint64_t rest = mask & (mask - 1);
        ecount[mask] = ecount[rest] + popcount(adj_mask(g, v) & rest);
        double slack = slack_of(popcount(mask), ecount[mask]);
        if (slack < track.slack) track.offer(slack, mask_to_set(mask));
    }
}

// Subset streams for sampled mode over single sets.
template <typename Fn>
inline void sampled_subsets(const Graph& g, const CheckMode& mode, int max_size, Fn&& visit) {
    const int n = g.n();
    for (Vertex v = 0; v < n; ++v)
        if (max_size >= 1) visit({v});
    if (n <= 64 && max_size >= 2)
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = u + 1; v < n; ++v) visit({u, v});
    auto rng = substream(mode.seed, stream_id::sampling);
    std::vector<int> sizes;
    for (int s = 2; s <= std::min(n, max_size); s *= 2) sizes.push_back(s);
    if (max_size >= n) sizes.push_back(n);
    if (sizes.empty()) return;
    int per_class = std::max(1, mode.samples / static_cast<int>(sizes.size()));
    std::vector<Vertex> perm(n);
    for (int s : sizes) {
        for (int it = 0; it < per_class; ++it) {
            for (int i = 0; i < n; ++i) perm[i] = i;
            shuffle_vec(perm, rng);
            visit(std::vector<Vertex>(perm.begin(), perm.begin() + s));
        }
    }
}

} // namespace detail

// slack of the jumbledness inequality at a concrete S (re-check helper)
inline double jumbled_slack_at(const Graph& g, double p, double beta,
                               const std::vector<Vertex>& S) {
    double dev = static_cast<double>(detail::edges_inside_set(g, S)) -
                 p * (static_cast<double>(S.size()) * (S.size() - 1.0) / 2.0);
    return beta * static_cast<double>(S.size()) - std::abs(dev);
}

// slack of the derived two-set bound (2.1) at disjoint (X,Y)
inline double jumbled_pair_slack_at(const Graph& g, double p, double beta,
                                    const std::vector<Vertex>& X,
                                    const std::vector<Vertex>& Y) {
    double dev = static_cast<double>(detail::edges_between_sets(g, X, Y)) -
                 p * static_cast<double>(X.size()) * static_cast<double>(Y.size());
    return 2.0 * beta * static_cast<double>(X.size() + Y.size()) - std::abs(dev);
}

inline PropertyReport check_jumbled(const Graph& g, double p, double beta, CheckMode mode) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("check_jumbled: p outside [0,1]");
    if (!(beta >= 0.0)) throw std::invalid_argument("check_jumbled: negative beta");
    const int n = g.n();
    PropertyReport rep;
    rep.property = PropertyId::JUMBLED;
    rep.mode = mode;
    detail::SlackTracker track;

    auto bound = [&](int s, int e) {
        double dev = e - p * (static_cast<double>(s) * (s - 1) / 2.0);
        return beta * s - std::abs(dev);
    };
    if (mode.exact) {
        if (n > kExactCap)
            throw CapabilityError("check_jumbled: exact mode capped at n <= " +
                                  std::to_string(kExactCap));
        detail::enumerate_subsets(g, track, bound);
    } else if (n <= kSampledExhaustive) {
        detail::enumerate_subsets(g, track, bound); // sampled subsumes exact on small graphs
    } else {
        detail::sampled_subsets(g, mode, n, [&](const std::vector<Vertex>& S) {
            track.offer(jumbled_slack_at(g, p, beta, S), S);
        });
        std::vector<Vertex> full(n);
        for (int v = 0; v < n; ++v) full[v] = v;
        track.offer(jumbled_slack_at(g, p, beta, full), full);
        // greedy adversarial descent, one run chasing dense sets, one sparse
        for (int dense = 0; dense < 2; ++dense) {
            std::vector<Vertex> S;
            std::vector<char> in(n, 0);
            Vertex seed_v = 0;
            for (Vertex v = 0; v < n; ++v)
                if ((dense && g.degree(v) > g.degree(seed_v)) ||
                    (!dense && g.degree(v) < g.degree(seed_v)))
                    seed_v = v;
            S.push_back(seed_v);
            in[seed_v] = 1;
            long long e = 0;
            while (static_cast<int>(S.size()) < n) {
                Vertex best = -1;
                int best_links = dense ? -1 : n + 1;
                for (Vertex w = 0; w < n; ++w) {
                    if (in[w]) continue;
                    int links = 0;
                    for (Vertex x : g.neighbors(w)) links += in[x];
                    if ((dense && links > best_links) || (!dense && links < best_links)) {
                        best_links = links;
                        best = w;
                    }
                }
                S.push_back(best);
                in[best] = 1;
                e += best_links;
                int s = static_cast<int>(S.size());
                double dev = e - p * (static_cast<double>(s) * (s - 1) / 2.0);
                double slack = beta * s - std::abs(dev);
                if (slack < track.slack) {
                    auto sorted = S;
                    std::sort(sorted.begin(), sorted.end());
                    track.offer(slack, sorted);
                }
            }
        }
    }

    rep.margin = track.slack;
    rep.clauses.push_back({"jumbled", track.slack});

    // derived two-set bound (2.1) on sampled disjoint pairs
    double pair_slack = std::numeric_limits<double>::infinity();
    Witness pair_witness;
    auto rng = substream(mode.seed, stream_id::sampling + 1);
    int pair_samples = mode.exact ? 200 : std::max(50, mode.samples / 10);
    std::vector<Vertex> perm(n);
    for (int it = 0; it < pair_samples && n >= 2; ++it) {
        for (int i = 0; i < n; ++i) perm[i] = i;
        shuffle_vec(perm, rng);
        int sx = 1 + static_cast<int>(below(rng, static_cast<std::uint64_t>(n - 1)));
        int sy = 1 + static_cast<int>(below(rng, static_cast<std::uint64_t>(n - sx)));
        std::vector<Vertex> X(perm.begin(), perm.begin() + sx);
        std::vector<Vertex> Y(perm.begin() + sx, perm.begin() + sx + sy);
        double s = jumbled_pair_slack_at(g, p, beta, X, Y);
        if (s < pair_slack) {
            pair_slack = s;
            pair_witness = {X, Y};
        }
    }
    rep.clauses.push_back({"two_set_bound", pair_slack});
    if (pair_slack < rep.margin) {
        rep.margin = pair_slack;
        track.witness = pair_witness;
    }

    rep.verdict = rep.margin > 0 ? Verdict::pass : Verdict::fail;
    if (rep.verdict == Verdict::fail) rep.witness = track.witness;
    return rep;
}

// --- P2 / P3 edge-distribution dichotomies -------------------------------

// P2 clause slack at a concrete disjoint pair; c_sparse/c_dense are the
// (2, 7) constants, or (3/2, 6) for the strong variant.
inline double p2_slack_at(const Graph& g, double p, double c_sparse, double c_dense,
                          const std::vector<Vertex>& S, const std::vector<Vertex>& T) {
    double logn = std::log(static_cast<double>(g.n()));
    double e = static_cast<double>(detail::edges_between_sets(g, S, T));
    double s = static_cast<double>(S.size()), t = static_cast<double>(T.size());
    // clause selection via (1/s + 1/t) log n >= (7/2) p, robust at p = 0
    if ((1.0 / s + 1.0 / t) * logn >= 3.5 * p) return c_sparse * (s + t) * logn - e;
    return c_dense * s * t * p - e;
}

inline double p3_slack_at(const Graph& g, double p, double c_sparse, double c_dense,
                          const std::vector<Vertex>& S) {
    double logn = std::log(static_cast<double>(g.n()));
    double e = static_cast<double>(detail::edges_inside_set(g, S));
    double s = static_cast<double>(S.size());
    if (logn >= 1.75 * s * p) return c_sparse * s * logn - e;
    return c_dense * s * s * p - e;
}

namespace detail {

// exact P2: ternary enumeration of disjoint (S,T) with incremental e(S,T)
inline void p2_exact(const Graph& g, double p, double c_sparse, double c_dense,
                     SlackTracker& track) {
    const int n = g.n();
    const double logn = std::log(static_cast<double>(n));
    struct Frame {
        std::uint64_t S = 0, T = 0;
        long long est = 0;
    };
    std::vector<std::uint64_t> adj(n);
    for (int v = 0; v < n; ++v) adj[v] = adj_mask(g, v);
    // iterative DFS over vertex assignments: 0 skip, 1 into S, 2 into T
    std::vector<int> choice(n, -1);
    std::vector<Frame> frames(n + 1);
    int depth = 0;
    while (depth >= 0) {
        if (depth == n) {
            const Frame& f = frames[n];
            int s = popcount(f.S), t = popcount(f.T);
            if (s > 0 && t > 0) {
                double bound = ((1.0 / s + 1.0 / t) * logn >= 3.5 * p)
                                   ? c_sparse * (s + t) * logn
                                   : c_dense * static_cast<double>(s) * t * p;
                double slack = bound - static_cast<double>(f.est);
                if (slack < track.slack)
                    track.offer(slack, mask_to_set(f.S), mask_to_set(f.T));
            }
            --depth;
            continue;
        }
        int& c = choice[depth];
        ++c;
        if (c > 2) {
            c = -1;
            --depth;
            continue;
        }
        Frame f = frames[depth];
        if (c == 1) {
            f.est += popcount(adj[depth] & f.T);
            f.S |= 1ULL << depth;
        } else if (c == 2) {
            f.est += popcount(adj[depth] & f.S);
            f.T |= 1ULL << depth;
        }
        frames[depth + 1] = f;
        ++depth;
    }
}

template <typename SlackFn>
inline void sampled_pairs(const Graph& g, const CheckMode& mode, SlackFn&& offer) {
    const int n = g.n();
    auto rng = substream(mode.seed, stream_id::sampling + 2);
    // all singleton pairs when affordable
    if (n <= 64)
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = 0; v < n; ++v)
                if (u != v) offer({u}, {v});
    std::vector<Vertex> perm(n);
    for (int it = 0; it < mode.samples; ++it) {
        for (int i = 0; i < n; ++i) perm[i] = i;
        shuffle_vec(perm, rng);
        int sx = 1 + static_cast<int>(below(rng, static_cast<std::uint64_t>(n - 1)));
        int sy = 1 + static_cast<int>(below(rng, static_cast<std::uint64_t>(n - sx)));
        offer(std::vector<Vertex>(perm.begin(), perm.begin() + sx),
              std::vector<Vertex>(perm.begin() + sx, perm.begin() + sx + sy));
    }
    // greedy adversarial: grow a dense pair from the highest-degree edge
    Vertex a = 0, b = -1;
    for (auto [u, v] : g.edges())
        if (b == -1 || g.degree(u) + g.degree(v) > g.degree(a) + g.degree(b)) a = u, b = v;
    if (b != -1) {
        std::vector<Vertex> S{a}, T{b};
        std::vector<char> used(n, 0);
        used[a] = used[b] = 1;
        for (int round = 0; round < n - 2; ++round) {
            bool to_s = round % 2 == 0;
            const std::vector<Vertex>& opp = to_s ? T : S;
            Vertex best = -1;
            int best_links = -1;
            for (Vertex w = 0; w < n; ++w) {
                if (used[w]) continue;
                int links = 0;
                for (Vertex x : g.neighbors(w))
                    for (Vertex y : opp)
                        if (x == y) ++links;
                if (links > best_links) best_links = links, best = w;
            }
            if (best == -1) break;
            used[best] = 1;
            (to_s ? S : T).push_back(best);
            offer(S, T);
        }
    }
}

} // namespace detail

// --- prefix-exact strong 2-jumping ---------------------------------------

// The minimizing T of a given size consists of the lowest-degree vertices
// (average of any T >= average of the |T| smallest degrees), so the check
// over all subsets reduces to prefixes of the degree-sorted vertex list.
inline PropertyReport check_strongly_2_jumping(const Graph& g) {
    if (g.n() < 2) throw std::invalid_argument("check_strongly_2_jumping: need n >= 2");
    const int n = g.n();
    PropertyReport rep;
    rep.property = PropertyId::STRONG2JUMP;
    rep.mode = CheckMode::Exact();
    std::vector<Vertex> order(n);
    for (int v = 0; v < n; ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
        return g.degree(a) != g.degree(b) ? g.degree(a) < g.degree(b) : a < b;
    });
    const double delta = g.degree(order[0]);
    const double log2n = std::pow(std::log(static_cast<double>(n)), 2.0);
    detail::SlackTracker track;
    double sum = 0;
    for (int k = 1; k <= n; ++k) {
        sum += g.degree(order[k - 1]);
        double required = delta + std::min(static_cast<double>(k - 1), log2n);
        double slack = sum / k - required;
        if (slack < track.slack)
            track.offer(slack, std::vector<Vertex>(order.begin(), order.begin() + k));
    }
    rep.margin = track.slack;
    rep.verdict = rep.margin >= 0 ? Verdict::pass : Verdict::fail;
    if (rep.verdict == Verdict::fail) rep.witness = track.witness;
    return rep;
}

// average-degree slack of the strong-2-jumping inequality at a concrete T
inline double strong2jump_slack_at(const Graph& g, const std::vector<Vertex>& T) {
    DegreeProfile prof = degree_profile(g);
    double sum = 0;
    for (Vertex v : T) sum += g.degree(v);
    double log2n = std::pow(std::log(static_cast<double>(g.n())), 2.0);
    return sum / static_cast<double>(T.size()) -
           (prof.min_degree + std::min(static_cast<double>(T.size() - 1), log2n));
}

inline PropertyReport check_downjumping(const Graph& g, int u) {
    if (u < 1) throw std::invalid_argument("check_downjumping: need u >= 1");
    DegreeProfile prof = degree_profile(g);
    PropertyReport rep;
    rep.property = PropertyId::DOWNJUMP;
    rep.mode = CheckMode::Exact();
    bool unique = prof.argmax_vertices.size() == 1;
    rep.margin = unique ? static_cast<double>(prof.downjump_gap - u)
                        : -static_cast<double>(u);
    rep.clauses.push_back({"unique_max", unique ? 1.0 : -1.0});
    rep.clauses.push_back({"gap", rep.margin});
    rep.verdict = (unique && prof.downjump_gap >= u) ? Verdict::pass : Verdict::fail;
    if (rep.verdict == Verdict::fail) rep.witness = Witness{prof.argmax_vertices, {}};
    return rep;
}

// --- the P1..P6 / SP1..SP6 battery ---------------------------------------

enum class Strength { normal, strong };

inline std::vector<PropertyReport> check_pseudorandom(const Graph& g, double p,
                                                      Strength strength, CheckMode mode) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("check_pseudorandom: p outside [0,1]");
    const int n = g.n();
    const double np = n * p;
    const double logn = std::log(static_cast<double>(n));
    const bool strong = strength == Strength::strong;
    auto id = [&](int k) {
        static constexpr PropertyId normal_ids[] = {PropertyId::P1, PropertyId::P2,
                                                    PropertyId::P3, PropertyId::P4,
                                                    PropertyId::P5, PropertyId::P6};
        static constexpr PropertyId strong_ids[] = {PropertyId::SP1, PropertyId::SP2,
                                                    PropertyId::SP3, PropertyId::SP4,
                                                    PropertyId::SP5, PropertyId::SP6};
        return strong ? strong_ids[k - 1] : normal_ids[k - 1];
    };
    std::vector<PropertyReport> reports;

    // P1: jumbledness with the battery's beta
    const double beta = (strong ? 1.5 : 2.0) * std::sqrt(np * (1.0 - p));
    PropertyReport p1 = check_jumbled(g, p, beta, mode);
    p1.property = id(1);
    reports.push_back(std::move(p1));

    // P2
    {
        PropertyReport rep;
        rep.property = id(2);
        rep.mode = mode;
        const double c_sparse = strong ? 1.5 : 2.0;
        const double c_dense = strong ? 6.0 : 7.0;
        detail::SlackTracker track;
        if (mode.exact) {
            if (n > kExactCap)
                throw CapabilityError("check_pseudorandom: exact P2 capped at n <= " +
                                      std::to_string(kExactCap));
            detail::p2_exact(g, p, c_sparse, c_dense, track);
        } else if (n <= kSampledExhaustive) {
            detail::p2_exact(g, p, c_sparse, c_dense, track);
        } else {
            detail::sampled_pairs(g, mode,
                                  [&](const std::vector<Vertex>& S, const std::vector<Vertex>& T) {
                                      track.offer(p2_slack_at(g, p, c_sparse, c_dense, S, T), S, T);
                                  });
        }
        rep.margin = track.slack;
        rep.verdict = rep.margin >= 0 ? Verdict::pass : Verdict::fail;
        if (rep.verdict == Verdict::fail) rep.witness = track.witness;
        reports.push_back(std::move(rep));
    }

    // P3
    {
        PropertyReport rep;
        rep.property = id(3);
        rep.mode = mode;
        const double c_sparse = strong ? 1.5 : 2.0;
        const double c_dense = strong ? 3.0 : 3.5;
        detail::SlackTracker track;
        auto bound = [&](int s, int e) {
            double b = (logn >= 1.75 * s * p) ? c_sparse * s * logn
                                              : c_dense * static_cast<double>(s) * s * p;
            return b - e;
        };
        if (mode.exact) {
            if (n > kExactCap)
                throw CapabilityError("check_pseudorandom: exact P3 capped at n <= " +
                                      std::to_string(kExactCap));
            detail::enumerate_subsets(g, track, bound);
        } else if (n <= kSampledExhaustive) {
            detail::enumerate_subsets(g, track, bound);
        } else {
            detail::sampled_subsets(g, mode, n, [&](const std::vector<Vertex>& S) {
                track.offer(p3_slack_at(g, p, c_sparse, c_dense, S), S);
            });
        }
        rep.margin = track.slack;
        rep.verdict = rep.margin >= 0 ? Verdict::pass : Verdict::fail;
        if (rep.verdict == Verdict::fail) rep.witness = track.witness;
        reports.push_back(std::move(rep));
    }

    DegreeProfile prof = degree_profile(g);

    // P4: np - 2 sqrt(np log n) <= delta <= np - 200 sqrt(np(1-p))
    {
        PropertyReport rep;
        rep.property = id(4);
        rep.mode = CheckMode::Exact();
        double lower = np - 2.0 * std::sqrt(np * logn);
        double upper = np - 200.0 * std::sqrt(np * (1.0 - p));
        double m_lower = prof.min_degree - lower;
        double m_upper = upper - prof.min_degree;
        rep.clauses.push_back({"delta_lower", m_lower});
        rep.clauses.push_back({"delta_upper", m_upper});
        rep.margin = std::min(m_lower, m_upper);
        rep.verdict = rep.margin >= 0 ? Verdict::pass : Verdict::fail;
        if (rep.verdict == Verdict::fail) rep.witness = Witness{prof.argmin_vertices, {}};
        reports.push_back(std::move(rep));
    }

    // P5: Delta <= np + c sqrt(np log n)
    {
        PropertyReport rep;
        rep.property = id(5);
        rep.mode = CheckMode::Exact();
        double c = strong ? 15.0 / 8.0 : 2.0;
        rep.margin = np + c * std::sqrt(np * logn) - prof.max_degree;
        rep.clauses.push_back({"Delta_upper", rep.margin});
        rep.verdict = rep.margin >= 0 ? Verdict::pass : Verdict::fail;
        if (rep.verdict == Verdict::fail) rep.witness = Witness{prof.argmax_vertices, {}};
        reports.push_back(std::move(rep));
    }

    // P6
    {
        PropertyReport rep = check_strongly_2_jumping(g);
        rep.property = id(6);
        reports.push_back(std::move(rep));
    }
    return reports;
}

// --- HP1 / HP2 -----------------------------------------------------------

inline std::vector<Vertex> external_neighborhood(const Graph& g, const std::vector<Vertex>& S) {
    std::vector<char> in(g.n(), 0), out(g.n(), 0);
    for (Vertex v : S) in[v] = 1;
    std::vector<Vertex> N;
    for (Vertex v : S)
        for (Vertex w : g.neighbors(v))
            if (!in[w] && !out[w]) {
                out[w] = 1;
                N.push_back(w);
            }
    std::sort(N.begin(), N.end());
    return N;
}

inline std::vector<PropertyReport> check_hamilton_connectivity_criterion(const Graph& g,
                                                                         CheckMode mode) {
    if (g.n() < 3)
        throw std::invalid_argument("check_hamilton_connectivity_criterion: need n >= 3");
    const int n = g.n();
    const double logn = std::log(static_cast<double>(n));
    std::vector<PropertyReport> reports;

    // HP1: |N(S)| >= 20 |S| for all |S| <= n / sqrt(log n)
    const int hp1_cap = std::max(1, static_cast<int>(std::floor(n / std::sqrt(logn))));
    {
        PropertyReport rep;
        rep.property = PropertyId::HP1;
        rep.mode = mode;
        detail::SlackTracker track;
        auto offer = [&](const std::vector<Vertex>& S) {
            if (static_cast<int>(S.size()) > hp1_cap) return;
            double slack = static_cast<double>(external_neighborhood(g, S).size()) -
                           20.0 * static_cast<double>(S.size());
            track.offer(slack, S);
        };
        auto enumerate = [&]() {
            const std::uint64_t all = n == 64 ? ~0ULL : (1ULL << n) - 1;
            for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
                int s = detail::popcount(mask);
                if (s > hp1_cap) continue;
                std::uint64_t nb = 0, rest = mask;
                while (rest) {
                    int v = __builtin_ctzll(rest);
                    rest &= rest - 1;
                    nb |= detail::adj_mask(g, v);
                }
                double slack = detail::popcount(nb & all & ~mask) - 20.0 * s;
                if (slack < track.slack) track.offer(slack, detail::mask_to_set(mask));
            }
        };
        if (mode.exact) {
            if (n > kExactCap)
                throw CapabilityError("HP1: exact mode capped at n <= " +
                                      std::to_string(kExactCap));
            enumerate();
        } else if (n <= kSampledExhaustive) {
            enumerate();
        } else {
            detail::sampled_subsets(g, mode, hp1_cap, offer);
            // greedy adversarial: grow S minimizing |N(S)|
            std::vector<Vertex> S;
            std::vector<char> in(n, 0);
            Vertex seed_v = 0;
            for (Vertex v = 0; v < n; ++v)
                if (g.degree(v) < g.degree(seed_v)) seed_v = v;
            S.push_back(seed_v);
            in[seed_v] = 1;
            offer(S);
            while (static_cast<int>(S.size()) < hp1_cap) {
                Vertex best = -1;
                std::size_t best_n = static_cast<std::size_t>(-1);
                for (Vertex w = 0; w < n; ++w) {
                    if (in[w]) continue;
                    S.push_back(w);
                    std::size_t nn = external_neighborhood(g, S).size();
                    S.pop_back();
                    if (nn < best_n) best_n = nn, best = w;
                }
                if (best == -1) break;
                S.push_back(best);
                in[best] = 1;
                auto sorted = S;
                std::sort(sorted.begin(), sorted.end());
                offer(sorted);
            }
        }
        rep.margin = track.slack;
        rep.verdict = rep.margin >= 0 ? Verdict::pass : Verdict::fail;
        if (rep.verdict == Verdict::fail) rep.witness = track.witness;
        reports.push_back(std::move(rep));
    }

    // HP2: at least one edge between any disjoint A,B with |A|,|B| >= n/log n.
    // Violation at sizes >= t implies one at size exactly t, so checking
    // |A| = t and B = V minus A minus N(A) is complete.
    const int t = std::max(1, static_cast<int>(std::ceil(n / logn)));
    {
        PropertyReport rep;
        rep.property = PropertyId::HP2;
        rep.mode = mode;
        detail::SlackTracker track;
        auto offer = [&](const std::vector<Vertex>& A) {
            if (static_cast<int>(A.size()) < t) return;
            std::vector<char> excluded(n, 0);
            for (Vertex v : A) excluded[v] = 1;
            for (Vertex v : external_neighborhood(g, A)) excluded[v] = 1;
            std::vector<Vertex> B;
            for (Vertex v = 0; v < n; ++v)
                if (!excluded[v]) B.push_back(v);
            // slack: how far the non-neighbour pool is below t
            double slack = static_cast<double>(t) - 1.0 - static_cast<double>(B.size());
            if (slack < track.slack) {
                while (static_cast<int>(B.size()) > t) B.pop_back();
                track.offer(slack, A, B);
            }
        };
        auto enumerate = [&]() {
            for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask)
                if (detail::popcount(mask) == t) offer(detail::mask_to_set(mask));
        };
        if (mode.exact) {
            if (n > kExactCap)
                throw CapabilityError("HP2: exact mode capped at n <= " +
                                      std::to_string(kExactCap));
            enumerate();
        } else if (n <= kSampledExhaustive) {
            enumerate();
        } else {
            auto rng = substream(mode.seed, stream_id::sampling + 3);
            std::vector<Vertex> perm(n);
            for (int it = 0; it < std::max(100, mode.samples / 4); ++it) {
                for (int i = 0; i < n; ++i) perm[i] = i;
                shuffle_vec(perm, rng);
                offer(std::vector<Vertex>(perm.begin(), perm.begin() + t));
            }
            // greedy low-expansion set, checked at every prefix size >= t
            std::vector<Vertex> S;
            std::vector<char> in(n, 0);
            Vertex seed_v = 0;
            for (Vertex v = 0; v < n; ++v)
                if (g.degree(v) < g.degree(seed_v)) seed_v = v;
            S.push_back(seed_v);
            in[seed_v] = 1;
            while (static_cast<int>(S.size()) < std::min(n, 2 * t + 2)) {
                Vertex best = -1;
                std::size_t best_n = static_cast<std::size_t>(-1);
                for (Vertex w = 0; w < n; ++w) {
                    if (in[w]) continue;
                    S.push_back(w);
                    std::size_t nn = external_neighborhood(g, S).size();
                    S.pop_back();
                    if (nn < best_n) best_n = nn, best = w;
                }
                if (best == -1) break;
                S.push_back(best);
                in[best] = 1;
                auto sorted = S;
                std::sort(sorted.begin(), sorted.end());
                offer(sorted);
            }
        }
        rep.margin = track.slack == std::numeric_limits<double>::infinity() ? 0.0 : track.slack;
        rep.verdict = rep.margin >= 0 ? Verdict::pass : Verdict::fail;
        if (rep.verdict == Verdict::fail) rep.witness = track.witness;
        reports.push_back(std::move(rep));
    }
    return reports;
}

// --- Chernoff bound and star augmentation --------------------------------

// bound on P(X <= (1-a) np) for X ~ Bin(n,p)
inline double chernoff_tail(long long n, double p, double a) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("chernoff_tail: need 0 < a < 1");
    return std::exp(-a * a * static_cast<double>(n) * p / 3.0);
}

struct AugmentWarnings {
    bool size_bound_exceeded = false;
    double size_bound = 0.0;
};

// G + F for a star F at x0. Hard violations (edge already present, edge not
// at x0, edge touching the unique minimum-degree vertex) are parameter
// errors; exceeding the |F| <= sqrt(np log n)/8 budget is only warned so the
// lemma's sharpness can be probed.
inline Graph augment_star(const Graph& g, Vertex x0, const std::vector<Edge>& F, double p,
                          AugmentWarnings* warnings = nullptr) {
    DegreeProfile prof = degree_profile(g);
    std::optional<Vertex> y1;
    if (prof.argmin_vertices.size() == 1) y1 = prof.argmin_vertices[0];
    for (auto e : F) {
        auto [u, v] = make_edge(e.first, e.second);
        if (u != x0 && v != x0)
            throw std::invalid_argument("augment_star: F-edge not incident to x0");
        if (g.has_edge(u, v)) throw std::invalid_argument("augment_star: F-edge already in G");
        Vertex other = u == x0 ? v : u;
        if (y1 && other == *y1)
            throw std::invalid_argument("augment_star: F-edge touches the minimum-degree vertex");
    }
    double bound = std::sqrt(g.n() * p * std::log(static_cast<double>(std::max(g.n(), 2)))) / 8.0;
    if (warnings) {
        warnings->size_bound = bound;
        warnings->size_bound_exceeded = static_cast<double>(F.size()) > bound;
    }
    return g.with_edges_added(F);
}

} // namespace hamcover
