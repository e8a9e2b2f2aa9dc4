#pragma once

// Web of trust derived from rating similarity.
//
// Every admissible user pair becomes a pair of directed edges carrying the
// same opinion. Users two hops away (reachable through a direct neighbor but
// not direct neighbors themselves) receive an indirect opinion: each path
// source -> c -> target contributes discount(source->c, c->target), and the
// per-path opinions are fused with consensus in ascending order of c.

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "trustlens/dataset.hpp"
#include "trustlens/opinion.hpp"
#include "trustlens/similarity.hpp"
#include "trustlens/trust_map.hpp"

namespace trustlens {

enum class NeighborMode { standard, hybrid };

inline std::string_view mode_name(NeighborMode m) {
    return m == NeighborMode::standard ? "standard" : "hybrid";
}

/// Resolution of indirect similarities: at or below -1 + this they are
/// dropped from neighbor sets, within this of zero they are zero.
inline constexpr double indirect_similarity_floor = 1e-9;

struct TrustEdge {
    UserId from{};
    UserId to{};
    Opinion opinion;
    std::size_t overlap = 0;
    double similarity = 0.0;
};

struct IndirectNeighbor {
    UserId target{};
    Opinion opinion;
    std::size_t path_count = 0;
};

/// Fixed-size bit set over dense user indices.
class NodeSet {
public:
    NodeSet() = default;
    explicit NodeSet(std::size_t size) : words_((size + 63) / 64, 0) {}

    bool test(std::uint32_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::uint32_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::uint32_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    void clear() { std::fill(words_.begin(), words_.end(), 0); }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_)
            c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

private:
    std::vector<std::uint64_t> words_;
};

class TrustGraph {
public:
    struct Link {
        std::uint32_t peer = 0;
        double weight = 0.0; ///< Pearson similarity
        Opinion opinion;
        PairStats stats; ///< x = owner's ratings, y = peer's ratings
    };

    TrustGraph() = default;

    /// One directed edge per ordered admissible pair of `view`'s users.
    static TrustGraph build(const RatingsView& view, std::size_t min_overlap = default_min_overlap,
                            const EvidenceMapConfig& cfg = {}) {
        check(cfg);
        TrustGraph g;
        g.min_overlap_ = min_overlap;
        g.evidence_ = cfg;
        g.nodes_.assign(view.users().begin(), view.users().end());
        const auto n_users = static_cast<std::uint32_t>(g.nodes_.size());
        g.links_.resize(n_users);
        g.adjacency_.assign(n_users, NodeSet(n_users));

        std::vector<PairStats> acc(n_users);
        std::vector<std::uint32_t> touched;
        for (std::uint32_t a = 0; a < n_users; ++a) {
            touched.clear();
            for (const Cell& rated : view.user_ratings(a)) {
                for (const Cell& other : view.item_raters(rated.index)) {
                    if (other.index <= a)
                        continue;
                    if (acc[other.index].n == 0)
                        touched.push_back(other.index);
                    acc[other.index].add(rated.value, other.value);
                }
            }
            std::sort(touched.begin(), touched.end());
            for (std::uint32_t u : touched) {
                if (auto s = acc[u].score(min_overlap)) {
                    const Opinion op = opinion_from_similarity(s->w, s->overlap, cfg);
                    g.links_[a].push_back({u, s->w, op, acc[u]});
                    g.links_[u].push_back({a, s->w, op, acc[u].swapped()});
                    g.adjacency_[a].set(u);
                    g.adjacency_[u].set(a);
                }
                acc[u] = {};
            }
        }
        return g;
    }

    std::span<const UserId> nodes() const { return nodes_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t min_overlap() const { return min_overlap_; }
    const EvidenceMapConfig& evidence() const { return evidence_; }

    std::optional<std::uint32_t> index_of(UserId id) const {
        auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
        if (it == nodes_.end() || *it != id)
            return std::nullopt;
        return static_cast<std::uint32_t>(it - nodes_.begin());
    }

    /// Outgoing links of a node, ascending by peer.
    std::span<const Link> links(std::uint32_t node) const { return links_[node]; }
    const NodeSet& adjacency(std::uint32_t node) const { return adjacency_[node]; }
    bool adjacent(std::uint32_t a, std::uint32_t b) const { return adjacency_[a].test(b); }

    const Link* find(std::uint32_t a, std::uint32_t b) const {
        const auto& row = links_[a];
        auto it = std::lower_bound(row.begin(), row.end(), b,
                                   [](const Link& l, std::uint32_t peer) { return l.peer < peer; });
        return it != row.end() && it->peer == b ? &*it : nullptr;
    }

    std::size_t edge_count() const {
        std::size_t c = 0;
        for (const auto& row : links_)
            c += row.size();
        return c;
    }

    /// All directed edges ordered by (from, to).
    std::vector<TrustEdge> edges() const {
        std::vector<TrustEdge> out;
        out.reserve(edge_count());
        for (std::uint32_t a = 0; a < links_.size(); ++a)
            for (const Link& l : links_[a])
                out.push_back({nodes_[a], nodes_[l.peer], l.opinion, static_cast<std::size_t>(l.stats.n), l.weight});
        return out;
    }

private:
    std::vector<UserId> nodes_;
    std::vector<std::vector<Link>> links_;
    std::vector<NodeSet> adjacency_;
    std::size_t min_overlap_ = default_min_overlap;
    EvidenceMapConfig evidence_;
};

/// Outgoing trust of one source in dense form. Starts as a copy of the
/// source's graph links and can be patched, e.g. to take a held-out rating
/// out of the source's pair statistics.
class SourceTrust {
public:
    explicit SourceTrust(std::size_t node_count)
        : present_(node_count), weight_(node_count, 0.0), opinion_(node_count) {}

    void load(const TrustGraph& g, std::uint32_t source) {
        for (std::uint32_t c : loaded_)
            present_.reset(c);
        loaded_.clear();
        source_ = source;
        for (const auto& l : g.links(source))
            set(l.peer, l.weight, l.opinion);
    }

    std::uint32_t source() const { return source_; }
    bool has(std::uint32_t c) const { return present_.test(c); }
    double weight(std::uint32_t c) const { return weight_[c]; }
    const Opinion& opinion(std::uint32_t c) const { return opinion_[c]; }

    void set(std::uint32_t c, double weight, const Opinion& op) {
        if (!present_.test(c))
            loaded_.push_back(c);
        present_.set(c);
        weight_[c] = weight;
        opinion_[c] = op;
    }
    void erase(std::uint32_t c) { present_.reset(c); }

private:
    std::uint32_t source_ = 0;
    NodeSet present_;
    std::vector<double> weight_;
    std::vector<Opinion> opinion_;
    std::vector<std::uint32_t> loaded_;
};

struct IndirectTrust {
    Opinion opinion;
    std::size_t path_count = 0;
};

namespace detail {

inline Opinion fold_path(const std::optional<Opinion>& acc, const Opinion& path) {
    // Every direct edge has u = 1/(n+1) > 0 and discounting never lowers the
    // recommender's uncertainty, so two dogmatic path opinions cannot meet.
    assert(path.uncertainty > 0.0);
    return acc ? consensus(*acc, path) : path;
}

} // namespace detail

/// Indirect opinion of `trust.source()` about `target` through every
/// intermediary c with source->c in `trust` and c->target in `g`. The caller
/// decides whether target is eligible (not a direct neighbor).
inline std::optional<IndirectTrust> combine_paths(const TrustGraph& g, const SourceTrust& trust,
                                                  std::uint32_t target) {
    std::optional<Opinion> acc;
    std::size_t paths = 0;
    for (const auto& l : g.links(target)) {
        if (l.peer == trust.source() || !trust.has(l.peer))
            continue;
        // c->target carries the same opinion as target->c.
        acc = detail::fold_path(acc, discount(trust.opinion(l.peer), l.opinion));
        ++paths;
    }
    if (!acc)
        return std::nullopt;
    return IndirectTrust{*acc, paths};
}

/// Two-hop targets of a dense source index, ascending.
inline std::vector<std::pair<std::uint32_t, IndirectTrust>> two_hop_dense(const TrustGraph& g, std::uint32_t s) {
    const std::size_t n = g.node_count();
    std::vector<std::optional<Opinion>> acc(n);
    std::vector<std::size_t> paths(n, 0);
    for (const auto& first : g.links(s)) {
        for (const auto& second : g.links(first.peer)) {
            const std::uint32_t d = second.peer;
            if (d == s || g.adjacent(s, d))
                continue;
            acc[d] = detail::fold_path(acc[d], discount(first.opinion, second.opinion));
            ++paths[d];
        }
    }
    std::vector<std::pair<std::uint32_t, IndirectTrust>> out;
    for (std::uint32_t d = 0; d < n; ++d)
        if (acc[d])
            out.emplace_back(d, IndirectTrust{*acc[d], paths[d]});
    return out;
}

/// Targets exactly two hops from `source`, ascending by id.
inline std::vector<IndirectNeighbor> two_hop_neighbors(const TrustGraph& g, UserId source) {
    const auto s = g.index_of(source);
    if (!s)
        throw data_error("unknown user " + std::to_string(to_int(source)));
    std::vector<IndirectNeighbor> out;
    for (const auto& [d, ind] : two_hop_dense(g, *s))
        out.push_back({g.nodes()[d], ind.opinion, ind.path_count});
    return out;
}

/// Indirect opinion mapped back to a similarity weight, or nothing when the
/// opinion is vacuous or maps onto total dissimilarity. Weights within the
/// floor of zero are zero: the round trip through opinions leaves ~1e-16 of
/// noise there, enough to turn a lone neutral neighbor into a full vote.
inline std::optional<double> indirect_weight(const Opinion& op, const EvidenceMapConfig& cfg) {
    if (op.uncertainty >= 1.0)
        return std::nullopt;
    const double w = similarity_from_opinion(op, cfg);
    if (w <= -1.0 + indirect_similarity_floor)
        return std::nullopt;
    return std::abs(w) < indirect_similarity_floor ? 0.0 : w;
}

/// Neighbors of a dense source index, ascending, tagged by how they were
/// reached. Hybrid mode adds the two-hop targets with a similarity derived
/// from the indirect opinion; a direct similarity always wins.
inline std::vector<std::pair<std::uint32_t, Neighbor>> dense_neighbors(const TrustGraph& g, std::uint32_t s,
                                                                       NeighborMode mode) {
    std::vector<std::pair<std::uint32_t, Neighbor>> out;
    for (const auto& l : g.links(s))
        out.emplace_back(l.peer, Neighbor{l.weight, false});
    if (mode == NeighborMode::hybrid) {
        for (const auto& [d, ind] : two_hop_dense(g, s))
            if (auto w = indirect_weight(ind.opinion, g.evidence()))
                out.emplace_back(d, Neighbor{*w, true});
        std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    }
    return out;
}

inline std::map<UserId, Neighbor> classified_neighbors(const TrustGraph& g, UserId source, NeighborMode mode) {
    const auto s = g.index_of(source);
    if (!s)
        throw data_error("unknown user " + std::to_string(to_int(source)));
    std::map<UserId, Neighbor> out;
    for (const auto& [d, n] : dense_neighbors(g, *s, mode))
        out.emplace_hint(out.end(), g.nodes()[d], n);
    return out;
}

/// Neighbors of `source` with their similarity weights.
inline std::map<UserId, double> neighbor_set(const TrustGraph& g, UserId source, NeighborMode mode) {
    std::map<UserId, double> out;
    for (const auto& [u, n] : classified_neighbors(g, source, mode))
        out.emplace_hint(out.end(), u, n.weight);
    return out;
}

/// Edge list, one directed edge per line: `from to b d u overlap`.
inline void write_edge_list(std::ostream& out, const TrustGraph& g) {
    const auto old_precision = out.precision(17);
    for (const auto& e : g.edges())
        out << to_int(e.from) << ' ' << to_int(e.to) << ' ' << e.opinion.belief << ' ' << e.opinion.disbelief
            << ' ' << e.opinion.uncertainty << ' ' << e.overlap << '\n';
    out.precision(old_precision);
}

} // namespace trustlens
