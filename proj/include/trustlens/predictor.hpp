#pragma once

// Resnick's neighborhood prediction
//
//   r_a(i) = mean_a + sum_u w_au (r_u(i) - mean_u) / sum_u |w_au|
//
// over the neighbors u that rated i. The normalizing denominator can be
// switched off to get the bare weighted sum.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "trustlens/dataset.hpp"
#include "trustlens/similarity.hpp"

namespace trustlens {

struct Prediction {
    UserId user{};
    ItemId item{};
    double value = 0.0;     ///< clamped to the rating scale
    double raw_value = 0.0; ///< before clamping
    std::size_t contributors_similar = 0;
    std::size_t contributors_trusted = 0;
};

/// One neighbor's input to a prediction.
struct Contribution {
    double weight = 0.0;
    double rating = 0.0;
    double neighbor_mean = 0.0;
    bool trusted = false;
};

/// Combines contributions in the order given. Nothing when there are no
/// contributions or all weights are zero.
inline std::optional<Prediction> resnick(double user_mean, std::span<const Contribution> contributions,
                                         bool normalize = true) {
    double num = 0.0;
    double den = 0.0;
    Prediction p;
    for (const Contribution& c : contributions) {
        num += c.weight * (c.rating - c.neighbor_mean);
        den += std::abs(c.weight);
        ++(c.trusted ? p.contributors_trusted : p.contributors_similar);
    }
    if (contributions.empty() || den == 0.0)
        return std::nullopt;
    p.raw_value = user_mean + (normalize ? num / den : num);
    p.value = std::clamp(p.raw_value, double(min_rating), double(max_rating));
    return p;
}

inline double mean_rating(const RatingsView& view, UserId u) {
    const auto idx = detail::require_user(view, u);
    const auto n = view.user_ratings(idx).size();
    return static_cast<double>(view.user_sum(idx)) / static_cast<double>(n);
}

/// Prediction of `a`'s rating of `i` from the given neighbors, visited in
/// ascending id order.
inline std::optional<Prediction> predict(const RatingsView& view, UserId a, ItemId i,
                                         const std::map<UserId, Neighbor>& neighbors, bool normalize = true) {
    const double mean_a = mean_rating(view, a);
    auto item = view.item_index(i);
    if (!item)
        return std::nullopt;
    std::vector<Contribution> parts;
    for (const Cell& rater : view.item_raters(*item)) {
        const UserId u = view.users()[rater.index];
        if (u == a)
            continue;
        auto it = neighbors.find(u);
        if (it == neighbors.end())
            continue;
        parts.push_back({it->second.weight, double(rater.value), mean_rating(view, u), it->second.trusted});
    }
    auto p = resnick(mean_a, parts, normalize);
    if (p) {
        p->user = a;
        p->item = i;
    }
    return p;
}

inline std::optional<Prediction> predict(const RatingsView& view, UserId a, ItemId i,
                                         const std::map<UserId, double>& weights, bool normalize = true) {
    std::map<UserId, Neighbor> neighbors;
    for (const auto& [u, w] : weights)
        neighbors.emplace(u, Neighbor{w, false});
    return predict(view, a, i, neighbors, normalize);
}

} // namespace trustlens
