#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "trustlens/dataset.hpp"
#include "trustlens/error.hpp"
#include "trustlens/trust_graph.hpp"

namespace trustlens {

struct ScoredPair {
    double predicted = 0.0;
    double actual = 0.0;
};

/// Mean absolute error as a percentage of the rating range (5 - 1).
inline double mae_percent(std::span<const ScoredPair> pairs) {
    if (pairs.empty())
        throw error("MAE of an empty prediction set is undefined");
    double sum = 0.0;
    for (const auto& p : pairs)
        sum += std::abs(p.predicted - p.actual);
    return 100.0 * (sum / static_cast<double>(pairs.size())) / double(max_rating - min_rating);
}

// A rating of 2 or less is a "bad" experience and is the positive class.
// Rows are the actual rating, columns the prediction:
//
//                  predicted <= 2   predicted > 2
//   actual <= 2         TP               FP
//   actual  > 2         FN               TN
//
// The off-diagonal names are swapped relative to the usual convention. The
// reported F-scores use this table as is.
struct ConfusionCounts {
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }

    void add(double predicted, double actual) {
        const bool actual_bad = actual <= 2.0;
        const bool predicted_bad = predicted <= 2.0;
        if (actual_bad)
            ++(predicted_bad ? tp : fp);
        else
            ++(predicted_bad ? fn : tn);
    }
    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        tn += o.tn;
        return *this;
    }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

inline ConfusionCounts classify_and_count(std::span<const ScoredPair> pairs) {
    ConfusionCounts c;
    for (const auto& p : pairs)
        c.add(p.predicted, p.actual);
    return c;
}

/// Harmonic mean of precision TP/(TP+FP) and recall TP/(TP+FN); 0 without
/// true positives.
inline double f_score(const ConfusionCounts& c) {
    if (c.tp == 0)
        return 0.0;
    const double precision = double(c.tp) / double(c.tp + c.fp);
    const double recall = double(c.tp) / double(c.tp + c.fn);
    return 2.0 * precision * recall / (precision + recall);
}

/// Per-user neighbor lists of a whole window, by dense index.
using Neighborhoods = std::vector<std::vector<std::pair<std::uint32_t, Neighbor>>>;

inline Neighborhoods all_neighborhoods(const TrustGraph& g, NeighborMode mode) {
    Neighborhoods out(g.node_count());
    for (std::uint32_t a = 0; a < g.node_count(); ++a)
        out[a] = dense_neighbors(g, a, mode);
    return out;
}

/// Item reach of a user population: how many (user, item) cells some
/// neighbor has rated, and how many users have at least one such item they
/// have not rated themselves (users the mode can serve a prediction to).
struct Reach {
    std::uint64_t cells = 0;        ///< |users| * |items|
    std::uint64_t reachable = 0;    ///< cells with a rating neighbor
    std::uint64_t users_served = 0; ///< users with a reachable unrated item
};

/// `users` holds dense indices; `item_mask` selects the items counted.
inline Reach item_reach(const RatingsView& view, const Neighborhoods& hoods, std::span<const std::uint32_t> users,
                        const std::vector<bool>& item_mask) {
    Reach out;
    const std::size_t n_items = view.item_count();
    std::size_t item_total = 0;
    for (std::size_t i = 0; i < n_items; ++i)
        item_total += item_mask[i] ? 1 : 0;
    out.cells = static_cast<std::uint64_t>(users.size()) * item_total;

    std::vector<bool> seen(n_items);
    for (std::uint32_t a : users) {
        std::fill(seen.begin(), seen.end(), false);
        for (const auto& [u, n] : hoods[a])
            for (const Cell& c : view.user_ratings(u))
                seen[c.index] = true;
        std::vector<bool> own(n_items);
        for (const Cell& c : view.user_ratings(a))
            own[c.index] = true;
        bool served = false;
        for (std::size_t i = 0; i < n_items; ++i) {
            if (!seen[i] || !item_mask[i])
                continue;
            ++out.reachable;
            served = served || !own[i];
        }
        out.users_served += served ? 1 : 0;
    }
    return out;
}

/// Share of (user, item) cells of the population a neighbor can speak for.
inline double coverage(const Reach& r) {
    return r.cells == 0 ? 0.0 : double(r.reachable) / double(r.cells);
}

/// Coverage of a whole window under one neighbor mode.
inline double coverage(const RatingsView& view, const TrustGraph& g, NeighborMode mode) {
    std::vector<std::uint32_t> users(view.user_count());
    for (std::uint32_t a = 0; a < users.size(); ++a)
        users[a] = a;
    return coverage(item_reach(view, all_neighborhoods(g, mode), users, std::vector<bool>(view.item_count(), true)));
}

/// Inputs of the user coverage gain: predictions made (R) and the number of
/// users that could be served (A) under each mode.
struct UcgInputs {
    std::uint64_t predictions_hybrid = 0;
    std::uint64_t population_hybrid = 0;
    std::uint64_t predictions_standard = 0;
    std::uint64_t population_standard = 0;
};

/// (R_h / A_h) / (R_s / A_s) - 1, or nothing when a denominator vanishes.
inline std::optional<double> ucg(const UcgInputs& in) {
    if (in.population_standard == 0 || in.predictions_standard == 0 || in.population_hybrid == 0)
        return std::nullopt;
    const double hybrid_rate = double(in.predictions_hybrid) / double(in.population_hybrid);
    const double standard_rate = double(in.predictions_standard) / double(in.population_standard);
    return hybrid_rate / standard_rate - 1.0;
}

struct ContributorCounts {
    std::size_t trusted = 0;
    std::size_t similar = 0;
};

/// Mean over predictions of trusted / (trusted + similar).
inline std::optional<double> trust_graph_contribution(std::span<const ContributorCounts> per_prediction) {
    if (per_prediction.empty())
        return std::nullopt;
    double sum = 0.0;
    for (const auto& c : per_prediction) {
        if (c.trusted + c.similar == 0)
            throw error("prediction without contributors");
        sum += double(c.trusted) / double(c.trusted + c.similar);
    }
    return sum / double(per_prediction.size());
}

/// Pooled form: all trusted contributors over all contributors.
inline std::optional<double> trust_graph_contribution_pooled(std::span<const ContributorCounts> per_prediction) {
    std::uint64_t trusted = 0;
    std::uint64_t all = 0;
    for (const auto& c : per_prediction) {
        trusted += c.trusted;
        all += c.trusted + c.similar;
    }
    if (all == 0)
        return std::nullopt;
    return double(trusted) / double(all);
}

} // namespace trustlens
