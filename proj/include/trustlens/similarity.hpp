#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trustlens/dataset.hpp"

namespace trustlens {

inline constexpr std::size_t default_min_overlap = 10;

struct SimilarityScore {
    double w = 0.0;
    std::size_t overlap = 0;
};

/// A user taking part in a prediction, with the similarity weight used.
struct Neighbor {
    double weight = 0.0;
    bool trusted = false; ///< reached through the trust graph rather than direct similarity
};

/// Co-rated sufficient statistics of a user pair. Ratings are integers, so the
/// sums are exact and a rating can be taken out again without drift.
struct PairStats {
    std::int64_t n = 0;
    std::int64_t sx = 0, sy = 0;
    std::int64_t sxx = 0, syy = 0, sxy = 0;

    void add(std::int64_t x, std::int64_t y) {
        ++n;
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    void remove(std::int64_t x, std::int64_t y) {
        --n;
        sx -= x;
        sy -= y;
        sxx -= x * x;
        syy -= y * y;
        sxy -= x * y;
    }
    PairStats swapped() const { return {n, sy, sx, syy, sxx, sxy}; }

    /// Pearson correlation over the co-rated items; none when either side has
    /// zero variance.
    std::optional<double> correlation() const {
        const std::int64_t cov = n * sxy - sx * sy;
        const std::int64_t var_x = n * sxx - sx * sx;
        const std::int64_t var_y = n * syy - sy * sy;
        if (n < 2 || var_x <= 0 || var_y <= 0)
            return std::nullopt;
        const double w = static_cast<double>(cov) /
                         std::sqrt(static_cast<double>(var_x) * static_cast<double>(var_y));
        return std::clamp(w, -1.0, 1.0);
    }

    /// Score if the pair is admissible under `min_overlap`.
    std::optional<SimilarityScore> score(std::size_t min_overlap) const {
        if (n < static_cast<std::int64_t>(min_overlap))
            return std::nullopt;
        auto w = correlation();
        if (!w)
            return std::nullopt;
        return SimilarityScore{*w, static_cast<std::size_t>(n)};
    }
};

namespace detail {

inline std::uint32_t require_user(const RatingsView& view, UserId id) {
    auto idx = view.user_index(id);
    if (!idx)
        throw data_error("unknown user " + std::to_string(to_int(id)));
    return *idx;
}

} // namespace detail

/// Statistics over the items both users rated, by dense index.
inline PairStats pair_stats(const RatingsView& view, std::uint32_t a, std::uint32_t u) {
    PairStats s;
    const auto ra = view.user_ratings(a);
    const auto ru = view.user_ratings(u);
    auto ia = ra.begin();
    auto iu = ru.begin();
    while (ia != ra.end() && iu != ru.end()) {
        if (ia->index < iu->index) {
            ++ia;
        } else if (iu->index < ia->index) {
            ++iu;
        } else {
            s.add(ia->value, iu->value);
            ++ia;
            ++iu;
        }
    }
    return s;
}

/// Items rated by both users, ascending.
inline std::vector<ItemId> co_rated(const RatingsView& view, UserId a, UserId u) {
    const auto ra = view.user_ratings(detail::require_user(view, a));
    const auto ru = view.user_ratings(detail::require_user(view, u));
    std::vector<ItemId> out;
    auto ia = ra.begin();
    auto iu = ru.begin();
    while (ia != ra.end() && iu != ru.end()) {
        if (ia->index < iu->index) {
            ++ia;
        } else if (iu->index < ia->index) {
            ++iu;
        } else {
            out.push_back(view.items()[ia->index]);
            ++ia;
            ++iu;
        }
    }
    return out;
}

/// Pearson similarity of two users restricted to their co-rated items.
/// Returns nothing when the overlap is below `min_overlap` or the correlation
/// is undefined.
inline std::optional<SimilarityScore> pearson(const RatingsView& view, UserId a, UserId u,
                                              std::size_t min_overlap = default_min_overlap) {
    const auto ia = detail::require_user(view, a);
    const auto iu = detail::require_user(view, u);
    return pair_stats(view, ia, iu).score(min_overlap);
}

} // namespace trustlens
