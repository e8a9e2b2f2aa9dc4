#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "reference.hpp"
#include "trustlens/dataset.hpp"

namespace fixtures {

inline std::vector<trustlens::Rating> to_ratings(const ref::Ratings& r, std::int64_t t0 = 1000) {
    std::vector<trustlens::Rating> out;
    std::int64_t t = t0;
    for (const auto& [u, row] : r)
        for (auto [i, v] : row)
            out.push_back({trustlens::UserId{u}, trustlens::ItemId{i}, v, t++});
    return out;
}

inline trustlens::RatingsView view_of(const ref::Ratings& r) {
    auto ratings = to_ratings(r);
    return trustlens::RatingsView(std::move(ratings), {0, 1'000'000});
}

// Five users over eight items. With a co-rating threshold of 3, users 1-2,
// 2-3, 2-4 and 1-4 are similar, 1 and 3 only meet through 2 and 4, and 5 is
// cut off.
inline ref::Ratings small() {
    return {
        {1, {{1, 5}, {2, 3}, {3, 4}, {4, 1}, {6, 2}}},
        {2, {{1, 4}, {2, 2}, {3, 5}, {4, 2}, {5, 3}, {6, 1}}},
        {3, {{4, 1}, {5, 4}, {6, 2}, {7, 5}}},
        {4, {{1, 2}, {2, 4}, {6, 3}, {7, 3}, {8, 5}}},
        {5, {{3, 3}, {5, 5}, {7, 1}, {8, 4}}},
    };
}

/// Random ratings: every user rates each item with probability `density`.
inline ref::Ratings random(std::uint64_t seed, int users, int items, double density) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution rated(density);
    std::uniform_int_distribution<int> value(1, 5);
    ref::Ratings r;
    for (int u = 1; u <= users; ++u) {
        auto& row = r[u * 7 + 3];
        for (int i = 1; i <= items; ++i)
            if (rated(rng))
                row[i * 5 + 1] = value(rng);
        if (row.empty())
            row[1] = value(rng);
    }
    return r;
}

} // namespace fixtures
