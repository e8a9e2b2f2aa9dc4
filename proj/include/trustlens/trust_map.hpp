#pragma once

// Similarity evidence <-> opinion mapping.
//
//   u = 1 / (n + 1)                    n = number of co-rated items
//   b = (1 - u) (1 + w^k) / 2
//   d = 1 - b - u
//
// and its inverse at the opinion's own uncertainty:
//
//   w = (2 b / (1 - u) - 1)^(1/k)

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "trustlens/error.hpp"
#include "trustlens/opinion.hpp"

namespace trustlens {

struct EvidenceMapConfig {
    int k = 1; ///< odd positive exponent applied to the similarity
};

inline bool valid_exponent(int k) { return k > 0 && k % 2 == 1; }

inline void check(const EvidenceMapConfig& cfg) {
    if (!valid_exponent(cfg.k))
        throw config_error("trust.k_exponent must be an odd positive integer, got " + std::to_string(cfg.k));
}

inline double uncertainty_from_overlap(std::size_t n) {
    return 1.0 / (static_cast<double>(n) + 1.0);
}

inline Opinion opinion_from_similarity(double w, std::size_t n, const EvidenceMapConfig& cfg = {}) {
    check(cfg);
    if (!(w >= -1.0 && w <= 1.0))
        throw error("similarity " + std::to_string(w) + " outside [-1, 1]");
    const double u = uncertainty_from_overlap(n);
    const double b = 0.5 * (1.0 - u) * (1.0 + std::pow(w, cfg.k));
    const double d = std::max(0.0, 1.0 - b - u);
    return {b, d, u};
}

/// Inverse of opinion_from_similarity. Throws no_information for the vacuous
/// opinion, which carries nothing to invert.
inline double similarity_from_opinion(const Opinion& o, const EvidenceMapConfig& cfg = {}) {
    check(cfg);
    detail::require_valid(o, "similarity_from_opinion");
    if (o.uncertainty >= 1.0)
        throw no_information("vacuous opinion has no similarity");
    const double x = std::clamp(2.0 * o.belief / (1.0 - o.uncertainty) - 1.0, -1.0, 1.0);
    if (cfg.k == 1)
        return x;
    return std::copysign(std::pow(std::abs(x), 1.0 / cfg.k), x);
}

} // namespace trustlens
