#pragma once

// Subjective Logic opinions and the two operators used to propagate them:
// discounting (trust through a recommender) and consensus (fusion of two
// independent opinions about the same proposition).
//
//   discount(R, x):  b = bR*bx,  d = bR*dx,  u = dR + uR + bR*ux
//   consensus(x, y): k = ux + uy - ux*uy
//                    b = (bx*uy + by*ux)/k,  d = (dx*uy + dy*ux)/k,  u = ux*uy/k

#include <cmath>
#include <ostream>
#include <sstream>
#include <string>

#include "trustlens/error.hpp"

namespace trustlens {

inline constexpr double opinion_tolerance = 1e-9;

struct Opinion {
    double belief = 0.0;
    double disbelief = 0.0;
    double uncertainty = 1.0;

    /// The opinion that carries no evidence at all.
    static constexpr Opinion vacuous() { return {0.0, 0.0, 1.0}; }

    friend bool operator==(const Opinion&, const Opinion&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Opinion& o) {
    return os << '(' << o.belief << ", " << o.disbelief << ", " << o.uncertainty << ')';
}

inline bool validate(const Opinion& o) {
    const auto in_unit = [](double x) {
        return std::isfinite(x) && x >= -opinion_tolerance && x <= 1.0 + opinion_tolerance;
    };
    if (!in_unit(o.belief) || !in_unit(o.disbelief) || !in_unit(o.uncertainty))
        return false;
    return std::abs(o.belief + o.disbelief + o.uncertainty - 1.0) <= opinion_tolerance;
}

namespace detail {

inline void require_valid(const Opinion& o, const char* what) {
    if (!validate(o)) {
        std::ostringstream msg;
        msg << what << ": malformed opinion " << o;
        throw invalid_opinion(msg.str());
    }
}

// Absorbs drift inherited from near-valid inputs. Plain rounding noise (a few
// ulps) is left alone so that products like b' = bR*b stay bit-exact. Both
// operators keep the output drift below the sum of the two input drifts, so
// anything past 3x the tolerance means an operator produced garbage.
inline Opinion renormalize(Opinion o) {
    const auto snap = [](double x) { return x < 0.0 ? 0.0 : x; };
    o.belief = snap(o.belief);
    o.disbelief = snap(o.disbelief);
    o.uncertainty = snap(o.uncertainty);
    const double sum = o.belief + o.disbelief + o.uncertainty;
    if (std::abs(sum - 1.0) >= 3.0 * opinion_tolerance) {
        std::ostringstream msg;
        msg << "opinion drifted off the simplex: " << o << " sums to " << sum;
        throw std::logic_error(msg.str());
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        o.belief /= sum;
        o.disbelief /= sum;
        o.uncertainty /= sum;
    }
    return o;
}

} // namespace detail

/// Opinion about a proposition as seen through a recommender: the recommender
/// trust scales the recommended opinion and everything not believed about the
/// recommender becomes uncertainty.
inline Opinion discount(const Opinion& recommender_trust, const Opinion& recommended) {
    detail::require_valid(recommender_trust, "discount");
    detail::require_valid(recommended, "discount");
    const double br = recommender_trust.belief;
    return detail::renormalize({
        br * recommended.belief,
        br * recommended.disbelief,
        recommender_trust.disbelief + recommender_trust.uncertainty + br * recommended.uncertainty,
    });
}

/// Fusion of two independent opinions about the same proposition.
/// Throws degenerate_consensus when both inputs are dogmatic (u = 0).
inline Opinion consensus(const Opinion& a, const Opinion& b) {
    detail::require_valid(a, "consensus");
    detail::require_valid(b, "consensus");
    if (a.uncertainty == 0.0 && b.uncertainty == 0.0)
        throw degenerate_consensus("consensus of two dogmatic opinions is undefined");
    const double kappa = a.uncertainty + b.uncertainty - a.uncertainty * b.uncertainty;
    return detail::renormalize({
        (a.belief * b.uncertainty + b.belief * a.uncertainty) / kappa,
        (a.disbelief * b.uncertainty + b.disbelief * a.uncertainty) / kappa,
        (a.uncertainty * b.uncertainty) / kappa,
    });
}

} // namespace trustlens
