#pragma once

// Leave-one-out evaluation over time windows.
//
// For every user with enough ratings in a window, each of their ratings is
// removed in turn and predicted from the rest. The held-out rating is taken
// out of everything its own prediction depends on: the user's mean and the
// pair statistics (overlap, Pearson, opinion) of every edge to a co-rater of
// the item. Edges that fall below the overlap threshold disappear for that
// prediction. fast_mode skips this and predicts from the full-window graph.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "trustlens/dataset.hpp"
#include "trustlens/metrics.hpp"
#include "trustlens/predictor.hpp"
#include "trustlens/trust_graph.hpp"
#include "trustlens/trust_map.hpp"

namespace trustlens {

struct EvalConfig {
    std::size_t min_overlap = default_min_overlap;
    EvidenceMapConfig evidence;
    bool normalize = true;
    bool fast_mode = false;
    std::size_t min_user_ratings = 10;
    unsigned threads = 1;
};

struct HeldOutOutcome {
    Rating held_out;
    std::optional<Prediction> prediction;
    std::size_t trusted_used = 0;
    std::size_t similar_used = 0;
};

namespace detail {

/// Runs fn(k, worker) for k in [0, n) on up to `threads` workers, worker in
/// [0, threads). Each k must only touch its own output slot.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t, unsigned)>& fn) {
    const auto workers = static_cast<unsigned>(std::clamp<std::size_t>(n, 1, std::max(1u, threads)));
    if (workers == 1) {
        for (std::size_t k = 0; k < n; ++k)
            fn(k, 0);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr failure;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t k = next++; k < n && !failed; k = next++) {
                try {
                    fn(k, w);
                } catch (...) {
                    if (!failed.exchange(true))
                        failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

/// Outcomes of one user's held-out ratings in both modes.
struct UserOutcomes {
    std::vector<HeldOutOutcome> standard;
    std::vector<HeldOutOutcome> hybrid;
};

class LeaveOneOutWorker {
public:
    LeaveOneOutWorker(const RatingsView& view, const TrustGraph& g, const EvalConfig& cfg)
        : view_(view), g_(g), cfg_(cfg), trust_(g.node_count()) {}

    UserOutcomes run(std::uint32_t a, bool want_hybrid) {
        UserOutcomes out;
        trust_.load(g_, a);
        const auto row = view_.user_ratings(a);
        const auto records = view_.user_records(a);
        const auto count = static_cast<double>(row.size());
        const auto sum = static_cast<double>(view_.user_sum(a));

        for (std::size_t k = 0; k < row.size(); ++k) {
            const Cell& held = row[k];
            const Rating& rating = records[k];
            const auto raters = view_.item_raters(held.index);
            if (!cfg_.fast_mode)
                patch(a, held.value, raters);
            const double mean_a = cfg_.fast_mode ? sum / count : (sum - held.value) / (count - 1.0);

            similar_.clear();
            mixed_.clear();
            for (const Cell& r : raters) {
                if (r.index == a)
                    continue;
                const double neighbor_mean = static_cast<double>(view_.user_sum(r.index)) /
                                             static_cast<double>(view_.user_ratings(r.index).size());
                if (trust_.has(r.index)) {
                    const Contribution c{trust_.weight(r.index), double(r.value), neighbor_mean, false};
                    similar_.push_back(c);
                    mixed_.push_back(c);
                } else if (want_hybrid) {
                    if (auto ind = combine_paths(g_, trust_, r.index))
                        if (auto w = indirect_weight(ind->opinion, cfg_.evidence))
                            mixed_.push_back({*w, double(r.value), neighbor_mean, true});
                }
            }
            out.standard.push_back(finish(rating, mean_a, similar_));
            if (want_hybrid)
                out.hybrid.push_back(finish(rating, mean_a, mixed_));
            if (!cfg_.fast_mode)
                restore();
        }
        return out;
    }

private:
    // Removes the held-out rating from the source's edges to co-raters.
    void patch(std::uint32_t a, int held_value, std::span<const Cell> raters) {
        patched_.clear();
        for (const Cell& r : raters) {
            if (r.index == a || !trust_.has(r.index))
                continue;
            const auto* link = g_.find(a, r.index);
            PairStats stats = link->stats;
            stats.remove(held_value, r.value);
            patched_.push_back(link);
            if (auto s = stats.score(cfg_.min_overlap))
                trust_.set(r.index, s->w, opinion_from_similarity(s->w, s->overlap, cfg_.evidence));
            else
                trust_.erase(r.index);
        }
    }

    void restore() {
        for (const auto* link : patched_)
            trust_.set(link->peer, link->weight, link->opinion);
    }

    HeldOutOutcome finish(const Rating& rating, double mean_a, std::span<const Contribution> parts) const {
        HeldOutOutcome o{rating, resnick(mean_a, parts, cfg_.normalize), 0, 0};
        if (o.prediction) {
            o.prediction->user = rating.user;
            o.prediction->item = rating.item;
            o.trusted_used = o.prediction->contributors_trusted;
            o.similar_used = o.prediction->contributors_similar;
        }
        return o;
    }

    const RatingsView& view_;
    const TrustGraph& g_;
    const EvalConfig& cfg_;
    SourceTrust trust_;
    std::vector<const TrustGraph::Link*> patched_;
    std::vector<Contribution> similar_;
    std::vector<Contribution> mixed_;
};

inline std::vector<std::uint32_t> eligible_users(const RatingsView& view, std::size_t min_ratings) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t a = 0; a < view.user_count(); ++a)
        if (view.user_ratings(a).size() >= std::max<std::size_t>(min_ratings, 2))
            out.push_back(a);
    return out;
}

inline UserOutcomes leave_one_out_both(const RatingsView& view, const TrustGraph& g, const EvalConfig& cfg,
                                       bool want_hybrid) {
    const auto users = eligible_users(view, cfg.min_user_ratings);
    std::vector<UserOutcomes> per_user(users.size());
    std::vector<std::optional<LeaveOneOutWorker>> workers(std::max(1u, cfg.threads));
    parallel_for(users.size(), cfg.threads, [&](std::size_t k, unsigned w) {
        if (!workers[w])
            workers[w].emplace(view, g, cfg);
        per_user[k] = workers[w]->run(users[k], want_hybrid);
    });
    UserOutcomes all;
    for (auto& u : per_user) {
        all.standard.insert(all.standard.end(), u.standard.begin(), u.standard.end());
        all.hybrid.insert(all.hybrid.end(), u.hybrid.begin(), u.hybrid.end());
    }
    return all;
}

} // namespace detail

/// Held-out outcomes of every rating of every eligible user, ordered by
/// (user, item).
inline std::vector<HeldOutOutcome> leave_one_out(const RatingsView& view, const TrustGraph& g, NeighborMode mode,
                                                 const EvalConfig& cfg = {}) {
    auto both = detail::leave_one_out_both(view, g, cfg, mode == NeighborMode::hybrid);
    return mode == NeighborMode::hybrid ? std::move(both.hybrid) : std::move(both.standard);
}

inline std::vector<HeldOutOutcome> leave_one_out(const RatingsView& view, NeighborMode mode,
                                                 const EvalConfig& cfg = {}) {
    return leave_one_out(view, TrustGraph::build(view, cfg.min_overlap, cfg.evidence), mode, cfg);
}

// ---------------------------------------------------------------------------
// Window experiment
// ---------------------------------------------------------------------------

enum class Population { all, new_users, new_items };
inline constexpr std::array<Population, 3> all_populations{Population::all, Population::new_users,
                                                           Population::new_items};

inline std::string_view population_name(Population p) {
    switch (p) {
    case Population::all:
        return "all";
    case Population::new_users:
        return "new_users";
    case Population::new_items:
        return "new_items";
    }
    return "?";
}

struct PopulationReport {
    std::uint64_t attempted = 0;
    std::uint64_t predicted = 0;
    double coverage = 0.0;
    std::optional<double> mae_percent;
    double fscore = 0.0;
    std::optional<double> tgc;
    std::optional<double> tgc_pooled;
    ConfusionCounts confusion;
};

struct ModeReport {
    NeighborMode mode = NeighborMode::standard;
    std::array<PopulationReport, 3> populations{};

    const PopulationReport& operator[](Population p) const { return populations[static_cast<std::size_t>(p)]; }
};

struct WindowReport {
    std::size_t ts_index = 0;
    Window window;
    std::size_t ratings = 0;
    std::size_t users = 0;
    std::size_t items = 0;
    std::optional<double> sparsity;
    std::size_t new_users = 0;
    std::size_t new_items = 0;
    std::size_t graph_edges = 0; ///< directed
    std::optional<double> ucg;
    UcgInputs ucg_inputs;
    std::vector<ModeReport> modes;

    const ModeReport* find(NeighborMode m) const {
        for (const auto& r : modes)
            if (r.mode == m)
                return &r;
        return nullptr;
    }
};

struct ExperimentConfig {
    std::size_t windows = 5;
    bool cumulative = false;
    std::size_t user_cap = 0; ///< 0 keeps every user
    std::uint64_t seed = 42;
    bool run_standard = true;
    bool run_hybrid = true;
    EvalConfig eval;
};

namespace detail {

inline PopulationReport summarize(std::span<const HeldOutOutcome> outcomes, const std::vector<bool>& include,
                                  double coverage_value) {
    PopulationReport rep;
    rep.coverage = coverage_value;
    std::vector<ScoredPair> pairs;
    std::vector<ContributorCounts> contributors;
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
        if (!include[k])
            continue;
        ++rep.attempted;
        const auto& o = outcomes[k];
        if (!o.prediction)
            continue;
        pairs.push_back({o.prediction->value, double(o.held_out.value)});
        contributors.push_back({o.trusted_used, o.similar_used});
    }
    rep.predicted = pairs.size();
    if (!pairs.empty())
        rep.mae_percent = mae_percent(pairs);
    rep.confusion = classify_and_count(pairs);
    rep.fscore = f_score(rep.confusion);
    rep.tgc = trust_graph_contribution(contributors);
    rep.tgc_pooled = trust_graph_contribution_pooled(contributors);
    return rep;
}

} // namespace detail

/// Evaluates one window. `cold` names the entities first seen in it.
inline WindowReport evaluate_window(const RatingsView& view, std::size_t ts_index, const ColdStartSets& cold,
                                    const ExperimentConfig& cfg) {
    WindowReport rep;
    rep.ts_index = ts_index;
    rep.window = view.window();
    rep.ratings = view.size();
    rep.users = view.user_count();
    rep.items = view.item_count();
    rep.new_users = cold.users.size();
    rep.new_items = cold.items.size();
    if (view.empty()) {
        for (NeighborMode m : {NeighborMode::standard, NeighborMode::hybrid})
            if (m == NeighborMode::standard ? cfg.run_standard : cfg.run_hybrid)
                rep.modes.push_back({m, {}});
        return rep;
    }
    rep.sparsity = sparsity(view).sparsity;

    const TrustGraph g = TrustGraph::build(view, cfg.eval.min_overlap, cfg.eval.evidence);
    rep.graph_edges = g.edge_count();
    const auto outcomes = detail::leave_one_out_both(view, g, cfg.eval, cfg.run_hybrid);

    // Population masks over the outcome stream and over dense indices.
    std::vector<bool> user_is_new(view.user_count()), item_is_new(view.item_count());
    std::vector<std::uint32_t> all_users, new_users;
    for (std::uint32_t a = 0; a < view.user_count(); ++a) {
        all_users.push_back(a);
        if (cold.users.count(view.users()[a])) {
            user_is_new[a] = true;
            new_users.push_back(a);
        }
    }
    for (std::uint32_t i = 0; i < view.item_count(); ++i)
        item_is_new[i] = cold.items.count(view.items()[i]) > 0;
    const std::vector<bool> every_item(view.item_count(), true);

    const auto& stream = outcomes.standard; // same held-out order in both modes
    std::array<std::vector<bool>, 3> include;
    for (auto& m : include)
        m.resize(stream.size());
    for (std::size_t k = 0; k < stream.size(); ++k) {
        const auto& r = stream[k].held_out;
        include[0][k] = true;
        include[1][k] = user_is_new[*view.user_index(r.user)];
        include[2][k] = item_is_new[*view.item_index(r.item)];
    }

    std::array<std::optional<std::uint64_t>, 2> new_user_population;
    for (NeighborMode mode : {NeighborMode::standard, NeighborMode::hybrid}) {
        const bool hybrid = mode == NeighborMode::hybrid;
        if (!(hybrid ? cfg.run_hybrid : cfg.run_standard))
            continue;
        Neighborhoods hoods(g.node_count());
        detail::parallel_for(g.node_count(), cfg.eval.threads, [&](std::size_t a, unsigned) {
            hoods[a] = dense_neighbors(g, static_cast<std::uint32_t>(a), mode);
        });
        const Reach reach_all = item_reach(view, hoods, all_users, every_item);
        const Reach reach_new_users = item_reach(view, hoods, new_users, every_item);
        const Reach reach_new_items = item_reach(view, hoods, all_users, item_is_new);
        new_user_population[hybrid ? 1 : 0] = reach_new_users.users_served;

        const auto& mode_outcomes = hybrid ? outcomes.hybrid : outcomes.standard;
        ModeReport mr{mode, {}};
        mr.populations[0] = detail::summarize(mode_outcomes, include[0], coverage(reach_all));
        mr.populations[1] = detail::summarize(mode_outcomes, include[1], coverage(reach_new_users));
        mr.populations[2] = detail::summarize(mode_outcomes, include[2], coverage(reach_new_items));
        rep.modes.push_back(mr);
    }

    if (cfg.run_standard && cfg.run_hybrid) {
        rep.ucg_inputs.predictions_standard = rep.modes[0].populations[1].predicted;
        rep.ucg_inputs.predictions_hybrid = rep.modes[1].populations[1].predicted;
        rep.ucg_inputs.population_standard = *new_user_population[0];
        rep.ucg_inputs.population_hybrid = *new_user_population[1];
        rep.ucg = ucg(rep.ucg_inputs);
    }
    return rep;
}

/// Slices the ratings into windows and evaluates each one. Cold-start sets
/// are computed against the full data, before any user sampling.
inline std::vector<WindowReport> run_experiment(std::span<const Rating> ratings, const ExperimentConfig& cfg) {
    const auto views = slice_windows(ratings, cfg.windows, cfg.cumulative);
    const FirstSeen seen = first_seen(ratings);
    std::vector<WindowReport> reports;
    for (std::size_t k = 0; k < views.size(); ++k) {
        const std::int64_t since = k == 0 ? std::numeric_limits<std::int64_t>::min() : views[k - 1].window().end;
        const RatingsView view = subsample_users(views[k], cfg.user_cap, cfg.seed + k);
        reports.push_back(evaluate_window(view, k, cold_start_entities(seen, view, since), cfg));
    }
    return reports;
}

} // namespace trustlens
