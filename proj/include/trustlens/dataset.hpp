#pragma once

// Rating logs in the MovieLens layouts, time-window slicing and immutable
// per-window views.
//
//   tab layout           user<TAB>item<TAB>rating<TAB>timestamp   (ml-100k u.data)
//   double-colon layout  user::item::rating::timestamp            (ml-1m ratings.dat)

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "trustlens/error.hpp"

namespace trustlens {

enum class UserId : std::int64_t {};
enum class ItemId : std::int64_t {};

constexpr std::int64_t to_int(UserId id) { return static_cast<std::int64_t>(id); }
constexpr std::int64_t to_int(ItemId id) { return static_cast<std::int64_t>(id); }

inline constexpr int min_rating = 1;
inline constexpr int max_rating = 5;

struct Rating {
    UserId user{};
    ItemId item{};
    int value = 0;
    std::int64_t timestamp = 0;

    friend bool operator==(const Rating&, const Rating&) = default;
};

/// Half-open time interval [start, end).
struct Window {
    std::int64_t start = 0;
    std::int64_t end = 0;

    bool contains(std::int64_t t) const { return t >= start && t < end; }
    friend bool operator==(const Window&, const Window&) = default;
};

/// Dense cross-reference entry: the other side's dense index and the rating.
struct Cell {
    std::uint32_t index = 0;
    std::int32_t value = 0;
};

/// Immutable slice of ratings with dense user/item indices. Dense indices
/// follow ascending id order, so iterating indices is iterating ids.
class RatingsView {
public:
    RatingsView() = default;

    RatingsView(std::vector<Rating> ratings, Window window) : window_(window) {
        for (const Rating& r : ratings) {
            if (!window.contains(r.timestamp))
                throw data_error("rating at t=" + std::to_string(r.timestamp) +
                                 " lies outside its window");
        }
        std::sort(ratings.begin(), ratings.end(), [](const Rating& a, const Rating& b) {
            return std::pair(a.user, a.item) < std::pair(b.user, b.item);
        });
        for (std::size_t k = 1; k < ratings.size(); ++k) {
            if (ratings[k].user == ratings[k - 1].user && ratings[k].item == ratings[k - 1].item)
                throw data_error("duplicate rating for user " + std::to_string(to_int(ratings[k].user)) +
                                 ", item " + std::to_string(to_int(ratings[k].item)));
        }
        ratings_ = std::move(ratings);

        for (const Rating& r : ratings_) {
            if (users_.empty() || users_.back() != r.user)
                users_.push_back(r.user);
            items_.push_back(r.item);
        }
        std::sort(items_.begin(), items_.end());
        items_.erase(std::unique(items_.begin(), items_.end()), items_.end());

        user_lookup_.reserve(users_.size());
        for (std::uint32_t u = 0; u < users_.size(); ++u)
            user_lookup_.emplace(to_int(users_[u]), u);
        item_lookup_.reserve(items_.size());
        for (std::uint32_t i = 0; i < items_.size(); ++i)
            item_lookup_.emplace(to_int(items_[i]), i);

        // CSR layout in both directions.
        by_user_offsets_.assign(users_.size() + 1, 0);
        by_item_offsets_.assign(items_.size() + 1, 0);
        by_user_.resize(ratings_.size());
        by_item_.resize(ratings_.size());
        user_sums_.assign(users_.size(), 0);
        for (const Rating& r : ratings_) {
            ++by_user_offsets_[user_lookup_.at(to_int(r.user)) + 1];
            ++by_item_offsets_[item_lookup_.at(to_int(r.item)) + 1];
        }
        for (std::size_t k = 1; k < by_user_offsets_.size(); ++k)
            by_user_offsets_[k] += by_user_offsets_[k - 1];
        for (std::size_t k = 1; k < by_item_offsets_.size(); ++k)
            by_item_offsets_[k] += by_item_offsets_[k - 1];
        std::vector<std::size_t> item_fill(by_item_offsets_.begin(), by_item_offsets_.end() - 1);
        for (std::size_t k = 0; k < ratings_.size(); ++k) {
            const Rating& r = ratings_[k];
            const std::uint32_t u = user_lookup_.at(to_int(r.user));
            const std::uint32_t i = item_lookup_.at(to_int(r.item));
            by_user_[k] = {i, r.value};
            by_item_[item_fill[i]++] = {u, r.value};
            user_sums_[u] += r.value;
        }
    }

    std::span<const Rating> ratings() const { return ratings_; }
    std::span<const UserId> users() const { return users_; }
    std::span<const ItemId> items() const { return items_; }
    std::size_t size() const { return ratings_.size(); }
    bool empty() const { return ratings_.empty(); }
    std::size_t user_count() const { return users_.size(); }
    std::size_t item_count() const { return items_.size(); }
    const Window& window() const { return window_; }

    std::optional<std::uint32_t> user_index(UserId id) const {
        auto it = user_lookup_.find(to_int(id));
        if (it == user_lookup_.end())
            return std::nullopt;
        return it->second;
    }
    std::optional<std::uint32_t> item_index(ItemId id) const {
        auto it = item_lookup_.find(to_int(id));
        if (it == item_lookup_.end())
            return std::nullopt;
        return it->second;
    }

    /// Ratings of one user, ascending by item index.
    std::span<const Cell> user_ratings(std::uint32_t user) const {
        return {by_user_.data() + by_user_offsets_[user], by_user_.data() + by_user_offsets_[user + 1]};
    }
    /// Full records of one user, aligned with user_ratings().
    std::span<const Rating> user_records(std::uint32_t user) const {
        return {ratings_.data() + by_user_offsets_[user], ratings_.data() + by_user_offsets_[user + 1]};
    }
    /// Raters of one item, ascending by user index.
    std::span<const Cell> item_raters(std::uint32_t item) const {
        return {by_item_.data() + by_item_offsets_[item], by_item_.data() + by_item_offsets_[item + 1]};
    }
    /// Sum of all rating values of one user.
    std::int64_t user_sum(std::uint32_t user) const { return user_sums_[user]; }

    /// Rating value of (user, item) by dense index, if present.
    std::optional<int> rating_of(std::uint32_t user, std::uint32_t item) const {
        const auto row = user_ratings(user);
        auto it = std::lower_bound(row.begin(), row.end(), item,
                                   [](const Cell& c, std::uint32_t i) { return c.index < i; });
        if (it == row.end() || it->index != item)
            return std::nullopt;
        return it->value;
    }

private:
    std::vector<Rating> ratings_;
    std::vector<UserId> users_;
    std::vector<ItemId> items_;
    Window window_;
    std::unordered_map<std::int64_t, std::uint32_t> user_lookup_;
    std::unordered_map<std::int64_t, std::uint32_t> item_lookup_;
    std::vector<std::size_t> by_user_offsets_;
    std::vector<std::size_t> by_item_offsets_;
    std::vector<Cell> by_user_;
    std::vector<Cell> by_item_;
    std::vector<std::int64_t> user_sums_;
};

// ---------------------------------------------------------------------------
// Ingestion
// ---------------------------------------------------------------------------

enum class RatingFormat { tab, double_colon };

inline RatingFormat parse_rating_format(std::string_view name) {
    if (name == "tab" || name == "tab-separated")
        return RatingFormat::tab;
    if (name == "double-colon" || name == "double-colon-separated")
        return RatingFormat::double_colon;
    throw config_error("unknown rating format '" + std::string(name) +
                       "' (expected tab or double-colon)");
}

inline std::string_view format_name(RatingFormat f) {
    return f == RatingFormat::tab ? "tab" : "double-colon";
}

namespace detail {

inline std::optional<std::int64_t> parse_int(std::string_view text) {
    std::int64_t value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty())
        return std::nullopt;
    return value;
}

inline std::vector<std::string_view> split(std::string_view line, std::string_view sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = line.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + sep.size();
    }
}

} // namespace detail

/// Parses one line. `line_no` only decorates error messages.
inline Rating parse_rating_line(std::string_view line, RatingFormat format, std::size_t line_no) {
    const auto fail = [&](const std::string& why) {
        return data_error("line " + std::to_string(line_no) + ": " + why);
    };
    if (!line.empty() && line.back() == '\r')
        line.remove_suffix(1);
    const auto fields = detail::split(line, format == RatingFormat::tab ? "\t" : "::");
    if (fields.size() != 4)
        throw fail("expected 4 fields, found " + std::to_string(fields.size()));
    std::int64_t parsed[4];
    for (std::size_t k = 0; k < 4; ++k) {
        auto v = detail::parse_int(fields[k]);
        if (!v)
            throw fail("malformed field '" + std::string(fields[k]) + "'");
        parsed[k] = *v;
    }
    if (parsed[2] < min_rating || parsed[2] > max_rating)
        throw fail("rating out of range (" + std::to_string(parsed[2]) + ")");
    return {UserId{parsed[0]}, ItemId{parsed[1]}, static_cast<int>(parsed[2]), parsed[3]};
}

/// Reads a whole rating log. Blank lines are skipped; duplicates are fatal.
inline std::vector<Rating> ingest(std::istream& in, RatingFormat format) {
    std::vector<Rating> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        out.push_back(parse_rating_line(line, format, line_no));
    }
    std::vector<std::pair<std::int64_t, std::int64_t>> keys;
    keys.reserve(out.size());
    for (const Rating& r : out)
        keys.emplace_back(to_int(r.user), to_int(r.item));
    std::sort(keys.begin(), keys.end());
    auto dup = std::adjacent_find(keys.begin(), keys.end());
    if (dup != keys.end())
        throw data_error("duplicate rating for user " + std::to_string(dup->first) + ", item " +
                         std::to_string(dup->second));
    return out;
}

inline std::vector<Rating> ingest(const std::string& path, RatingFormat format) {
    std::ifstream in(path);
    if (!in)
        throw data_error("cannot open rating file " + path);
    try {
        return ingest(in, format);
    } catch (const data_error& e) {
        throw data_error(path + ": " + e.what());
    }
}

inline void write_ratings(std::ostream& out, std::span<const Rating> ratings, RatingFormat format) {
    const std::string_view sep = format == RatingFormat::tab ? "\t" : "::";
    for (const Rating& r : ratings)
        out << to_int(r.user) << sep << to_int(r.item) << sep << r.value << sep << r.timestamp << '\n';
}

// ---------------------------------------------------------------------------
// Windows
// ---------------------------------------------------------------------------

/// Splits [min_ts, max_ts] into `n_windows` equal-duration intervals. The last
/// interval is closed so the newest rating is kept. With `cumulative` each view
/// holds everything up to the end of its interval instead of the interval alone.
inline std::vector<RatingsView> slice_windows(std::span<const Rating> ratings, std::size_t n_windows,
                                              bool cumulative = false) {
    if (n_windows == 0)
        throw config_error("window count must be positive");
    if (ratings.empty())
        throw data_error("cannot slice an empty rating set");
    const auto [lo, hi] = std::minmax_element(ratings.begin(), ratings.end(),
                                              [](const Rating& a, const Rating& b) {
                                                  return a.timestamp < b.timestamp;
                                              });
    const std::int64_t t0 = lo->timestamp;
    const std::int64_t span = hi->timestamp - t0;
    const auto n = static_cast<std::int64_t>(n_windows);

    const auto slot = [&](std::int64_t t) -> std::size_t {
        if (span == 0)
            return 0;
        const auto k = static_cast<std::size_t>(((__int128)(t - t0) * n) / span);
        return std::min(k, n_windows - 1);
    };
    // First timestamp mapped to slot k: t0 + ceil(k*span/n).
    std::vector<std::int64_t> bounds(n_windows + 1);
    for (std::size_t k = 0; k < n_windows; ++k) {
        const __int128 num = (__int128)span * (std::int64_t)k;
        bounds[k] = t0 + static_cast<std::int64_t>((num + n - 1) / n);
    }
    bounds[n_windows] = hi->timestamp + 1;
    if (span == 0)
        std::fill(bounds.begin() + 1, bounds.end() - 1, bounds.back());

    std::vector<std::vector<Rating>> parts(n_windows);
    for (const Rating& r : ratings)
        parts[slot(r.timestamp)].push_back(r);

    std::vector<RatingsView> views;
    views.reserve(n_windows);
    std::vector<Rating> running;
    for (std::size_t k = 0; k < n_windows; ++k) {
        if (cumulative) {
            running.insert(running.end(), parts[k].begin(), parts[k].end());
            views.emplace_back(running, Window{bounds[0], bounds[k + 1]});
        } else {
            views.emplace_back(std::move(parts[k]), Window{bounds[k], bounds[k + 1]});
        }
    }
    return views;
}

/// Keeps `cap` users chosen uniformly at random with a seeded generator.
/// Candidates are ordered by earliest activity (ties by id) before sampling so
/// the draw only depends on the data and the seed. cap == 0 disables sampling.
inline RatingsView subsample_users(const RatingsView& view, std::size_t cap, std::uint64_t seed) {
    if (cap == 0 || view.user_count() <= cap)
        return view;
    std::vector<std::pair<std::int64_t, UserId>> order;
    order.reserve(view.user_count());
    std::unordered_map<std::int64_t, std::int64_t> first_seen;
    for (const Rating& r : view.ratings()) {
        auto [it, fresh] = first_seen.emplace(to_int(r.user), r.timestamp);
        if (!fresh)
            it->second = std::min(it->second, r.timestamp);
    }
    for (UserId u : view.users())
        order.emplace_back(first_seen.at(to_int(u)), u);
    std::sort(order.begin(), order.end());

    // Partial Fisher-Yates with rejection sampling for unbiased bounded draws.
    std::mt19937_64 rng(seed);
    const auto bounded = [&rng](std::uint64_t bound) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x;
        do {
            x = rng();
        } while (x >= limit);
        return x % bound;
    };
    for (std::size_t k = 0; k < cap; ++k)
        std::swap(order[k], order[k + bounded(order.size() - k)]);

    std::set<std::int64_t> keep;
    for (std::size_t k = 0; k < cap; ++k)
        keep.insert(to_int(order[k].second));
    std::vector<Rating> kept;
    for (const Rating& r : view.ratings())
        if (keep.count(to_int(r.user)))
            kept.push_back(r);
    return RatingsView(std::move(kept), view.window());
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

struct SparsityStat {
    double sparsity = 0.0;
};

/// Fraction of the users x items matrix without a rating.
inline SparsityStat sparsity(const RatingsView& view) {
    if (view.empty())
        throw data_error("sparsity of an empty view is undefined");
    const double cells = static_cast<double>(view.user_count()) * static_cast<double>(view.item_count());
    return {1.0 - static_cast<double>(view.size()) / cells};
}

/// Earliest rating timestamp of every user and item.
struct FirstSeen {
    std::unordered_map<std::int64_t, std::int64_t> user;
    std::unordered_map<std::int64_t, std::int64_t> item;

    void observe(const Rating& r) {
        auto bump = [&](auto& map, std::int64_t key) {
            auto [it, fresh] = map.emplace(key, r.timestamp);
            if (!fresh)
                it->second = std::min(it->second, r.timestamp);
        };
        bump(user, to_int(r.user));
        bump(item, to_int(r.item));
    }
};

inline FirstSeen first_seen(std::span<const Rating> ratings) {
    FirstSeen fs;
    for (const Rating& r : ratings)
        fs.observe(r);
    return fs;
}

struct ColdStartSets {
    std::set<UserId> users;
    std::set<ItemId> items;
};

/// Entities of `view` whose first rating (according to `seen`) falls at or
/// after `since`, i.e. entities that show up for the first time in this view.
inline ColdStartSets cold_start_entities(const FirstSeen& seen, const RatingsView& view, std::int64_t since) {
    ColdStartSets out;
    for (UserId u : view.users())
        if (seen.user.at(to_int(u)) >= since)
            out.users.insert(u);
    for (ItemId i : view.items())
        if (seen.item.at(to_int(i)) >= since)
            out.items.insert(i);
    return out;
}

/// Users and items whose earliest rating across all `views` belongs to view
/// `ts_index`. For cumulative views only the part after the previous view's
/// end counts as new.
inline ColdStartSets first_experience_entities(std::span<const RatingsView> views, std::size_t ts_index) {
    if (ts_index >= views.size())
        throw config_error("window index " + std::to_string(ts_index) + " out of range");
    FirstSeen seen;
    for (const RatingsView& v : views)
        for (const Rating& r : v.ratings())
            seen.observe(r);
    const std::int64_t since = ts_index == 0 ? std::numeric_limits<std::int64_t>::min()
                                             : views[ts_index - 1].window().end;
    return cold_start_entities(seen, views[ts_index], since);
}

} // namespace trustlens
