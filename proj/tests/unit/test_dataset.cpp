#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "trustlens/dataset.hpp"

using namespace trustlens;

namespace {

std::vector<Rating> spread(int n, std::int64_t t0, std::int64_t step) {
    std::vector<Rating> out;
    for (int k = 0; k < n; ++k)
        out.push_back({UserId{k % 7}, ItemId{k}, 1 + k % 5, t0 + k * step});
    return out;
}

} // namespace

TEST(Ingest, ParsesBothLayouts) {
    const Rating tab = parse_rating_line("196\t242\t3\t881250949", RatingFormat::tab, 1);
    EXPECT_EQ(tab.user, UserId{196});
    EXPECT_EQ(tab.item, ItemId{242});
    EXPECT_EQ(tab.value, 3);
    EXPECT_EQ(tab.timestamp, 881250949);
    const Rating dc = parse_rating_line("1::1193::5::978300760", RatingFormat::double_colon, 1);
    EXPECT_EQ(dc.user, UserId{1});
    EXPECT_EQ(dc.item, ItemId{1193});
    EXPECT_EQ(dc.value, 5);
}

TEST(Ingest, ReportsLineNumbers) {
    std::istringstream in("1\t2\t3\t4\n1\t3\t9\t5\n");
    try {
        ingest(in, RatingFormat::tab);
        FAIL() << "expected data_error";
    } catch (const data_error& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("out of range"), std::string::npos) << e.what();
    }
    std::istringstream wrong_sep("1::2::3::4\n");
    EXPECT_THROW(ingest(wrong_sep, RatingFormat::tab), data_error);
    std::istringstream junk("1\tx\t3\t4\n");
    EXPECT_THROW(ingest(junk, RatingFormat::tab), data_error);
}

TEST(Ingest, SkipsBlankLinesAndRejectsDuplicates) {
    std::istringstream ok("1\t2\t3\t4\n\n2\t2\t5\t6\n");
    EXPECT_EQ(ingest(ok, RatingFormat::tab).size(), 2u);
    std::istringstream dup("1\t2\t3\t4\n1\t2\t5\t6\n");
    EXPECT_THROW(ingest(dup, RatingFormat::tab), data_error);
}

TEST(Ingest, MissingFileNamesThePath) {
    try {
        ingest(std::string("/nonexistent/u.data"), RatingFormat::tab);
        FAIL();
    } catch (const data_error& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/u.data"), std::string::npos);
    }
}

TEST(Ingest, WriteThenReadIsIdentity) {
    const auto ratings = fixtures::to_ratings(fixtures::random(3, 20, 30, 0.3));
    for (auto fmt : {RatingFormat::tab, RatingFormat::double_colon}) {
        std::stringstream s;
        write_ratings(s, ratings, fmt);
        const auto back = ingest(s, fmt);
        ASSERT_EQ(back.size(), ratings.size());
        for (std::size_t k = 0; k < back.size(); ++k) {
            EXPECT_EQ(back[k].user, ratings[k].user);
            EXPECT_EQ(back[k].item, ratings[k].item);
            EXPECT_EQ(back[k].value, ratings[k].value);
            EXPECT_EQ(back[k].timestamp, ratings[k].timestamp);
        }
    }
}

TEST(Ingest, FormatNames) {
    EXPECT_EQ(parse_rating_format("tab"), RatingFormat::tab);
    EXPECT_EQ(parse_rating_format("double-colon"), RatingFormat::double_colon);
    EXPECT_THROW(parse_rating_format("csv"), config_error);
}

TEST(View, DenseIndicesFollowIdOrder) {
    const RatingsView v = fixtures::view_of(fixtures::small());
    ASSERT_EQ(v.user_count(), 5u);
    ASSERT_EQ(v.item_count(), 8u);
    for (std::size_t k = 1; k < v.users().size(); ++k)
        EXPECT_LT(v.users()[k - 1], v.users()[k]);
    EXPECT_EQ(v.user_sum(*v.user_index(UserId{1})), 15);
    EXPECT_EQ(v.rating_of(*v.user_index(UserId{3}), *v.item_index(ItemId{7})), 5);
    EXPECT_FALSE(v.rating_of(*v.user_index(UserId{3}), *v.item_index(ItemId{1})));
    const auto raters = v.item_raters(*v.item_index(ItemId{6}));
    EXPECT_EQ(raters.size(), 4u);
}

TEST(View, RejectsRatingsOutsideTheWindow) {
    std::vector<Rating> r{{UserId{1}, ItemId{1}, 3, 50}};
    EXPECT_THROW(RatingsView(r, Window{0, 50}), data_error);
}

TEST(Windows, DisjointWindowsPartitionTheRatings) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<std::int64_t> ts(0, 1 + trial * 97);
        std::vector<Rating> ratings;
        for (int k = 0; k < 200; ++k)
            ratings.push_back({UserId{k}, ItemId{k}, 3, ts(rng)});
        const std::size_t n = 1 + trial % 7;
        const auto views = slice_windows(ratings, n);
        ASSERT_EQ(views.size(), n);
        std::size_t total = 0;
        for (std::size_t k = 0; k < n; ++k) {
            total += views[k].size();
            if (k > 0)
                EXPECT_EQ(views[k - 1].window().end, views[k].window().start);
        }
        EXPECT_EQ(total, ratings.size());
    }
}

TEST(Windows, EqualDurationBounds) {
    const auto views = slice_windows(spread(101, 0, 10), 5);
    // span 1000 over five windows of 200
    for (std::size_t k = 0; k < 5; ++k)
        EXPECT_EQ(views[k].window().start, std::int64_t(200 * k));
    EXPECT_EQ(views[4].window().end, 1001);
    EXPECT_EQ(views[0].size(), 20u);
    EXPECT_EQ(views[4].size(), 21u); // last window keeps t = 1000
}

TEST(Windows, CumulativeViewsAreNestedPrefixes) {
    const auto ratings = spread(100, 3, 7);
    const auto disjoint = slice_windows(ratings, 4);
    const auto cumulative = slice_windows(ratings, 4, true);
    std::size_t running = 0;
    for (std::size_t k = 0; k < 4; ++k) {
        running += disjoint[k].size();
        EXPECT_EQ(cumulative[k].size(), running);
        EXPECT_EQ(cumulative[k].window().start, disjoint[0].window().start);
        EXPECT_EQ(cumulative[k].window().end, disjoint[k].window().end);
    }
}

TEST(Windows, SingleTimestampGoesToTheFirstWindow) {
    const auto views = slice_windows(spread(10, 42, 0), 3);
    EXPECT_EQ(views[0].size(), 10u);
    EXPECT_TRUE(views[1].empty());
    EXPECT_TRUE(views[2].empty());
}

TEST(Windows, Errors) {
    EXPECT_THROW(slice_windows(spread(5, 0, 1), 0), config_error);
    EXPECT_THROW(slice_windows({}, 3), data_error);
}

TEST(Subsample, KeepsExactlyCapUsersAndAllTheirRatings) {
    const RatingsView v = fixtures::view_of(fixtures::random(9, 40, 20, 0.4));
    const RatingsView s = subsample_users(v, 10, 1);
    EXPECT_EQ(s.user_count(), 10u);
    for (std::uint32_t u = 0; u < s.user_count(); ++u) {
        const auto full = v.user_index(s.users()[u]);
        ASSERT_TRUE(full);
        EXPECT_EQ(s.user_ratings(u).size(), v.user_ratings(*full).size());
    }
    const RatingsView again = subsample_users(v, 10, 1);
    EXPECT_TRUE(std::equal(s.users().begin(), s.users().end(), again.users().begin()));
    EXPECT_EQ(subsample_users(v, 0, 1).user_count(), 40u);
    EXPECT_EQ(subsample_users(v, 100, 1).user_count(), 40u);
}

TEST(Subsample, SeedChangesTheDraw) {
    const RatingsView v = fixtures::view_of(fixtures::random(9, 40, 20, 0.4));
    const auto a = subsample_users(v, 10, 1);
    const auto b = subsample_users(v, 10, 2);
    EXPECT_FALSE(std::equal(a.users().begin(), a.users().end(), b.users().begin()));
}

TEST(Stats, Sparsity) {
    // 28 ratings over 5 x 8 cells
    EXPECT_DOUBLE_EQ(sparsity(fixtures::view_of(fixtures::small())).sparsity, 1.0 - 24.0 / 40.0);
    EXPECT_THROW(sparsity(RatingsView{}), data_error);
}

TEST(Stats, FirstExperienceEntities) {
    std::vector<Rating> r{
        {UserId{1}, ItemId{1}, 3, 0},  {UserId{2}, ItemId{1}, 3, 5},  {UserId{1}, ItemId{2}, 3, 12},
        {UserId{3}, ItemId{3}, 3, 15}, {UserId{2}, ItemId{3}, 3, 19}, {UserId{4}, ItemId{1}, 3, 20},
    };
    const auto views = slice_windows(r, 2); // [0, 10), [10, 21)
    const auto first = first_experience_entities(views, 0);
    EXPECT_EQ(first.users, (std::set<UserId>{UserId{1}, UserId{2}}));
    EXPECT_EQ(first.items, (std::set<ItemId>{ItemId{1}}));
    const auto second = first_experience_entities(views, 1);
    EXPECT_EQ(second.users, (std::set<UserId>{UserId{3}, UserId{4}}));
    EXPECT_EQ(second.items, (std::set<ItemId>{ItemId{2}, ItemId{3}}));

    const auto grown = slice_windows(r, 2, true);
    EXPECT_EQ(first_experience_entities(grown, 1).users, second.users);
    EXPECT_THROW(first_experience_entities(views, 2), config_error);
}
