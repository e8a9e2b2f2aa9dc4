// Alice (1) and Bob (2) share ten items, Bob and Clark (3) share ten others,
// Alice and Clark share a single item. Items 22 and 23 were rated by Clark
// alone. The pinned numbers below were worked out by hand (in a Python
// session) from the ratings file, outside this code base.

#include <filesystem>

#include <gtest/gtest.h>

#include "trustlens/trustlens.hpp"

using namespace trustlens;

namespace {

constexpr double w_alice_bob = 0.8773824395270647;
constexpr double w_bob_clark = 0.8598839957182352;
constexpr Opinion alice_about_clark{0.7214284200658772, 0.05434944750729015, 0.22422213242683275};
constexpr double w_alice_clark = 0.8598839957182354;
constexpr double alice_item23 = 2.4965034965034962;
constexpr double alice_item23_unnormalized = 2.668953963311822;

RatingsView toy() {
    const auto path = std::filesystem::path(TRUSTLENS_SOURCE_DIR) / "data" / "toy" / "ratings.tsv";
    auto ratings = ingest(path.string(), RatingFormat::tab);
    return slice_windows(ratings, 1).front();
}

} // namespace

TEST(Toy, Graph) {
    const TrustGraph g = TrustGraph::build(toy(), 10);
    EXPECT_EQ(g.edge_count(), 4u);
    const auto ab = g.find(*g.index_of(UserId{1}), *g.index_of(UserId{2}));
    const auto bc = g.find(*g.index_of(UserId{2}), *g.index_of(UserId{3}));
    ASSERT_TRUE(ab && bc);
    EXPECT_NEAR(ab->weight, w_alice_bob, 1e-12);
    EXPECT_NEAR(bc->weight, w_bob_clark, 1e-12);
    EXPECT_FALSE(g.find(*g.index_of(UserId{1}), *g.index_of(UserId{3})));
}

TEST(Toy, AliceReachesClarkThroughBob) {
    const TrustGraph g = TrustGraph::build(toy(), 10);
    const auto two = two_hop_neighbors(g, UserId{1});
    ASSERT_EQ(two.size(), 1u);
    EXPECT_EQ(two[0].target, UserId{3});
    EXPECT_NEAR(two[0].opinion.belief, alice_about_clark.belief, 1e-12);
    EXPECT_NEAR(two[0].opinion.disbelief, alice_about_clark.disbelief, 1e-12);
    EXPECT_NEAR(two[0].opinion.uncertainty, alice_about_clark.uncertainty, 1e-12);
    const auto hood = classified_neighbors(g, UserId{1}, NeighborMode::hybrid);
    ASSERT_TRUE(hood.count(UserId{3}));
    EXPECT_TRUE(hood.at(UserId{3}).trusted);
    EXPECT_NEAR(hood.at(UserId{3}).weight, w_alice_clark, 1e-12);
}

TEST(Toy, OnlyHybridPredictsClarksItems) {
    const RatingsView v = toy();
    const TrustGraph g = TrustGraph::build(v, 10);
    const auto standard = classified_neighbors(g, UserId{1}, NeighborMode::standard);
    const auto hybrid = classified_neighbors(g, UserId{1}, NeighborMode::hybrid);
    for (int item : {22, 23})
        EXPECT_FALSE(predict(v, UserId{1}, ItemId{item}, standard));

    const auto p = predict(v, UserId{1}, ItemId{23}, hybrid);
    ASSERT_TRUE(p);
    EXPECT_NEAR(p->value, alice_item23, 1e-9);
    EXPECT_EQ(p->contributors_trusted, 1u);
    const auto bare = predict(v, UserId{1}, ItemId{23}, hybrid, false);
    EXPECT_NEAR(bare->value, alice_item23_unnormalized, 1e-9);
    EXPECT_DOUBLE_EQ(predict(v, UserId{1}, ItemId{22}, hybrid)->value, 5.0);

    // Bob's items are open to standard mode too.
    EXPECT_TRUE(predict(v, UserId{1}, ItemId{15}, standard));
}
