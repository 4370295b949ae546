#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "gvnr/error.hpp"
#include "gvnr/random.hpp"
#include "gvnr/synthetic.hpp"
#include "gvnr/walk_cooc.hpp"
#include "oracles.hpp"

using namespace gvnr;

namespace {

Adjacency triangle() { return {{1, 2}, {0, 2}, {0, 1}}; }

std::vector<std::vector<unsigned>> as_unsigned(const std::vector<Walk>& walks) {
    std::vector<std::vector<unsigned>> out;
    for (const auto& w : walks) out.emplace_back(w.begin(), w.end());
    return out;
}

void expect_matches_oracle(const CoocMatrix& x, const std::vector<Walk>& walks, std::uint32_t window) {
    const auto expected = oracle::pair_counts(as_unsigned(walks), window);
    std::size_t stored = 0;
    for (NodeIndex i = 0; i < x.n(); ++i) {
        auto cols = x.row_cols(i);
        auto vals = x.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            auto it = expected.find({i, cols[k]});
            ASSERT_NE(it, expected.end()) << i << "," << cols[k];
            EXPECT_EQ(vals[k], it->second);
            ++stored;
        }
    }
    EXPECT_EQ(stored, expected.size());
}

void expect_symmetric(const CoocMatrix& x) {
    for (NodeIndex i = 0; i < x.n(); ++i) {
        auto cols = x.row_cols(i);
        auto vals = x.row_values(i);
        EXPECT_TRUE(std::is_sorted(cols.begin(), cols.end()));
        for (std::size_t k = 0; k < cols.size(); ++k) {
            EXPECT_NE(cols[k], i);
            EXPECT_GT(vals[k], 0.0);
            EXPECT_EQ(x.at(cols[k], i), vals[k]);
        }
    }
}

}  // namespace

TEST(Walks, IsolatedNodeYieldsSingletonWalks) {
    WalkConfig cfg;
    cfg.walks_per_node = 2;
    cfg.walk_length = 5;
    cfg.window = 2;
    auto walks = generate_walks(Adjacency{{}}, cfg);
    ASSERT_EQ(walks.size(), 2u);
    for (const auto& w : walks) EXPECT_EQ(w, (Walk{0}));
}

TEST(Walks, SingleEdgeAlternates) {
    WalkConfig cfg;
    cfg.walks_per_node = 5;
    cfg.walk_length = 4;
    cfg.window = 2;
    auto walks = generate_walks(Adjacency{{1}, {0}}, cfg);
    ASSERT_EQ(walks.size(), 10u);
    for (const auto& w : walks) {
        ASSERT_EQ(w.size(), 4u);
        for (std::size_t p = 1; p < w.size(); ++p) EXPECT_NE(w[p], w[p - 1]);
    }
}

TEST(Walks, EveryNodeStartsExactlyWalksPerNodeWalks) {
    WalkConfig cfg;
    cfg.walks_per_node = 7;
    cfg.walk_length = 6;
    cfg.window = 2;
    const Dataset d = planted_partition(30, 2, 0.3, 0.05, 3);
    auto walks = generate_walks(d, cfg);
    std::vector<std::size_t> starts(d.num_nodes(), 0);
    for (const auto& w : walks) {
        ++starts[w.front()];
        for (std::size_t p = 1; p < w.size(); ++p) {
            const auto& nb = d.neighbors(w[p - 1]);
            EXPECT_TRUE(std::binary_search(nb.begin(), nb.end(), w[p]));
        }
        if (!d.neighbors(w.front()).empty()) EXPECT_EQ(w.size(), cfg.walk_length);
    }
    for (auto s : starts) EXPECT_EQ(s, cfg.walks_per_node);
}

TEST(Walks, DeterministicAcrossCallsAndThreadCounts) {
    WalkConfig cfg;
    cfg.walks_per_node = 10;
    cfg.walk_length = 8;
    cfg.window = 3;
    auto a = generate_walks(triangle(), cfg, 1);
    auto b = generate_walks(triangle(), cfg, 1);
    auto c = generate_walks(triangle(), cfg, 4);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
    cfg.seed = 43;
    EXPECT_NE(generate_walks(triangle(), cfg, 1), a);
}

TEST(Walks, ConfigValidation) {
    WalkConfig cfg;
    cfg.window = cfg.walk_length;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg = WalkConfig{};
    cfg.walks_per_node = 0;
    EXPECT_THROW(generate_walks(triangle(), cfg), InvalidArgument);
}

TEST(Cooc, PathWindowOne) {
    std::vector<Walk> walks{{0, 1, 2}};
    auto x = count_cooccurrences(walks, 3, 1);
    EXPECT_EQ(x.at(0, 1), 1.0);
    EXPECT_EQ(x.at(1, 0), 1.0);
    EXPECT_EQ(x.at(1, 2), 1.0);
    EXPECT_EQ(x.at(2, 1), 1.0);
    EXPECT_EQ(x.at(0, 2), 0.0);
    EXPECT_EQ(x.row_distinct(1), 2u);
}

TEST(Cooc, SelfPairsSkipped) {
    std::vector<Walk> walks{{0, 1, 0}};
    auto x = count_cooccurrences(walks, 2, 2);
    EXPECT_EQ(x.at(0, 1), 2.0);
    EXPECT_EQ(x.at(1, 0), 2.0);
    EXPECT_EQ(x.at(0, 0), 0.0);
    EXPECT_EQ(x.nnz(), 2u);
}

TEST(Cooc, DistanceWeightingDividesByOffset) {
    std::vector<Walk> walks{{0, 1, 2}};
    auto x = count_cooccurrences(walks, 3, 2, true);
    EXPECT_EQ(x.at(0, 1), 1.0);
    EXPECT_EQ(x.at(0, 2), 0.5);
}

TEST(Cooc, EmptyWalkSetIsAnError) {
    std::vector<Walk> none;
    EXPECT_THROW(count_cooccurrences(none, 3, 1), InvalidArgument);
}

TEST(Cooc, ClosedFormTotalWhenWindowCoversWalk) {
    std::vector<Walk> walks{{0, 1, 2, 3}, {2, 2, 1}, {4}};
    // Ordered-position pairs: 6 + 3 + 0 = 9; one self pair (2,2).
    auto x = count_cooccurrences(walks, 5, 10);
    EXPECT_EQ(x.total(), 2.0 * (9 - 1));
}

TEST(Cooc, ConservationAgainstBruteForce) {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const Dataset d = planted_partition(25, 2, 0.25, 0.04, seed);
        WalkConfig cfg;
        cfg.walks_per_node = 4;
        cfg.walk_length = 12;
        cfg.window = 1 + static_cast<std::uint32_t>(seed % 5);
        cfg.seed = seed;
        auto walks = generate_walks(d, cfg);
        auto x = count_cooccurrences(walks, d.num_nodes(), cfg.window);
        expect_matches_oracle(x, walks, cfg.window);
        expect_symmetric(x);
        EXPECT_EQ(x, count_cooccurrences(walks, d.num_nodes(), cfg.window));
    }
}

TEST(Cooc, InferredSizeUsesLargestIndex) {
    std::vector<Walk> walks{{0, 4}};
    EXPECT_EQ(count_cooccurrences(walks, 1).n(), 5u);
}

TEST(Cooc, TripletConstructorValidates) {
    EXPECT_THROW(CoocMatrix(3, {{1, 1, 1.0}}), InvalidArgument);
    EXPECT_THROW(CoocMatrix(3, {{2, 1, 1.0}}), InvalidArgument);
    EXPECT_THROW(CoocMatrix(3, {{0, 3, 1.0}}), InvalidArgument);
    EXPECT_THROW(CoocMatrix(3, {{0, 1, 0.0}}), InvalidArgument);
    CoocMatrix x(3, {{0, 1, 1.0}, {0, 1, 2.0}});
    EXPECT_EQ(x.at(1, 0), 3.0);
}

TEST(FilterMinCount, Examples) {
    CoocMatrix x(4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 3.0}, {1, 2, 2.0}});
    EXPECT_EQ(filter_min_count(x, 0.0), x);
    EXPECT_EQ(filter_min_count(x, 1.0), x);
    auto f = filter_min_count(x, 2.0);
    EXPECT_EQ(x.row_distinct(0), 3u);
    EXPECT_EQ(f.row_distinct(0), 1u);
    EXPECT_EQ(f.at(0, 3), 3.0);
    EXPECT_EQ(f.at(3, 0), 3.0);
    EXPECT_EQ(f.at(0, 1), 0.0);
    expect_symmetric(f);
}

TEST(CoocIo, RoundTripIsExact) {
    CoocMatrix x(5, {{0, 1, 1.0}, {1, 4, 0.1 + 0.2}, {2, 3, 1.0 / 3.0}});
    std::ostringstream out;
    write_cooc(x, out);
    std::istringstream in(out.str());
    EXPECT_EQ(read_cooc(in), x);
    std::istringstream bad("3\n0 1\n");
    EXPECT_THROW(read_cooc(bad), ParseError);
}
