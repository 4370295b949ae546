#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "gvnr/error.hpp"
#include "gvnr/eval.hpp"
#include "gvnr/random.hpp"
#include "gvnr/synthetic.hpp"
#include "oracles.hpp"

using namespace gvnr;

namespace {

std::vector<int> labels_with_sizes(const std::vector<std::size_t>& sizes) {
    std::vector<int> out;
    for (std::size_t c = 0; c < sizes.size(); ++c) out.insert(out.end(), sizes[c], static_cast<int>(c));
    return out;
}

void expect_partition(const Split& s, std::size_t n) {
    std::vector<NodeIndex> all(s.train);
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    ASSERT_EQ(all.size(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(all[i], i);
    EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
    EXPECT_TRUE(std::is_sorted(s.test.begin(), s.test.end()));
}

std::vector<double> flatten(const Matrix& W, const std::vector<double>& b) {
    std::vector<double> p(W.data().begin(), W.data().end());
    p.insert(p.end(), b.begin(), b.end());
    return p;
}

}  // namespace

TEST(StratifiedSplit, BalancedHalf) {
    auto labels = labels_with_sizes({5, 5});
    auto s = stratified_split(labels, 0.5, 1);
    expect_partition(s, 10);
    EXPECT_EQ(s.train.size(), 5u);
    EXPECT_EQ(s.test.size(), 5u);
    EXPECT_TRUE(s.warnings.empty());
}

TEST(StratifiedSplit, CoraSizedProportions) {
    const std::vector<std::size_t> sizes{351, 217, 418, 818, 426, 298, 180};
    auto labels = labels_with_sizes(sizes);
    auto s = stratified_split(labels, 0.1, 42);
    expect_partition(s, labels.size());
    EXPECT_EQ(s.train.size(), 271u);  // round(0.1 * 2708)
    std::map<int, std::size_t> per_class;
    for (auto i : s.train) ++per_class[labels[i]];
    ASSERT_EQ(per_class.size(), 7u);
    for (std::size_t c = 0; c < sizes.size(); ++c)
        EXPECT_LE(std::abs(static_cast<double>(per_class[static_cast<int>(c)]) - 0.1 * static_cast<double>(sizes[c])), 1.0);
}

TEST(StratifiedSplit, DeterministicAndSeedSensitive) {
    auto labels = labels_with_sizes({30, 20, 10});
    auto a = stratified_split(labels, 0.3, 5);
    auto b = stratified_split(labels, 0.3, 5);
    EXPECT_EQ(a.train, b.train);
    EXPECT_NE(stratified_split(labels, 0.3, 6).train, a.train);
}

TEST(StratifiedSplit, SingletonClassForcedIntoTrain) {
    auto labels = labels_with_sizes({10, 1});
    auto s = stratified_split(labels, 0.2, 3);
    EXPECT_TRUE(std::binary_search(s.train.begin(), s.train.end(), NodeIndex{10}));
    EXPECT_EQ(s.warnings.size(), 1u);
    EXPECT_THROW(stratified_split(labels, 0.0, 1), InvalidArgument);
    EXPECT_THROW(stratified_split(labels, 1.0, 1), InvalidArgument);
}

TEST(Classifier, SeparablePair) {
    Matrix X(2, 1);
    X(0, 0) = -1.0;
    X(1, 0) = 1.0;
    ClassifierOptions opt;
    opt.l2 = 0.0;
    auto clf = train_softmax_classifier(X, {0, 1}, 2, opt);
    EXPECT_EQ(clf.predict(X.row(0)), 0);
    EXPECT_EQ(clf.predict(X.row(1)), 1);
    auto p = clf.probabilities(std::vector<double>{0.0});
    EXPECT_NEAR(p[0], 0.5, 0.05);
}

TEST(Classifier, HeavyRegularizationPredictsMajority) {
    Rng rng(1);
    Matrix X(40, 3);
    for (double& v : X.data()) v = rng.uniform(-1, 1);
    std::vector<int> y(40);
    for (int i = 0; i < 40; ++i) y[i] = i < 25 ? 1 : (i < 33 ? 0 : 2);
    rng.shuffle(y);
    ClassifierOptions opt;
    opt.l2 = 1e9;
    auto clf = train_softmax_classifier(X, y, 3, opt);
    for (double w : clf.weights.data()) EXPECT_LT(std::abs(w), 1e-6);
    for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(clf.predict(X.row(i)), 1);
}

TEST(Classifier, GradientMatchesFiniteDifferences) {
    Rng rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix X(4, 2);
        for (double& v : X.data()) v = rng.uniform(-2, 2);
        const std::vector<int> y{0, 1, 2, 1};
        Matrix W(3, 2);
        for (double& v : W.data()) v = rng.uniform(-1, 1);
        std::vector<double> b{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const double l2 = trial % 2 ? 0.0 : 0.7;
        std::vector<double> grad;
        softmax_loss_and_gradient(X, y, 3, l2, W, b, &grad);
        auto numeric = oracle::finite_difference(flatten(W, b), [&](const std::vector<double>& p) {
            Matrix Wp(3, 2);
            std::copy(p.begin(), p.begin() + 6, Wp.data().begin());
            std::vector<double> bp(p.begin() + 6, p.end());
            return softmax_loss_and_gradient(X, y, 3, l2, Wp, bp, nullptr);
        });
        ASSERT_EQ(grad.size(), numeric.size());
        for (std::size_t k = 0; k < grad.size(); ++k) EXPECT_TRUE(oracle::close_rel(grad[k], numeric[k], 1e-6));
    }
}

TEST(Classifier, ConvergesToTolerance) {
    Rng rng(3);
    Matrix X(60, 4);
    std::vector<int> y(60);
    for (std::size_t i = 0; i < 60; ++i) {
        y[i] = static_cast<int>(i % 3);
        for (std::size_t k = 0; k < 4; ++k) X(i, k) = rng.uniform(-1, 1) + (k == i % 3 ? 1.5 : 0.0);
    }
    auto clf = train_softmax_classifier(X, y, 3);
    EXPECT_LE(clf.gradient_norm, 1e-4);
    EXPECT_LT(clf.iterations, 1000u);
    EXPECT_GT(accuracy(clf, X, y), 0.8);
}

TEST(Classifier, Errors) {
    Matrix X(2, 1);
    X(0, 0) = NAN;
    EXPECT_THROW(train_softmax_classifier(X, {0, 1}, 2), InvalidArgument);
    EXPECT_THROW(train_softmax_classifier(Matrix(2, 1), {0, 2}, 2), InvalidArgument);
}

TEST(ClassificationProtocol, SeparableFeaturesScorePerfectly) {
    const std::size_t n = 90;
    Matrix X(n, 3);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = static_cast<int>(i % 3);
        X(i, i % 3) = 1.0;
    }
    ProtocolOptions opt;
    opt.fractions = default_classification_fractions();
    opt.repeats = 3;
    auto r = classification_protocol(X, y, 3, opt);
    ASSERT_EQ(r.settings.size(), 5u);
    for (const auto& s : r.settings) {
        EXPECT_EQ(s.mean, 1.0);
        EXPECT_EQ(s.stddev, 0.0);
        EXPECT_EQ(s.repeats, 3u);
    }
    opt.threads = 3;
    auto r2 = classification_protocol(X, y, 3, opt);
    EXPECT_EQ(r.to_json(), r2.to_json());
}

TEST(ClassificationProtocol, ShuffledLabelsStayNearMajorityRate) {
    TextNetworkSpec spec;
    spec.nodes_per_class = 40;
    const Dataset d = synthetic_text_network(spec);
    Matrix X(d.num_nodes(), 5);
    Rng rng(4);
    for (double& v : X.data()) v = rng.uniform(-1, 1);
    auto y = d.labels();
    rng.shuffle(y);
    ProtocolOptions opt;
    opt.fractions = {0.5};
    opt.repeats = 10;
    auto r = classification_protocol(X, y, d.num_classes(), opt);
    EXPECT_LT(r.settings[0].mean, 1.0 / 3.0 + 0.1);
    EXPECT_GT(r.settings[0].mean, 1.0 / 3.0 - 0.1);
}

TEST(UnseenProtocol, TextDeterminedLabelsScorePerfectly) {
    const Dataset d = planted_partition(60, 3, 0.3, 0.02, 2);
    PipelineConfig pc;
    pc.walk.walks_per_node = 5;
    pc.walk.walk_length = 10;
    pc.walk.window = 3;
    pc.gvnr.d = 8;
    pc.gvnr.epochs = 10;
    ProtocolOptions opt;
    opt.fractions = {0.5, 0.7};
    opt.repeats = 2;
    auto r = unseen_document_protocol(d, pc, opt);
    for (const auto& s : r.settings) EXPECT_EQ(s.mean, 1.0);
    opt.fractions = {1.0};
    EXPECT_THROW(unseen_document_protocol(d, pc, opt), InvalidArgument);
}

TEST(LinkSplit, TriangleWithIsolatedNode) {
    Adjacency adj{{1, 2}, {0, 2}, {0, 1}, {}};
    auto s = link_prediction_split(adj, 0.33, 1);
    ASSERT_EQ(s.positives.size(), 1u);
    ASSERT_EQ(s.negatives.size(), 1u);
    EXPECT_EQ(edge_list(s.train).size(), 2u);
    EXPECT_TRUE(s.negatives[0].second == 3 || s.negatives[0].first == 3);
    for (NodeIndex i = 0; i < 3; ++i) EXPECT_FALSE(s.train[i].empty());
}

TEST(LinkSplit, PureTriangleHasNoNonEdges) {
    Adjacency adj{{1, 2}, {0, 2}, {0, 1}};
    auto s = link_prediction_split(adj, 0.33, 1);
    EXPECT_EQ(s.positives.size(), 1u);
    EXPECT_TRUE(s.negatives.empty());
    EXPECT_FALSE(s.warnings.empty());
}

TEST(LinkSplit, NegativesAvoidAllEdgesAndSplitIsDeterministic) {
    const Dataset d = planted_partition(80, 2, 0.2, 0.02, 9);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto s = link_prediction_split(d.adjacency(), 0.2, seed);
        EXPECT_NO_THROW(check_adjacency(s.train));
        std::set<Edge> edges;
        for (auto e : edge_list(d.adjacency())) edges.insert(e);
        EXPECT_EQ(s.positives.size(), s.negatives.size());
        EXPECT_EQ(s.positives.size() + edge_list(s.train).size(), edges.size());
        std::set<Edge> seen;
        for (auto [a, b] : s.negatives) {
            EXPECT_NE(a, b);
            EXPECT_FALSE(edges.count({std::min(a, b), std::max(a, b)}));
            EXPECT_TRUE(seen.insert({std::min(a, b), std::max(a, b)}).second);
        }
        for (auto e : s.positives) EXPECT_TRUE(edges.count(e));
        for (NodeIndex i = 0; i < d.num_nodes(); ++i)
            if (!d.neighbors(i).empty()) EXPECT_FALSE(s.train[i].empty());
        auto again = link_prediction_split(d.adjacency(), 0.2, seed);
        EXPECT_EQ(again.positives, s.positives);
        EXPECT_EQ(again.negatives, s.negatives);
    }
    EXPECT_THROW(link_prediction_split(d.adjacency(), 0.2, 1, SplitMode::temporal), InvalidArgument);
    EXPECT_THROW(link_prediction_split(d.adjacency(), 1.0, 1), InvalidArgument);
}

TEST(RocAuc, Examples) {
    EXPECT_EQ(roc_auc(std::vector<double>{2, 3}, std::vector<double>{0, 1}), 1.0);
    EXPECT_EQ(roc_auc(std::vector<double>{1}, std::vector<double>{1}), 0.5);
    EXPECT_EQ(roc_auc(std::vector<double>{3, 1}, std::vector<double>{2, 0}), 0.75);
    EXPECT_THROW(roc_auc(std::vector<double>{}, std::vector<double>{1}), InvalidArgument);
}

TEST(RocAuc, EqualsBruteForceOnRandomSets) {
    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t np = 1 + rng.below(100), nn = 1 + rng.below(100);
        std::vector<double> pos(np), neg(nn);
        // Coarse grid so ties are common.
        for (double& v : pos) v = static_cast<double>(rng.below(15)) / 4.0;
        for (double& v : neg) v = static_cast<double>(rng.below(12)) / 4.0;
        EXPECT_EQ(roc_auc(pos, neg), oracle::auc(pos, neg));
    }
}

TEST(LinkScoring, TrainedModelSeparatesTrainingEdges) {
    const Dataset d = planted_partition(100, 2, 0.5, 0.01, 5);
    PipelineConfig pc;
    pc.walk.walks_per_node = 10;
    pc.walk.walk_length = 20;
    pc.gvnr.d = 32;
    pc.gvnr.epochs = 50;
    auto model = fit_gvnr_pipeline(d, pc);
    auto positives = edge_list(d.adjacency());
    std::vector<Edge> negatives;
    Rng rng(1);
    while (negatives.size() < positives.size()) {
        NodeIndex a = static_cast<NodeIndex>(rng.below(100)), b = static_cast<NodeIndex>(rng.below(100));
        if (a != b && !std::binary_search(d.neighbors(a).begin(), d.neighbors(a).end(), b))
            negatives.push_back({a, b});
    }
    EXPECT_GT(link_auc(dot_bias_scorer(model), positives, negatives), 0.9);
    auto scorer = dot_bias_scorer(model);
    for (auto [a, b] : positives) EXPECT_NEAR(scorer(a, b), scorer(b, a), 0.1);
    auto cos = cosine_scorer(node_representations(model, RepresentationMode::concat));
    EXPECT_NEAR(cos(3, 3), 1.0, 1e-12);
    EXPECT_EQ(cos(3, 7), cos(7, 3));
}

TEST(LinkProtocol, RunsAndIsReproducible) {
    const Dataset d = planted_partition(60, 2, 0.3, 0.02, 6);
    PipelineConfig pc;
    pc.walk.walks_per_node = 5;
    pc.walk.walk_length = 10;
    pc.gvnr.d = 8;
    pc.gvnr.epochs = 5;
    auto a = link_prediction_protocol(d.adjacency(), pc, 0.2, LinkScorer::dot_bias, RepresentationMode::concat, 2, 3);
    auto b = link_prediction_protocol(d.adjacency(), pc, 0.2, LinkScorer::dot_bias, RepresentationMode::concat, 2, 3, 2);
    EXPECT_EQ(a.to_json(), b.to_json());
    EXPECT_EQ(a.metric, "auc");
    for (double v : a.settings[0].values) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
    auto u = unseen_link_prediction_protocol(d, pc, 0.3, 2, 3);
    EXPECT_EQ(u.settings.size(), 1u);
    EXPECT_EQ(parse_link_scorer("cosine"), LinkScorer::cosine);
    EXPECT_THROW(parse_link_scorer("jaccard"), InvalidArgument);
}

TEST(Report, SummaryAndFormatting) {
    auto s = summarize(0.1, {0.8, 0.9, 1.0});
    EXPECT_NEAR(s.mean, 0.9, 1e-15);
    EXPECT_NEAR(s.stddev, 0.1, 1e-12);
    EXPECT_EQ(summarize(0.2, {0.5}).stddev, 0.0);
    EvalReport r;
    r.protocol = "classify";
    r.metric = "accuracy";
    r.row_label = "gvnr_t";
    r.settings = {s, summarize(0.2, {0.5})};
    auto j = r.to_json();
    EXPECT_EQ(j["protocol"], "classify");
    EXPECT_EQ(j["results"].size(), 2u);
    auto table = r.to_table();
    EXPECT_NE(table.find("10%"), std::string::npos);
    EXPECT_NE(table.find("90.0"), std::string::npos);
    EXPECT_NE(table.find("gvnr_t"), std::string::npos);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
    std::vector<int> hits(50, 0);
    parallel_for(50, 4, [&](std::size_t i) { ++hits[i]; });
    for (int h : hits) EXPECT_EQ(h, 1);
}
