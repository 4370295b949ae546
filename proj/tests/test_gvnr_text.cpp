#include <gtest/gtest.h>

#include <numeric>

#include "gvnr/error.hpp"
#include "gvnr/gvnr_text.hpp"
#include "gvnr/random.hpp"
#include "oracles.hpp"

using namespace gvnr;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
    Matrix m(r, c);
    for (double& v : m.data()) v = rng.uniform(-1, 1);
    return m;
}

CoocMatrix random_cooc(std::size_t n, double density, Rng& rng) {
    std::vector<CoocMatrix::Triplet> t;
    for (NodeIndex i = 0; i < n; ++i)
        for (NodeIndex j = i + 1; j < n; ++j)
            if (rng.bernoulli(density)) t.push_back({i, j, static_cast<double>(1 + rng.below(5))});
    if (t.empty()) t.push_back({0, 1, 3.0});
    return CoocMatrix(n, std::move(t));
}

Bow random_bow(std::size_t m, Rng& rng, bool allow_empty) {
    std::vector<BowEntry> cells;
    for (std::uint32_t w = 0; w < m; ++w)
        if (rng.bernoulli(0.4)) cells.push_back({w, static_cast<std::uint32_t>(1 + rng.below(3))});
    if (cells.empty() && !allow_empty) cells.push_back({static_cast<std::uint32_t>(rng.below(m)), 1});
    return make_bow(cells);
}

GvnrTextModel random_text_model(std::vector<Bow> bows, std::size_t m, std::size_t d, Rng& rng) {
    const std::size_t n = bows.size();
    GvnrTextModel model{random_matrix(n, d, rng), random_matrix(m, d, rng), std::vector<double>(n),
                        std::vector<double>(n), std::vector<double>(d), std::move(bows)};
    for (double& v : model.b_u) v = rng.uniform(-1, 1);
    for (double& v : model.b_v) v = rng.uniform(-1, 1);
    for (double& v : model.fallback) v = rng.uniform(-1, 1);
    return model;
}

std::vector<double> flatten(const Matrix& U, const Matrix& W, const std::vector<double>& bu,
                            const std::vector<double>& bv, const std::vector<double>& fb) {
    std::vector<double> p(U.data().begin(), U.data().end());
    p.insert(p.end(), W.data().begin(), W.data().end());
    p.insert(p.end(), bu.begin(), bu.end());
    p.insert(p.end(), bv.begin(), bv.end());
    p.insert(p.end(), fb.begin(), fb.end());
    return p;
}

GvnrTextModel unflatten(const std::vector<double>& p, const GvnrTextModel& shape) {
    GvnrTextModel m = shape;
    std::size_t k = 0;
    for (double& v : m.U.data()) v = p[k++];
    for (double& v : m.W.data()) v = p[k++];
    for (double& v : m.b_u) v = p[k++];
    for (double& v : m.b_v) v = p[k++];
    for (double& v : m.fallback) v = p[k++];
    return m;
}

}  // namespace

TEST(DocContextVector, OneHotReturnsWordRow) {
    Rng rng(1);
    Matrix W = random_matrix(5, 3, rng);
    auto v = doc_context_vector(Bow{{3, 1}}, W);
    EXPECT_EQ(v, std::vector<double>(W.row(3).begin(), W.row(3).end()));
}

TEST(DocContextVector, ScaleInvariant) {
    Rng rng(2);
    Matrix W = random_matrix(6, 4, rng);
    Bow a{{0, 1}, {2, 3}, {5, 2}};
    Bow b{{0, 2}, {2, 6}, {5, 4}};
    auto va = doc_context_vector(a, W), vb = doc_context_vector(b, W);
    for (std::size_t k = 0; k < va.size(); ++k) EXPECT_NEAR(va[k], vb[k], 1e-15);
}

TEST(DocContextVector, WeightedMeanExample) {
    Matrix W(2, 2);
    W(0, 0) = 1.0;
    W(1, 1) = 1.0;
    EXPECT_EQ(doc_context_vector(Bow{{0, 1}, {1, 3}}, W), (std::vector<double>{0.25, 0.75}));
}

TEST(DocContextVector, PermutationEquivariant) {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t m = 8, d = 3;
        Matrix W = random_matrix(m, d, rng);
        Bow bow = random_bow(m, rng, false);
        std::vector<std::uint32_t> perm(m);
        std::iota(perm.begin(), perm.end(), 0u);
        rng.shuffle(perm);
        Matrix Wp(m, d);
        for (std::size_t w = 0; w < m; ++w)
            for (std::size_t k = 0; k < d; ++k) Wp(perm[w], k) = W(w, k);
        std::vector<BowEntry> cells;
        for (auto e : bow) cells.push_back({perm[e.word], e.count});
        auto a = doc_context_vector(bow, W), b = doc_context_vector(make_bow(cells), Wp);
        for (std::size_t k = 0; k < d; ++k) EXPECT_NEAR(a[k], b[k], 1e-14);
    }
}

TEST(DocContextVector, Errors) {
    Matrix W(3, 2);
    EXPECT_THROW(doc_context_vector(Bow{}, W), InvalidArgument);
    EXPECT_THROW(doc_context_vector(Bow{{3, 1}}, W), InvalidArgument);
}

TEST(TextGradients, MatchFiniteDifferences) {
    Rng rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 2 + rng.below(4), m = 2 + rng.below(7), d = 1 + rng.below(3);
        std::vector<Bow> bows;
        for (std::size_t i = 0; i < n; ++i) bows.push_back(random_bow(m, rng, trial % 3 == 0));
        const CoocMatrix x = random_cooc(n, 0.6, rng);
        const GvnrTextModel model = random_text_model(bows, m, d, rng);
        const ZeroMask mask = sample_zero_coefficients(x, 2, rng);
        const double zt = trial % 2 ? 0.0 : 0.3;

        const auto g = text_objective_gradients(model, x, mask, zt);
        const auto analytic = flatten(g.U, g.W, g.b_u, g.b_v, g.fallback);
        const auto numeric = oracle::finite_difference(
            flatten(model.U, model.W, model.b_u, model.b_v, model.fallback),
            [&](const std::vector<double>& p) { return text_objective_value(unflatten(p, model), x, mask, zt); });
        ASSERT_EQ(analytic.size(), numeric.size());
        for (std::size_t k = 0; k < analytic.size(); ++k)
            EXPECT_TRUE(oracle::close_rel(analytic[k], numeric[k], 1e-4))
                << "trial " << trial << " coord " << k << ": " << analytic[k] << " vs " << numeric[k];
    }
}

TEST(TextObjective, EqualsPlainObjectiveWithDerivedContexts) {
    Rng rng(23);
    std::vector<Bow> bows;
    for (int i = 0; i < 6; ++i) bows.push_back(random_bow(5, rng, i == 2));
    const CoocMatrix x = random_cooc(6, 0.5, rng);
    const GvnrTextModel tm = random_text_model(bows, 5, 3, rng);
    GvnrModel plain{tm.U, Matrix(6, 3), tm.b_u, tm.b_v};
    for (NodeIndex j = 0; j < 6; ++j) {
        auto v = context_vector(tm, j);
        std::copy(v.begin(), v.end(), plain.V.row(j).begin());
    }
    const ZeroMask mask = sample_zero_coefficients(x, 1, rng);
    EXPECT_NEAR(text_objective_value(tm, x, mask), objective_value(plain, x, mask), 1e-12);
}

TEST(TrainText, SingleWordCorpusFitsThroughBiases) {
    Rng rng(4);
    const CoocMatrix x = random_cooc(12, 0.4, rng);
    std::vector<Bow> bows(12, Bow{{0, 1}});
    GvnrConfig cfg;
    cfg.d = 4;
    cfg.epochs = 20;
    TrainingLog log;
    auto m = train_gvnr_t(x, bows, 1, cfg, &log);
    for (NodeIndex j = 1; j < 12; ++j) EXPECT_EQ(context_vector(m, j), context_vector(m, 0));
    EXPECT_LT(log.epoch_mean_loss.back(), log.epoch_mean_loss.front());
}

TEST(TrainText, DeterministicAndLossDecreases) {
    Rng rng(6);
    const std::size_t n = 25, m = 15;
    const CoocMatrix x = random_cooc(n, 0.25, rng);
    std::vector<Bow> bows;
    for (std::size_t i = 0; i < n; ++i) bows.push_back(random_bow(m, rng, i == 4));
    GvnrConfig cfg;
    cfg.d = 6;
    cfg.epochs = 15;
    TrainingLog la, lb;
    auto a = train_gvnr_t(x, bows, m, cfg, &la);
    auto b = train_gvnr_t(x, bows, m, cfg, &lb);
    EXPECT_EQ(a, b);
    EXPECT_EQ(la.epoch_mean_loss, lb.epoch_mean_loss);
    EXPECT_LT(la.epoch_mean_loss.back(), la.epoch_mean_loss.front());
    EXPECT_EQ(a.bows, bows);
}

TEST(TrainText, InferenceMatchesTrainingContext) {
    Rng rng(9);
    const std::size_t n = 10, m = 7;
    const CoocMatrix x = random_cooc(n, 0.4, rng);
    std::vector<Bow> bows;
    for (std::size_t i = 0; i < n; ++i) bows.push_back(random_bow(m, rng, false));
    GvnrConfig cfg;
    cfg.d = 3;
    cfg.epochs = 5;
    auto model = train_gvnr_t(x, bows, m, cfg);
    for (NodeIndex j = 0; j < n; ++j) {
        EXPECT_EQ(infer_document(model, bows[j]), context_vector(model, j));
        EXPECT_EQ(text_representation(model, j, TextMode::text_only), context_vector(model, j));
        EXPECT_EQ(text_representation(model, j, TextMode::full).size(), 2 * cfg.d);
    }
    EXPECT_EQ(infer_document(model, Bow{{2, 1}}), std::vector<double>(model.W.row(2).begin(), model.W.row(2).end()));
    EXPECT_THROW(infer_document(model, Bow{}), InvalidArgument);
    EXPECT_THROW(infer_document(model, Bow{{static_cast<std::uint32_t>(m), 1}}), InvalidArgument);
    EXPECT_THROW(text_representation(model, static_cast<NodeIndex>(n), TextMode::full), InvalidArgument);
    auto all = text_representations(model, TextMode::full);
    EXPECT_EQ(all.rows(), n);
    EXPECT_EQ(all.cols(), 2 * cfg.d);
}

TEST(TrainText, EmptyDocumentsUseFallback) {
    Rng rng(10);
    const CoocMatrix x = random_cooc(6, 0.6, rng);
    std::vector<Bow> bows{Bow{{0, 1}}, Bow{}, Bow{{1, 2}}, Bow{}, Bow{{0, 1}, {1, 1}}, Bow{{1, 1}}};
    GvnrConfig cfg;
    cfg.d = 3;
    cfg.epochs = 5;
    auto model = train_gvnr_t(x, bows, 2, cfg);
    EXPECT_EQ(context_vector(model, 1), model.fallback);
    EXPECT_EQ(context_vector(model, 3), model.fallback);
    EXPECT_NE(model.fallback, std::vector<double>(3, 0.0));
}

TEST(TrainText, Errors) {
    CoocMatrix x(2, {{0, 1, 1.0}});
    GvnrConfig cfg;
    EXPECT_THROW(train_gvnr_t(x, {Bow{{0, 1}}}, 1, cfg), InvalidArgument);          // bows size
    EXPECT_THROW(train_gvnr_t(x, {Bow{{0, 1}}, Bow{{4, 1}}}, 2, cfg), InvalidArgument);  // word index
    EXPECT_EQ(parse_text_mode("text_only"), TextMode::text_only);
    EXPECT_THROW(parse_text_mode("concat"), InvalidArgument);
}
