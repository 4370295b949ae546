#include "gvnr/gvnr_text.hpp"

#include <algorithm>
#include <numeric>

#include "gvnr/error.hpp"
#include "training_detail.hpp"

namespace gvnr {

std::string_view to_string(TextMode m) { return m == TextMode::text_only ? "text_only" : "full"; }

TextMode parse_text_mode(std::string_view s) {
    if (s == "text_only") return TextMode::text_only;
    if (s == "full") return TextMode::full;
    throw InvalidArgument("unknown text representation mode '" + std::string(s) + "'");
}

std::vector<double> doc_context_vector(const Bow& bow, const Matrix& W) {
    const std::uint64_t total = token_count(bow);
    if (total == 0) throw InvalidArgument("empty document has no context vector");
    std::vector<double> v(W.cols(), 0.0);
    for (const auto& e : bow) {
        if (e.word >= W.rows())
            throw InvalidArgument("word index " + std::to_string(e.word) + " is outside the vocabulary");
        auto row = W.row(e.word);
        const double c = static_cast<double>(e.count);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] += c * row[k];
    }
    const double inv = static_cast<double>(total);
    for (double& x : v) x /= inv;
    return v;
}

std::vector<double> context_vector(const GvnrTextModel& m, NodeIndex j) {
    if (j >= m.bows.size()) throw InvalidArgument("node index out of range");
    if (m.bows[j].empty()) return m.fallback;
    return doc_context_vector(m.bows[j], m.W);
}

namespace {

Matrix all_context_vectors(const GvnrTextModel& m) {
    Matrix V(m.n(), m.d());
    for (NodeIndex j = 0; j < m.n(); ++j) {
        auto v = context_vector(m, j);
        std::copy(v.begin(), v.end(), V.row(j).begin());
    }
    return V;
}

void check_shapes(const GvnrTextModel& m, const CoocMatrix& x) {
    if (x.n() != m.n() || m.bows.size() != m.n())
        throw InvalidArgument("model and co-occurrence matrix disagree on the node count");
}

}  // namespace

double text_objective_value(const GvnrTextModel& m, const CoocMatrix& x, const ZeroMask& mask,
                            double zero_target) {
    check_shapes(m, x);
    const Matrix V = all_context_vectors(m);
    double loss = 0.0;
    for (const auto& c : detail::selected_cells(x, mask, zero_target)) {
        const double e = dot(m.U.row(c.i), V.row(c.j)) + m.b_u[c.i] + m.b_v[c.j] - c.target;
        loss += e * e;
    }
    return loss;
}

GvnrTextGradients text_objective_gradients(const GvnrTextModel& m, const CoocMatrix& x,
                                           const ZeroMask& mask, double zero_target) {
    check_shapes(m, x);
    const std::size_t n = m.n(), d = m.d();
    const Matrix V = all_context_vectors(m);
    Matrix gV(n, d);
    GvnrTextGradients g{Matrix(n, d), Matrix(m.W.rows(), d), std::vector<double>(n, 0.0),
                        std::vector<double>(n, 0.0), std::vector<double>(d, 0.0)};
    for (const auto& c : detail::selected_cells(x, mask, zero_target)) {
        auto u = m.U.row(c.i);
        auto v = V.row(c.j);
        const double e = dot(u, v) + m.b_u[c.i] + m.b_v[c.j] - c.target;
        auto gu = g.U.row(c.i);
        auto gv = gV.row(c.j);
        for (std::size_t k = 0; k < d; ++k) {
            gu[k] += 2.0 * e * v[k];
            gv[k] += 2.0 * e * u[k];
        }
        g.b_u[c.i] += 2.0 * e;
        g.b_v[c.j] += 2.0 * e;
    }
    for (NodeIndex j = 0; j < n; ++j) {
        auto gv = gV.row(j);
        const Bow& bow = m.bows[j];
        if (bow.empty()) {
            for (std::size_t k = 0; k < d; ++k) g.fallback[k] += gv[k];
            continue;
        }
        const double total = static_cast<double>(token_count(bow));
        for (const auto& e : bow) {
            const double w = static_cast<double>(e.count) / total;
            auto gw = g.W.row(e.word);
            for (std::size_t k = 0; k < d; ++k) gw[k] += w * gv[k];
        }
    }
    return g;
}

GvnrTextModel init_gvnr_text_model(std::vector<Bow> bows, std::size_t vocab_size, std::size_t d,
                                   std::uint64_t seed) {
    const std::size_t n = bows.size();
    for (const Bow& b : bows)
        for (const auto& e : b)
            if (e.word >= vocab_size) throw InvalidArgument("document word index outside the vocabulary");
    GvnrTextModel m{Matrix(n, d),
                    Matrix(vocab_size, d),
                    std::vector<double>(n, 0.0),
                    std::vector<double>(n, 0.0),
                    std::vector<double>(d, 0.0),
                    std::move(bows)};
    Rng rng(derive_seed(seed, {stream::init}));
    const double r = 0.5 / static_cast<double>(d);
    for (double& v : m.U.data()) v = rng.uniform(-r, r);
    for (double& v : m.W.data()) v = rng.uniform(-r, r);
    for (double& v : m.fallback) v = rng.uniform(-r, r);
    return m;
}

GvnrTextModel train_gvnr_t(const CoocMatrix& x_in, const std::vector<Bow>& bows,
                           std::size_t vocab_size, const GvnrConfig& cfg, TrainingLog* log) {
    cfg.validate();
    if (bows.size() != x_in.n())
        throw InvalidArgument("one document per node is required (got " + std::to_string(bows.size()) +
                              " documents for " + std::to_string(x_in.n()) + " nodes)");
    const CoocMatrix x = filter_min_count(x_in, cfg.x_min);
    if (x.empty()) throw InvalidArgument("co-occurrence matrix is empty after x_min filtering");

    const std::size_t n = x.n(), d = cfg.d;
    GvnrTextModel m = init_gvnr_text_model(bows, vocab_size, d, cfg.seed);
    detail::Updater upd_u(cfg.optimizer, cfg.learning_rate, n * d);
    detail::Updater upd_w(cfg.optimizer, cfg.learning_rate, vocab_size * d);
    detail::Updater upd_fb(cfg.optimizer, cfg.learning_rate, d);
    detail::Updater upd_bu(cfg.optimizer, cfg.learning_rate, n);
    detail::Updater upd_bv(cfg.optimizer, cfg.learning_rate, n);

    std::vector<double> gu(d), gv(d), gw(d);
    std::vector<std::size_t> bucket_start(n + 1);
    std::vector<detail::Cell> by_context;

    for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng zero_rng(derive_seed(cfg.seed, {stream::zeros, epoch}));
        const ZeroMask mask = sample_zero_coefficients(x, cfg.k, zero_rng);
        auto cells = detail::selected_cells(x, mask, cfg.zero_target);
        Rng shuffle_rng(derive_seed(cfg.seed, {stream::shuffle, epoch}));
        shuffle_rng.shuffle(cells);

        // Stable bucketing by context keeps the shuffled order inside a bucket.
        std::fill(bucket_start.begin(), bucket_start.end(), 0);
        for (const auto& c : cells) ++bucket_start[c.j + 1];
        std::partial_sum(bucket_start.begin(), bucket_start.end(), bucket_start.begin());
        by_context.resize(cells.size());
        {
            std::vector<std::size_t> fill(bucket_start.begin(), bucket_start.end() - 1);
            for (const auto& c : cells) by_context[fill[c.j]++] = c;
        }
        std::vector<NodeIndex> contexts;
        for (NodeIndex j = 0; j < n; ++j)
            if (bucket_start[j + 1] > bucket_start[j]) contexts.push_back(j);
        shuffle_rng.shuffle(contexts);

        double loss = 0.0;
        for (NodeIndex j : contexts) {
            const std::vector<double> v = context_vector(m, j);
            std::fill(gv.begin(), gv.end(), 0.0);
            for (std::size_t p = bucket_start[j]; p < bucket_start[j + 1]; ++p) {
                const auto& c = by_context[p];
                auto u = m.U.row(c.i);
                const double e = dot(u, v) + m.b_u[c.i] + m.b_v[j] - c.target;
                loss += e * e;
                const double g = 2.0 * e;
                for (std::size_t k = 0; k < d; ++k) {
                    gu[k] = g * v[k];
                    gv[k] += g * u[k];
                }
                upd_u.step(u, c.i * d, gu);
                upd_bu.step(m.b_u[c.i], c.i, g);
                upd_bv.step(m.b_v[j], j, g);
            }
            const Bow& bow = m.bows[j];
            if (bow.empty()) {
                upd_fb.step(m.fallback, 0, gv);
                continue;
            }
            const double total = static_cast<double>(token_count(bow));
            for (const auto& e : bow) {
                const double w = static_cast<double>(e.count) / total;
                for (std::size_t k = 0; k < d; ++k) gw[k] = w * gv[k];
                upd_w.step(m.W.row(e.word), e.word * d, gw);
            }
        }
        detail::check_finite_loss(loss, epoch, cfg.learning_rate);
        if (log) {
            log->epoch_mean_loss.push_back(loss / static_cast<double>(cells.size()));
            log->epoch_coefficients.push_back(cells.size());
        }
    }
    return m;
}

std::vector<double> infer_document(const GvnrTextModel& m, const Bow& bow) {
    return doc_context_vector(bow, m.W);
}

std::vector<double> text_representation(const GvnrTextModel& m, NodeIndex i, TextMode mode) {
    if (i >= m.n()) {
        if (mode == TextMode::full)
            throw InvalidArgument("full representation needs a trained node embedding; node " +
                                  std::to_string(i) + " has none");
        throw InvalidArgument("node index out of range");
    }
    std::vector<double> v = context_vector(m, i);
    if (mode == TextMode::text_only) return v;
    auto u = m.U.row(i);
    std::vector<double> out(u.begin(), u.end());
    out.insert(out.end(), v.begin(), v.end());
    return out;
}

Matrix text_representations(const GvnrTextModel& m, TextMode mode) {
    const std::size_t dim = mode == TextMode::full ? 2 * m.d() : m.d();
    Matrix out(m.n(), dim);
    for (NodeIndex i = 0; i < m.n(); ++i) {
        auto r = text_representation(m, i, mode);
        std::copy(r.begin(), r.end(), out.row(i).begin());
    }
    return out;
}

}  // namespace gvnr
