#include "gvnr/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "gvnr/error.hpp"
#include "gvnr/random.hpp"

namespace gvnr {

// ------------------------------------------------------------------ reports

SettingResult summarize(double setting, std::vector<double> values) {
    SettingResult r;
    r.setting = setting;
    r.repeats = values.size();
    if (!values.empty()) {
        r.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
        if (values.size() > 1) {
            double ss = 0.0;
            for (double v : values) ss += (v - r.mean) * (v - r.mean);
            r.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
        }
    }
    r.values = std::move(values);
    return r;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : settings)
        rows.push_back({{"setting", s.setting},
                        {"mean", s.mean},
                        {"stddev", s.stddev},
                        {"num_repeats", s.repeats},
                        {"values", s.values}});
    return {{"protocol", protocol}, {"metric", metric},   {"label", row_label},
            {"results", rows},      {"config", config},   {"warnings", warnings}};
}

std::string EvalReport::to_table() const {
    const bool percent = metric == "accuracy";
    std::ostringstream head, mean_row, sd_row;
    const std::string header = protocol == "linkpred" ? "test fraction" : "% of training data";
    const std::size_t width = std::max<std::size_t>({header.size(), row_label.size(), 8});
    head << std::left << std::setw(static_cast<int>(width)) << header << " |";
    mean_row << std::left << std::setw(static_cast<int>(width)) << row_label << " |";
    sd_row << std::left << std::setw(static_cast<int>(width)) << "  (stddev)" << " |";
    for (const auto& s : settings) {
        std::ostringstream col;
        col << std::fixed << std::setprecision(0) << s.setting * 100.0 << "%";
        head << std::right << std::setw(8) << col.str();
        mean_row << std::right << std::setw(8) << std::fixed
                 << std::setprecision(percent ? 1 : 3) << (percent ? s.mean * 100.0 : s.mean);
        sd_row << std::right << std::setw(8) << std::fixed << std::setprecision(percent ? 1 : 3)
               << (percent ? s.stddev * 100.0 : s.stddev);
    }
    std::string rule(head.str().size(), '-');
    return head.str() + "\n" + rule + "\n" + mean_row.str() + "\n" + sd_row.str() + "\n";
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        for (std::size_t r = 0; r < count; ++r) fn(r);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t r = next++; r < count; r = next++) {
                try {
                    fn(r);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

// ------------------------------------------------------------------ splits

Split stratified_split(const std::vector<int>& labels, double train_frac, std::uint64_t seed) {
    if (!(train_frac > 0.0 && train_frac < 1.0))
        throw InvalidArgument("training fraction must lie strictly between 0 and 1");
    if (labels.empty()) throw InvalidArgument("stratified_split: no labels");
    int max_label = 0;
    for (int l : labels) {
        if (l < 0) throw InvalidArgument("stratified_split: negative label");
        max_label = std::max(max_label, l);
    }
    std::vector<std::vector<NodeIndex>> members(static_cast<std::size_t>(max_label) + 1);
    for (NodeIndex i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);

    // Largest-remainder apportionment of round(frac * N) training slots.
    const std::size_t total = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(labels.size())));
    std::vector<std::size_t> quota(members.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < members.size(); ++c) {
        if (members[c].empty()) continue;
        const double exact = train_frac * static_cast<double>(members[c].size());
        quota[c] = static_cast<std::size_t>(std::floor(exact));
        assigned += quota[c];
        remainders.emplace_back(exact - std::floor(exact), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; r < remainders.size() && assigned < total; ++r, ++assigned)
        ++quota[remainders[r].second];

    Split split;
    Rng rng(derive_seed(seed, {stream::split}));
    for (std::size_t c = 0; c < members.size(); ++c) {
        auto& mem = members[c];
        if (mem.empty()) continue;
        std::size_t q = quota[c];
        if (mem.size() == 1) {
            if (q == 0)
                split.warnings.push_back("class " + std::to_string(c) +
                                         " has a single member; it is forced into the training set");
            q = 1;
        } else {
            q = std::clamp<std::size_t>(q, 1, mem.size() - 1);
        }
        rng.shuffle(mem);
        split.train.insert(split.train.end(), mem.begin(), mem.begin() + static_cast<std::ptrdiff_t>(q));
        split.test.insert(split.test.end(), mem.begin() + static_cast<std::ptrdiff_t>(q), mem.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

// ------------------------------------------------------------------ classifier

Matrix gather_rows(const Matrix& m, std::span<const NodeIndex> idx) {
    Matrix out(idx.size(), m.cols());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        auto src = m.row(idx[r]);
        std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return out;
}

namespace {

void softmax_inplace(std::span<double> z) {
    const double mx = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double& v : z) {
        v = std::exp(v - mx);
        s += v;
    }
    for (double& v : z) v /= s;
}

// Parameter vector layout: weights row-major (C x D), then C biases.
struct ParamView {
    std::size_t classes;
    std::size_t dim;

    std::size_t size() const { return classes * dim + classes; }
};

double loss_grad_flat(const Matrix& X, const std::vector<int>& y, const ParamView& pv, double l2,
                      const std::vector<double>& theta, std::vector<double>* grad) {
    const std::size_t N = X.rows(), C = pv.classes, D = pv.dim;
    const double* W = theta.data();
    const double* b = theta.data() + C * D;
    if (grad) grad->assign(pv.size(), 0.0);
    std::vector<double> z(C);
    double loss = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        auto x = X.row(i);
        for (std::size_t c = 0; c < C; ++c) z[c] = b[c] + dot(x, std::span<const double>(W + c * D, D));
        const double mx = *std::max_element(z.begin(), z.end());
        double s = 0.0;
        for (double v : z) s += std::exp(v - mx);
        loss += mx + std::log(s) - z[static_cast<std::size_t>(y[i])];
        if (!grad) continue;
        for (std::size_t c = 0; c < C; ++c) {
            double p = std::exp(z[c] - mx) / s;
            if (static_cast<int>(c) == y[i]) p -= 1.0;
            double* gw = grad->data() + c * D;
            for (std::size_t k = 0; k < D; ++k) gw[k] += p * x[k];
            (*grad)[C * D + c] += p;
        }
    }
    const double inv_n = 1.0 / static_cast<double>(N);
    double reg = 0.0;
    for (std::size_t k = 0; k < C * D; ++k) reg += W[k] * W[k];
    loss = (loss + 0.5 * l2 * reg) * inv_n;
    if (grad) {
        for (std::size_t k = 0; k < C * D; ++k) (*grad)[k] = ((*grad)[k] + l2 * W[k]) * inv_n;
        for (std::size_t c = 0; c < C; ++c) (*grad)[C * D + c] *= inv_n;
    }
    return loss;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void check_inputs(const Matrix& X, const std::vector<int>& y, std::size_t C) {
    if (X.rows() != y.size()) throw InvalidArgument("classifier: features and labels differ in length");
    if (X.rows() == 0) throw InvalidArgument("classifier: no training examples");
    if (C == 0) throw InvalidArgument("classifier: no classes");
    for (double v : X.data())
        if (!std::isfinite(v)) throw InvalidArgument("classifier: non-finite feature value");
    for (int l : y)
        if (l < 0 || static_cast<std::size_t>(l) >= C) throw InvalidArgument("classifier: label out of range");
}

}  // namespace

std::vector<double> SoftmaxClassifier::probabilities(std::span<const double> x) const {
    std::vector<double> z(num_classes());
    for (std::size_t c = 0; c < z.size(); ++c) z[c] = bias[c] + dot(x, weights.row(c));
    softmax_inplace(z);
    return z;
}

int SoftmaxClassifier::predict(std::span<const double> x) const {
    double best = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (std::size_t c = 0; c < num_classes(); ++c) {
        const double z = bias[c] + dot(x, weights.row(c));
        if (z > best) {
            best = z;
            arg = static_cast<int>(c);
        }
    }
    return arg;
}

double softmax_loss_and_gradient(const Matrix& features, const std::vector<int>& labels,
                                 std::size_t num_classes, double l2, const Matrix& weights,
                                 const std::vector<double>& bias, std::vector<double>* gradient) {
    check_inputs(features, labels, num_classes);
    ParamView pv{num_classes, features.cols()};
    std::vector<double> theta(weights.data().begin(), weights.data().end());
    theta.insert(theta.end(), bias.begin(), bias.end());
    if (theta.size() != pv.size()) throw InvalidArgument("classifier: parameter shape mismatch");
    return loss_grad_flat(features, labels, pv, l2, theta, gradient);
}

SoftmaxClassifier train_softmax_classifier(const Matrix& features, const std::vector<int>& labels,
                                           std::size_t num_classes, const ClassifierOptions& opt) {
    check_inputs(features, labels, num_classes);
    if (!(opt.l2 >= 0.0)) throw InvalidArgument("classifier: l2 must be nonnegative");
    const ParamView pv{num_classes, features.cols()};

    // Nesterov-accelerated gradient descent, backtracking on the Lipschitz
    // estimate, restarting momentum whenever the loss goes up.
    std::vector<double> x(pv.size(), 0.0), y = x, x_new(pv.size()), g_y, g_new;
    double f_x = loss_grad_flat(features, labels, pv, opt.l2, x, &g_new);
    double lipschitz = 1.0;
    double t = 1.0;
    std::size_t it = 0;
    double gnorm = norm2(g_new);
    while (it < opt.max_iterations && gnorm > opt.tolerance) {
        ++it;
        const double f_y = loss_grad_flat(features, labels, pv, opt.l2, y, &g_y);
        const double gy2 = norm2(g_y) * norm2(g_y);
        double f_new = 0.0;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t k = 0; k < x.size(); ++k) x_new[k] = y[k] - g_y[k] / lipschitz;
            f_new = loss_grad_flat(features, labels, pv, opt.l2, x_new, nullptr);
            if (f_new <= f_y - 0.5 * gy2 / lipschitz + 1e-15 * std::abs(f_y)) break;
            lipschitz *= 2.0;
        }
        if (f_new > f_x) {
            // Momentum overshot: restart from x with a plain gradient step.
            t = 1.0;
            y = x;
            continue;
        }
        const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double beta = (t - 1.0) / t_new;
        for (std::size_t k = 0; k < x.size(); ++k) y[k] = x_new[k] + beta * (x_new[k] - x[k]);
        x.swap(x_new);
        f_x = f_new;
        t = t_new;
        lipschitz *= 0.9;
        f_x = loss_grad_flat(features, labels, pv, opt.l2, x, &g_new);
        gnorm = norm2(g_new);
    }

    SoftmaxClassifier clf;
    clf.weights = Matrix(num_classes, features.cols());
    std::copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(num_classes * features.cols()),
              clf.weights.data().begin());
    clf.bias.assign(x.begin() + static_cast<std::ptrdiff_t>(num_classes * features.cols()), x.end());
    clf.iterations = it;
    clf.gradient_norm = gnorm;
    return clf;
}

double accuracy(const SoftmaxClassifier& clf, const Matrix& features, const std::vector<int>& labels) {
    if (features.rows() != labels.size() || labels.empty())
        throw InvalidArgument("accuracy: features and labels differ in length or are empty");
    std::size_t hit = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (clf.predict(features.row(i)) == labels[i]) ++hit;
    return static_cast<double>(hit) / static_cast<double>(labels.size());
}

// ------------------------------------------------------------------ protocols

std::vector<double> default_classification_fractions() { return {0.1, 0.2, 0.3, 0.4, 0.5}; }
std::vector<double> default_unseen_fractions() { return {0.3, 0.4, 0.5, 0.6, 0.7}; }

namespace {

std::vector<int> pick(const std::vector<int>& v, std::span<const NodeIndex> idx) {
    std::vector<int> out;
    out.reserve(idx.size());
    for (NodeIndex i : idx) out.push_back(v[i]);
    return out;
}

nlohmann::json classifier_json(const ClassifierOptions& c) {
    return {{"l2", c.l2}, {"tolerance", c.tolerance}, {"max_iterations", c.max_iterations}};
}

nlohmann::json pipeline_json(const PipelineConfig& p) {
    return {{"walks_per_node", p.walk.walks_per_node},
            {"walk_length", p.walk.walk_length},
            {"window", p.walk.window},
            {"walk_seed", p.walk.seed},
            {"distance_weighting", p.walk.distance_weighting},
            {"dim", p.gvnr.d},
            {"k", p.gvnr.k},
            {"epochs", p.gvnr.epochs},
            {"lr", p.gvnr.learning_rate},
            {"x_min", p.gvnr.x_min},
            {"seed", p.gvnr.seed},
            {"optimizer", to_string(p.gvnr.optimizer)},
            {"zero_target", p.gvnr.zero_target}};
}

CoocMatrix cooc_for(const Adjacency& adj, const WalkConfig& walk, unsigned threads) {
    auto walks = generate_walks(adj, walk, threads);
    return count_cooccurrences(walks, adj.size(), walk.window, walk.distance_weighting);
}

// Pipeline seeds for one repeat, derived from the configured seeds.
PipelineConfig reseeded(const PipelineConfig& p, std::size_t setting, std::size_t repeat) {
    PipelineConfig out = p;
    out.walk.seed = derive_seed(p.walk.seed, {stream::pipeline, setting, repeat});
    out.gvnr.seed = derive_seed(p.gvnr.seed, {stream::pipeline, setting, repeat});
    return out;
}

}  // namespace

EvalReport classification_protocol(const Matrix& representations, const std::vector<int>& labels,
                                   std::size_t num_classes, const ProtocolOptions& opt) {
    if (representations.rows() != labels.size())
        throw InvalidArgument("classification: one representation per labeled node is required");
    if (opt.repeats == 0) throw InvalidArgument("classification: repeats must be at least 1");
    const auto fracs = opt.fractions.empty() ? default_classification_fractions() : opt.fractions;
    for (double f : fracs)
        if (!(f > 0.0 && f < 1.0)) throw InvalidArgument("training fractions must lie in (0, 1)");

    const std::size_t jobs = fracs.size() * opt.repeats;
    std::vector<double> acc(jobs, 0.0);
    std::vector<std::vector<std::string>> warnings(jobs);
    parallel_for(jobs, opt.threads, [&](std::size_t job) {
        const std::size_t f = job / opt.repeats, r = job % opt.repeats;
        const Split s = stratified_split(labels, fracs[f], derive_seed(opt.seed, {stream::repeat, f, r}));
        warnings[job] = s.warnings;
        auto clf = train_softmax_classifier(gather_rows(representations, s.train), pick(labels, s.train),
                                            num_classes, opt.classifier);
        acc[job] = accuracy(clf, gather_rows(representations, s.test), pick(labels, s.test));
    });

    EvalReport rep;
    rep.protocol = "classify";
    rep.metric = "accuracy";
    for (std::size_t f = 0; f < fracs.size(); ++f)
        rep.settings.push_back(summarize(
            fracs[f], {acc.begin() + static_cast<std::ptrdiff_t>(f * opt.repeats),
                       acc.begin() + static_cast<std::ptrdiff_t>((f + 1) * opt.repeats)}));
    for (const auto& w : warnings)
        for (const auto& s : w)
            if (std::find(rep.warnings.begin(), rep.warnings.end(), s) == rep.warnings.end())
                rep.warnings.push_back(s);
    rep.config = {{"fractions", fracs},     {"repeats", opt.repeats},
                  {"seed", opt.seed},       {"split", "stratified"},
                  {"dim", representations.cols()},
                  {"classifier", classifier_json(opt.classifier)}};
    return rep;
}

GvnrTextModel fit_text_pipeline(const Dataset& d, const PipelineConfig& cfg, unsigned threads,
                                TrainingLog* log) {
    return train_gvnr_t(cooc_for(d.adjacency(), cfg.walk, threads), d.bows(), d.vocab_size(), cfg.gvnr, log);
}

GvnrModel fit_gvnr_pipeline(const Dataset& d, const PipelineConfig& cfg, unsigned threads,
                            TrainingLog* log) {
    return train_gvnr(cooc_for(d.adjacency(), cfg.walk, threads), cfg.gvnr, log);
}

EvalReport unseen_document_protocol(const Dataset& d, const PipelineConfig& pipeline,
                                    const ProtocolOptions& opt) {
    if (opt.repeats == 0) throw InvalidArgument("unseen: repeats must be at least 1");
    const auto fracs = opt.fractions.empty() ? default_unseen_fractions() : opt.fractions;
    for (double f : fracs)
        if (!(f > 0.0 && f < 1.0))
            throw InvalidArgument("observed fraction must lie in (0, 1): some nodes have to stay hidden");

    const std::size_t jobs = fracs.size() * opt.repeats;
    std::vector<double> acc(jobs, 0.0);
    parallel_for(jobs, opt.threads, [&](std::size_t job) {
        const std::size_t f = job / opt.repeats, r = job % opt.repeats;
        const Split s = stratified_split(d.labels(), fracs[f], derive_seed(opt.seed, {stream::repeat, f, r}));
        auto [sub, map] = induced_subgraph(d, s.train);
        const GvnrTextModel model = fit_text_pipeline(sub, reseeded(pipeline, f, r));

        const Matrix observed = text_representations(model, TextMode::text_only);
        std::vector<int> observed_labels = sub.labels();
        Matrix hidden(s.test.size(), model.d());
        for (std::size_t h = 0; h < s.test.size(); ++h) {
            const Bow& bow = d.bows()[s.test[h]];
            auto v = bow.empty() ? model.fallback : infer_document(model, bow);
            std::copy(v.begin(), v.end(), hidden.row(h).begin());
        }
        auto clf = train_softmax_classifier(observed, observed_labels, d.num_classes(), opt.classifier);
        acc[job] = accuracy(clf, hidden, pick(d.labels(), s.test));
    });

    EvalReport rep;
    rep.protocol = "unseen";
    rep.metric = "accuracy";
    rep.row_label = "GVNR-t";
    for (std::size_t f = 0; f < fracs.size(); ++f)
        rep.settings.push_back(summarize(
            fracs[f], {acc.begin() + static_cast<std::ptrdiff_t>(f * opt.repeats),
                       acc.begin() + static_cast<std::ptrdiff_t>((f + 1) * opt.repeats)}));
    rep.config = {{"fractions", fracs},
                  {"repeats", opt.repeats},
                  {"seed", opt.seed},
                  {"split", "stratified"},
                  {"representation", "text_only"},
                  {"pipeline", pipeline_json(pipeline)},
                  {"classifier", classifier_json(opt.classifier)}};
    return rep;
}

// ------------------------------------------------------------------ links

namespace {

std::uint64_t pair_key(NodeIndex a, NodeIndex b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

LinkSplit link_prediction_split(const Adjacency& adj, double test_frac, std::uint64_t seed, SplitMode mode) {
    if (mode == SplitMode::temporal)
        throw InvalidArgument("temporal link split needs edge timestamps, which this graph does not carry");
    if (!(test_frac > 0.0 && test_frac < 1.0)) throw InvalidArgument("test fraction must lie in (0, 1)");
    const std::size_t n = adj.size();
    auto edges = edge_list(adj);
    const std::size_t target =
        static_cast<std::size_t>(std::llround(test_frac * static_cast<double>(edges.size())));

    LinkSplit out;
    Rng rng(derive_seed(seed, {stream::split}));
    rng.shuffle(edges);
    std::vector<std::size_t> degree(n);
    for (std::size_t i = 0; i < n; ++i) degree[i] = adj[i].size();
    std::vector<Edge> kept;
    for (const auto& e : edges) {
        if (out.positives.size() < target && degree[e.first] > 1 && degree[e.second] > 1) {
            --degree[e.first];
            --degree[e.second];
            out.positives.push_back(e);
        } else {
            kept.push_back(e);
        }
    }
    if (out.positives.size() < target)
        out.warnings.push_back("only " + std::to_string(out.positives.size()) + " of " +
                               std::to_string(target) +
                               " test edges could be removed without isolating a node");
    out.train = adjacency_from_edges(n, kept);

    std::unordered_set<std::uint64_t> linked, chosen;
    for (const auto& e : edges) linked.insert(pair_key(e.first, e.second));
    const std::size_t want = out.positives.size();
    const std::uint64_t pairs_total = n < 2 ? 0 : static_cast<std::uint64_t>(n) * (n - 1) / 2;
    const std::uint64_t available = pairs_total - edges.size();
    Rng neg(derive_seed(seed, {stream::negatives}));
    std::size_t attempts = 0;
    const std::size_t max_attempts = 50 * want + 1000;
    while (out.negatives.size() < want && chosen.size() < available && attempts++ < max_attempts) {
        NodeIndex a = static_cast<NodeIndex>(neg.below(n));
        NodeIndex b = static_cast<NodeIndex>(neg.below(n));
        if (a == b) continue;
        const auto key = pair_key(a, b);
        if (linked.count(key) || !chosen.insert(key).second) continue;
        out.negatives.emplace_back(std::min(a, b), std::max(a, b));
    }
    if (out.negatives.size() < want && chosen.size() < available) {
        // Dense graph: enumerate what is left.
        std::vector<Edge> rest;
        for (NodeIndex a = 0; a < n; ++a)
            for (NodeIndex b = a + 1; b < n; ++b) {
                const auto key = pair_key(a, b);
                if (!linked.count(key) && !chosen.count(key)) rest.emplace_back(a, b);
            }
        neg.shuffle(rest);
        for (const auto& e : rest) {
            if (out.negatives.size() >= want) break;
            out.negatives.push_back(e);
        }
    }
    if (out.negatives.size() < want)
        out.warnings.push_back("graph has only " + std::to_string(out.negatives.size()) +
                               " never-linked pairs for " + std::to_string(want) + " test edges");
    return out;
}

double roc_auc(std::span<const double> scores_pos, std::span<const double> scores_neg) {
    if (scores_pos.empty() || scores_neg.empty()) throw InvalidArgument("roc_auc needs positive and negative scores");
    std::vector<std::pair<double, bool>> all;
    all.reserve(scores_pos.size() + scores_neg.size());
    for (double s : scores_pos) all.emplace_back(s, true);
    for (double s : scores_neg) all.emplace_back(s, false);
    for (const auto& [s, _] : all)
        if (std::isnan(s)) throw InvalidArgument("roc_auc: NaN score");
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    // wins counts (pos, neg) pairs with pos strictly higher; ties count half.
    std::uint64_t wins = 0, ties = 0, neg_below = 0;
    for (std::size_t g = 0; g < all.size();) {
        std::size_t h = g;
        std::uint64_t pos_here = 0, neg_here = 0;
        while (h < all.size() && all[h].first == all[g].first) {
            (all[h].second ? pos_here : neg_here)++;
            ++h;
        }
        wins += pos_here * neg_below;
        ties += pos_here * neg_here;
        neg_below += neg_here;
        g = h;
    }
    const double denom = static_cast<double>(scores_pos.size()) * static_cast<double>(scores_neg.size());
    return (static_cast<double>(2 * wins + ties) / 2.0) / denom;
}

PairScorer dot_bias_scorer(const GvnrModel& m) {
    return [&m](NodeIndex i, NodeIndex j) {
        const double z = dot(m.U.row(i), m.V.row(j)) + m.b_u[i] + m.b_v[j];
        return 1.0 / (1.0 + std::exp(-z));
    };
}

PairScorer cosine_scorer(const Matrix& reps) {
    return [&reps](NodeIndex i, NodeIndex j) {
        auto a = reps.row(i);
        auto b = reps.row(j);
        const double na = std::sqrt(dot(a, a)), nb = std::sqrt(dot(b, b));
        if (na == 0.0 || nb == 0.0) return 0.0;
        return dot(a, b) / (na * nb);
    };
}

double link_auc(const PairScorer& scorer, const std::vector<Edge>& positives, const std::vector<Edge>& negatives) {
    std::vector<double> sp, sn;
    sp.reserve(positives.size());
    sn.reserve(negatives.size());
    for (auto [a, b] : positives) sp.push_back(scorer(a, b));
    for (auto [a, b] : negatives) sn.push_back(scorer(a, b));
    return roc_auc(sp, sn);
}

std::string_view to_string(LinkScorer s) { return s == LinkScorer::dot_bias ? "dot_bias" : "cosine"; }

LinkScorer parse_link_scorer(std::string_view s) {
    if (s == "dot_bias") return LinkScorer::dot_bias;
    if (s == "cosine") return LinkScorer::cosine;
    throw InvalidArgument("unknown link scorer '" + std::string(s) + "'");
}

EvalReport link_prediction_protocol(const Adjacency& adj, const PipelineConfig& pipeline, double test_frac,
                                    LinkScorer scorer, RepresentationMode mode, std::size_t repeats,
                                    std::uint64_t seed, unsigned threads) {
    if (repeats == 0) throw InvalidArgument("linkpred: repeats must be at least 1");
    std::vector<double> aucs(repeats, 0.0);
    std::vector<std::vector<std::string>> warnings(repeats);
    parallel_for(repeats, threads, [&](std::size_t r) {
        LinkSplit split = link_prediction_split(adj, test_frac, derive_seed(seed, {stream::repeat, 0, r}));
        warnings[r] = split.warnings;
        const PipelineConfig p = reseeded(pipeline, 0, r);
        const GvnrModel model = train_gvnr(cooc_for(split.train, p.walk, 1), p.gvnr);
        if (scorer == LinkScorer::dot_bias) {
            aucs[r] = link_auc(dot_bias_scorer(model), split.positives, split.negatives);
        } else {
            const Matrix reps = node_representations(model, mode);
            aucs[r] = link_auc(cosine_scorer(reps), split.positives, split.negatives);
        }
    });
    EvalReport rep;
    rep.protocol = "linkpred";
    rep.metric = "auc";
    rep.row_label = "GVNR";
    rep.settings.push_back(summarize(test_frac, aucs));
    for (const auto& w : warnings)
        for (const auto& s : w)
            if (std::find(rep.warnings.begin(), rep.warnings.end(), s) == rep.warnings.end())
                rep.warnings.push_back(s);
    rep.config = {{"test_frac", test_frac},     {"repeats", repeats},
                  {"seed", seed},               {"scorer", to_string(scorer)},
                  {"mode", to_string(mode)},    {"split", "random"},
                  {"negatives", "uniform non-edges, one per positive"},
                  {"pipeline", pipeline_json(pipeline)}};
    return rep;
}

EvalReport unseen_link_prediction_protocol(const Dataset& d, const PipelineConfig& pipeline, double hidden_frac,
                                           std::size_t repeats, std::uint64_t seed, unsigned threads) {
    if (!(hidden_frac > 0.0 && hidden_frac < 1.0)) throw InvalidArgument("hidden fraction must lie in (0, 1)");
    if (repeats == 0) throw InvalidArgument("linkpred: repeats must be at least 1");
    const std::size_t n = d.num_nodes();
    std::vector<double> aucs(repeats, 0.0);
    std::vector<char> valid(repeats, 0);
    parallel_for(repeats, threads, [&](std::size_t r) {
        const std::uint64_t rs = derive_seed(seed, {stream::repeat, 1, r});
        Rng rng(derive_seed(rs, {stream::split}));
        std::vector<NodeIndex> order(n);
        std::iota(order.begin(), order.end(), NodeIndex{0});
        rng.shuffle(order);
        const std::size_t hidden_count = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::llround(hidden_frac * static_cast<double>(n))), 1, n - 1);
        std::vector<char> hidden(n, 0);
        for (std::size_t k = 0; k < hidden_count; ++k) hidden[order[k]] = 1;
        std::vector<NodeIndex> observed(order.begin() + static_cast<std::ptrdiff_t>(hidden_count), order.end());

        auto [sub, map] = induced_subgraph(d, observed);
        const GvnrTextModel model = fit_text_pipeline(sub, reseeded(pipeline, 1, r));
        Matrix reps(n, model.d());
        for (NodeIndex i = 0; i < n; ++i) {
            std::vector<double> v;
            if (!hidden[i])
                v = context_vector(model, static_cast<NodeIndex>(map[i]));
            else
                v = d.bows()[i].empty() ? model.fallback : infer_document(model, d.bows()[i]);
            std::copy(v.begin(), v.end(), reps.row(i).begin());
        }

        std::vector<Edge> pos, neg;
        std::unordered_set<std::uint64_t> linked, chosen;
        for (auto [a, b] : edge_list(d.adjacency())) {
            linked.insert(pair_key(a, b));
            if (hidden[a] || hidden[b]) pos.emplace_back(a, b);
        }
        if (pos.empty()) return;
        std::vector<NodeIndex> hidden_nodes(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(hidden_count));
        Rng neg_rng(derive_seed(rs, {stream::negatives}));
        for (std::size_t attempts = 0; neg.size() < pos.size() && attempts < 50 * pos.size() + 1000; ++attempts) {
            NodeIndex a = hidden_nodes[neg_rng.below(hidden_nodes.size())];
            NodeIndex b = static_cast<NodeIndex>(neg_rng.below(n));
            if (a == b) continue;
            const auto key = pair_key(a, b);
            if (linked.count(key) || !chosen.insert(key).second) continue;
            neg.emplace_back(std::min(a, b), std::max(a, b));
        }
        if (neg.empty()) return;
        aucs[r] = link_auc(cosine_scorer(reps), pos, neg);
        valid[r] = 1;
    });
    std::vector<double> kept;
    for (std::size_t r = 0; r < repeats; ++r)
        if (valid[r]) kept.push_back(aucs[r]);
    EvalReport rep;
    rep.protocol = "linkpred-unseen";
    rep.metric = "auc";
    rep.row_label = "GVNR-t";
    if (kept.size() < repeats)
        rep.warnings.push_back(std::to_string(repeats - kept.size()) +
                               " repeats had no links touching hidden nodes and were skipped");
    rep.settings.push_back(summarize(hidden_frac, kept));
    rep.config = {{"hidden_frac", hidden_frac}, {"repeats", repeats},        {"seed", seed},
                  {"scorer", "cosine"},        {"representation", "text_only"},
                  {"pipeline", pipeline_json(pipeline)}};
    return rep;
}

}  // namespace gvnr
