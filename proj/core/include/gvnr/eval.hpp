#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gvnr/dataset.hpp"
#include "gvnr/gvnr_model.hpp"
#include "gvnr/gvnr_text.hpp"
#include "gvnr/matrix.hpp"
#include "gvnr/walk_cooc.hpp"

namespace gvnr {

// ---------------------------------------------------------------- reports

struct SettingResult {
    double setting = 0.0;  // training fraction, observed fraction or test fraction
    double mean = 0.0;
    double stddev = 0.0;   // sample standard deviation, 0 for a single repeat
    std::size_t repeats = 0;
    std::vector<double> values;
};

struct EvalReport {
    std::string protocol;
    std::string metric;  // "accuracy" or "auc"
    std::string row_label;
    std::vector<SettingResult> settings;
    nlohmann::json config = nlohmann::json::object();
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;

    /// Aligned text table with one column per setting, values in percent.
    std::string to_table() const;
};

SettingResult summarize(double setting, std::vector<double> values);

// ---------------------------------------------------------------- splits

struct Split {
    std::vector<NodeIndex> train;  // ascending
    std::vector<NodeIndex> test;   // ascending
    std::vector<std::string> warnings;
};

/// Per-class proportional split. Each class contributes round(frac * size)
/// training items, clamped to [1, size - 1] (a singleton class goes to train
/// with a warning).
Split stratified_split(const std::vector<int>& labels, double train_frac, std::uint64_t seed);

// ---------------------------------------------------------------- classifier

struct SoftmaxClassifier {
    Matrix weights;  // C x dim
    std::vector<double> bias;
    std::size_t iterations = 0;
    double gradient_norm = 0.0;

    std::size_t num_classes() const noexcept { return weights.rows(); }
    std::vector<double> probabilities(std::span<const double> x) const;
    int predict(std::span<const double> x) const;
};

struct ClassifierOptions {
    double l2 = 1.0;
    double tolerance = 1e-4;
    std::size_t max_iterations = 1000;
};

/// Mean cross-entropy plus l2 / (2N) ||weights||^2 (biases unpenalized),
/// with its gradient laid out as [weights row-major, bias].
double softmax_loss_and_gradient(const Matrix& features, const std::vector<int>& labels,
                                 std::size_t num_classes, double l2, const Matrix& weights,
                                 const std::vector<double>& bias, std::vector<double>* gradient);

/// Multinomial logistic regression by full-batch accelerated gradient
/// descent with backtracking, stopping at gradient norm <= tolerance or
/// max_iterations.
SoftmaxClassifier train_softmax_classifier(const Matrix& features, const std::vector<int>& labels,
                                           std::size_t num_classes, const ClassifierOptions& opt = {});

double accuracy(const SoftmaxClassifier& clf, const Matrix& features, const std::vector<int>& labels);

/// Rows of `m` selected by `idx`.
Matrix gather_rows(const Matrix& m, std::span<const NodeIndex> idx);

// ---------------------------------------------------------------- protocols

struct ProtocolOptions {
    std::vector<double> fractions;
    std::size_t repeats = 10;
    std::uint64_t seed = 42;
    ClassifierOptions classifier;
    unsigned threads = 1;
};

std::vector<double> default_classification_fractions();  // 0.1 .. 0.5
std::vector<double> default_unseen_fractions();          // 0.3 .. 0.7

/// Transductive node classification: for each fraction, `repeats` seeded
/// stratified splits, a classifier fit on the train rows, accuracy on the rest.
EvalReport classification_protocol(const Matrix& representations, const std::vector<int>& labels,
                                   std::size_t num_classes, const ProtocolOptions& opt);

struct PipelineConfig {
    WalkConfig walk;
    GvnrConfig gvnr;
};

/// Walks, co-occurrence counts and a GVNR-t model for one dataset.
GvnrTextModel fit_text_pipeline(const Dataset& d, const PipelineConfig& cfg, unsigned threads = 1,
                                TrainingLog* log = nullptr);
GvnrModel fit_gvnr_pipeline(const Dataset& d, const PipelineConfig& cfg, unsigned threads = 1,
                            TrainingLog* log = nullptr);

/// Unseen-document classification. For each fraction: a stratified sample of
/// observed nodes, GVNR-t trained on their induced subgraph only, observed
/// nodes represented by their text vectors, hidden nodes by infer_document,
/// accuracy measured on the hidden nodes. Hidden nodes' links are never used.
EvalReport unseen_document_protocol(const Dataset& d, const PipelineConfig& pipeline,
                                    const ProtocolOptions& opt);

// ---------------------------------------------------------------- links

using Edge = std::pair<NodeIndex, NodeIndex>;

enum class SplitMode { random, temporal };

struct LinkSplit {
    Adjacency train;
    std::vector<Edge> positives;
    std::vector<Edge> negatives;
    std::vector<std::string> warnings;
};

/// Removes round(test_frac * |E|) edges uniformly at random while keeping
/// every non-isolated node attached, and draws as many never-linked pairs.
LinkSplit link_prediction_split(const Adjacency& adj, double test_frac, std::uint64_t seed,
                                SplitMode mode = SplitMode::random);

/// P(score(pos) > score(neg)) with ties counted one half. Exact.
double roc_auc(std::span<const double> scores_pos, std::span<const double> scores_neg);

using PairScorer = std::function<double(NodeIndex, NodeIndex)>;

/// sigma(u_i.v_j + b_u[i] + b_v[j]).
PairScorer dot_bias_scorer(const GvnrModel& m);
/// Cosine similarity of two representation rows.
PairScorer cosine_scorer(const Matrix& representations);

double link_auc(const PairScorer& scorer, const std::vector<Edge>& positives,
                const std::vector<Edge>& negatives);

enum class LinkScorer { dot_bias, cosine };
std::string_view to_string(LinkScorer s);
LinkScorer parse_link_scorer(std::string_view s);

/// Edge-hiding link prediction: split, train GVNR on the training graph,
/// score held-out edges against sampled non-edges.
EvalReport link_prediction_protocol(const Adjacency& adj, const PipelineConfig& pipeline,
                                    double test_frac, LinkScorer scorer, RepresentationMode mode,
                                    std::size_t repeats, std::uint64_t seed, unsigned threads = 1);

/// Node-hiding variant: a fraction of nodes is hidden during GVNR-t training;
/// their links to any node are positives, scored by cosine of text vectors
/// obtained through infer_document.
EvalReport unseen_link_prediction_protocol(const Dataset& d, const PipelineConfig& pipeline,
                                           double hidden_frac, std::size_t repeats,
                                           std::uint64_t seed, unsigned threads = 1);

/// Runs fn(r) for r in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace gvnr
