#include "gvnr/attention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gvnr/error.hpp"
#include "gvnr/gvnr_text.hpp"

namespace gvnr {

std::vector<double> attention_weights(const std::vector<double>& query, const Matrix& keys,
                                      double scale_dim) {
    if (keys.rows() == 0) throw InvalidArgument("attention needs at least one key");
    if (keys.cols() != query.size()) throw InvalidArgument("query and key dimensions differ");
    if (!(scale_dim > 0.0)) throw InvalidArgument("attention scale dimension must be positive");

    const double root = std::sqrt(scale_dim);
    std::vector<double> q(query.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        if (!std::isfinite(query[k])) throw InvalidArgument("query is not finite");
        q[k] = query[k] / root;
    }
    std::vector<double> w(keys.rows());
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < keys.rows(); ++l) {
        w[l] = dot(q, keys.row(l));
        if (!std::isfinite(w[l])) throw InvalidArgument("attention logits are not finite");
        max_logit = std::max(max_logit, w[l]);
    }
    double z = 0.0;
    for (double& x : w) {
        x = std::exp(x - max_logit);
        z += x;
    }
    for (double& x : w) x /= z;
    return w;
}

AttentionResult scaled_dot_product_attention(const AttentionInput& in) {
    if (in.values.rows() != in.keys.rows())
        throw InvalidArgument("keys and values must have the same number of rows");
    AttentionResult r;
    r.weights = attention_weights(in.query, in.keys, static_cast<double>(in.query.size()));
    r.output.assign(in.values.cols(), 0.0);
    for (std::size_t l = 0; l < in.values.rows(); ++l) {
        auto row = in.values.row(l);
        for (std::size_t k = 0; k < r.output.size(); ++k) r.output[k] += r.weights[l] * row[k];
    }
    return r;
}

std::string_view to_string(QueryStrategy q) { return q == QueryStrategy::mean ? "mean" : "max_pool"; }

QueryStrategy parse_query_strategy(std::string_view s) {
    if (s == "mean") return QueryStrategy::mean;
    if (s == "max_pool" || s == "max-pool") return QueryStrategy::max_pool;
    throw InvalidArgument("unknown query strategy '" + std::string(s) + "'");
}

std::vector<double> document_query(const Bow& bow, const Matrix& W, QueryStrategy strategy) {
    if (bow.empty()) throw InvalidArgument("empty document cannot form an attention query");
    if (strategy == QueryStrategy::mean) return doc_context_vector(bow, W);
    std::vector<double> q(W.cols(), -std::numeric_limits<double>::infinity());
    for (const auto& e : bow) {
        if (e.word >= W.rows()) throw InvalidArgument("word index outside the vocabulary");
        auto row = W.row(e.word);
        for (std::size_t k = 0; k < q.size(); ++k) q[k] = std::max(q[k], row[k]);
    }
    return q;
}

namespace {

WordWeights attend(const Bow& doc, const std::vector<double>& query, const Matrix& W) {
    const std::size_t tokens = token_count(doc);
    Matrix keys(tokens, W.cols());
    std::size_t l = 0;
    for (const auto& e : doc) {
        if (e.word >= W.rows()) throw InvalidArgument("word index outside the vocabulary");
        for (std::uint32_t c = 0; c < e.count; ++c, ++l)
            std::copy(W.row(e.word).begin(), W.row(e.word).end(), keys.row(l).begin());
    }
    AttentionResult r = scaled_dot_product_attention({query, keys, keys});

    WordWeights out;
    l = 0;
    for (const auto& e : doc) {
        double s = 0.0;
        for (std::uint32_t c = 0; c < e.count; ++c, ++l) s += r.weights[l];
        out.words.push_back(e.word);
        out.weights.push_back(s);
    }
    return out;
}

}  // namespace

MutualAttention mutual_attention_weights(const Bow& bow_a, const Bow& bow_b, const Matrix& W,
                                         QueryStrategy strategy) {
    if (bow_a.empty() || bow_b.empty()) throw InvalidArgument("mutual attention needs two nonempty documents");
    return {attend(bow_a, document_query(bow_b, W, strategy), W),
            attend(bow_b, document_query(bow_a, W, strategy), W)};
}

}  // namespace gvnr
