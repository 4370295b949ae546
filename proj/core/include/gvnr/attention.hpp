#pragma once

#include <string_view>
#include <vector>

#include "gvnr/dataset.hpp"
#include "gvnr/matrix.hpp"

namespace gvnr {

struct AttentionInput {
    std::vector<double> query;  // d_k
    Matrix keys;                // L x d_k
    Matrix values;              // L x d_v
};

struct AttentionResult {
    std::vector<double> weights;  // L, on the simplex
    std::vector<double> output;   // d_v
};

/// softmax(q K^T / sqrt(d_k)) V with max-subtracted logits. Throws
/// InvalidArgument when L = 0, shapes disagree or inputs are not finite.
AttentionResult scaled_dot_product_attention(const AttentionInput& in);

/// Attention weights only, with the temperature dimension given explicitly:
/// the query is divided by sqrt(scale_dim) before the dot products.
std::vector<double> attention_weights(const std::vector<double>& query, const Matrix& keys,
                                      double scale_dim);

enum class QueryStrategy { mean, max_pool };
enum class WeightFunction { softmax };

std::string_view to_string(QueryStrategy q);
QueryStrategy parse_query_strategy(std::string_view s);

/// Per-word attention of one document, merged over repeated tokens.
struct WordWeights {
    std::vector<std::uint32_t> words;  // distinct words of the document, ascending
    std::vector<double> weights;       // summed weight of each word's tokens
};

struct MutualAttention {
    WordWeights a;
    WordWeights b;
};

/// Each document attends over its own tokens (keys = values = word rows of
/// W, one row per token), using a query built from the other document.
MutualAttention mutual_attention_weights(const Bow& bow_a, const Bow& bow_b, const Matrix& W,
                                         QueryStrategy strategy = QueryStrategy::mean);

/// Query built from a document: mean or coordinatewise max of its token rows.
std::vector<double> document_query(const Bow& bow, const Matrix& W, QueryStrategy strategy);

}  // namespace gvnr
