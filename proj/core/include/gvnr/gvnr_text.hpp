#pragma once

#include <string_view>
#include <vector>

#include "gvnr/dataset.hpp"
#include "gvnr/gvnr_model.hpp"

namespace gvnr {

enum class TextMode { text_only, full };

std::string_view to_string(TextMode m);
TextMode parse_text_mode(std::string_view s);

/// GVNR-t parameters. The context vector of node j is not free: it is the
/// token-weighted mean of its words' rows of W. Nodes with empty documents
/// share the learned `fallback` context vector.
struct GvnrTextModel {
    Matrix U;
    Matrix W;
    std::vector<double> b_u;
    std::vector<double> b_v;
    std::vector<double> fallback;
    std::vector<Bow> bows;  // training documents, one per node

    std::size_t n() const noexcept { return U.rows(); }
    std::size_t d() const noexcept { return U.cols(); }
    std::size_t vocab_size() const noexcept { return W.rows(); }

    friend bool operator==(const GvnrTextModel&, const GvnrTextModel&) = default;
};

/// doc W / |doc|_1. Throws InvalidArgument on an empty document or a word
/// index outside W.
std::vector<double> doc_context_vector(const Bow& bow, const Matrix& W);

/// Context vector used for training node j: doc_context_vector, or the
/// fallback vector when the document is empty.
std::vector<double> context_vector(const GvnrTextModel& m, NodeIndex j);

/// Objective of the text variant, same selector and targets as the plain one.
double text_objective_value(const GvnrTextModel& m, const CoocMatrix& x, const ZeroMask& mask,
                            double zero_target = 0.0);

struct GvnrTextGradients {
    Matrix U;
    Matrix W;
    std::vector<double> b_u;
    std::vector<double> b_v;
    std::vector<double> fallback;
};

/// Exact gradient; dL/dv_j is spread over word rows with weights c_jw/|doc_j|_1.
GvnrTextGradients text_objective_gradients(const GvnrTextModel& m, const CoocMatrix& x,
                                           const ZeroMask& mask, double zero_target = 0.0);

GvnrTextModel init_gvnr_text_model(std::vector<Bow> bows, std::size_t vocab_size, std::size_t d,
                                   std::uint64_t seed);

/// Trains GVNR-t from scratch. `bows[j]` is the document of node j and
/// `vocab_size` the number of rows of W. Each epoch visits contexts in a
/// shuffled order; for a context j its vector is computed once, every
/// selected cell (i, j) updates u_i and the biases, and the accumulated
/// gradient of v_j is pushed to the word rows afterwards.
GvnrTextModel train_gvnr_t(const CoocMatrix& x, const std::vector<Bow>& bows, std::size_t vocab_size,
                           const GvnrConfig& cfg, TrainingLog* log = nullptr);

/// Embedding of an arbitrary document from text alone.
std::vector<double> infer_document(const GvnrTextModel& m, const Bow& bow);

/// text_only -> v_i; full -> [u_i ; v_i].
std::vector<double> text_representation(const GvnrTextModel& m, NodeIndex i, TextMode mode);

Matrix text_representations(const GvnrTextModel& m, TextMode mode);

}  // namespace gvnr
