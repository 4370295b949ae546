#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "gvnr/matrix.hpp"
#include "gvnr/random.hpp"
#include "gvnr/walk_cooc.hpp"

namespace gvnr {

enum class RepresentationMode { u_only, sum, concat };
enum class Optimizer { adagrad, sgd };

std::string_view to_string(RepresentationMode m);
RepresentationMode parse_representation_mode(std::string_view s);
std::string_view to_string(Optimizer o);
Optimizer parse_optimizer(std::string_view s);

struct GvnrConfig {
    std::size_t d = 100;
    std::uint32_t k = 1;
    std::uint32_t epochs = 20;
    double learning_rate = 0.05;
    double x_min = 1.0;
    std::uint64_t seed = 42;
    RepresentationMode representation_mode = RepresentationMode::concat;
    Optimizer optimizer = Optimizer::adagrad;
    // Reconstruction target used for sampled zero coefficients.
    double zero_target = 0.0;

    void validate() const;
};

/// Center embeddings U, context embeddings V and their biases.
struct GvnrModel {
    Matrix U;
    Matrix V;
    std::vector<double> b_u;
    std::vector<double> b_v;

    std::size_t n() const noexcept { return U.rows(); }
    std::size_t d() const noexcept { return U.cols(); }

    friend bool operator==(const GvnrModel&, const GvnrModel&) = default;
};

/// Sampled zero coefficients: for each row i, the sorted columns j (j != i,
/// x_ij = 0) selected for this pass.
struct ZeroMask {
    std::vector<std::vector<NodeIndex>> rows;

    std::size_t size() const noexcept;
};

/// Inclusion probability for a zero cell of a row with `row_distinct` distinct
/// co-occurring nodes: k * n_i / (n - n_i), clamped to 1.
double zero_inclusion_probability(std::size_t n, std::size_t row_distinct, std::uint32_t k);

/// Draws the Bernoulli selector for every zero cell off the diagonal. Uses
/// geometric skips, so the cost is proportional to the number of inclusions.
ZeroMask sample_zero_coefficients(const CoocMatrix& x, std::uint32_t k, Rng& rng);

/// Sum over selected cells of (u_i.v_j + b_u[i] + b_v[j] - target_ij)^2,
/// target being log x_ij on positive cells and `zero_target` on masked zeros.
double objective_value(const GvnrModel& m, const CoocMatrix& x, const ZeroMask& mask,
                       double zero_target = 0.0);

struct GvnrGradients {
    Matrix U;
    Matrix V;
    std::vector<double> b_u;
    std::vector<double> b_v;
};

/// Exact gradient of objective_value.
GvnrGradients objective_gradients(const GvnrModel& m, const CoocMatrix& x, const ZeroMask& mask,
                                  double zero_target = 0.0);

/// Per-epoch diagnostics filled in by the trainers.
struct TrainingLog {
    std::vector<double> epoch_mean_loss;
    std::vector<std::size_t> epoch_coefficients;
};

/// Uniform init in [-0.5/d, 0.5/d] for U and V, zero biases.
GvnrModel init_gvnr_model(std::size_t n, std::size_t d, std::uint64_t seed);

/// Fits U, V, b_u, b_v by stochastic updates. Each epoch draws a fresh zero
/// mask, shuffles positive and sampled cells together, and takes one step per
/// cell. Entries below cfg.x_min are dropped first. Single-threaded and
/// bitwise reproducible from cfg.seed.
GvnrModel train_gvnr(const CoocMatrix& x, const GvnrConfig& cfg, TrainingLog* log = nullptr);

/// u_i, u_i + v_i or [u_i ; v_i].
std::vector<double> node_representation(const GvnrModel& m, NodeIndex i, RepresentationMode mode);

/// node_representation for every node, one row each.
Matrix node_representations(const GvnrModel& m, RepresentationMode mode);

}  // namespace gvnr
