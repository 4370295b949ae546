#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "gvnr/dataset.hpp"

namespace gvnr {

struct WalkConfig {
    std::uint32_t walks_per_node = 80;
    std::uint32_t walk_length = 40;
    std::uint32_t window = 5;
    std::uint64_t seed = 42;
    // Off by default: every pair inside the window counts 1. When on, a pair
    // at offset o counts 1/o.
    bool distance_weighting = false;

    /// Throws InvalidArgument unless all fields are positive and window < walk_length.
    void validate() const;
};

using Walk = std::vector<NodeIndex>;

/// Truncated uniform random walks. Pass p visits every start node once in an
/// order shuffled by (seed, p); the walk for (start, p) draws from its own
/// stream derived from (seed, start, p), so the output does not depend on
/// `threads`. Walks are returned pass-major in visiting order.
std::vector<Walk> generate_walks(const Adjacency& adj, const WalkConfig& cfg, unsigned threads = 1);
std::vector<Walk> generate_walks(const Dataset& d, const WalkConfig& cfg, unsigned threads = 1);

/// Symmetric sparse co-occurrence counts with a zero diagonal, stored as CSR
/// holding both triangles. Every stored value is strictly positive.
class CoocMatrix {
public:
    struct Triplet {
        NodeIndex i;
        NodeIndex j;
        double x;
    };

    CoocMatrix() = default;

    /// Builds from upper-triangle triplets (i < j); duplicates are summed.
    /// Throws InvalidArgument on i >= j, out-of-range indices or x <= 0.
    CoocMatrix(std::size_t n, std::vector<Triplet> upper);

    std::size_t n() const noexcept { return n_; }
    /// Stored entries, counting (i,j) and (j,i) separately.
    std::size_t nnz() const noexcept { return cols_.size(); }
    bool empty() const noexcept { return cols_.empty(); }

    /// n_i: number of distinct j with x_ij > 0.
    std::size_t row_distinct(NodeIndex i) const noexcept { return row_ptr_[i + 1] - row_ptr_[i]; }
    std::span<const NodeIndex> row_cols(NodeIndex i) const noexcept {
        return {cols_.data() + row_ptr_[i], row_distinct(i)};
    }
    std::span<const double> row_values(NodeIndex i) const noexcept {
        return {vals_.data() + row_ptr_[i], row_distinct(i)};
    }

    /// x_ij, 0 when not stored.
    double at(NodeIndex i, NodeIndex j) const noexcept;

    double total() const noexcept;

    /// Entries with i < j.
    std::vector<Triplet> upper_triplets() const;

    friend bool operator==(const CoocMatrix&, const CoocMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<NodeIndex> cols_;
    std::vector<double> vals_;
};

/// Slides a window of `window` positions over every walk and adds each pair
/// (walk[p], walk[p+o]), 1 <= o <= window, to both x_ab and x_ba. Pairs of a
/// node with itself are skipped. Throws InvalidArgument on an empty walk set.
CoocMatrix count_cooccurrences(std::span<const Walk> walks, std::size_t n, std::uint32_t window,
                               bool distance_weighting = false);

/// Same, with n = 1 + the largest index seen.
CoocMatrix count_cooccurrences(std::span<const Walk> walks, std::uint32_t window);

/// Keeps entries with x_ij >= x_min.
CoocMatrix filter_min_count(const CoocMatrix& x, double x_min);

/// Text triple format: first line `<n>`, then `i j x_ij` for i < j.
void write_cooc(const CoocMatrix& x, std::ostream& out);
CoocMatrix read_cooc(std::istream& in);

}  // namespace gvnr
