#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace gvnr {

using NodeIndex = std::uint32_t;
using Adjacency = std::vector<std::vector<NodeIndex>>;

/// One (word, count) cell of a bag-of-words vector.
struct BowEntry {
    std::uint32_t word;
    std::uint32_t count;

    friend bool operator==(const BowEntry&, const BowEntry&) = default;
};

/// Sparse bag-of-words, sorted by word index with positive counts only.
using Bow = std::vector<BowEntry>;

/// Total token count |doc|_1.
std::uint64_t token_count(const Bow& bow) noexcept;

/// Builds a sorted Bow from (word, count) pairs, merging duplicates and
/// dropping zero counts.
Bow make_bow(std::vector<BowEntry> cells);

/// Summary of what a load kept and dropped.
struct LoadReport {
    std::size_t nodes = 0;
    std::size_t edges_kept = 0;          // undirected, after symmetrization
    std::size_t edges_dropped_unknown = 0;
    std::size_t self_loops_dropped = 0;
    std::size_t duplicate_links = 0;     // citation lines collapsing onto an existing edge
    std::size_t vocab_size = 0;
    std::size_t num_classes = 0;
    std::size_t isolated_nodes = 0;
    std::size_t empty_documents = 0;

    nlohmann::json to_json() const;
};

/// Text-attributed citation graph. Immutable once constructed; the
/// constructor checks every structural invariant.
class Dataset {
public:
    Dataset(std::vector<std::string> node_ids, Adjacency adjacency, std::vector<Bow> bows,
            std::vector<int> labels, std::size_t vocab_size, std::vector<std::string> class_names);

    std::size_t num_nodes() const noexcept { return node_ids_.size(); }
    std::size_t vocab_size() const noexcept { return vocab_size_; }
    std::size_t num_classes() const noexcept { return class_names_.size(); }
    std::size_t num_edges() const noexcept { return num_edges_; }

    const std::vector<std::string>& node_ids() const noexcept { return node_ids_; }
    const Adjacency& adjacency() const noexcept { return adjacency_; }
    const std::vector<NodeIndex>& neighbors(NodeIndex i) const { return adjacency_[i]; }
    const std::vector<Bow>& bows() const noexcept { return bows_; }
    const std::vector<int>& labels() const noexcept { return labels_; }
    const std::vector<std::string>& class_names() const noexcept { return class_names_; }

    /// Index of an external id, or -1.
    std::int64_t index_of(const std::string& id) const;

    /// Stable 64-bit content hash (FNV-1a over a canonical encoding).
    std::uint64_t fingerprint() const;

    friend bool operator==(const Dataset& a, const Dataset& b) {
        return a.node_ids_ == b.node_ids_ && a.adjacency_ == b.adjacency_ && a.bows_ == b.bows_ &&
               a.labels_ == b.labels_ && a.vocab_size_ == b.vocab_size_ &&
               a.class_names_ == b.class_names_;
    }

private:
    std::vector<std::string> node_ids_;
    Adjacency adjacency_;
    std::vector<Bow> bows_;
    std::vector<int> labels_;
    std::size_t vocab_size_;
    std::vector<std::string> class_names_;
    std::size_t num_edges_ = 0;
};

struct LoadOptions {
    // Cora/CiteSeer word columns are 0/1 flags. Turn off for term-frequency corpora.
    bool binary_flags = true;
};

/// Reads the `.content` / `.cites` pair. Content lines are
/// `<id> <m word columns> <class>`, cites lines are `<cited> <citing>`;
/// tabs and spaces are both accepted as separators. Nodes are indexed in
/// content-file order and classes in first-appearance order. Citations are
/// symmetrized; self-citations and citations naming unknown ids are dropped
/// and counted in `report`.
Dataset load_cora_format(std::istream& content, std::istream& cites, LoadReport* report = nullptr,
                         const LoadOptions& options = {});

/// Convenience overload opening `<prefix>.content` and `<prefix>.cites`
/// style paths. Throws IoError naming the missing path.
Dataset load_cora_files(const std::string& content_path, const std::string& cites_path,
                        LoadReport* report = nullptr, const LoadOptions& options = {});

/// Writes the dataset back in the same format. Each undirected edge is
/// emitted once as `<id_i> <id_j>` with i < j.
void write_cora_format(const Dataset& d, std::ostream& content, std::ostream& cites);

/// Restriction of `d` to the nodes in `keep`; edges survive only when both
/// endpoints do. Kept nodes are renumbered in ascending original order.
/// The second element maps old index -> new index (-1 when dropped).
std::pair<Dataset, std::vector<std::int64_t>> induced_subgraph(const Dataset& d,
                                                               std::span<const NodeIndex> keep);

/// Throws InvalidArgument unless `adj` is symmetric, loop-free and free of
/// duplicate neighbors.
void check_adjacency(const Adjacency& adj);

/// Symmetric, deduplicated adjacency from an undirected edge list.
Adjacency adjacency_from_edges(std::size_t n, std::span<const std::pair<NodeIndex, NodeIndex>> edges);

/// Each undirected edge once, as (i, j) with i < j, in lexicographic order.
std::vector<std::pair<NodeIndex, NodeIndex>> edge_list(const Adjacency& adj);

}  // namespace gvnr
