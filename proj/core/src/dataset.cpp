#include "gvnr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <string_view>
#include <unordered_map>

#include "gvnr/error.hpp"

namespace gvnr {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

bool parse_count(std::string_view s, std::uint32_t& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::uint64_t token_count(const Bow& bow) noexcept {
    std::uint64_t total = 0;
    for (const auto& e : bow) total += e.count;
    return total;
}

Bow make_bow(std::vector<BowEntry> cells) {
    std::sort(cells.begin(), cells.end(),
              [](const BowEntry& a, const BowEntry& b) { return a.word < b.word; });
    Bow out;
    for (const auto& c : cells) {
        if (c.count == 0) continue;
        if (!out.empty() && out.back().word == c.word)
            out.back().count += c.count;
        else
            out.push_back(c);
    }
    return out;
}

nlohmann::json LoadReport::to_json() const {
    return {{"nodes", nodes},
            {"edges_kept", edges_kept},
            {"edges_dropped_unknown", edges_dropped_unknown},
            {"self_loops_dropped", self_loops_dropped},
            {"duplicate_links", duplicate_links},
            {"vocab_size", vocab_size},
            {"num_classes", num_classes},
            {"isolated_nodes", isolated_nodes},
            {"empty_documents", empty_documents}};
}

void check_adjacency(const Adjacency& adj) {
    const std::size_t n = adj.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = adj[i];
        for (std::size_t k = 0; k < row.size(); ++k) {
            NodeIndex j = row[k];
            if (j >= n) throw InvalidArgument("adjacency: neighbor index out of range");
            if (j == i) throw InvalidArgument("adjacency: self-loop at node " + std::to_string(i));
            if (k > 0 && row[k - 1] >= j)
                throw InvalidArgument("adjacency: neighbor list of node " + std::to_string(i) +
                                      " is not strictly increasing");
            if (!std::binary_search(adj[j].begin(), adj[j].end(), static_cast<NodeIndex>(i)))
                throw InvalidArgument("adjacency: edge " + std::to_string(i) + "-" +
                                      std::to_string(j) + " is not symmetric");
        }
    }
}

Adjacency adjacency_from_edges(std::size_t n,
                               std::span<const std::pair<NodeIndex, NodeIndex>> edges) {
    Adjacency adj(n);
    for (auto [a, b] : edges) {
        if (a >= n || b >= n) throw InvalidArgument("edge endpoint out of range");
        if (a == b) continue;
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& row : adj) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return adj;
}

std::vector<std::pair<NodeIndex, NodeIndex>> edge_list(const Adjacency& adj) {
    std::vector<std::pair<NodeIndex, NodeIndex>> out;
    for (NodeIndex i = 0; i < adj.size(); ++i)
        for (NodeIndex j : adj[i])
            if (i < j) out.emplace_back(i, j);
    return out;
}

Dataset::Dataset(std::vector<std::string> node_ids, Adjacency adjacency, std::vector<Bow> bows,
                 std::vector<int> labels, std::size_t vocab_size,
                 std::vector<std::string> class_names)
    : node_ids_(std::move(node_ids)),
      adjacency_(std::move(adjacency)),
      bows_(std::move(bows)),
      labels_(std::move(labels)),
      vocab_size_(vocab_size),
      class_names_(std::move(class_names)) {
    const std::size_t n = node_ids_.size();
    if (adjacency_.size() != n || bows_.size() != n || labels_.size() != n)
        throw InvalidArgument("dataset: per-node arrays have inconsistent sizes");
    if (vocab_size_ == 0) throw InvalidArgument("dataset: vocabulary size must be positive");
    if (class_names_.empty()) throw InvalidArgument("dataset: at least one class is required");
    check_adjacency(adjacency_);
    for (std::size_t i = 0; i < n; ++i) {
        if (labels_[i] < 0 || static_cast<std::size_t>(labels_[i]) >= class_names_.size())
            throw InvalidArgument("dataset: label out of range at node " + node_ids_[i]);
        const Bow& bow = bows_[i];
        for (std::size_t k = 0; k < bow.size(); ++k) {
            if (bow[k].word >= vocab_size_)
                throw InvalidArgument("dataset: word index out of range at node " + node_ids_[i]);
            if (bow[k].count == 0 || (k > 0 && bow[k - 1].word >= bow[k].word))
                throw InvalidArgument("dataset: malformed bag-of-words at node " + node_ids_[i]);
        }
        num_edges_ += adjacency_[i].size();
    }
    num_edges_ /= 2;
}

std::int64_t Dataset::index_of(const std::string& id) const {
    auto it = std::find(node_ids_.begin(), node_ids_.end(), id);
    return it == node_ids_.end() ? -1 : static_cast<std::int64_t>(it - node_ids_.begin());
}

std::uint64_t Dataset::fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix_bytes = [&h](const void* p, std::size_t len) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    };
    auto mix = [&](std::uint64_t v) { mix_bytes(&v, sizeof v); };
    mix(num_nodes());
    mix(vocab_size_);
    for (const auto& c : class_names_) {
        mix(c.size());
        mix_bytes(c.data(), c.size());
    }
    for (std::size_t i = 0; i < num_nodes(); ++i) {
        mix(node_ids_[i].size());
        mix_bytes(node_ids_[i].data(), node_ids_[i].size());
        mix(static_cast<std::uint64_t>(labels_[i]));
        mix(adjacency_[i].size());
        for (NodeIndex j : adjacency_[i]) mix(j);
        mix(bows_[i].size());
        for (const auto& e : bows_[i]) {
            mix(e.word);
            mix(e.count);
        }
    }
    return h;
}

Dataset load_cora_format(std::istream& content, std::istream& cites, LoadReport* report,
                         const LoadOptions& options) {
    std::vector<std::string> ids;
    std::vector<Bow> bows;
    std::vector<int> labels;
    std::vector<std::string> class_names;
    std::unordered_map<std::string, NodeIndex> id_index;
    std::unordered_map<std::string, int> class_index;
    std::size_t vocab = 0;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(content, line)) {
        ++lineno;
        auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (fields.size() < 3)
            throw ParseError(lineno, "content line needs an id, at least one word column and a class");
        if (vocab == 0) vocab = fields.size() - 2;
        if (fields.size() != vocab + 2)
            throw ParseError(lineno, "expected " + std::to_string(vocab + 2) + " fields, found " +
                                         std::to_string(fields.size()));
        std::string id(fields.front());
        if (id_index.count(id)) throw ParseError(lineno, "duplicate node id '" + id + "'");

        Bow bow;
        for (std::size_t w = 0; w < vocab; ++w) {
            std::string_view f = fields[w + 1];
            std::uint32_t c = 0;
            if (options.binary_flags) {
                if (f == "1")
                    c = 1;
                else if (f != "0")
                    throw ParseError(lineno, "non-binary word flag '" + std::string(f) + "'");
            } else if (!parse_count(f, c)) {
                throw ParseError(lineno, "word count '" + std::string(f) + "' is not a nonnegative integer");
            }
            if (c > 0) bow.push_back({static_cast<std::uint32_t>(w), c});
        }

        std::string cls(fields.back());
        auto [it, inserted] = class_index.emplace(cls, static_cast<int>(class_names.size()));
        if (inserted) class_names.push_back(cls);

        id_index.emplace(id, static_cast<NodeIndex>(ids.size()));
        ids.push_back(std::move(id));
        bows.push_back(std::move(bow));
        labels.push_back(it->second);
    }
    if (ids.empty()) throw InvalidArgument("content file contains no nodes");

    LoadReport rep;
    std::set<std::pair<NodeIndex, NodeIndex>> edges;
    lineno = 0;
    while (std::getline(cites, line)) {
        ++lineno;
        auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (fields.size() != 2)
            throw ParseError(lineno, "cites line needs exactly two ids, found " +
                                         std::to_string(fields.size()) + " fields");
        auto a = id_index.find(std::string(fields[0]));
        auto b = id_index.find(std::string(fields[1]));
        if (a == id_index.end() || b == id_index.end()) {
            ++rep.edges_dropped_unknown;
            continue;
        }
        if (a->second == b->second) {
            ++rep.self_loops_dropped;
            continue;
        }
        auto key = std::minmax(a->second, b->second);
        if (!edges.emplace(key.first, key.second).second) ++rep.duplicate_links;
    }
    std::vector<std::pair<NodeIndex, NodeIndex>> edge_vec(edges.begin(), edges.end());
    Adjacency adj = adjacency_from_edges(ids.size(), edge_vec);

    Dataset d(std::move(ids), std::move(adj), std::move(bows), std::move(labels), vocab,
              std::move(class_names));
    if (report) {
        rep.nodes = d.num_nodes();
        rep.edges_kept = d.num_edges();
        rep.vocab_size = d.vocab_size();
        rep.num_classes = d.num_classes();
        for (std::size_t i = 0; i < d.num_nodes(); ++i) {
            if (d.adjacency()[i].empty()) ++rep.isolated_nodes;
            if (d.bows()[i].empty()) ++rep.empty_documents;
        }
        *report = rep;
    }
    return d;
}

Dataset load_cora_files(const std::string& content_path, const std::string& cites_path,
                        LoadReport* report, const LoadOptions& options) {
    std::ifstream content(content_path);
    if (!content) throw IoError("cannot open content file: " + content_path);
    std::ifstream cites(cites_path);
    if (!cites) throw IoError("cannot open cites file: " + cites_path);
    return load_cora_format(content, cites, report, options);
}

void write_cora_format(const Dataset& d, std::ostream& content, std::ostream& cites) {
    std::string line;
    for (std::size_t i = 0; i < d.num_nodes(); ++i) {
        std::vector<std::uint32_t> dense(d.vocab_size(), 0);
        for (const auto& e : d.bows()[i]) dense[e.word] = e.count;
        line = d.node_ids()[i];
        for (auto c : dense) {
            line += '\t';
            line += std::to_string(c);
        }
        line += '\t';
        line += d.class_names()[d.labels()[i]];
        content << line << '\n';
    }
    for (auto [i, j] : edge_list(d.adjacency()))
        cites << d.node_ids()[i] << '\t' << d.node_ids()[j] << '\n';
}

std::pair<Dataset, std::vector<std::int64_t>> induced_subgraph(const Dataset& d,
                                                               std::span<const NodeIndex> keep) {
    if (keep.empty()) throw InvalidArgument("induced_subgraph: keep set is empty");
    const std::size_t n = d.num_nodes();
    std::vector<char> kept(n, 0);
    for (NodeIndex i : keep) {
        if (i >= n) throw InvalidArgument("induced_subgraph: node index out of range");
        kept[i] = 1;
    }
    std::vector<std::int64_t> map(n, -1);
    std::vector<NodeIndex> order;
    for (NodeIndex i = 0; i < n; ++i)
        if (kept[i]) {
            map[i] = static_cast<std::int64_t>(order.size());
            order.push_back(i);
        }

    std::vector<std::string> ids;
    Adjacency adj;
    std::vector<Bow> bows;
    std::vector<int> labels;
    for (NodeIndex old : order) {
        ids.push_back(d.node_ids()[old]);
        bows.push_back(d.bows()[old]);
        labels.push_back(d.labels()[old]);
        std::vector<NodeIndex> row;
        for (NodeIndex j : d.neighbors(old))
            if (map[j] >= 0) row.push_back(static_cast<NodeIndex>(map[j]));
        adj.push_back(std::move(row));
    }
    return {Dataset(std::move(ids), std::move(adj), std::move(bows), std::move(labels),
                    d.vocab_size(), d.class_names()),
            std::move(map)};
}

}  // namespace gvnr
