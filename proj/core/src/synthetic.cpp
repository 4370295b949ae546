#include "gvnr/synthetic.hpp"

#include "gvnr/error.hpp"
#include "gvnr/random.hpp"

namespace gvnr {

namespace {

std::vector<std::pair<NodeIndex, NodeIndex>> sbm_edges(const std::vector<int>& block, double p_in,
                                                       double p_out, Rng& rng) {
    std::vector<std::pair<NodeIndex, NodeIndex>> edges;
    const std::size_t n = block.size();
    for (NodeIndex i = 0; i < n; ++i)
        for (NodeIndex j = i + 1; j < n; ++j)
            if (rng.bernoulli(block[i] == block[j] ? p_in : p_out)) edges.emplace_back(i, j);
    return edges;
}

std::vector<std::string> class_names(std::size_t k) {
    std::vector<std::string> out;
    for (std::size_t c = 0; c < k; ++c) out.push_back("class_" + std::to_string(c));
    return out;
}

}  // namespace

Dataset planted_partition(std::size_t n, std::size_t blocks, double p_in, double p_out, std::uint64_t seed) {
    if (n == 0 || blocks == 0 || blocks > n) throw InvalidArgument("planted_partition: bad sizes");
    if (!(p_in >= 0 && p_in <= 1 && p_out >= 0 && p_out <= 1))
        throw InvalidArgument("planted_partition: probabilities must lie in [0, 1]");
    std::vector<int> block(n);
    for (std::size_t i = 0; i < n; ++i) block[i] = static_cast<int>(i * blocks / n);
    Rng rng(seed);
    auto edges = sbm_edges(block, p_in, p_out, rng);

    std::vector<std::string> ids;
    std::vector<Bow> bows;
    for (std::size_t i = 0; i < n; ++i) {
        ids.push_back("n" + std::to_string(i));
        bows.push_back({{static_cast<std::uint32_t>(block[i]), 1}});
    }
    return Dataset(std::move(ids), adjacency_from_edges(n, edges), std::move(bows), block, blocks,
                   class_names(blocks));
}

Dataset synthetic_text_network(const TextNetworkSpec& s) {
    if (s.classes == 0 || s.nodes_per_class == 0 || s.words_per_doc == 0 || s.topic_words == 0)
        throw InvalidArgument("synthetic_text_network: sizes must be positive");
    const std::size_t n = s.classes * s.nodes_per_class;
    const std::size_t vocab = s.classes * s.topic_words + s.shared_words;
    std::vector<int> label(n);
    for (std::size_t i = 0; i < n; ++i) label[i] = static_cast<int>(i / s.nodes_per_class);

    Rng rng(s.seed);
    auto edges = sbm_edges(label, s.p_in, s.p_out, rng);

    std::vector<std::string> ids;
    std::vector<Bow> bows;
    for (std::size_t i = 0; i < n; ++i) {
        ids.push_back("d" + std::to_string(i));
        std::vector<BowEntry> cells;
        for (std::size_t t = 0; t < s.words_per_doc; ++t) {
            std::uint32_t w;
            if (s.shared_words == 0 || rng.bernoulli(s.topic_share))
                w = static_cast<std::uint32_t>(label[i] * s.topic_words + rng.below(s.topic_words));
            else
                w = static_cast<std::uint32_t>(s.classes * s.topic_words + rng.below(s.shared_words));
            cells.push_back({w, 1});
        }
        bows.push_back(make_bow(std::move(cells)));
    }
    return Dataset(std::move(ids), adjacency_from_edges(n, edges), std::move(bows), label, vocab,
                   class_names(s.classes));
}

}  // namespace gvnr
