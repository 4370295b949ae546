#pragma once

#include <cstdint>

#include "gvnr/dataset.hpp"

namespace gvnr {

/// Stochastic block model with `blocks` equal blocks: each pair inside a
/// block is linked with probability p_in, across blocks with p_out. Labels
/// are block ids; every node carries a one-token document naming its block.
Dataset planted_partition(std::size_t n, std::size_t blocks, double p_in, double p_out, std::uint64_t seed);

struct TextNetworkSpec {
    std::size_t nodes_per_class = 60;
    std::size_t classes = 3;
    double p_in = 0.08;
    double p_out = 0.005;
    std::size_t topic_words = 30;   // words owned by each class
    std::size_t shared_words = 60;  // background words
    std::size_t words_per_doc = 12;
    double topic_share = 0.6;       // probability that a token comes from the class topic
    std::uint64_t seed = 7;
};

/// Planted-partition graph whose nodes carry class-dependent bag-of-words
/// documents, a small stand-in for a citation network with abstracts.
Dataset synthetic_text_network(const TextNetworkSpec& spec);

}  // namespace gvnr
