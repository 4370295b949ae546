#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gvnr/gvnr_model.hpp"
#include "gvnr/walk_cooc.hpp"

namespace gvnr::cli {

/// Everything a command needs. Mirrors the command-line flags one to one and
/// round-trips through the JSON manifest, so a manifest can be replayed with
/// `--config`.
struct RunConfig {
    std::string command;   // train | infer | evaluate | attend
    std::string protocol;  // classify | unseen | linkpred (evaluate only)

    std::string dataset;  // prefix: <dataset>.content / <dataset>.cites
    std::string dataset_content;
    std::string dataset_cites;
    bool binary_flags = true;

    std::string variant = "gvnr_t";  // gvnr | gvnr_t
    std::string mode;                // empty: concat for gvnr, full for gvnr_t

    WalkConfig walk;
    GvnrConfig gvnr;

    std::string fracs;  // "0.1..0.5", "0.1,0.3" or a single value; empty = protocol default
    std::size_t repeats = 10;
    double l2 = 1.0;
    double test_frac = 0.2;
    std::string scorer = "dot_bias";
    bool unseen_nodes = false;
    double hidden_frac = 0.3;

    std::string model;  // directory written by `train`
    std::string docs;   // content-format file for `infer`
    std::string vocab;  // optional token list, one per line
    std::string pairs;  // "idA:idB,idC:idD" for `attend`
    std::size_t max_pairs = 5;
    std::string query = "mean";

    unsigned threads = 1;
    std::string out = "out";
    std::string cache_dir;  // empty: <out>/cache
    bool no_cache = false;

    std::string content_path() const;
    std::string cites_path() const;
    std::string effective_mode() const;

    nlohmann::json to_json() const;
    /// Fills fields present in `j`; a manifest (object with a "config" key) is accepted too.
    void merge_json(const nlohmann::json& j);
};

/// Parses "a..b" (step 0.1), "a,b,c" or "a". Empty input gives an empty list.
std::vector<double> parse_fractions(const std::string& s);

}  // namespace gvnr::cli
