#include "run_config.hpp"

#include <cmath>
#include <sstream>

#include "gvnr/error.hpp"

namespace gvnr::cli {

std::string RunConfig::content_path() const {
    if (!dataset_content.empty()) return dataset_content;
    return dataset.empty() ? std::string{} : dataset + ".content";
}

std::string RunConfig::cites_path() const {
    if (!dataset_cites.empty()) return dataset_cites;
    return dataset.empty() ? std::string{} : dataset + ".cites";
}

std::string RunConfig::effective_mode() const {
    if (!mode.empty()) return mode;
    return variant == "gvnr" ? "concat" : "full";
}

nlohmann::json RunConfig::to_json() const {
    return {
        {"command", command},
        {"protocol", protocol},
        {"dataset", dataset},
        {"dataset_content", content_path()},
        {"dataset_cites", cites_path()},
        {"binary_flags", binary_flags},
        {"variant", variant},
        {"mode", effective_mode()},
        {"walks", walk.walks_per_node},
        {"walk_length", walk.walk_length},
        {"window", walk.window},
        {"distance_weighting", walk.distance_weighting},
        {"dim", gvnr.d},
        {"k", gvnr.k},
        {"epochs", gvnr.epochs},
        {"lr", gvnr.learning_rate},
        {"x_min", gvnr.x_min},
        {"optimizer", to_string(gvnr.optimizer)},
        {"zero_target", gvnr.zero_target},
        {"seed", gvnr.seed},
        {"fracs", fracs},
        {"repeats", repeats},
        {"l2", l2},
        {"test_frac", test_frac},
        {"scorer", scorer},
        {"unseen_nodes", unseen_nodes},
        {"hidden_frac", hidden_frac},
        {"model", model},
        {"docs", docs},
        {"vocab", vocab},
        {"pairs", pairs},
        {"max_pairs", max_pairs},
        {"query", query},
        {"threads", threads},
        {"out", out},
        {"cache_dir", cache_dir},
        {"no_cache", no_cache},
    };
}

void RunConfig::merge_json(const nlohmann::json& in) {
    const nlohmann::json& j = in.contains("config") && in["config"].is_object() ? in["config"] : in;
    auto get = [&j](const char* key, auto& field) {
        if (j.contains(key) && !j[key].is_null()) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("command", command);
    get("protocol", protocol);
    get("dataset", dataset);
    get("dataset_content", dataset_content);
    get("dataset_cites", dataset_cites);
    get("binary_flags", binary_flags);
    get("variant", variant);
    get("mode", mode);
    get("walks", walk.walks_per_node);
    get("walk_length", walk.walk_length);
    get("window", walk.window);
    get("distance_weighting", walk.distance_weighting);
    get("dim", gvnr.d);
    get("k", gvnr.k);
    get("epochs", gvnr.epochs);
    get("lr", gvnr.learning_rate);
    get("x_min", gvnr.x_min);
    if (j.contains("optimizer")) gvnr.optimizer = parse_optimizer(j["optimizer"].get<std::string>());
    get("zero_target", gvnr.zero_target);
    get("seed", gvnr.seed);
    get("fracs", fracs);
    get("repeats", repeats);
    get("l2", l2);
    get("test_frac", test_frac);
    get("scorer", scorer);
    get("unseen_nodes", unseen_nodes);
    get("hidden_frac", hidden_frac);
    get("model", model);
    get("docs", docs);
    get("vocab", vocab);
    get("pairs", pairs);
    get("max_pairs", max_pairs);
    get("query", query);
    get("threads", threads);
    get("out", out);
    get("cache_dir", cache_dir);
    get("no_cache", no_cache);
    walk.seed = gvnr.seed;
}

std::vector<double> parse_fractions(const std::string& s) {
    std::vector<double> out;
    if (s.empty()) return out;
    auto range = s.find("..");
    if (range != std::string::npos) {
        double step = 0.1;
        std::string hi_part = s.substr(range + 2);
        if (auto colon = hi_part.find(':'); colon != std::string::npos) {
            step = std::stod(hi_part.substr(colon + 1));
            hi_part = hi_part.substr(0, colon);
        }
        const double lo = std::stod(s.substr(0, range)), hi = std::stod(hi_part);
        if (!(step > 0.0) || hi < lo) throw InvalidArgument("bad fraction range '" + s + "'");
        const long first = std::lround(lo / step), last = std::lround(hi / step);
        for (long k = first; k <= last; ++k) out.push_back(static_cast<double>(k) * step);
        // Snap to the printed decimal so 0.30000000000000004 becomes 0.3.
        for (double& f : out) f = std::round(f * 1e9) / 1e9;
        return out;
    }
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

}  // namespace gvnr::cli
