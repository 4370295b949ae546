#include "commands.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "gvnr/attention.hpp"
#include "gvnr/dataset.hpp"
#include "gvnr/error.hpp"
#include "gvnr/eval.hpp"
#include "gvnr/gvnr_text.hpp"
#include "gvnr/serialize.hpp"
#include "gvnr/walk_cooc.hpp"

namespace fs = std::filesystem;

namespace gvnr::cli {

namespace {

/// Raised for problems the user fixes on the command line.
class UsageError : public Error {
public:
    using Error::Error;
};

std::string hex64(std::uint64_t v) {
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << v;
    return ss.str();
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw UsageError(std::string("no ") + what + " given");
    if (!fs::is_regular_file(path)) throw IoError(std::string(what) + " not found: " + path);
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot write " + p.string());
    return f;
}

void write_text_file(const fs::path& p, const std::string& content) {
    auto f = open_out(p);
    f << content;
}

Dataset load_dataset(const RunConfig& cfg, LoadReport& report) {
    require_file(cfg.content_path(), "content file");
    require_file(cfg.cites_path(), "cites file");
    return load_cora_files(cfg.content_path(), cfg.cites_path(), &report, LoadOptions{cfg.binary_flags});
}

WalkConfig walk_config(const RunConfig& cfg) {
    WalkConfig w = cfg.walk;
    w.seed = cfg.gvnr.seed;
    return w;
}

PipelineConfig pipeline_config(const RunConfig& cfg) { return {walk_config(cfg), cfg.gvnr}; }

fs::path cache_dir(const RunConfig& cfg) {
    return cfg.cache_dir.empty() ? fs::path(cfg.out) / "cache" : fs::path(cfg.cache_dir);
}

/// Co-occurrence counts for (dataset, walk config), reused from the cache
/// directory when an identical computation was stored before.
CoocMatrix cached_cooc(const Dataset& d, const RunConfig& cfg, std::string& status, std::ostream& log) {
    const WalkConfig w = walk_config(cfg);
    std::ostringstream key;
    key << hex64(d.fingerprint()) << '|' << w.walks_per_node << '|' << w.walk_length << '|' << w.window << '|'
        << w.seed << '|' << w.distance_weighting;
    const fs::path file = cache_dir(cfg) / ("cooc_" + hex64(fnv1a(key.str())) + ".txt");
    if (!cfg.no_cache && fs::is_regular_file(file)) {
        std::ifstream in(file);
        status = "hit";
        log << "co-occurrences: cache hit " << file.string() << '\n';
        return read_cooc(in);
    }
    auto walks = generate_walks(d, w, cfg.threads);
    CoocMatrix x = count_cooccurrences(walks, d.num_nodes(), w.window, w.distance_weighting);
    status = cfg.no_cache ? "disabled" : "miss";
    log << "co-occurrences: " << walks.size() << " walks, " << x.nnz() << " nonzero cells\n";
    if (!cfg.no_cache) {
        fs::create_directories(file.parent_path());
        const fs::path tmp = file.string() + ".tmp";
        {
            auto f = open_out(tmp);
            write_cooc(x, f);
        }
        fs::rename(tmp, file);
    }
    return x;
}

std::vector<std::string> read_vocab(const RunConfig& cfg, std::size_t vocab_size) {
    std::vector<std::string> tokens;
    if (cfg.vocab.empty()) {
        for (std::size_t w = 0; w < vocab_size; ++w) tokens.push_back("w" + std::to_string(w));
        return tokens;
    }
    require_file(cfg.vocab, "vocabulary file");
    std::ifstream in(cfg.vocab);
    for (std::string line; std::getline(in, line);) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) tokens.push_back(line);
    }
    if (tokens.size() != vocab_size)
        throw UsageError("vocabulary file has " + std::to_string(tokens.size()) + " tokens, model has " +
                         std::to_string(vocab_size) + " words");
    return tokens;
}

void check_mode(const RunConfig& cfg) {
    const std::string mode = cfg.effective_mode();
    if (cfg.variant == "gvnr") {
        parse_representation_mode(mode);
    } else if (cfg.variant == "gvnr_t") {
        parse_text_mode(mode);
    } else {
        throw UsageError("unknown variant '" + cfg.variant + "' (expected gvnr or gvnr_t)");
    }
}

nlohmann::json manifest_base(const RunConfig& cfg, const Dataset& d, const LoadReport& rep) {
    return {{"config", cfg.to_json()},
            {"dataset", {{"fingerprint", hex64(d.fingerprint())}, {"load_report", rep.to_json()}}}};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Bow parse_doc_line(const std::vector<std::string>& fields, std::size_t vocab, std::size_t lineno) {
    std::vector<BowEntry> cells;
    for (std::size_t w = 0; w < vocab; ++w) {
        const std::string& f = fields[w + 1];
        std::uint32_t c = 0;
        auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), c);
        if (ec != std::errc{} || ptr != f.data() + f.size())
            throw ParseError(lineno, "word count '" + f + "' is not a nonnegative integer");
        if (c) cells.push_back({static_cast<std::uint32_t>(w), c});
    }
    return make_bow(std::move(cells));
}

}  // namespace

int cmd_train(const RunConfig& cfg, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    check_mode(cfg);
    LoadReport report;
    const Dataset d = load_dataset(cfg, report);
    walk_config(cfg).validate();
    cfg.gvnr.validate();
    const fs::path out(cfg.out);
    fs::create_directories(out);

    std::string cache_status;
    const CoocMatrix x = cached_cooc(d, cfg, cache_status, log);
    TrainingLog tlog;
    std::vector<std::string> outputs{"embeddings.txt", "model.txt"};
    Matrix reps;
    if (cfg.variant == "gvnr") {
        const GvnrModel m = train_gvnr(x, cfg.gvnr, &tlog);
        reps = node_representations(m, parse_representation_mode(cfg.effective_mode()));
        auto f = open_out(out / "model.txt");
        write_model(f, m);
    } else {
        const GvnrTextModel m = train_gvnr_t(x, d.bows(), d.vocab_size(), cfg.gvnr, &tlog);
        reps = text_representations(m, parse_text_mode(cfg.effective_mode()));
        auto f = open_out(out / "model.txt");
        write_model(f, m);
        auto w = open_out(out / "words.txt");
        write_word2vec(w, read_vocab(cfg, d.vocab_size()), m.W);
        outputs.push_back("words.txt");
    }
    {
        auto f = open_out(out / "embeddings.txt");
        write_word2vec(f, d.node_ids(), reps);
    }
    {
        auto f = open_out(out / "ids.txt");
        for (const auto& id : d.node_ids()) f << id << '\n';
        outputs.push_back("ids.txt");
    }
    for (std::size_t e = 0; e < tlog.epoch_mean_loss.size(); ++e)
        log << "epoch " << e + 1 << ": mean loss " << tlog.epoch_mean_loss[e] << " over "
            << tlog.epoch_coefficients[e] << " cells\n";

    nlohmann::json manifest = manifest_base(cfg, d, report);
    manifest["command"] = "train";
    manifest["cooc_cache"] = cache_status;
    manifest["epoch_losses"] = tlog.epoch_mean_loss;
    manifest["outputs"] = outputs;
    manifest["wall_time_seconds"] = seconds_since(t0);
    write_text_file(out / "manifest.json", manifest.dump(2) + "\n");
    write_text_file(out / "load_report.json", report.to_json().dump(2) + "\n");
    log << "wrote " << (out / "embeddings.txt").string() << '\n';
    return kExitOk;
}

int cmd_infer(const RunConfig& cfg, std::ostream& log) {
    if (cfg.model.empty()) throw UsageError("infer needs --model <directory written by train>");
    const fs::path model_file = fs::path(cfg.model) / "model.txt";
    require_file(model_file.string(), "model file");
    require_file(cfg.docs, "documents file");
    std::ifstream mf(model_file);
    const GvnrTextModel m = read_gvnr_text_model(mf);
    const std::size_t vocab = m.vocab_size();

    std::ostringstream buffer;
    std::ifstream docs(cfg.docs);
    std::size_t lineno = 0, count = 0;
    for (std::string line; std::getline(docs, line);) {
        ++lineno;
        std::istringstream ss(line);
        std::vector<std::string> fields;
        for (std::string f; ss >> f;) fields.push_back(std::move(f));
        if (fields.empty()) continue;
        if (fields.size() != vocab + 1 && fields.size() != vocab + 2)
            throw ParseError(lineno, "expected an id and " + std::to_string(vocab) +
                                         " word columns (optionally followed by a class)");
        const Bow bow = parse_doc_line(fields, vocab, lineno);
        if (bow.empty()) throw ParseError(lineno, "document '" + fields[0] + "' is empty");
        buffer << fields[0];
        for (double v : infer_document(m, bow)) buffer << ' ' << format_double(v);
        buffer << '\n';
        ++count;
    }
    if (cfg.out == "-") {
        log << buffer.str();
    } else {
        fs::create_directories(cfg.out);
        write_text_file(fs::path(cfg.out) / "inferred.txt", buffer.str());
        log << "inferred " << count << " documents into " << (fs::path(cfg.out) / "inferred.txt").string() << '\n';
    }
    return kExitOk;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    check_mode(cfg);
    LoadReport report;
    const Dataset d = load_dataset(cfg, report);
    walk_config(cfg).validate();
    cfg.gvnr.validate();
    const fs::path out(cfg.out);
    fs::create_directories(out);
    const PipelineConfig pipeline = pipeline_config(cfg);

    ProtocolOptions opt;
    opt.fractions = parse_fractions(cfg.fracs);
    opt.repeats = cfg.repeats;
    opt.seed = cfg.gvnr.seed;
    opt.classifier.l2 = cfg.l2;
    opt.threads = cfg.threads;

    nlohmann::json manifest = manifest_base(cfg, d, report);
    manifest["command"] = "evaluate " + cfg.protocol;
    EvalReport rep;
    if (cfg.protocol == "classify") {
        std::string cache_status;
        const CoocMatrix x = cached_cooc(d, cfg, cache_status, log);
        manifest["cooc_cache"] = cache_status;
        TrainingLog tlog;
        Matrix reps;
        std::string label;
        if (cfg.variant == "gvnr") {
            reps = node_representations(train_gvnr(x, cfg.gvnr, &tlog),
                                        parse_representation_mode(cfg.effective_mode()));
            std::ostringstream l;
            l << "GVNR (x_min=" << cfg.gvnr.x_min << ")";
            label = l.str();
        } else {
            const TextMode mode = parse_text_mode(cfg.effective_mode());
            reps = text_representations(train_gvnr_t(x, d.bows(), d.vocab_size(), cfg.gvnr, &tlog), mode);
            label = mode == TextMode::full ? "GVNR-t" : "GVNR-t (text only)";
        }
        manifest["epoch_losses"] = tlog.epoch_mean_loss;
        rep = classification_protocol(reps, d.labels(), d.num_classes(), opt);
        rep.row_label = label;
        rep.config["variant"] = cfg.variant;
        rep.config["mode"] = cfg.effective_mode();
        rep.config["pipeline_seed"] = cfg.gvnr.seed;
    } else if (cfg.protocol == "unseen") {
        rep = unseen_document_protocol(d, pipeline, opt);
    } else if (cfg.protocol == "linkpred") {
        if (cfg.unseen_nodes) {
            rep = unseen_link_prediction_protocol(d, pipeline, cfg.hidden_frac, cfg.repeats, cfg.gvnr.seed,
                                                  cfg.threads);
        } else {
            const std::string mode = cfg.variant == "gvnr" ? cfg.effective_mode() : "concat";
            rep = link_prediction_protocol(d.adjacency(), pipeline, cfg.test_frac, parse_link_scorer(cfg.scorer),
                                           parse_representation_mode(mode), cfg.repeats, cfg.gvnr.seed,
                                           cfg.threads);
        }
    } else {
        throw UsageError("unknown protocol '" + cfg.protocol + "' (expected classify, unseen or linkpred)");
    }
    rep.config["isolated_nodes"] = report.isolated_nodes;

    const std::string base = "report_" + cfg.protocol;
    write_text_file(out / (base + ".json"), rep.to_json().dump(2) + "\n");
    write_text_file(out / (base + ".txt"), rep.to_table());
    for (const auto& w : rep.warnings) log << "warning: " << w << '\n';
    log << rep.to_table();
    manifest["outputs"] = {base + ".json", base + ".txt"};
    manifest["wall_time_seconds"] = seconds_since(t0);
    write_text_file(out / "manifest.json", manifest.dump(2) + "\n");
    return kExitOk;
}

int cmd_attend(const RunConfig& cfg, std::ostream& log) {
    if (cfg.model.empty()) throw UsageError("attend needs --model <directory written by train --variant gvnr_t>");
    const fs::path model_file = fs::path(cfg.model) / "model.txt";
    require_file(model_file.string(), "model file");
    LoadReport report;
    const Dataset d = load_dataset(cfg, report);
    std::ifstream mf(model_file);
    const GvnrTextModel m = read_gvnr_text_model(mf);
    if (m.vocab_size() != d.vocab_size())
        throw UsageError("model vocabulary (" + std::to_string(m.vocab_size()) + ") does not match the dataset (" +
                         std::to_string(d.vocab_size()) + ")");
    const auto tokens = read_vocab(cfg, d.vocab_size());
    const QueryStrategy strategy = parse_query_strategy(cfg.query);

    std::vector<std::pair<NodeIndex, NodeIndex>> pairs;
    if (!cfg.pairs.empty()) {
        std::stringstream ss(cfg.pairs);
        for (std::string item; std::getline(ss, item, ',');) {
            auto colon = item.find(':');
            if (colon == std::string::npos) throw UsageError("pairs are written idA:idB, got '" + item + "'");
            const auto a = d.index_of(item.substr(0, colon)), b = d.index_of(item.substr(colon + 1));
            if (a < 0 || b < 0) throw UsageError("unknown document id in pair '" + item + "'");
            pairs.emplace_back(static_cast<NodeIndex>(a), static_cast<NodeIndex>(b));
        }
    } else {
        for (auto e : edge_list(d.adjacency())) {
            if (pairs.size() >= cfg.max_pairs) break;
            if (!d.bows()[e.first].empty() && !d.bows()[e.second].empty()) pairs.push_back(e);
        }
    }

    std::ostringstream buffer;
    auto words_json = [&tokens](const WordWeights& w) {
        nlohmann::json arr = nlohmann::json::array();
        for (std::size_t k = 0; k < w.words.size(); ++k)
            arr.push_back({{"token", tokens[w.words[k]]}, {"weight", w.weights[k]}});
        return arr;
    };
    for (auto [a, b] : pairs) {
        const MutualAttention att = mutual_attention_weights(d.bows()[a], d.bows()[b], m.W, strategy);
        nlohmann::json rec = {{"doc_a", d.node_ids()[a]},
                              {"doc_b", d.node_ids()[b]},
                              {"words_a", words_json(att.a)},
                              {"words_b", words_json(att.b)}};
        buffer << rec.dump() << '\n';
    }
    if (cfg.out == "-") {
        log << buffer.str();
    } else {
        fs::create_directories(cfg.out);
        write_text_file(fs::path(cfg.out) / "attention.jsonl", buffer.str());
        log << "wrote " << pairs.size() << " document pairs to "
            << (fs::path(cfg.out) / "attention.jsonl").string() << '\n';
    }
    return kExitOk;
}

namespace {

void add_common_options(CLI::App& app, RunConfig& c) {
    app.add_option("--config", "JSON config file or manifest; flags override its values");
    app.add_option("--dataset", c.dataset, "Dataset prefix: <prefix>.content and <prefix>.cites");
    app.add_option("--dataset-content", c.dataset_content, "Path of the .content file");
    app.add_option("--dataset-cites", c.dataset_cites, "Path of the .cites file");
    app.add_flag_callback("--counts", [&c] { c.binary_flags = false; },
                          "Word columns hold term counts instead of 0/1 flags");
    app.add_option("--variant", c.variant, "gvnr or gvnr_t")->check(CLI::IsMember({"gvnr", "gvnr_t"}));
    app.add_option("--mode", c.mode, "u_only|sum|concat (gvnr) or text_only|full (gvnr_t)")
        ->check(CLI::IsMember({"u_only", "sum", "concat", "text_only", "full"}));
    app.add_option("--dim", c.gvnr.d, "Embedding dimension");
    app.add_option("--k", c.gvnr.k, "Zero-coefficient oversampling factor");
    app.add_option("--x-min", c.gvnr.x_min, "Drop co-occurrence counts below this value");
    app.add_option("--epochs", c.gvnr.epochs, "Training epochs");
    app.add_option("--lr", c.gvnr.learning_rate, "Initial learning rate");
    app.add_option_function<std::string>(
           "--optimizer", [&c](const std::string& s) { c.gvnr.optimizer = parse_optimizer(s); }, "adagrad or sgd")
        ->check(CLI::IsMember({"adagrad", "sgd"}));
    app.add_option("--zero-target", c.gvnr.zero_target, "Reconstruction target of sampled zero cells");
    app.add_option("--walks", c.walk.walks_per_node, "Walks started from every node");
    app.add_option("--walk-length", c.walk.walk_length, "Nodes per walk");
    app.add_option("--window", c.walk.window, "Co-occurrence window");
    app.add_flag("--distance-weighting", c.walk.distance_weighting, "Count a pair at offset o as 1/o");
    app.add_option("--seed", c.gvnr.seed, "Seed of every random stream");
    app.add_option("--threads", c.threads, "Worker threads (1 is the reference mode)");
    app.add_option("--out", c.out, "Output directory ('-' streams infer/attend output to stdout)");
    app.add_option("--cache-dir", c.cache_dir, "Co-occurrence cache directory (default <out>/cache)");
    app.add_flag("--no-cache", c.no_cache, "Always recompute co-occurrences");
    app.add_option("--fracs", c.fracs, "Fractions: 0.1..0.5, 0.1,0.3 or 0.5");
    app.add_option("--repeats", c.repeats, "Seeded repeats per setting");
    app.add_option("--l2", c.l2, "L2 penalty of the logistic regression");
    app.add_option("--test-frac", c.test_frac, "Fraction of edges held out for link prediction");
    app.add_option("--scorer", c.scorer, "dot_bias or cosine")->check(CLI::IsMember({"dot_bias", "cosine"}));
    app.add_flag("--unseen-nodes", c.unseen_nodes, "Link prediction hiding nodes instead of edges");
    app.add_option("--hidden-frac", c.hidden_frac, "Fraction of hidden nodes for --unseen-nodes");
    app.add_option("--model", c.model, "Directory written by train");
    app.add_option("--docs", c.docs, "Documents to embed, .content layout");
    app.add_option("--vocab", c.vocab, "Token list, one per line, in vocabulary order");
    app.add_option("--pairs", c.pairs, "Document pairs idA:idB,idC:idD");
    app.add_option("--max-pairs", c.max_pairs, "Linked pairs emitted when --pairs is absent");
    app.add_option("--query", c.query, "Attention query: mean or max_pool")->check(CLI::IsMember({"mean", "max_pool"}));
}

std::string find_config_path(const std::vector<std::string>& args) {
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return {};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        if (auto path = find_config_path(args); !path.empty()) {
            std::ifstream in(path);
            if (!in) throw IoError("config file not found: " + path);
            cfg.merge_json(nlohmann::json::parse(in));
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: invalid config file: " << e.what() << '\n';
        return kExitUsage;
    }

    CLI::App app{"Node and document embeddings from random-walk co-occurrence factorization"};
    app.fallthrough();
    app.require_subcommand(1);
    add_common_options(app, cfg);
    auto* train = app.add_subcommand("train", "Train GVNR or GVNR-t and write embeddings");
    auto* infer = app.add_subcommand("infer", "Embed unseen documents from text with a GVNR-t model");
    auto* evaluate = app.add_subcommand("evaluate", "Run an evaluation protocol");
    evaluate->require_subcommand(1);
    evaluate->fallthrough();
    auto* classify = evaluate->add_subcommand("classify", "Node classification, training fractions as columns");
    auto* unseen = evaluate->add_subcommand("unseen", "Classification of documents hidden during training");
    auto* linkpred = evaluate->add_subcommand("linkpred", "Link prediction ROC AUC");
    for (auto* s : {classify, unseen, linkpred}) s->fallthrough();
    auto* attend = app.add_subcommand("attend", "Mutual attention weights for pairs of documents");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (train->parsed()) {
            cfg.command = "train";
            return cmd_train(cfg, out);
        }
        if (infer->parsed()) {
            cfg.command = "infer";
            return cmd_infer(cfg, out);
        }
        if (attend->parsed()) {
            cfg.command = "attend";
            return cmd_attend(cfg, out);
        }
        if (evaluate->parsed()) {
            cfg.command = "evaluate";
            cfg.protocol = classify->parsed() ? "classify" : unseen->parsed() ? "unseen" : "linkpred";
            return cmd_evaluate(cfg, out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace gvnr::cli
