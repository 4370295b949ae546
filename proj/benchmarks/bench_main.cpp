#include <benchmark/benchmark.h>

#include <map>

#include "gvnr/gvnr.hpp"

using namespace gvnr;

namespace {

const Dataset& graph(std::size_t n) {
    static std::map<std::size_t, Dataset> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, planted_partition(n, 4, 8.0 / n, 1.0 / n, 1)).first;
    return it->second;
}

WalkConfig walk_config() {
    WalkConfig w;
    w.walks_per_node = 10;
    w.walk_length = 40;
    w.window = 5;
    return w;
}

void BM_GenerateWalks(benchmark::State& state) {
    const Dataset& d = graph(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(generate_walks(d, walk_config()));
    state.SetItemsProcessed(state.iterations() * state.range(0) * 10 * 40);
}
BENCHMARK(BM_GenerateWalks)->Arg(1000)->Arg(4000);

void BM_CountCooccurrences(benchmark::State& state) {
    const Dataset& d = graph(static_cast<std::size_t>(state.range(0)));
    const auto walks = generate_walks(d, walk_config());
    for (auto _ : state) benchmark::DoNotOptimize(count_cooccurrences(walks, d.num_nodes(), 5));
}
BENCHMARK(BM_CountCooccurrences)->Arg(1000)->Arg(4000);

void BM_TrainEpoch(benchmark::State& state) {
    const Dataset& d = graph(2000);
    const CoocMatrix x = count_cooccurrences(generate_walks(d, walk_config()), d.num_nodes(), 5);
    GvnrConfig cfg;
    cfg.d = static_cast<std::size_t>(state.range(0));
    cfg.epochs = 1;
    for (auto _ : state) benchmark::DoNotOptimize(train_gvnr(x, cfg));
    state.counters["cells"] = static_cast<double>(x.nnz());
}
BENCHMARK(BM_TrainEpoch)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_TrainTextEpoch(benchmark::State& state) {
    TextNetworkSpec spec;
    spec.nodes_per_class = 300;
    const Dataset d = synthetic_text_network(spec);
    const CoocMatrix x = count_cooccurrences(generate_walks(d, walk_config()), d.num_nodes(), 5);
    GvnrConfig cfg;
    cfg.d = 64;
    cfg.epochs = 1;
    for (auto _ : state) benchmark::DoNotOptimize(train_gvnr_t(x, d.bows(), d.vocab_size(), cfg));
}
BENCHMARK(BM_TrainTextEpoch)->Unit(benchmark::kMillisecond);

void BM_Attention(benchmark::State& state) {
    const std::size_t L = static_cast<std::size_t>(state.range(0)), dk = 100;
    Rng rng(1);
    AttentionInput in{std::vector<double>(dk), Matrix(L, dk), Matrix(L, dk)};
    for (double& v : in.query) v = rng.uniform(-1, 1);
    for (double& v : in.keys.data()) v = rng.uniform(-1, 1);
    in.values = in.keys;
    for (auto _ : state) benchmark::DoNotOptimize(scaled_dot_product_attention(in));
}
BENCHMARK(BM_Attention)->Arg(16)->Arg(256);

void BM_RocAuc(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng rng(2);
    std::vector<double> pos(n), neg(n);
    for (double& v : pos) v = rng.uniform(0.2, 1.0);
    for (double& v : neg) v = rng.uniform(0.0, 0.8);
    for (auto _ : state) benchmark::DoNotOptimize(roc_auc(pos, neg));
}
BENCHMARK(BM_RocAuc)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
