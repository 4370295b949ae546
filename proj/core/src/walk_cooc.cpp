#include "gvnr/walk_cooc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <thread>
#include <unordered_map>

#include "gvnr/error.hpp"
#include "gvnr/random.hpp"

namespace gvnr {

void WalkConfig::validate() const {
    if (walks_per_node == 0) throw InvalidArgument("walks_per_node must be positive");
    if (walk_length == 0) throw InvalidArgument("walk_length must be positive");
    if (window == 0) throw InvalidArgument("window must be positive");
    if (window >= walk_length) throw InvalidArgument("window must be smaller than walk_length");
}

std::vector<Walk> generate_walks(const Adjacency& adj, const WalkConfig& cfg, unsigned threads) {
    cfg.validate();
    const std::size_t n = adj.size();
    const std::size_t total = n * cfg.walks_per_node;

    // (start node, pass) for every walk, in output order.
    std::vector<std::pair<NodeIndex, std::uint32_t>> jobs;
    jobs.reserve(total);
    std::vector<NodeIndex> order(n);
    for (std::uint32_t pass = 0; pass < cfg.walks_per_node; ++pass) {
        std::iota(order.begin(), order.end(), NodeIndex{0});
        Rng rng(derive_seed(cfg.seed, {stream::walk_order, pass}));
        rng.shuffle(order);
        for (NodeIndex s : order) jobs.emplace_back(s, pass);
    }

    std::vector<Walk> walks(total);
    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t w = begin; w < end; ++w) {
            auto [start, pass] = jobs[w];
            Rng rng(derive_seed(cfg.seed, {stream::walk, start, pass}));
            Walk& walk = walks[w];
            walk.reserve(cfg.walk_length);
            walk.push_back(start);
            NodeIndex cur = start;
            while (walk.size() < cfg.walk_length) {
                const auto& nbrs = adj[cur];
                if (nbrs.empty()) break;
                cur = nbrs[rng.below(nbrs.size())];
                walk.push_back(cur);
            }
        }
    };

    threads = std::max(1u, threads);
    if (threads == 1 || total < 2 * threads) {
        run(0, total);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (total + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            std::size_t b = t * chunk, e = std::min(total, b + chunk);
            if (b < e) pool.emplace_back(run, b, e);
        }
        for (auto& th : pool) th.join();
    }
    return walks;
}

std::vector<Walk> generate_walks(const Dataset& d, const WalkConfig& cfg, unsigned threads) {
    return generate_walks(d.adjacency(), cfg, threads);
}

CoocMatrix::CoocMatrix(std::size_t n, std::vector<Triplet> upper) : n_(n) {
    for (const auto& t : upper) {
        if (t.i >= n || t.j >= n) throw InvalidArgument("cooc: index out of range");
        if (t.i >= t.j) throw InvalidArgument("cooc: triplets must satisfy i < j");
        if (!(t.x > 0.0) || !std::isfinite(t.x))
            throw InvalidArgument("cooc: entries must be positive and finite");
    }
    std::sort(upper.begin(), upper.end(),
              [](const Triplet& a, const Triplet& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
    std::vector<Triplet> merged;
    merged.reserve(upper.size());
    for (const auto& t : upper) {
        if (!merged.empty() && merged.back().i == t.i && merged.back().j == t.j)
            merged.back().x += t.x;
        else
            merged.push_back(t);
    }

    std::vector<std::size_t> degree(n, 0);
    for (const auto& t : merged) {
        ++degree[t.i];
        ++degree[t.j];
    }
    row_ptr_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) row_ptr_[i + 1] = row_ptr_[i] + degree[i];
    cols_.resize(row_ptr_[n]);
    vals_.resize(row_ptr_[n]);
    std::vector<std::size_t> fill(row_ptr_.begin(), row_ptr_.end() - 1);
    // Lower-triangle entries of row r come from triplets (j=r), visited in
    // increasing i; upper ones in increasing j afterwards. Two passes keep
    // every row sorted without a per-row sort.
    for (const auto& t : merged) {
        cols_[fill[t.j]] = t.i;
        vals_[fill[t.j]++] = t.x;
    }
    for (const auto& t : merged) {
        cols_[fill[t.i]] = t.j;
        vals_[fill[t.i]++] = t.x;
    }
}

double CoocMatrix::at(NodeIndex i, NodeIndex j) const noexcept {
    auto cols = row_cols(i);
    auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return vals_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())];
}

double CoocMatrix::total() const noexcept {
    double s = 0.0;
    for (double v : vals_) s += v;
    return s;
}

std::vector<CoocMatrix::Triplet> CoocMatrix::upper_triplets() const {
    std::vector<Triplet> out;
    out.reserve(nnz() / 2);
    for (NodeIndex i = 0; i < n_; ++i) {
        auto cols = row_cols(i);
        auto vals = row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k)
            if (cols[k] > i) out.push_back({i, cols[k], vals[k]});
    }
    return out;
}

CoocMatrix count_cooccurrences(std::span<const Walk> walks, std::size_t n, std::uint32_t window,
                               bool distance_weighting) {
    if (walks.empty()) throw InvalidArgument("count_cooccurrences: empty walk set");
    if (window == 0) throw InvalidArgument("count_cooccurrences: window must be positive");

    // Upper-triangle accumulation, one hash row per smaller endpoint.
    std::vector<std::unordered_map<NodeIndex, double>> rows(n);
    for (const Walk& walk : walks) {
        const std::size_t len = walk.size();
        for (std::size_t p = 0; p < len; ++p) {
            const NodeIndex a = walk[p];
            if (a >= n) throw InvalidArgument("count_cooccurrences: node index out of range");
            const std::size_t last = std::min<std::size_t>(len - 1, p + window);
            for (std::size_t q = p + 1; q <= last; ++q) {
                const NodeIndex b = walk[q];
                if (b >= n) throw InvalidArgument("count_cooccurrences: node index out of range");
                if (a == b) continue;
                const double inc = distance_weighting ? 1.0 / static_cast<double>(q - p) : 1.0;
                if (a < b)
                    rows[a][b] += inc;
                else
                    rows[b][a] += inc;
            }
        }
    }

    std::vector<CoocMatrix::Triplet> upper;
    std::size_t total = 0;
    for (const auto& r : rows) total += r.size();
    upper.reserve(total);
    for (NodeIndex i = 0; i < n; ++i) {
        for (const auto& [j, x] : rows[i]) upper.push_back({i, j, x});
        std::unordered_map<NodeIndex, double>().swap(rows[i]);
    }
    return CoocMatrix(n, std::move(upper));
}

CoocMatrix count_cooccurrences(std::span<const Walk> walks, std::uint32_t window) {
    std::size_t n = 0;
    for (const Walk& w : walks)
        for (NodeIndex v : w) n = std::max<std::size_t>(n, v + 1);
    return count_cooccurrences(walks, n, window);
}

CoocMatrix filter_min_count(const CoocMatrix& x, double x_min) {
    auto upper = x.upper_triplets();
    std::erase_if(upper, [x_min](const CoocMatrix::Triplet& t) { return t.x < x_min; });
    return CoocMatrix(x.n(), std::move(upper));
}

void write_cooc(const CoocMatrix& x, std::ostream& out) {
    out << x.n() << '\n';
    char buf[64];
    for (const auto& t : x.upper_triplets()) {
        auto res = std::to_chars(buf, buf + sizeof buf, t.x);
        out << t.i << ' ' << t.j << ' ' << std::string_view(buf, res.ptr - buf) << '\n';
    }
}

CoocMatrix read_cooc(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::size_t n = 0;
    bool have_header = false;
    std::vector<CoocMatrix::Triplet> upper;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (!have_header) {
            if (std::sscanf(line.c_str(), "%zu", &n) != 1) throw ParseError(lineno, "expected node count header");
            have_header = true;
            continue;
        }
        unsigned long i = 0, j = 0;
        double v = 0.0;
        char extra = 0;
        if (std::sscanf(line.c_str(), "%lu %lu %lf %c", &i, &j, &v, &extra) != 3)
            throw ParseError(lineno, "expected `i j x`");
        if (i >= j || j >= n || !(v > 0.0)) throw ParseError(lineno, "invalid co-occurrence entry");
        upper.push_back({static_cast<NodeIndex>(i), static_cast<NodeIndex>(j), v});
    }
    if (!have_header) throw ParseError(lineno, "missing node count header");
    return CoocMatrix(n, std::move(upper));
}

}  // namespace gvnr
