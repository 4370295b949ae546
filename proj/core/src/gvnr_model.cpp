#include "gvnr/gvnr_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gvnr/error.hpp"
#include "training_detail.hpp"

namespace gvnr {

std::string_view to_string(RepresentationMode m) {
    switch (m) {
        case RepresentationMode::u_only: return "u_only";
        case RepresentationMode::sum: return "sum";
        case RepresentationMode::concat: return "concat";
    }
    return "?";
}

RepresentationMode parse_representation_mode(std::string_view s) {
    if (s == "u_only") return RepresentationMode::u_only;
    if (s == "sum") return RepresentationMode::sum;
    if (s == "concat") return RepresentationMode::concat;
    throw InvalidArgument("unknown representation mode '" + std::string(s) + "'");
}

std::string_view to_string(Optimizer o) { return o == Optimizer::adagrad ? "adagrad" : "sgd"; }

Optimizer parse_optimizer(std::string_view s) {
    if (s == "adagrad") return Optimizer::adagrad;
    if (s == "sgd") return Optimizer::sgd;
    throw InvalidArgument("unknown optimizer '" + std::string(s) + "'");
}

void GvnrConfig::validate() const {
    if (d == 0) throw InvalidArgument("embedding dimension must be at least 1");
    if (k == 0) throw InvalidArgument("k must be at least 1");
    if (epochs == 0) throw InvalidArgument("epochs must be positive");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        throw InvalidArgument("learning rate must be positive");
    if (!(x_min >= 0.0)) throw InvalidArgument("x_min must be nonnegative");
}

std::size_t ZeroMask::size() const noexcept {
    std::size_t s = 0;
    for (const auto& r : rows) s += r.size();
    return s;
}

double zero_inclusion_probability(std::size_t n, std::size_t row_distinct, std::uint32_t k) {
    if (row_distinct == 0 || row_distinct >= n) return 0.0;
    const double p = static_cast<double>(k) * static_cast<double>(row_distinct) /
                     static_cast<double>(n - row_distinct);
    return std::min(1.0, p);
}

ZeroMask sample_zero_coefficients(const CoocMatrix& x, std::uint32_t k, Rng& rng) {
    const std::size_t n = x.n();
    ZeroMask mask;
    mask.rows.resize(n);
    std::vector<NodeIndex> excluded;
    std::vector<std::size_t> picks;
    for (NodeIndex i = 0; i < n; ++i) {
        const std::size_t ni = x.row_distinct(i);
        const std::size_t eligible = n - 1 - ni;
        const double p = zero_inclusion_probability(n, ni, k);
        if (p <= 0.0 || eligible == 0) continue;

        picks.clear();
        if (p >= 1.0) {
            for (std::size_t t = 0; t < eligible; ++t) picks.push_back(t);
        } else {
            // Gaps between successive inclusions are geometric with parameter p.
            const double log_q = std::log1p(-p);
            std::size_t t = 0;
            while (true) {
                const double u = 1.0 - rng.uniform();  // (0, 1]
                const double gap = std::floor(std::log(u) / log_q);
                if (gap >= static_cast<double>(eligible - t)) break;
                t += static_cast<std::size_t>(gap);
                picks.push_back(t);
                if (++t >= eligible) break;
            }
        }

        // Map eligible positions to column indices by skipping positive
        // columns and the diagonal.
        auto cols = x.row_cols(i);
        excluded.assign(cols.begin(), cols.end());
        excluded.insert(std::upper_bound(excluded.begin(), excluded.end(), i), i);
        auto& out = mask.rows[i];
        out.reserve(picks.size());
        std::size_t ptr = 0;
        for (std::size_t t : picks) {
            while (ptr < excluded.size() && excluded[ptr] <= t + ptr) ++ptr;
            out.push_back(static_cast<NodeIndex>(t + ptr));
        }
    }
    return mask;
}

namespace detail {

std::vector<Cell> selected_cells(const CoocMatrix& x, const ZeroMask& mask, double zero_target) {
    std::vector<Cell> cells;
    cells.reserve(x.nnz() + mask.size());
    for (NodeIndex i = 0; i < x.n(); ++i) {
        auto cols = x.row_cols(i);
        auto vals = x.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (!(vals[k] > 0.0)) throw Error("internal: non-positive co-occurrence count");
            cells.push_back({i, cols[k], std::log(vals[k])});
        }
    }
    for (NodeIndex i = 0; i < mask.rows.size(); ++i)
        for (NodeIndex j : mask.rows[i]) cells.push_back({i, j, zero_target});
    return cells;
}

void check_finite_loss(double loss, std::size_t epoch, double lr) {
    if (std::isfinite(loss)) return;
    std::ostringstream msg;
    msg << "training diverged at epoch " << epoch + 1 << ": loss is not finite (learning rate "
        << lr << " is probably too high)";
    throw TrainingDiverged(msg.str());
}

}  // namespace detail

double objective_value(const GvnrModel& m, const CoocMatrix& x, const ZeroMask& mask,
                       double zero_target) {
    double loss = 0.0;
    for (const auto& c : detail::selected_cells(x, mask, zero_target)) {
        const double e = dot(m.U.row(c.i), m.V.row(c.j)) + m.b_u[c.i] + m.b_v[c.j] - c.target;
        loss += e * e;
    }
    return loss;
}

GvnrGradients objective_gradients(const GvnrModel& m, const CoocMatrix& x, const ZeroMask& mask,
                                  double zero_target) {
    const std::size_t n = m.n(), d = m.d();
    GvnrGradients g{Matrix(n, d), Matrix(n, d), std::vector<double>(n, 0.0),
                    std::vector<double>(n, 0.0)};
    for (const auto& c : detail::selected_cells(x, mask, zero_target)) {
        auto u = m.U.row(c.i);
        auto v = m.V.row(c.j);
        const double e = dot(u, v) + m.b_u[c.i] + m.b_v[c.j] - c.target;
        auto gu = g.U.row(c.i);
        auto gv = g.V.row(c.j);
        for (std::size_t k = 0; k < d; ++k) {
            gu[k] += 2.0 * e * v[k];
            gv[k] += 2.0 * e * u[k];
        }
        g.b_u[c.i] += 2.0 * e;
        g.b_v[c.j] += 2.0 * e;
    }
    return g;
}

GvnrModel init_gvnr_model(std::size_t n, std::size_t d, std::uint64_t seed) {
    GvnrModel m{Matrix(n, d), Matrix(n, d), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    Rng rng(derive_seed(seed, {stream::init}));
    const double r = 0.5 / static_cast<double>(d);
    for (double& v : m.U.data()) v = rng.uniform(-r, r);
    for (double& v : m.V.data()) v = rng.uniform(-r, r);
    return m;
}

GvnrModel train_gvnr(const CoocMatrix& x_in, const GvnrConfig& cfg, TrainingLog* log) {
    cfg.validate();
    const CoocMatrix x = filter_min_count(x_in, cfg.x_min);
    if (x.empty()) throw InvalidArgument("co-occurrence matrix is empty after x_min filtering");

    const std::size_t n = x.n(), d = cfg.d;
    GvnrModel m = init_gvnr_model(n, d, cfg.seed);
    detail::Updater upd_u(cfg.optimizer, cfg.learning_rate, n * d);
    detail::Updater upd_v(cfg.optimizer, cfg.learning_rate, n * d);
    detail::Updater upd_bu(cfg.optimizer, cfg.learning_rate, n);
    detail::Updater upd_bv(cfg.optimizer, cfg.learning_rate, n);
    std::vector<double> gu(d), gv(d);

    for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng zero_rng(derive_seed(cfg.seed, {stream::zeros, epoch}));
        const ZeroMask mask = sample_zero_coefficients(x, cfg.k, zero_rng);
        auto cells = detail::selected_cells(x, mask, cfg.zero_target);
        Rng shuffle_rng(derive_seed(cfg.seed, {stream::shuffle, epoch}));
        shuffle_rng.shuffle(cells);

        double loss = 0.0;
        for (const auto& c : cells) {
            auto u = m.U.row(c.i);
            auto v = m.V.row(c.j);
            const double e = dot(u, v) + m.b_u[c.i] + m.b_v[c.j] - c.target;
            loss += e * e;
            const double g = 2.0 * e;
            for (std::size_t k = 0; k < d; ++k) {
                gu[k] = g * v[k];
                gv[k] = g * u[k];
            }
            upd_u.step(u, c.i * d, gu);
            upd_v.step(v, c.j * d, gv);
            upd_bu.step(m.b_u[c.i], c.i, g);
            upd_bv.step(m.b_v[c.j], c.j, g);
        }
        detail::check_finite_loss(loss, epoch, cfg.learning_rate);
        if (log) {
            log->epoch_mean_loss.push_back(loss / static_cast<double>(cells.size()));
            log->epoch_coefficients.push_back(cells.size());
        }
    }
    return m;
}

std::vector<double> node_representation(const GvnrModel& m, NodeIndex i, RepresentationMode mode) {
    if (i >= m.n()) throw InvalidArgument("node index out of range");
    auto u = m.U.row(i);
    auto v = m.V.row(i);
    switch (mode) {
        case RepresentationMode::u_only: return {u.begin(), u.end()};
        case RepresentationMode::sum: {
            std::vector<double> out(u.begin(), u.end());
            for (std::size_t k = 0; k < out.size(); ++k) out[k] += v[k];
            return out;
        }
        case RepresentationMode::concat: {
            std::vector<double> out(u.begin(), u.end());
            out.insert(out.end(), v.begin(), v.end());
            return out;
        }
    }
    throw InvalidArgument("invalid representation mode");
}

Matrix node_representations(const GvnrModel& m, RepresentationMode mode) {
    const std::size_t dim = mode == RepresentationMode::concat ? 2 * m.d() : m.d();
    Matrix out(m.n(), dim);
    for (NodeIndex i = 0; i < m.n(); ++i) {
        auto r = node_representation(m, i, mode);
        std::copy(r.begin(), r.end(), out.row(i).begin());
    }
    return out;
}

}  // namespace gvnr
