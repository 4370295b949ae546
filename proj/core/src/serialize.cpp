#include "gvnr/serialize.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "gvnr/error.hpp"

namespace gvnr {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

void write_row(std::ostream& out, std::span<const double> row) {
    for (std::size_t k = 0; k < row.size(); ++k) {
        if (k) out << ' ';
        out << format_double(row[k]);
    }
    out << '\n';
}

void write_matrix(std::ostream& out, const char* name, const Matrix& m) {
    out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) write_row(out, m.row(i));
}

void write_vector(std::ostream& out, const char* name, const std::vector<double>& v) {
    out << name << ' ' << v.size() << '\n';
    write_row(out, v);
}

double parse_double(std::string_view s, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        throw ParseError(line, "invalid number '" + std::string(s) + "'");
    return v;
}

// Line-oriented reader that tracks line numbers for error messages.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::vector<std::string> fields() {
        std::string line;
        if (!std::getline(in_, line)) throw ParseError(line_ + 1, "unexpected end of file");
        ++line_;
        std::istringstream ss(line);
        std::vector<std::string> out;
        for (std::string f; ss >> f;) out.push_back(std::move(f));
        return out;
    }

    std::size_t line() const { return line_; }

    std::size_t header(const std::string& name, std::size_t count, std::vector<std::size_t>& dims) {
        auto f = fields();
        if (f.size() != count + 1 || f[0] != name)
            throw ParseError(line_, "expected section '" + name + "'");
        dims.clear();
        for (std::size_t k = 1; k < f.size(); ++k) dims.push_back(std::stoull(f[k]));
        return dims.front();
    }

    std::vector<double> row(std::size_t expected) {
        auto f = fields();
        if (f.size() != expected)
            throw ParseError(line_, "expected " + std::to_string(expected) + " values, found " +
                                        std::to_string(f.size()));
        std::vector<double> out;
        out.reserve(f.size());
        for (const auto& s : f) out.push_back(parse_double(s, line_));
        return out;
    }

    Matrix matrix(const std::string& name) {
        std::vector<std::size_t> dims;
        header(name, 2, dims);
        Matrix m(dims[0], dims[1]);
        for (std::size_t i = 0; i < dims[0]; ++i) {
            auto r = row(dims[1]);
            std::copy(r.begin(), r.end(), m.row(i).begin());
        }
        return m;
    }

    std::vector<double> vector(const std::string& name) {
        std::vector<std::size_t> dims;
        header(name, 1, dims);
        if (dims[0] == 0) {
            fields();
            return {};
        }
        return row(dims[0]);
    }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

}  // namespace

void write_word2vec(std::ostream& out, const std::vector<std::string>& keys, const Matrix& m) {
    if (keys.size() != m.rows()) throw InvalidArgument("word2vec: one key per row is required");
    out << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out << keys[i] << ' ';
        write_row(out, m.row(i));
    }
}

KeyedMatrix read_word2vec(std::istream& in) {
    Reader r(in);
    auto head = r.fields();
    if (head.size() != 2) throw ParseError(r.line(), "expected `<rows> <cols>` header");
    const std::size_t rows = std::stoull(head[0]), cols = std::stoull(head[1]);
    KeyedMatrix km{{}, Matrix(rows, cols)};
    for (std::size_t i = 0; i < rows; ++i) {
        auto f = r.fields();
        if (f.size() != cols + 1) throw ParseError(r.line(), "wrong number of values");
        km.keys.push_back(f[0]);
        for (std::size_t k = 0; k < cols; ++k) km.values(i, k) = parse_double(f[k + 1], r.line());
    }
    return km;
}

void write_model(std::ostream& out, const GvnrModel& m) {
    out << "gvnr-model 1\n";
    write_matrix(out, "U", m.U);
    write_matrix(out, "V", m.V);
    write_vector(out, "b_u", m.b_u);
    write_vector(out, "b_v", m.b_v);
}

GvnrModel read_gvnr_model(std::istream& in) {
    Reader r(in);
    auto head = r.fields();
    if (head.size() != 2 || head[0] != "gvnr-model") throw ParseError(r.line(), "not a gvnr model file");
    GvnrModel m;
    m.U = r.matrix("U");
    m.V = r.matrix("V");
    m.b_u = r.vector("b_u");
    m.b_v = r.vector("b_v");
    if (m.V.rows() != m.U.rows() || m.V.cols() != m.U.cols() || m.b_u.size() != m.n() || m.b_v.size() != m.n())
        throw ParseError(r.line(), "inconsistent model shapes");
    return m;
}

void write_model(std::ostream& out, const GvnrTextModel& m) {
    out << "gvnr-t-model 1\n";
    write_matrix(out, "U", m.U);
    write_matrix(out, "W", m.W);
    write_vector(out, "b_u", m.b_u);
    write_vector(out, "b_v", m.b_v);
    write_vector(out, "fallback", m.fallback);
    out << "bows " << m.bows.size() << '\n';
    for (const Bow& b : m.bows) {
        out << b.size();
        for (const auto& e : b) out << ' ' << e.word << ':' << e.count;
        out << '\n';
    }
}

GvnrTextModel read_gvnr_text_model(std::istream& in) {
    Reader r(in);
    auto head = r.fields();
    if (head.size() != 2 || head[0] != "gvnr-t-model") throw ParseError(r.line(), "not a gvnr-t model file");
    GvnrTextModel m;
    m.U = r.matrix("U");
    m.W = r.matrix("W");
    m.b_u = r.vector("b_u");
    m.b_v = r.vector("b_v");
    m.fallback = r.vector("fallback");
    std::vector<std::size_t> dims;
    r.header("bows", 1, dims);
    for (std::size_t j = 0; j < dims[0]; ++j) {
        auto f = r.fields();
        if (f.empty() || std::stoull(f[0]) + 1 != f.size()) throw ParseError(r.line(), "malformed document line");
        std::vector<BowEntry> cells;
        for (std::size_t k = 1; k < f.size(); ++k) {
            auto colon = f[k].find(':');
            if (colon == std::string::npos) throw ParseError(r.line(), "expected word:count");
            cells.push_back({static_cast<std::uint32_t>(std::stoul(f[k].substr(0, colon))),
                             static_cast<std::uint32_t>(std::stoul(f[k].substr(colon + 1)))});
        }
        m.bows.push_back(make_bow(std::move(cells)));
    }
    if (m.W.cols() != m.U.cols() || m.b_u.size() != m.n() || m.b_v.size() != m.n() ||
        m.fallback.size() != m.d() || m.bows.size() != m.n())
        throw ParseError(r.line(), "inconsistent model shapes");
    for (const Bow& b : m.bows)
        for (const auto& e : b)
            if (e.word >= m.W.rows()) throw ParseError(r.line(), "document word outside the vocabulary");
    return m;
}

}  // namespace gvnr
