#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "gvnr/gvnr_model.hpp"
#include "gvnr/gvnr_text.hpp"
#include "gvnr/matrix.hpp"

namespace gvnr {

/// word2vec text format: `<rows> <cols>` header, then `<key> f1 ... fd`.
/// Numbers use the shortest round-trip decimal form, so equal matrices give
/// byte-identical files.
void write_word2vec(std::ostream& out, const std::vector<std::string>& keys, const Matrix& m);

struct KeyedMatrix {
    std::vector<std::string> keys;
    Matrix values;
};

KeyedMatrix read_word2vec(std::istream& in);

/// Raw parameter dumps used to resume or reuse a trained model.
void write_model(std::ostream& out, const GvnrModel& m);
GvnrModel read_gvnr_model(std::istream& in);

void write_model(std::ostream& out, const GvnrTextModel& m);
GvnrTextModel read_gvnr_text_model(std::istream& in);

std::string format_double(double v);

}  // namespace gvnr
