#pragma once

#include "gvnr/attention.hpp"
#include "gvnr/dataset.hpp"
#include "gvnr/error.hpp"
#include "gvnr/eval.hpp"
#include "gvnr/gvnr_model.hpp"
#include "gvnr/gvnr_text.hpp"
#include "gvnr/matrix.hpp"
#include "gvnr/random.hpp"
#include "gvnr/serialize.hpp"
#include "gvnr/synthetic.hpp"
#include "gvnr/walk_cooc.hpp"
