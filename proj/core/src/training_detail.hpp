#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "gvnr/gvnr_model.hpp"

namespace gvnr::detail {

struct Cell {
    NodeIndex i;
    NodeIndex j;
    double target;
};

/// All positive cells (target log x_ij) followed by the masked zeros.
std::vector<Cell> selected_cells(const CoocMatrix& x, const ZeroMask& mask, double zero_target);

/// Parameter block with optional AdaGrad state (accumulators start at 1).
class Updater {
public:
    Updater(Optimizer opt, double lr, std::size_t size)
        : opt_(opt), lr_(lr), accum_(opt == Optimizer::adagrad ? size : 0, 1.0) {}

    void step(std::span<double> params, std::size_t offset, std::span<const double> grad) {
        if (opt_ == Optimizer::sgd) {
            for (std::size_t k = 0; k < grad.size(); ++k) params[k] -= lr_ * grad[k];
            return;
        }
        double* acc = accum_.data() + offset;
        for (std::size_t k = 0; k < grad.size(); ++k) {
            acc[k] += grad[k] * grad[k];
            params[k] -= lr_ * grad[k] / std::sqrt(acc[k]);
        }
    }

    void step(double& param, std::size_t offset, double grad) {
        step(std::span<double>(&param, 1), offset, std::span<const double>(&grad, 1));
    }

private:
    Optimizer opt_;
    double lr_;
    std::vector<double> accum_;
};

void check_finite_loss(double loss, std::size_t epoch, double lr);

}  // namespace gvnr::detail
