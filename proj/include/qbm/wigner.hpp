#pragma once

#include <cstddef>
#include <vector>

#include "qbm/mat2.hpp"
#include "qbm/opalg.hpp"

namespace qbm {

// Discretized Wigner function on a rectangular (x, p) window, row-major in x.
struct WignerGrid {
    double x_min = -1.0, x_max = 1.0;
    double p_min = -1.0, p_max = 1.0;
    std::size_t nx = 0, np = 0;
    std::vector<double> w;
    double time = 0.0;

    double hx() const { return (x_max - x_min) / static_cast<double>(nx - 1); }
    double hp() const { return (p_max - p_min) / static_cast<double>(np - 1); }
    double x_of(std::size_t ix) const { return x_min + static_cast<double>(ix) * hx(); }
    double p_of(std::size_t ip) const { return p_min + static_cast<double>(ip) * hp(); }
    double& at(std::size_t ix, std::size_t ip) { return w[ix * np + ip]; }
    double at(std::size_t ix, std::size_t ip) const { return w[ix * np + ip]; }

    double integral() const;     // 2D trapezoid
    Vec2 mean() const;
    Mat2 covariance() const;
    double max_abs() const;

    // True when |W| has decayed below 1e-8 * max|W| within 5 cells of
    // every boundary (window adequacy).
    bool boundary_decay_ok() const;
};

// Normalized Gaussian; errors when the window does not cover
// mean +- 6 standard deviations on both axes.
WignerGrid init_gaussian(const Vec2& mean, const Mat2& covariance,
                         double x_min, double x_max, double p_min, double p_max,
                         std::size_t nx, std::size_t np);

// A W: derivatives by iterated central differences (one-sided at edges),
// coordinate factors pointwise, right-to-left per normal order.
WignerGrid apply(const PhaseOp& op, const WignerGrid& grid);
// Serial reference implementation (kept for testing and benchmarking).
WignerGrid apply_serial(const PhaseOp& op, const WignerGrid& grid);

// One explicit Heun (RK2) step of dW/dt = L W. Checks the CFL-type bound
// dt <= 0.25 min(h^2/maxD, h/max drift) and aborts on NaN, naming the cell.
WignerGrid step(const WignerGrid& grid, const PhaseOp& L, double dt);

}  // namespace qbm
