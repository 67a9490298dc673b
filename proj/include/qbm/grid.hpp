#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbm {

// Uniform time grid t_i = i*dt, i = 0..n (n+1 nodes, t_n = t_max).
struct TimeGrid {
    double dt = 0.0;
    std::size_t n = 0;  // number of steps; n+1 nodes

    TimeGrid() = default;
    TimeGrid(double t_max, double dt_) : dt(dt_) {
        if (dt_ <= 0.0) throw std::invalid_argument("TimeGrid: dt must be positive");
        if (t_max < 0.0) throw std::invalid_argument("TimeGrid: t_max must be nonnegative");
        n = static_cast<std::size_t>(std::llround(t_max / dt_));
        if (std::abs(static_cast<double>(n) * dt_ - t_max) > 1e-9 * std::max(1.0, t_max))
            throw std::invalid_argument("TimeGrid: t_max must be an integer multiple of dt");
    }

    std::size_t size() const { return n + 1; }
    double t_max() const { return static_cast<double>(n) * dt; }
    double time(std::size_t i) const { return static_cast<double>(i) * dt; }

    // Snap a time to its grid index; off-grid by more than dt/100 is an error.
    std::size_t index(double t) const {
        double x = t / dt;
        auto i = static_cast<long long>(std::llround(x));
        if (i < 0 || static_cast<std::size_t>(i) > n || std::abs(x - static_cast<double>(i)) > 0.01)
            throw std::invalid_argument("TimeGrid: time " + std::to_string(t) + " is not on the grid");
        return static_cast<std::size_t>(i);
    }

    bool contains(double t) const {
        double x = t / dt;
        auto i = static_cast<long long>(std::llround(x));
        return i >= 0 && static_cast<std::size_t>(i) <= n && std::abs(x - static_cast<double>(i)) <= 0.01;
    }

    // Trapezoid weight for node i on the subgrid [0, m].
    double trap_weight(std::size_t i, std::size_t m) const {
        if (m == 0) return 0.0;
        return (i == 0 || i == m) ? 0.5 * dt : dt;
    }
};

// Trapezoid sum of samples f[0..m] on a uniform grid with step dt.
inline double trapezoid(const std::vector<double>& f, std::size_t m, double dt) {
    if (m == 0) return 0.0;
    double s = 0.5 * (f[0] + f[m]);
    for (std::size_t i = 1; i < m; ++i) s += f[i];
    return s * dt;
}

}  // namespace qbm
