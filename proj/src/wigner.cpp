#include "qbm/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qbm {

namespace {

// Trapezoid weight along one axis.
inline double tw(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

}  // namespace

double WignerGrid::integral() const {
    double sum = 0.0;
    for (std::size_t ix = 0; ix < nx; ++ix)
        for (std::size_t ip = 0; ip < np; ++ip)
            sum += tw(ix, nx) * tw(ip, np) * at(ix, ip);
    return sum * hx() * hp();
}

Vec2 WignerGrid::mean() const {
    double norm = 0.0;
    Vec2 m{};
    for (std::size_t ix = 0; ix < nx; ++ix)
        for (std::size_t ip = 0; ip < np; ++ip) {
            double c = tw(ix, nx) * tw(ip, np) * at(ix, ip);
            norm += c;
            m.x += c * x_of(ix);
            m.p += c * p_of(ip);
        }
    return {m.x / norm, m.p / norm};
}

Mat2 WignerGrid::covariance() const {
    Vec2 mu = mean();
    double norm = 0.0;
    double sxx = 0.0, sxp = 0.0, spp = 0.0;
    for (std::size_t ix = 0; ix < nx; ++ix)
        for (std::size_t ip = 0; ip < np; ++ip) {
            double c = tw(ix, nx) * tw(ip, np) * at(ix, ip);
            double dx = x_of(ix) - mu.x, dp = p_of(ip) - mu.p;
            norm += c;
            sxx += c * dx * dx;
            sxp += c * dx * dp;
            spp += c * dp * dp;
        }
    return {sxx / norm, sxp / norm, sxp / norm, spp / norm};
}

double WignerGrid::max_abs() const {
    double m = 0.0;
    for (double v : w) m = std::max(m, std::abs(v));
    return m;
}

bool WignerGrid::boundary_decay_ok() const {
    double cut = 1e-8 * max_abs();
    const std::size_t pad = 5;
    if (nx <= 2 * pad || np <= 2 * pad) return false;
    for (std::size_t ix = 0; ix < nx; ++ix)
        for (std::size_t ip = 0; ip < np; ++ip) {
            bool edge = ix < pad || ix + pad >= nx || ip < pad || ip + pad >= np;
            if (edge && std::abs(at(ix, ip)) > cut) return false;
        }
    return true;
}

WignerGrid init_gaussian(const Vec2& mean, const Mat2& covariance,
                         double x_min, double x_max, double p_min, double p_max,
                         std::size_t nx, std::size_t np) {
    double det = covariance.det();
    if (det <= 0.0 || covariance(0, 0) <= 0.0)
        throw std::invalid_argument("init_gaussian: covariance must be SPD");
    double sx = std::sqrt(covariance(0, 0)), sp = std::sqrt(covariance(1, 1));
    if (mean.x - 6 * sx < x_min || mean.x + 6 * sx > x_max ||
        mean.p - 6 * sp < p_min || mean.p + 6 * sp > p_max)
        throw std::invalid_argument("init_gaussian: window too small for mean +- 6 sigma");

    WignerGrid g;
    g.x_min = x_min;
    g.x_max = x_max;
    g.p_min = p_min;
    g.p_max = p_max;
    g.nx = nx;
    g.np = np;
    g.w.resize(nx * np);
    Mat2 inv = covariance.inverse();
    double norm = 1.0 / (2.0 * M_PI * std::sqrt(det));
    for (std::size_t ix = 0; ix < nx; ++ix)
        for (std::size_t ip = 0; ip < np; ++ip) {
            double dx = g.x_of(ix) - mean.x, dp = g.p_of(ip) - mean.p;
            double q = inv(0, 0) * dx * dx + 2.0 * inv(0, 1) * dx * dp + inv(1, 1) * dp * dp;
            g.at(ix, ip) = norm * std::exp(-0.5 * q);
        }
    return g;
}

namespace {

// In-place first derivative along x (axis 0) or p (axis 1): 2nd-order
// central stencil, one-sided at the edges.
void differentiate(std::vector<double>& f, std::size_t nx, std::size_t np, int axis, double h,
                   bool parallel) {
    std::vector<double> out(f.size());
    double ih = 1.0 / (2.0 * h);
    if (axis == 0) {
#pragma omp parallel for schedule(static) if (parallel)
        for (std::size_t ip = 0; ip < np; ++ip) {
            out[0 * np + ip] = (-3 * f[0 * np + ip] + 4 * f[1 * np + ip] - f[2 * np + ip]) * ih;
            for (std::size_t ix = 1; ix + 1 < nx; ++ix)
                out[ix * np + ip] = (f[(ix + 1) * np + ip] - f[(ix - 1) * np + ip]) * ih;
            out[(nx - 1) * np + ip] =
                (3 * f[(nx - 1) * np + ip] - 4 * f[(nx - 2) * np + ip] + f[(nx - 3) * np + ip]) * ih;
        }
    } else {
#pragma omp parallel for schedule(static) if (parallel)
        for (std::size_t ix = 0; ix < nx; ++ix) {
            double* row = f.data() + ix * np;
            double* orow = out.data() + ix * np;
            orow[0] = (-3 * row[0] + 4 * row[1] - row[2]) * ih;
            for (std::size_t ip = 1; ip + 1 < np; ++ip)
                orow[ip] = (row[ip + 1] - row[ip - 1]) * ih;
            orow[np - 1] = (3 * row[np - 1] - 4 * row[np - 2] + row[np - 3]) * ih;
        }
    }
    f.swap(out);
}

WignerGrid apply_impl(const PhaseOp& op, const WignerGrid& grid, bool parallel) {
    if (grid.nx < 3 || grid.np < 3)
        throw std::invalid_argument("apply: grid too small for the derivative stencil");
    WignerGrid out = grid;
    std::fill(out.w.begin(), out.w.end(), 0.0);

    for (const auto& [key, coeff] : op.terms()) {
        Mono m = Mono::from_key(key);
        std::vector<double> field = grid.w;
        // Right-to-left: coordinate factors first, then derivatives.
        if (m.k > 0 || m.l > 0) {
#pragma omp parallel for schedule(static) if (parallel)
            for (std::size_t ix = 0; ix < grid.nx; ++ix) {
                double xk = std::pow(grid.x_of(ix), m.k);
                for (std::size_t ip = 0; ip < grid.np; ++ip)
                    field[ix * grid.np + ip] *= xk * std::pow(grid.p_of(ip), m.l);
            }
        }
        for (int r = 0; r < m.i; ++r) differentiate(field, grid.nx, grid.np, 0, grid.hx(), parallel);
        for (int r = 0; r < m.j; ++r) differentiate(field, grid.nx, grid.np, 1, grid.hp(), parallel);
#pragma omp parallel for schedule(static) if (parallel)
        for (std::size_t idx = 0; idx < field.size(); ++idx) out.w[idx] += coeff * field[idx];
    }
    return out;
}

}  // namespace

WignerGrid apply(const PhaseOp& op, const WignerGrid& grid) { return apply_impl(op, grid, true); }

WignerGrid apply_serial(const PhaseOp& op, const WignerGrid& grid) {
    return apply_impl(op, grid, false);
}

WignerGrid step(const WignerGrid& grid, const PhaseOp& L, double dt) {
    // CFL-type bound from the operator coefficients on this window.
    double max_d = 0.0, max_drift = 0.0;
    double xm = std::max(std::abs(grid.x_min), std::abs(grid.x_max));
    double pm = std::max(std::abs(grid.p_min), std::abs(grid.p_max));
    for (const auto& [key, coeff] : L.terms()) {
        Mono m = Mono::from_key(key);
        double scale = std::abs(coeff) * std::pow(xm, m.k) * std::pow(pm, m.l);
        if (m.deriv_order() >= 2) max_d = std::max(max_d, scale);
        else if (m.deriv_order() == 1) max_drift = std::max(max_drift, scale);
    }
    double h = std::min(grid.hx(), grid.hp());
    double bound = std::numeric_limits<double>::infinity();
    if (max_d > 0.0) bound = std::min(bound, 0.25 * h * h / max_d);
    if (max_drift > 0.0) bound = std::min(bound, 0.25 * h / max_drift);
    if (dt > bound)
        throw std::invalid_argument("step: dt = " + std::to_string(dt) +
                                    " violates the CFL-type bound " + std::to_string(bound));

    WignerGrid k1 = apply(L, grid);
    WignerGrid mid = grid;
    for (std::size_t i = 0; i < mid.w.size(); ++i) mid.w[i] += dt * k1.w[i];
    WignerGrid k2 = apply(L, mid);
    WignerGrid out = grid;
    for (std::size_t i = 0; i < out.w.size(); ++i) {
        out.w[i] += 0.5 * dt * (k1.w[i] + k2.w[i]);
        if (!std::isfinite(out.w[i])) {
            std::size_t ix = i / grid.np, ip = i % grid.np;
            throw std::runtime_error("step: NaN at cell (" + std::to_string(ix) + ", " +
                                     std::to_string(ip) + "), t = " + std::to_string(grid.time));
        }
    }
    out.time = grid.time + dt;
    return out;
}

}  // namespace qbm
