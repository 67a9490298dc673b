#include "qbm/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qbm {

namespace {

// 4-point Gauss-Legendre on [0, 1].
constexpr double kGlNode[4] = {0.069431844202973712, 0.330009478207571868,
                               0.669990521792428132, 0.930568155797026288};
constexpr double kGlWeight[4] = {0.173927422568726929, 0.326072577431273071,
                                 0.326072577431273071, 0.173927422568726929};

// Cubic Hermite basis at u in [0, 1]; slopes are scaled by the interval length.
struct HermiteBasis {
    double h00, h10, h01, h11;
    explicit HermiteBasis(double u) {
        double u2 = u * u, u3 = u2 * u;
        h00 = 2 * u3 - 3 * u2 + 1;
        h10 = u3 - 2 * u2 + u;
        h01 = -2 * u3 + 3 * u2;
        h11 = u3 - u2;
    }
};

// Memory-integral evaluator for one nonlocal kernel: computes
// I(ts) = Int_0^ts gamma(ts - tau) f(tau) dtau given nodal values and
// derivatives of f, using per-subinterval Gauss-Legendre with a cubic
// Hermite reconstruction of f. The final partial subinterval [t_k, ts]
// uses a Taylor extension of f from node k.
class MemoryIntegral {
public:
    MemoryIntegral(const SpectralModel& model, double dt) : model_(model), dt_(dt) {
        for (int q = 0; q < 4; ++q) basis_[q] = HermiteBasis(kGlNode[q]);
    }

    // History part over full subintervals [0, t_k], k = complete node count - 1.
    double history(double ts, std::size_t k, const std::vector<double>& f,
                   const std::vector<double>& fdot) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            double t0 = static_cast<double>(i) * dt_;
            double part = 0.0;
            for (int q = 0; q < 4; ++q) {
                const HermiteBasis& b = basis_[q];
                double tau = t0 + kGlNode[q] * dt_;
                double fv = b.h00 * f[i] + b.h01 * f[i + 1] +
                            dt_ * (b.h10 * fdot[i] + b.h11 * fdot[i + 1]);
                part += kGlWeight[q] * damping_kernel(model_, ts - tau) * fv;
            }
            sum += part * dt_;
        }
        return sum;
    }

    // Local part over [t_k, ts] with f extended by a second-order Taylor
    // series from node k (value fk, slope fdk, curvature fddk).
    double local(double ts, std::size_t k, double fk, double fdk, double fddk) const {
        double t0 = static_cast<double>(k) * dt_;
        double h = ts - t0;
        if (h <= 0.0) return 0.0;
        double sum = 0.0;
        for (int q = 0; q < 4; ++q) {
            double s = kGlNode[q] * h;
            double fv = fk + s * (fdk + 0.5 * s * fddk);
            sum += kGlWeight[q] * damping_kernel(model_, ts - (t0 + s)) * fv;
        }
        return sum * h;
    }

private:
    SpectralModel model_;
    double dt_;
    HermiteBasis basis_[4] = {HermiteBasis(0), HermiteBasis(0), HermiteBasis(0), HermiteBasis(0)};
};

void solve_local_closed_form(const SpectralModel& model, PropagatorTable& table) {
    double m = model.mass, w = model.omega, g0 = model.gamma0;
    const TimeGrid& grid = table.grid;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double t = grid.time(i);
        double g, v;
        if (g0 == 0.0) {
            g = (w == 0.0) ? t / m : std::sin(w * t) / (m * w);
            v = std::cos(w * t) / m;
        } else if (w > g0) {
            double W = std::sqrt(w * w - g0 * g0);
            double e = std::exp(-g0 * t);
            g = e * std::sin(W * t) / (m * W);
            v = e * (W * std::cos(W * t) - g0 * std::sin(W * t)) / (m * W);
        } else if (w == g0) {
            double e = std::exp(-g0 * t);
            g = t * e / m;
            v = e * (1.0 - g0 * t) / m;
        } else {
            double W = std::sqrt(g0 * g0 - w * w);
            double e = std::exp(-g0 * t);
            g = e * std::sinh(W * t) / (m * W);
            v = e * (W * std::cosh(W * t) - g0 * std::sinh(W * t)) / (m * W);
        }
        double a = -w * w * g - 2.0 * g0 * v;
        double j = -w * w * v - 2.0 * g0 * a;
        table.g[i] = g;
        table.gdot[i] = v;
        table.gddot[i] = a;
        table.gdddot[i] = j;
    }
}

void solve_volterra(const SpectralModel& model, PropagatorTable& table) {
    const TimeGrid& grid = table.grid;
    double dt = grid.dt;
    double m = model.mass, w2 = model.omega * model.omega;
    MemoryIntegral mem(model, dt);

    auto& g = table.g;
    auto& v = table.gdot;
    auto& a = table.gddot;
    auto& j = table.gdddot;

    g[0] = 0.0;
    v[0] = 1.0 / m;
    a[0] = -w2 * g[0];  // memory integral vanishes at t = 0
    j[0] = -w2 * v[0] - 2.0 * damping_kernel(model, 0.0) / m;

    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        double tn = grid.time(k);

        // Memory term at the RK stage times. The history part is fixed
        // within the step; the local tail uses the node-k Taylor data.
        auto memory_at = [&](double ts) {
            return mem.history(ts, k, v, a) + mem.local(ts, k, v[k], a[k], j[k]);
        };
        double I_half = memory_at(tn + 0.5 * dt);
        double I_full = memory_at(tn + dt);

        auto accel = [&](double gs, double I) { return -w2 * gs - 2.0 * I; };

        double k1g = v[k];
        double k1v = a[k];
        double k2g = v[k] + 0.5 * dt * k1v;
        double k2v = accel(g[k] + 0.5 * dt * k1g, I_half);
        double k3g = v[k] + 0.5 * dt * k2v;
        double k3v = accel(g[k] + 0.5 * dt * k2g, I_half);
        double k4g = v[k] + dt * k3v;
        double k4v = accel(g[k] + dt * k3g, I_full);

        g[k + 1] = g[k] + dt / 6.0 * (k1g + 2 * k2g + 2 * k3g + k4g);
        v[k + 1] = v[k] + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);

        // Nodal acceleration from the Volterra equation itself. The last
        // Hermite subinterval references a[k+1], so iterate the fixed point
        // (contraction of order dt^2).
        double tn1 = grid.time(k + 1);
        a[k + 1] = accel(g[k + 1], I_full);
        for (int it = 0; it < 2; ++it) {
            double I = mem.history(tn1, k + 1, v, a);
            a[k + 1] = accel(g[k + 1], I);
        }

        // Jerk from the differentiated equation:
        //   gdddot = -w^2 gdot - 2 [ gamma(t)/m + Int_0^t gamma(t-tau) gddot dtau ].
        double J = 0.0;
        for (std::size_t i = 0; i <= k + 1; ++i) {
            double wgt = grid.trap_weight(i, k + 1);
            J += wgt * damping_kernel(model, grid.time(k + 1 - i)) * a[i];
        }
        j[k + 1] = -w2 * v[k + 1] - 2.0 * (damping_kernel(model, tn1) / m + J);

        if (!std::isfinite(g[k + 1]) || !std::isfinite(v[k + 1]))
            throw std::runtime_error("greens_function: Volterra iteration diverged at t = " +
                                     std::to_string(tn1));
    }
}

}  // namespace

PropagatorTable greens_function(const SpectralModel& model, const TimeGrid& grid) {
    model.validate();
    double rate = std::max({model.omega, model.gamma0, model.is_local() ? 0.0 : model.cutoff});
    if (grid.dt * rate > 0.1 + 1e-12)
        throw std::invalid_argument("greens_function: dt too large, need dt*max(omega,gamma0,cutoff) <= 0.1");

    PropagatorTable table;
    table.grid = grid;
    table.model = model;
    table.g.resize(grid.size());
    table.gdot.resize(grid.size());
    table.gddot.resize(grid.size());
    table.gdddot.resize(grid.size());

    if (model.is_local() || model.gamma0 == 0.0)
        solve_local_closed_form(model.is_local() ? model : [&] {
            SpectralModel undamped = model;
            undamped.family = BathFamily::Local;
            undamped.gamma0 = 0.0;
            return undamped;
        }(), table);
    else
        solve_volterra(model, table);

    build_phi(table);
    return table;
}

void build_phi(PropagatorTable& table) {
    if (table.g.empty()) throw std::invalid_argument("build_phi: g not present");
    double m = table.model.mass;
    table.phi.resize(table.grid.size());
    table.phidot.resize(table.grid.size());
    for (std::size_t i = 0; i < table.grid.size(); ++i) {
        table.phi[i] = Mat2(m * table.gdot[i], table.g[i],
                            m * m * table.gddot[i], m * table.gdot[i]);
        table.phidot[i] = Mat2(m * table.gddot[i], table.gdot[i],
                               m * m * table.gdddot[i], m * table.gddot[i]);
    }
}

RelativePropagator phi_rel(const PropagatorTable& table, double tau, double t) {
    std::size_t it = table.grid.index(t);
    std::size_t itau = table.grid.index(tau);
    const Mat2& phi_t = table.phi[it];
    if (phi_t.cond() > 1e10)
        throw std::runtime_error("phi_rel: Phi(t) near-singular at t = " + std::to_string(t));
    RelativePropagator rel;
    rel.source_t = t;
    rel.target_t = tau;
    rel.matrix = table.phi[itau] * phi_t.inverse();
    return rel;
}

Mat2 phi_final(const PropagatorTable& table, double tau, double tau_prime, double t) {
    Mat2 result = Mat2::zero();
    if (tau >= tau_prime)  // theta(0) = 1
        result += table.phi[table.grid.index(tau - tau_prime)];
    Mat2 rel = phi_rel(table, tau, t).matrix;
    result += rel * table.phi[table.grid.index(t - tau_prime)] * (-1.0);
    return result;
}

double volterra_residual(const PropagatorTable& table) {
    const SpectralModel& model = table.model;
    const TimeGrid& grid = table.grid;
    double m = model.mass, w2 = model.omega * model.omega;
    double gmax = 0.0;
    for (double gi : table.g) gmax = std::max(gmax, std::abs(gi));
    double scale = m * std::max(w2 * gmax, 1e-300);
    if (model.omega == 0.0) {
        for (double ai : table.gddot) scale = std::max(scale, m * std::abs(ai));
    }

    double worst = 0.0;
    if (model.is_local()) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double r = m * table.gddot[i] + w2 * m * table.g[i] +
                       2.0 * m * model.gamma0 * table.gdot[i];
            worst = std::max(worst, std::abs(r));
        }
        return worst / scale;
    }

    MemoryIntegral mem(model, grid.dt);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double I = mem.history(grid.time(i), i, table.gdot, table.gddot);
        double r = m * table.gddot[i] + w2 * m * table.g[i] + 2.0 * m * I;
        worst = std::max(worst, std::abs(r));
    }
    return worst / scale;
}

}  // namespace qbm
