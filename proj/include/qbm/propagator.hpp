#pragma once

#include <vector>

#include "qbm/bath.hpp"
#include "qbm/grid.hpp"
#include "qbm/mat2.hpp"

namespace qbm {

// Green's function of the linear nonlocal Langevin equation and the
// homogeneous phase-space propagator Phi(t) built from it.
//
//   m gddot + m omega^2 g + 2m (gamma * gdot)(t) = 0,  g(0) = 0, gdot(0) = 1/m
//
//   Phi(t) = [[ m gdot, g ], [ m^2 gddot, m gdot ]]
struct PropagatorTable {
    TimeGrid grid;
    SpectralModel model;
    std::vector<double> g, gdot, gddot, gdddot;
    std::vector<Mat2> phi;     // Phi(t_i)
    std::vector<Mat2> phidot;  // analytic rows, gdddot-based (no finite differences)

    const Mat2& phi_at(std::size_t i) const { return phi[i]; }
    Mat2 phi_of(double t) const { return phi[grid.index(t)]; }
};

// Solves the Volterra integro-differential equation by explicit RK4 with a
// Hermite product-quadrature memory term; Local family in closed form.
PropagatorTable greens_function(const SpectralModel& model, const TimeGrid& grid);

// Fills phi and phidot from g and its derivatives.
void build_phi(PropagatorTable& table);

struct RelativePropagator {
    double source_t = 0.0;  // t
    double target_t = 0.0;  // tau
    Mat2 matrix;            // Phi(tau, t) = Phi(tau) Phi(t)^-1
};

// Phi(tau, t) = Phi(tau) Phi(t)^-1; errors on near-singular Phi(t).
RelativePropagator phi_rel(const PropagatorTable& table, double tau, double t);

// Final-value propagator Phi_f(tau, tau') with theta(0) = 1:
//   Phi_f(tau, tau') = theta(tau - tau') Phi(tau - tau') - Phi(tau, t) Phi(t - tau')
Mat2 phi_final(const PropagatorTable& table, double tau, double tau_prime, double t);

// Max residual of the Volterra equation evaluated on the stored solution,
// in units of m omega^2 max|g| (falls back to m max|gddot| when omega = 0).
double volterra_residual(const PropagatorTable& table);

}  // namespace qbm
