#pragma once

#include <vector>

#include "qbm/bath.hpp"
#include "qbm/grid.hpp"
#include "qbm/mat2.hpp"
#include "qbm/propagator.hpp"

namespace qbm {

// Two-time thermal covariance
//   sigma_T(t1,t2) = Int_0^t1 Int_0^t2 Phi(t1-s1) nu(s1,s2) Phi^T(t2-s2) ds1 ds2
// stored for t1 <= t2 on the triangular grid; the other half follows from
// sigma_T(t2,t1) = sigma_T(t1,t2)^T. Only the (p,p) block of nu is nonzero,
// so the integrand reduces to outer products of phi(u) = Phi(u) phat.
struct CovarianceTable {
    TimeGrid grid;
    std::vector<Mat2> sigma;           // triangular, entry (i <= j) at j*(j+1)/2 + i
    std::vector<Mat2> sigma_dot_diag;  // d/dt sigma_T(t,t), analytic boundary form

    Mat2 at(std::size_t i, std::size_t j) const {
        if (i <= j) return sigma[j * (j + 1) / 2 + i];
        return sigma[i * (i + 1) / 2 + j].transpose();
    }
    Mat2 diag(std::size_t i) const { return sigma[i * (i + 1) / 2 + i]; }
};

// Full triangular fill; OpenMP-parallel over the outer time index.
CovarianceTable build_covariance(const PropagatorTable& prop, const KernelTable& kernels);
// Serial reference implementation (kept for testing and benchmarking).
CovarianceTable build_covariance_serial(const PropagatorTable& prop, const KernelTable& kernels);

// Single-pair evaluation by direct double product-trapezoid quadrature.
Mat2 sigma_T(const PropagatorTable& prop, const KernelTable& kernels, double t1, double t2);

// Row vector d(tau,t) = xhat^T [ Phi(tau,t) sigma(t,t) - sigma(tau,t) ],
// the coefficient of the first propagated-noise-moment operator.
struct Delta1Coeff {
    double tau = 0.0, t = 0.0;
    Vec2 d;
};

Delta1Coeff delta1_coeff(const PropagatorTable& prop, const CovarianceTable& cov,
                         double tau, double t);

// Scalar kernel
//   s(tau,t) = xhat^T [ sigma(tau,tau) + Phi(tau,t) sigma(t,t) Phi^T(tau,t)
//                       - 2 Phi(tau,t) sigma(t,tau) ] xhat ,
// the variance of xhat^T Int Phi_f(tau,tau') Xi(tau') dtau'.
double s_kernel(const PropagatorTable& prop, const CovarianceTable& cov, double tau, double t);

}  // namespace qbm
