#pragma once

#include <functional>

namespace qbm {

struct QuadResult {
    double value = 0.0;
    double abserr = 0.0;
};

// Adaptive quadrature of f on [a, b] (GSL QAG, 61-point Gauss-Kronrod).
// Throws on nonconvergence, reporting the achieved error estimate.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol = 1e-10, double rel_tol = 1e-8);

// Adaptive quadrature of f(x) * cos(omega x) on [a, b] (GSL QAWO).
// Falls back to plain adaptive integration of the product for tiny omega.
QuadResult integrate_oscillatory_cos(const std::function<double(double)>& f, double a, double b,
                                     double omega, double abs_tol = 1e-10, double rel_tol = 1e-8);

}  // namespace qbm
