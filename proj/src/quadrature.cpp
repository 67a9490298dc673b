#include "qbm/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace qbm {

namespace {

double callback(double x, void* params) {
    auto* f = static_cast<const std::function<double(double)>*>(params);
    return (*f)(x);
}

struct GslErrorGuard {
    gsl_error_handler_t* old;
    GslErrorGuard() : old(gsl_set_error_handler_off()) {}
    ~GslErrorGuard() { gsl_set_error_handler(old); }
};

constexpr std::size_t kWorkspaceSize = 4096;

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, double rel_tol) {
    GslErrorGuard guard;
    gsl_function gf{&callback, const_cast<std::function<double(double)>*>(&f)};
    std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws(
        gsl_integration_workspace_alloc(kWorkspaceSize), &gsl_integration_workspace_free);

    QuadResult r;
    int status = gsl_integration_qag(&gf, a, b, abs_tol, rel_tol, kWorkspaceSize,
                                     GSL_INTEG_GAUSS61, ws.get(), &r.value, &r.abserr);
    if (status != GSL_SUCCESS && status != GSL_EROUND)
        throw std::runtime_error("integrate_adaptive: nonconvergent quadrature, achieved error " +
                                 std::to_string(r.abserr));
    return r;
}

QuadResult integrate_oscillatory_cos(const std::function<double(double)>& f, double a, double b,
                                     double omega, double abs_tol, double rel_tol) {
    // Below roughly one oscillation over [a, b] the plain adaptive rule is
    // both cheaper and more reliable than the QAWO Chebyshev machinery.
    if (std::abs(omega) * (b - a) < 2.0 * M_PI) {
        auto g = [&f, omega](double x) { return f(x) * std::cos(omega * x); };
        return integrate_adaptive(g, a, b, abs_tol, rel_tol);
    }

    GslErrorGuard guard;
    gsl_function gf{&callback, const_cast<std::function<double(double)>*>(&f)};
    std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws(
        gsl_integration_workspace_alloc(kWorkspaceSize), &gsl_integration_workspace_free);
    std::unique_ptr<gsl_integration_qawo_table, decltype(&gsl_integration_qawo_table_free)> table(
        gsl_integration_qawo_table_alloc(omega, b - a, GSL_INTEG_COSINE, 48),
        &gsl_integration_qawo_table_free);

    QuadResult r;
    int status = gsl_integration_qawo(&gf, a, abs_tol, rel_tol, kWorkspaceSize, ws.get(),
                                      table.get(), &r.value, &r.abserr);
    if (status != GSL_SUCCESS && status != GSL_EROUND)
        throw std::runtime_error("integrate_oscillatory_cos: nonconvergent quadrature, achieved error " +
                                 std::to_string(r.abserr));
    return r;
}

}  // namespace qbm
