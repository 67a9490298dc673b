#include "qbm/covariance.hpp"

#include <cmath>
#include <stdexcept>

namespace qbm {

namespace {

// phi(u_i) = Phi(u_i) phat = (g, m gdot): the only column of Phi the noise
// block couples to.
std::vector<Vec2> phi_column(const PropagatorTable& prop) {
    std::vector<Vec2> phi(prop.grid.size());
    double m = prop.model.mass;
    for (std::size_t i = 0; i < prop.grid.size(); ++i)
        phi[i] = {prop.g[i], m * prop.gdot[i]};
    return phi;
}

// sigma(t_i, t_j) for all i <= j at fixed j, written into row[0..j].
// Uses the shifted form
//   sigma(t_i,t_j) = Int_0^{t_i} du1 Int_0^{t_j} du2
//                      phi(u1) nu(u2 - u1 - (j-i) dt) phi^T(u2)
// with the inner integral cached as R(d) = sum_l w_l nu((l-d) dt) phi_l^T.
void fill_row(std::size_t j, const PropagatorTable& prop, const KernelTable& kern,
              const std::vector<Vec2>& phi, Mat2* row) {
    const TimeGrid& grid = prop.grid;
    double dt = grid.dt;

    if (kern.has_delta()) {
        // nu = w delta: sigma(t_i,t_j) = w Int_0^{t_i} phi(u) phi^T(u + (j-i) dt) du
        double w = kern.nu_delta_weight;
        for (std::size_t i = 0; i <= j; ++i) {
            Mat2 acc = Mat2::zero();
            for (std::size_t k = 0; k <= i; ++k)
                acc += grid.trap_weight(k, i) * outer(phi[k], phi[k + (j - i)]);
            row[i] = acc * w;
        }
        return;
    }

    // R(d), d = 0..j: inner trapezoid over u2 at fixed kernel offset.
    std::vector<Vec2> R(j + 1, Vec2{});
    for (std::size_t d = 0; d <= j; ++d) {
        Vec2 acc{};
        for (std::size_t l = 0; l <= j; ++l) {
            double nu = kern.nu[d >= l ? d - l : l - d];
            acc += (grid.trap_weight(l, j) * nu) * phi[l];
        }
        R[d] = acc;
    }
    for (std::size_t i = 0; i <= j; ++i) {
        Mat2 acc = Mat2::zero();
        for (std::size_t k = 0; k <= i; ++k)
            acc += grid.trap_weight(k, i) * outer(phi[k], R[k + (j - i)]);
        row[i] = acc;
    }
}

std::vector<Mat2> sigma_dot(const PropagatorTable& prop, const KernelTable& kern,
                            const std::vector<Vec2>& phi) {
    const TimeGrid& grid = prop.grid;
    std::vector<Mat2> sdot(grid.size());
    if (kern.has_delta()) {
        // d/dt [ w Int_0^t phi phi^T du ] = w phi(t) phi^T(t)
        for (std::size_t i = 0; i < grid.size(); ++i)
            sdot[i] = kern.nu_delta_weight * outer(phi[i], phi[i]);
        return sdot;
    }
    // d/dt sigma(t,t) = phi(t) q(t)^T + q(t) phi(t)^T,
    // q(t) = Int_0^t nu(t-u) phi(u) du (differentiation under the integral
    // in the shifted form; no finite differences).
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Vec2 q{};
        for (std::size_t l = 0; l <= i; ++l)
            q += (grid.trap_weight(l, i) * kern.nu[i - l]) * phi[l];
        sdot[i] = outer(phi[i], q) + outer(q, phi[i]);
    }
    return sdot;
}

CovarianceTable build_impl(const PropagatorTable& prop, const KernelTable& kern, bool parallel) {
    if (prop.grid.n != kern.grid.n || prop.grid.dt != kern.grid.dt)
        throw std::invalid_argument("build_covariance: propagator and kernel grids differ");
    CovarianceTable cov;
    cov.grid = prop.grid;
    std::size_t nn = prop.grid.size();
    cov.sigma.resize(nn * (nn + 1) / 2);
    std::vector<Vec2> phi = phi_column(prop);

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::size_t j = 0; j < nn; ++j)
        fill_row(j, prop, kern, phi, &cov.sigma[j * (j + 1) / 2]);

    cov.sigma_dot_diag = sigma_dot(prop, kern, phi);
    return cov;
}

}  // namespace

CovarianceTable build_covariance(const PropagatorTable& prop, const KernelTable& kernels) {
    return build_impl(prop, kernels, true);
}

CovarianceTable build_covariance_serial(const PropagatorTable& prop, const KernelTable& kernels) {
    return build_impl(prop, kernels, false);
}

Mat2 sigma_T(const PropagatorTable& prop, const KernelTable& kernels, double t1, double t2) {
    const TimeGrid& grid = prop.grid;
    std::size_t i1 = grid.index(t1), i2 = grid.index(t2);
    std::vector<Vec2> phi = phi_column(prop);
    Mat2 acc = Mat2::zero();
    if (kernels.has_delta()) {
        std::size_t mn = std::min(i1, i2);
        for (std::size_t k = 0; k <= mn; ++k)
            acc += grid.trap_weight(k, mn) * outer(phi[i1 - k], phi[i2 - k]);
        return acc * kernels.nu_delta_weight;
    }
    for (std::size_t k = 0; k <= i1; ++k) {
        Vec2 inner{};
        for (std::size_t l = 0; l <= i2; ++l) {
            // nu(s1 - s2) with s1 = t1 - u_k, s2 = t2 - u_l
            long long d = static_cast<long long>(i1) - static_cast<long long>(k) -
                          static_cast<long long>(i2) + static_cast<long long>(l);
            inner += (grid.trap_weight(l, i2) * kernels.nu[static_cast<std::size_t>(std::llabs(d))]) * phi[l];
        }
        acc += grid.trap_weight(k, i1) * outer(phi[k], inner);
    }
    return acc;
}

Delta1Coeff delta1_coeff(const PropagatorTable& prop, const CovarianceTable& cov,
                         double tau, double t) {
    std::size_t it = prop.grid.index(t), itau = prop.grid.index(tau);
    if (itau > it) throw std::invalid_argument("delta1_coeff: requires tau <= t");
    Mat2 rel = phi_rel(prop, tau, t).matrix;
    Mat2 M = rel * cov.diag(it) - cov.at(itau, it);
    Delta1Coeff out;
    out.tau = tau;
    out.t = t;
    out.d = {M(0, 0), M(0, 1)};  // xhat^T M
    return out;
}

double s_kernel(const PropagatorTable& prop, const CovarianceTable& cov, double tau, double t) {
    std::size_t it = prop.grid.index(t), itau = prop.grid.index(tau);
    if (itau > it) throw std::invalid_argument("s_kernel: requires tau <= t");
    Mat2 rel = phi_rel(prop, tau, t).matrix;
    Mat2 M = cov.diag(itau) + rel * cov.diag(it) * rel.transpose() -
             2.0 * (rel * cov.at(it, itau));
    return M(0, 0);  // xhat^T M xhat
}

}  // namespace qbm
