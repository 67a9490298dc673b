#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qbm/bath.hpp"
#include "qbm/grid.hpp"
#include "qbm/mat2.hpp"

namespace qbm {

// Gaussian noise process xi(t) sampled on the grid with covariance
// C_ij = nu(t_i - t_j) (plus nu_delta/dt on the diagonal for white noise),
// factored once by Cholesky. Draws are generated lazily: draw i is a
// deterministic function of (seed, i), so ensembles are reproducible and
// parallel-safe without storing all paths.
class NoiseEnsemble {
public:
    NoiseEnsemble(const KernelTable& kernels, const TimeGrid& grid, std::size_t n_samples,
                  std::uint64_t seed);

    const TimeGrid& grid() const { return grid_; }
    std::size_t n_samples() const { return n_; }
    std::uint64_t seed() const { return seed_; }

    // One noise path of grid length (n+1 values).
    std::vector<double> path(std::size_t draw) const;

    // iid standard normals feeding draw i (before correlation).
    std::vector<double> normals(std::size_t draw) const;

    // Lower-triangular factor L with C = L L^T, row-major.
    const std::vector<double>& factor() const { return chol_; }

private:
    TimeGrid grid_;
    std::size_t n_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<double> chol_;
};

NoiseEnsemble sample_noise(const KernelTable& kernels, const TimeGrid& grid,
                           std::size_t n_samples, std::uint64_t seed);

// Potential derivative V'(x) = sum_k coeffs[k] x^k.
struct PolynomialForce {
    std::vector<double> coeffs;
    double operator()(double x) const {
        double v = 0.0;
        for (std::size_t k = coeffs.size(); k-- > 0;) v = v * x + coeffs[k];
        return v;
    }
    static PolynomialForce linear_spring(double mass, double omega) {
        return {{0.0, mass * omega * omega}};
    }
};

// One classical Langevin trajectory
//   m xddot + V'(x) + 2m (gamma * xdot)(t) + 2m gamma(t) x(0) = xi(t)
// on the noise grid (Heun steps; exact auxiliary-variable embedding for the
// Lorentz kernel, product-trapezoid memory otherwise; the delta-kernel
// initial-position term acts as a momentum impulse at t = 0).
std::vector<Vec2> integrate_langevin(const SpectralModel& model, const KernelTable& kernels,
                                     const PolynomialForce& vprime,
                                     const std::vector<double>& xi, const Vec2& z0);

// Ensemble statistics at selected output times, plus two-time cross
// covariances for selected index pairs into `times`.
struct LangevinStats {
    std::vector<double> times;
    std::vector<Vec2> mean;
    std::vector<Mat2> cov;                                // about the sample mean
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<Mat2> cross;                              // E[dz(t_a) dz(t_b)^T]
    std::size_t n = 0;
};

LangevinStats langevin_ensemble_stats(const SpectralModel& model, const KernelTable& kernels,
                                      const PolynomialForce& vprime, const NoiseEnsemble& ens,
                                      const Vec2& z0, const std::vector<double>& times,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& pairs = {});
// Serial reference implementation (kept for testing and benchmarking).
LangevinStats langevin_ensemble_stats_serial(const SpectralModel& model, const KernelTable& kernels,
                                             const PolynomialForce& vprime, const NoiseEnsemble& ens,
                                             const Vec2& z0, const std::vector<double>& times,
                                             const std::vector<std::pair<std::size_t, std::size_t>>& pairs = {});

}  // namespace qbm
