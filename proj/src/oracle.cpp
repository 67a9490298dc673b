#include "qbm/oracle.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace qbm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

NoiseEnsemble::NoiseEnsemble(const KernelTable& kernels, const TimeGrid& grid,
                             std::size_t n_samples, std::uint64_t seed)
    : grid_(grid), n_(n_samples), seed_(seed) {
    const std::size_t m = grid.size();
    Eigen::MatrixXd C(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double v = kernels.nu.empty() ? 0.0 : kernels.nu_at(grid.time(i) - grid.time(j));
            if (i == j && kernels.nu_delta_weight != 0.0) v += kernels.nu_delta_weight / grid.dt;
            C(i, j) = C(j, i) = v;
        }

    double trace = C.trace();
    Eigen::LLT<Eigen::MatrixXd> llt(C);
    if (llt.info() != Eigen::Success) {
        // Regularize within 1e-10 of the trace before giving up on Cholesky.
        Eigen::MatrixXd Cj = C + (1e-10 * std::max(trace, 1.0) / static_cast<double>(m)) *
                                     Eigen::MatrixXd::Identity(m, m);
        llt.compute(Cj);
    }
    Eigen::MatrixXd L;
    if (llt.info() == Eigen::Success) {
        L = llt.matrixL();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
        double floor = -1e-10 * std::max(trace, 1.0);
        Eigen::VectorXd ev = es.eigenvalues();
        for (Eigen::Index k = 0; k < ev.size(); ++k) {
            if (ev[k] < floor)
                throw std::runtime_error("NoiseEnsemble: noise covariance is indefinite (min "
                                         "eigenvalue " + std::to_string(ev[k]) + ")");
            ev[k] = std::max(ev[k], 0.0);
        }
        L = es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
    }
    chol_.resize(m * m);
    Eigen::Map<RowMajor>(chol_.data(), m, m) = L;
}

std::vector<double> NoiseEnsemble::normals(std::size_t draw) const {
    std::mt19937_64 rng(splitmix64(seed_ ^ splitmix64(draw)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> eta(grid_.size());
    for (double& e : eta) e = gauss(rng);
    return eta;
}

std::vector<double> NoiseEnsemble::path(std::size_t draw) const {
    const std::size_t m = grid_.size();
    std::vector<double> eta = normals(draw);
    std::vector<double> xi(m);
    Eigen::Map<const RowMajor> L(chol_.data(), m, m);
    Eigen::Map<Eigen::VectorXd>(xi.data(), m) =
        L * Eigen::Map<const Eigen::VectorXd>(eta.data(), m);
    return xi;
}

NoiseEnsemble sample_noise(const KernelTable& kernels, const TimeGrid& grid,
                           std::size_t n_samples, std::uint64_t seed) {
    return NoiseEnsemble(kernels, grid, n_samples, seed);
}

namespace {

struct LangevinState {
    double x, p, u;  // u: auxiliary memory variable (Lorentz embedding only)
};

}  // namespace

std::vector<Vec2> integrate_langevin(const SpectralModel& model, const KernelTable& kernels,
                                     const PolynomialForce& vprime,
                                     const std::vector<double>& xi, const Vec2& z0) {
    const TimeGrid& grid = kernels.grid;
    if (xi.size() != grid.size())
        throw std::invalid_argument("integrate_langevin: noise path does not match the grid");
    const double dt = grid.dt;
    const double m = model.mass;
    const double blowup = 1e8 * (1.0 + std::abs(z0.x) + std::abs(z0.p));

    std::vector<Vec2> traj(grid.size());
    traj[0] = z0;

    const bool local = model.is_local();
    const bool lorentz = model.family == BathFamily::OhmicLorentzCutoff;
    const double lam = model.cutoff, g0 = model.gamma0;

    if (local || lorentz) {
        // Memory-free form. Local damps through 2 m gamma0 xdot plus the
        // t = 0 momentum impulse -2 m gamma0 x(0) from the initial-position
        // term; the Lorentz kernel embeds exactly as
        // udot = -Lambda u + gamma0 Lambda xdot with u(0) = gamma0 Lambda x(0)
        // (initial-position term included). RK4 with the noise linearly
        // interpolated to the half step.
        auto rhs = [&](const LangevinState& y, double noise) -> LangevinState {
            LangevinState d;
            d.x = y.p / m;
            double drag = local ? 2.0 * g0 * y.p : m * y.u;
            d.p = -vprime(y.x) - drag + noise;
            d.u = lorentz ? -lam * y.u + g0 * lam * y.p / m : 0.0;
            return d;
        };
        LangevinState s{z0.x, local ? z0.p - 2.0 * m * g0 * z0.x : z0.p,
                        lorentz ? g0 * lam * z0.x : 0.0};
        traj[0] = {s.x, s.p};
        for (std::size_t k = 0; k < grid.n; ++k) {
            double xm = 0.5 * (xi[k] + xi[k + 1]);
            LangevinState k1 = rhs(s, xi[k]);
            LangevinState k2 = rhs({s.x + 0.5 * dt * k1.x, s.p + 0.5 * dt * k1.p,
                                    s.u + 0.5 * dt * k1.u}, xm);
            LangevinState k3 = rhs({s.x + 0.5 * dt * k2.x, s.p + 0.5 * dt * k2.p,
                                    s.u + 0.5 * dt * k2.u}, xm);
            LangevinState k4 = rhs({s.x + dt * k3.x, s.p + dt * k3.p, s.u + dt * k3.u}, xi[k + 1]);
            s.x += dt / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
            s.p += dt / 6.0 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p);
            s.u += dt / 6.0 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u);
            if (!(std::abs(s.x) + std::abs(s.p) < blowup))
                throw std::runtime_error("integrate_langevin: trajectory diverged at t = " +
                                         std::to_string(grid.time(k + 1)) + "; reduce dt");
            traj[k + 1] = {s.x, s.p};
        }
        return traj;
    }

    // General sampled kernel: Heun with the memory force
    //   u(t_k) = 2 sum_j w_j gamma(t_k - t_j) xdot_j + 2 gamma(t_k) x(0)
    // by product trapezoid over the stored velocity history.
    std::vector<double> vs(grid.size(), 0.0);
    vs[0] = z0.p / m;
    auto memory = [&](std::size_t k, double vk) -> double {
        double acc = 0.0;
        for (std::size_t j = 0; j < k; ++j)
            acc += grid.trap_weight(j, k) * kernels.gamma_at(grid.time(k) - grid.time(j)) * vs[j];
        acc += grid.trap_weight(k, k) * kernels.gamma_at(0.0) * vk;
        return 2.0 * acc + 2.0 * kernels.gamma_at(grid.time(k)) * z0.x;
    };
    Vec2 s = z0;
    for (std::size_t k = 0; k < grid.n; ++k) {
        auto rhs = [&](const Vec2& y, double noise, double u) -> Vec2 {
            return {y.p / m, -vprime(y.x) - m * u + noise};
        };
        Vec2 k1 = rhs(s, xi[k], memory(k, s.p / m));
        Vec2 pred{s.x + dt * k1.x, s.p + dt * k1.p};
        Vec2 k2 = rhs(pred, xi[k + 1], memory(k + 1, pred.p / m));
        s.x += 0.5 * dt * (k1.x + k2.x);
        s.p += 0.5 * dt * (k1.p + k2.p);
        if (!(std::abs(s.x) + std::abs(s.p) < blowup))
            throw std::runtime_error("integrate_langevin: trajectory diverged at t = " +
                                     std::to_string(grid.time(k + 1)) + "; reduce dt");
        vs[k + 1] = s.p / m;
        traj[k + 1] = {s.x, s.p};
    }
    return traj;
}

namespace {

LangevinStats stats_impl(const SpectralModel& model, const KernelTable& kernels,
                         const PolynomialForce& vprime, const NoiseEnsemble& ens, const Vec2& z0,
                         const std::vector<double>& times,
                         const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                         bool parallel) {
    const TimeGrid& grid = ens.grid();
    const std::size_t m = grid.size();
    std::vector<std::size_t> idx(times.size());
    for (std::size_t a = 0; a < times.size(); ++a) idx[a] = grid.index(times[a]);
    for (const auto& [a, b] : pairs)
        if (a >= times.size() || b >= times.size())
            throw std::invalid_argument("langevin_ensemble_stats: pair index out of range");

    const std::size_t nt = times.size(), npair = pairs.size();
    std::vector<Vec2> sum(nt, Vec2{});
    std::vector<Mat2> sum2(nt, Mat2::zero());
    std::vector<Mat2> sump(npair, Mat2::zero());

    Eigen::Map<const RowMajor> L(ens.factor().data(), m, m);
    const std::size_t batch = 256;
    for (std::size_t b0 = 0; b0 < ens.n_samples(); b0 += batch) {
        const std::size_t nb = std::min(batch, ens.n_samples() - b0);
        Eigen::MatrixXd H(m, nb);
        for (std::size_t c = 0; c < nb; ++c) {
            std::vector<double> eta = ens.normals(b0 + c);
            H.col(static_cast<Eigen::Index>(c)) = Eigen::Map<const Eigen::VectorXd>(eta.data(), m);
        }
        Eigen::MatrixXd X = L * H;  // one correlated path per column

#pragma omp parallel if (parallel)
        {
            std::vector<Vec2> lsum(nt, Vec2{});
            std::vector<Mat2> lsum2(nt, Mat2::zero());
            std::vector<Mat2> lsump(npair, Mat2::zero());
            std::vector<double> xi(m);
#pragma omp for schedule(static)
            for (long long c = 0; c < static_cast<long long>(nb); ++c) {
                Eigen::Map<Eigen::VectorXd>(xi.data(), m) = X.col(static_cast<Eigen::Index>(c));
                std::vector<Vec2> traj = integrate_langevin(model, kernels, vprime, xi, z0);
                for (std::size_t a = 0; a < nt; ++a) {
                    Vec2 z = traj[idx[a]];
                    lsum[a] += z;
                    lsum2[a] += outer(z, z);
                }
                for (std::size_t q = 0; q < npair; ++q)
                    lsump[q] += outer(traj[idx[pairs[q].first]], traj[idx[pairs[q].second]]);
            }
#pragma omp critical
            {
                for (std::size_t a = 0; a < nt; ++a) {
                    sum[a] += lsum[a];
                    sum2[a] += lsum2[a];
                }
                for (std::size_t q = 0; q < npair; ++q) sump[q] += lsump[q];
            }
        }
    }

    LangevinStats out;
    out.times = times;
    out.pairs = pairs;
    out.n = ens.n_samples();
    const double inv = 1.0 / static_cast<double>(out.n);
    out.mean.resize(nt);
    out.cov.resize(nt);
    for (std::size_t a = 0; a < nt; ++a) {
        Vec2 mu = sum[a] * inv;
        out.mean[a] = mu;
        out.cov[a] = sum2[a] * inv - outer(mu, mu);
    }
    out.cross.resize(npair);
    for (std::size_t q = 0; q < npair; ++q)
        out.cross[q] = sump[q] * inv - outer(out.mean[pairs[q].first], out.mean[pairs[q].second]);
    return out;
}

}  // namespace

LangevinStats langevin_ensemble_stats(const SpectralModel& model, const KernelTable& kernels,
                                      const PolynomialForce& vprime, const NoiseEnsemble& ens,
                                      const Vec2& z0, const std::vector<double>& times,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    return stats_impl(model, kernels, vprime, ens, z0, times, pairs, true);
}

LangevinStats langevin_ensemble_stats_serial(const SpectralModel& model, const KernelTable& kernels,
                                             const PolynomialForce& vprime, const NoiseEnsemble& ens,
                                             const Vec2& z0, const std::vector<double>& times,
                                             const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    return stats_impl(model, kernels, vprime, ens, z0, times, pairs, false);
}

}  // namespace qbm
