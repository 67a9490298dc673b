#include "qbm/bath.hpp"

#include <gsl/gsl_sf_expint.h>

#include <cmath>
#include <stdexcept>

#include "qbm/quadrature.hpp"

namespace qbm {

std::string family_name(BathFamily f) {
    switch (f) {
        case BathFamily::Local: return "local";
        case BathFamily::OhmicLorentzCutoff: return "ohmic_lorentz";
        case BathFamily::OhmicExpCutoff: return "ohmic_exp";
    }
    return "?";
}

BathFamily family_from_name(const std::string& name) {
    if (name == "local") return BathFamily::Local;
    if (name == "ohmic_lorentz") return BathFamily::OhmicLorentzCutoff;
    if (name == "ohmic_exp") return BathFamily::OhmicExpCutoff;
    throw std::invalid_argument("unknown bath family: " + name);
}

void SpectralModel::validate() const {
    if (gamma0 < 0.0) throw std::invalid_argument("SpectralModel: gamma0 must be >= 0");
    if (!is_local() && cutoff <= 0.0) throw std::invalid_argument("SpectralModel: cutoff must be > 0");
    if (temperature < 0.0) throw std::invalid_argument("SpectralModel: temperature must be >= 0");
    if (mass <= 0.0) throw std::invalid_argument("SpectralModel: mass must be > 0");
    if (omega < 0.0) throw std::invalid_argument("SpectralModel: omega must be >= 0");
}

double gamma_tilde(const SpectralModel& model, double eps) {
    switch (model.family) {
        case BathFamily::Local:
            return model.gamma0;
        case BathFamily::OhmicLorentzCutoff: {
            double L2 = model.cutoff * model.cutoff;
            return model.gamma0 * L2 / (L2 + eps * eps);
        }
        case BathFamily::OhmicExpCutoff:
            return model.gamma0 * std::exp(-std::abs(eps) / model.cutoff);
    }
    return 0.0;
}

std::complex<double> gamma_hat(const SpectralModel& model, std::complex<double> s) {
    switch (model.family) {
        case BathFamily::Local:
            // gamma0 * delta(t) with the full delta weight under the
            // one-sided transform, so that 2 s gamma^(s) = 2 gamma0 s.
            return model.gamma0;
        case BathFamily::OhmicLorentzCutoff:
            return model.gamma0 * model.cutoff / (2.0 * (s + model.cutoff));
        case BathFamily::OhmicExpCutoff: {
            if (s.imag() != 0.0)
                throw std::invalid_argument("gamma_hat: exponential cutoff supports real s only");
            double sr = s.real();
            auto f = [&](double t) { return damping_kernel(model, t) * std::exp(-sr * t); };
            // Kernel decays like 1/t^2; integrate far enough out that the
            // tail is below the absolute tolerance.
            double t_hi = std::max(100.0 / model.cutoff, 1e3);
            return integrate_adaptive(f, 0.0, t_hi).value;
        }
    }
    return 0.0;
}

double damping_kernel(const SpectralModel& model, double t) {
    if (t < 0.0) throw std::invalid_argument("damping_kernel: t must be >= 0");
    switch (model.family) {
        case BathFamily::Local:
            throw std::invalid_argument("damping_kernel: delta kernel must be handled symbolically");
        case BathFamily::OhmicLorentzCutoff:
            return 0.5 * model.gamma0 * model.cutoff * std::exp(-model.cutoff * t);
        case BathFamily::OhmicExpCutoff: {
            double Lt = model.cutoff * t;
            return model.gamma0 * model.cutoff / (M_PI * (1.0 + Lt * Lt));
        }
    }
    return 0.0;
}

namespace {

// Int_0^inf eps cos(b eps) / (a^2 + eps^2) deps
//   = 1/2 [ e^{ab} E1(ab) - e^{-ab} Ei(ab) ],  a, b > 0
// (conditionally convergent; log-divergent as b -> 0).
double lorentz_cos_moment(double a, double b) {
    double x = a * b;
    return 0.5 * (gsl_sf_expint_E1_scaled(x) - gsl_sf_expint_Ei_scaled(x));
}

// Int_0^inf sin(b eps) / (a^2 + eps^2) deps
//   = 1/(2a) [ e^{ab} E1(ab) + e^{-ab} Ei(ab) ],  a, b > 0.
double lorentz_sin_moment(double a, double b) {
    double x = a * b;
    return (gsl_sf_expint_E1_scaled(x) + gsl_sf_expint_Ei_scaled(x)) / (2.0 * a);
}

// Vacuum (T-independent) part, (m/pi) Int gamma~(eps) eps cos(eps t) deps,
// in closed form. Log-divergent at t = 0 for the Lorentz cutoff.
double noise_vacuum(const SpectralModel& model, double t) {
    double m = model.mass, g0 = model.gamma0, L = model.cutoff;
    switch (model.family) {
        case BathFamily::OhmicLorentzCutoff:
            if (t == 0.0)
                throw std::invalid_argument(
                    "noise_kernel: the Lorentz-cutoff kernel diverges logarithmically at t = 0");
            return (m * g0 * L * L / M_PI) * lorentz_cos_moment(L, std::abs(t));
        case BathFamily::OhmicExpCutoff: {
            // Re[1/(1/L - i t)^2]
            double al = 1.0 / L;
            double d = al * al + t * t;
            return (m * g0 / M_PI) * (al * al - t * t) / (d * d);
        }
        default:
            throw std::logic_error("noise_vacuum: sampled families only");
    }
}

// Thermal part, (m/pi) Int gamma~(eps) 2 eps n(eps) cos(eps t) deps with the
// Bose factor n(eps) = 1/(e^{eps/T} - 1); integrand decays like e^{-eps/T}.
double noise_thermal(const SpectralModel& model, double t) {
    double T = model.temperature;
    if (T == 0.0) return 0.0;
    double m = model.mass;
    auto f = [&](double eps) {
        double w = eps < 1e-10 * T ? 2.0 * T - eps : 2.0 * eps / std::expm1(eps / T);
        return (m / M_PI) * gamma_tilde(model, eps) * w;
    };
    double eps_hi = 45.0 * T;
    return integrate_oscillatory_cos(f, 0.0, eps_hi, std::abs(t)).value;
}

}  // namespace

double noise_kernel(const SpectralModel& model, double t) {
    model.validate();
    if (model.is_local()) {
        if (model.temperature == 0.0)
            throw std::invalid_argument("noise_kernel: UV-divergent kernel requires cutoff");
        throw std::invalid_argument(
            "noise_kernel: Local family noise is a delta kernel (weight 2 m gamma0 T), "
            "handled symbolically");
    }
    return noise_vacuum(model, t) + noise_thermal(model, t);
}

namespace {

// Cubic Lagrange interpolation on a uniform grid with even extension at 0.
double cubic_lookup(const std::vector<double>& y, const TimeGrid& grid, double t) {
    double at = std::abs(t);
    double x = at / grid.dt;
    auto n = static_cast<long long>(grid.n);
    auto i = static_cast<long long>(std::floor(x));
    if (i >= n) {
        if (x > static_cast<double>(n) + 0.01)
            throw std::out_of_range("kernel table lookup beyond t_max");
        return y[static_cast<std::size_t>(n)];
    }
    double u = x - static_cast<double>(i);
    // Stencil nodes i-1 .. i+2; mirror across t = 0 (even kernel).
    auto sample = [&](long long j) {
        if (j < 0) j = -j;
        if (j > n) j = n;
        return y[static_cast<std::size_t>(j)];
    };
    double ym1 = sample(i - 1), y0 = sample(i), y1 = sample(i + 1), y2 = sample(i + 2);
    double c0 = y0;
    double c1 = 0.5 * (y1 - ym1);
    double c2 = ym1 - 2.5 * y0 + 2.0 * y1 - 0.5 * y2;
    double c3 = 0.5 * (y2 - ym1) + 1.5 * (y0 - y1);
    return c0 + u * (c1 + u * (c2 + u * c3));
}

}  // namespace

double KernelTable::nu_at(double t) const {
    if (has_delta()) return 0.0;
    return cubic_lookup(nu, grid, t);
}

double KernelTable::gamma_at(double t) const {
    if (has_delta()) return 0.0;
    return cubic_lookup(gamma, grid, t);
}

KernelTable build_kernel_table(const SpectralModel& model, const TimeGrid& grid) {
    model.validate();
    KernelTable table;
    table.grid = grid;
    table.model = model;
    if (model.is_local()) {
        table.gamma_delta_weight = model.gamma0;
        // The quantum noise integral is UV-divergent without a cutoff, so the
        // Local family carries classical white noise. Its damping enters the
        // equation of motion as 2 gamma0 xdot, i.e. gamma(t) = 2 gamma0
        // delta(t) as an even kernel family, so the classical
        // fluctuation-dissipation relation nu = 2 m T gamma gives weight
        // 4 m gamma0 T (equipartition: sigma_pp -> m T, D_pp -> 2 m gamma0 T).
        table.nu_delta_weight = 4.0 * model.mass * model.gamma0 * model.temperature;
        return table;
    }
    table.gamma.resize(grid.size());
    table.nu.resize(grid.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double t = grid.time(i);
        table.gamma[i] = damping_kernel(model, t);
        table.nu[i] = noise_kernel(model, t);
    }
    table.gamma[0] = damping_kernel(model, 0.0);
    if (model.family == BathFamily::OhmicLorentzCutoff) {
        // nu(0) is log-divergent but integrable, and near t = 0 the vacuum
        // part is too singular for pointwise trapezoid rules: the composite
        // error picks up an O(dt) ridge term. Replace the vacuum samples on
        // [0, ~1/L] by cell-calibrated values (backward substitution from a
        // pointwise anchor) so the trapezoid of the stored samples matches
        // Int nu_vac over every calibrated cell exactly; the thermal part is
        // smooth and stays pointwise.
        double dt = grid.dt, L = model.cutoff;
        double amp = model.mass * model.gamma0 * L * L / M_PI;
        auto vac_primitive = [&](double b) {
            return b == 0.0 ? 0.0 : amp * lorentz_sin_moment(L, b);
        };
        std::size_t K = std::min(grid.size() - 1,
                                 static_cast<std::size_t>(std::ceil(1.0 / (L * dt))));
        double v = noise_vacuum(model, grid.time(K));  // anchor at node K
        for (std::size_t j = K; j-- > 0;) {
            double cell = vac_primitive(grid.time(j + 1)) - vac_primitive(grid.time(j));
            double prev = 2.0 / dt * cell - v;
            table.nu[j] = prev + (j == 0 ? noise_thermal(model, 0.0)
                                         : table.nu[j] - noise_vacuum(model, grid.time(j)));
            v = prev;
        }
    } else {
        table.nu[0] = noise_kernel(model, 0.0);
    }
    return table;
}

}  // namespace qbm
