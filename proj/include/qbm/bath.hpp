#pragma once

#include <complex>
#include <string>
#include <vector>

#include "qbm/grid.hpp"

namespace qbm {

enum class BathFamily {
    Local,              // gamma(t) = gamma0 * delta(t), handled symbolically
    OhmicLorentzCutoff, // gamma~(eps) = gamma0 * L^2 / (L^2 + eps^2)
    OhmicExpCutoff      // gamma~(eps) = gamma0 * exp(-|eps|/L)
};

std::string family_name(BathFamily f);
BathFamily family_from_name(const std::string& name);

// Bath + system parameters, hbar = k_B = 1. omega is the renormalized
// system frequency; the counterterm is absorbed by always working with it.
struct SpectralModel {
    BathFamily family = BathFamily::OhmicLorentzCutoff;
    double gamma0 = 0.0;       // damping strength [1/time]
    double cutoff = 1.0;       // Lambda [1/time], ignored for Local
    double temperature = 0.0;  // T [1/time]
    double mass = 1.0;
    double omega = 0.0;        // renormalized frequency [1/time]

    void validate() const;
    bool is_local() const { return family == BathFamily::Local; }
};

// Fourier transform of the damping kernel, gamma~(eps) >= 0 for all real eps.
double gamma_tilde(const SpectralModel& model, double eps);

// One-sided Laplace transform gamma^(s). Closed form for Local and Lorentz;
// numeric for the exponential cutoff (real s only there).
std::complex<double> gamma_hat(const SpectralModel& model, std::complex<double> s);

// gamma(t) for t >= 0. Errors out for the Local family (delta kernel).
double damping_kernel(const SpectralModel& model, double t);

// nu(t) = (1/pi) Int_0^inf gamma~(eps) m eps coth(eps/2T) cos(eps t) deps,
// split into a closed-form vacuum part and an exponentially damped thermal
// quadrature. T = 0 keeps only the vacuum part. Errors at t = 0 for the
// Lorentz cutoff, where nu diverges logarithmically (but integrably).
double noise_kernel(const SpectralModel& model, double t);

// Kernels sampled on a uniform grid, t >= 0 only (both kernels are even).
// Delta contributions are carried as flagged weights, never sampled:
// the Local family has gamma_delta_weight = gamma0 (damping 2 gamma0 xdot)
// and, via the classical fluctuation-dissipation relation applied to the
// matching even kernel 2 gamma0 delta(t), nu_delta_weight = 4 m gamma0 T.
// For the Lorentz cutoff, the vacuum part of nu on [0, ~1/Lambda] is stored
// as cell-calibrated surrogates (trapezoid of the samples reproduces the
// exact cell integrals across the integrable log singularity), not as
// pointwise values; samples beyond that window are pointwise.
struct KernelTable {
    TimeGrid grid;
    SpectralModel model;
    std::vector<double> gamma;  // empty for Local
    std::vector<double> nu;     // empty for Local
    double gamma_delta_weight = 0.0;
    double nu_delta_weight = 0.0;

    bool has_delta() const { return gamma_delta_weight != 0.0; }

    // nu(t) for any |t| <= t_max by cubic interpolation between samples
    // (even extension). Delta weight not included.
    double nu_at(double t) const;
    // Same lookup on the sampled gamma.
    double gamma_at(double t) const;
};

KernelTable build_kernel_table(const SpectralModel& model, const TimeGrid& grid);

}  // namespace qbm
