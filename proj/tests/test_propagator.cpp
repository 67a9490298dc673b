#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qbm/propagator.hpp"
#include "support/oracles.hpp"

using namespace qbm;
using namespace qbm::testing;

namespace {

SpectralModel model_of(BathFamily f, double gamma0, double T = 0.5) {
    SpectralModel m;
    m.family = f;
    m.gamma0 = gamma0;
    m.cutoff = 10.0;
    m.temperature = T;
    m.mass = 1.0;
    m.omega = 2.0;
    return m;
}

}  // namespace

TEST_CASE("undamped Green's function is sin(w t)/(m w)") {
    SpectralModel m = model_of(BathFamily::OhmicLorentzCutoff, 0.0);
    TimeGrid grid(5.0, 0.005);
    PropagatorTable prop = greens_function(m, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double t = grid.time(i);
        worst = std::max(worst, std::abs(prop.g[i] - std::sin(m.omega * t) / (m.mass * m.omega)));
    }
    CHECK(worst < 1e-8);

    SUBCASE("Phi is the symplectic rotation") {
        std::size_t i = grid.index(1.25);
        double c = std::cos(m.omega * 1.25), s = std::sin(m.omega * 1.25);
        Mat2 expect{c, s / (m.mass * m.omega), -m.mass * m.omega * s, c};
        CHECK((prop.phi[i] - expect).norm() < 1e-8);
        CHECK(prop.phi[i].det() == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("initial conditions and Phi(0) = identity") {
    for (double g0 : {0.0, 0.2, 2.0}) {
        SpectralModel m = model_of(BathFamily::OhmicLorentzCutoff, g0);
        PropagatorTable prop = greens_function(m, TimeGrid(1.0, 0.005));
        CHECK(prop.g[0] == 0.0);
        CHECK(prop.gdot[0] == doctest::Approx(1.0 / m.mass));
        CHECK((prop.phi[0] - Mat2::identity()).norm() < 1e-14);
    }
}

TEST_CASE("Local family: closed form satisfies the local equation of motion") {
    for (double g0 : {0.5, 2.0, 3.0}) {  // under-, near-, over-damped vs w = 2
        SpectralModel m = model_of(BathFamily::Local, g0);
        TimeGrid grid(2.0, 0.002);
        PropagatorTable prop = greens_function(m, grid);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double r = m.mass * prop.gddot[i] + m.mass * m.omega * m.omega * prop.g[i] +
                       2.0 * m.mass * m.gamma0 * prop.gdot[i];
            worst = std::max(worst, std::abs(r));
        }
        CHECK(worst < 1e-10);
        // det Phi(t) = exp(-2 gamma0 t) for strictly local damping.
        std::size_t i = grid.index(1.5);
        CHECK(prop.phi[i].det() == doctest::Approx(std::exp(-2.0 * g0 * 1.5)).epsilon(1e-9));
    }
}

TEST_CASE("Volterra solution matches Laplace inversion of g^(s)") {
    for (double g0 : {0.2, 2.0}) {
        SpectralModel m = model_of(BathFamily::OhmicLorentzCutoff, g0);
        TimeGrid grid(5.0, 0.005);
        PropagatorTable prop = greens_function(m, grid);
        double gmax = 0.0;
        for (double g : prop.g) gmax = std::max(gmax, std::abs(g));
        for (int k = 1; k <= 10; ++k) {
            double t = 0.5 * k;
            double ref = laplace_invert([&](std::complex<double> s) { return g_hat(m, s); }, t);
            CHECK(std::abs(prop.g[grid.index(t)] - ref) < 1e-6 * gmax);
        }
    }
}

TEST_CASE("Volterra residual of the stored solution") {
    for (auto fam : {BathFamily::OhmicLorentzCutoff, BathFamily::OhmicExpCutoff}) {
        SpectralModel m = model_of(fam, 2.0);
        PropagatorTable prop = greens_function(m, TimeGrid(2.0, 0.005));
        CHECK(volterra_residual(prop) < 1e-8);
    }
}

TEST_CASE("grid convergence of the memory integrator") {
    SpectralModel m = model_of(BathFamily::OhmicLorentzCutoff, 2.0);
    double t = 1.0;
    auto g_at = [&](double dt) {
        PropagatorTable prop = greens_function(m, TimeGrid(t, dt));
        return prop.g[prop.grid.index(t)];
    };
    double g1 = g_at(0.008), g2 = g_at(0.004), g3 = g_at(0.002);
    double order = std::log2(std::abs(g1 - g2) / std::abs(g2 - g3));
    CHECK(order > 3.0);
}

TEST_CASE("relative propagator composes: Phi(tau,t) Phi(t) = Phi(tau)") {
    SpectralModel m = model_of(BathFamily::OhmicLorentzCutoff, 2.0);
    TimeGrid grid(3.0, 0.005);
    PropagatorTable prop = greens_function(m, grid);
    for (auto [tau, t] : {std::pair{0.5, 2.0}, {1.25, 1.5}, {0.0, 3.0}, {2.0, 2.0}}) {
        Mat2 rel = phi_rel(prop, tau, t).matrix;
        CHECK((rel * prop.phi_of(t) - prop.phi_of(tau)).norm() < 1e-8);
    }
}

TEST_CASE("final-value propagator") {
    SpectralModel m = model_of(BathFamily::OhmicLorentzCutoff, 2.0);
    TimeGrid grid(2.0, 0.005);
    PropagatorTable prop = greens_function(m, grid);
    double t = 2.0;

    SUBCASE("theta(0) = 1 at coincident arguments") {
        Mat2 pf = phi_final(prop, 1.0, 1.0, t);
        Mat2 expect = Mat2::identity() - phi_rel(prop, 1.0, t).matrix * prop.phi_of(1.0);
        CHECK((pf - expect).norm() < 1e-12);
    }
    SUBCASE("reduces to the advanced propagator under local dissipation") {
        SpectralModel ml = model_of(BathFamily::Local, 1.3);
        PropagatorTable lp = greens_function(ml, grid);
        // Retarded region (tau' <= tau): exactly zero by the semigroup property.
        for (auto [tau, taup] : {std::pair{0.5, 0.2}, {0.5, 0.5}, {1.9, 1.0}})
            CHECK(phi_final(lp, tau, taup, t).norm() < 1e-9);
        // Advanced region (tau' > tau): -S Phi(tau'-tau)^-1 S, where
        // S = [[1,0],[-2 m gamma0,1]] is the slip kick folded into Phi.
        Mat2 S{1.0, 0.0, -2.0 * ml.mass * ml.gamma0, 1.0};
        for (auto [tau, taup] : {std::pair{0.3, 1.7}, {1.0, 1.5}}) {
            Mat2 expect = S * lp.phi_of(taup - tau).inverse() * S * (-1.0);
            CHECK((phi_final(lp, tau, taup, t) - expect).norm() < 1e-9);
            // And independent of the final time t by construction.
            CHECK((phi_final(lp, tau, taup, t) - phi_final(lp, tau, taup, 1.8)).norm() < 1e-9);
        }
    }
}
