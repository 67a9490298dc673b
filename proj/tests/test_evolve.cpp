#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qbm/master.hpp"
#include "qbm/wigner.hpp"
#include "support/oracles.hpp"

using namespace qbm;
using namespace qbm::testing;

namespace {

WignerGrid small_gaussian() {
    return init_gaussian(Vec2{0.2, -0.1}, Mat2{0.09, 0.02, 0.02, 0.16},
                         -3.0, 3.0, -3.5, 3.5, 121, 121);
}

}  // namespace

TEST_CASE("init_gaussian is normalized with the requested moments") {
    Vec2 mu{0.2, -0.1};
    Mat2 sig{0.09, 0.02, 0.02, 0.16};
    WignerGrid g = small_gaussian();
    CHECK(std::abs(g.integral() - 1.0) < 1e-10);
    Vec2 m = g.mean();
    CHECK(std::abs(m.x - mu.x) < 1e-10);
    CHECK(std::abs(m.p - mu.p) < 1e-10);
    // trapezoid moments of a well-resolved decaying Gaussian converge
    // faster than any power of h
    CHECK((g.covariance() - sig).norm() < 1e-8);
    CHECK(g.boundary_decay_ok());

    CHECK_THROWS(init_gaussian(mu, sig, -1.0, 1.0, -3.5, 3.5, 61, 61));
    CHECK_THROWS(init_gaussian(mu, Mat2{0.09, 0.2, 0.2, 0.16},
                               -3.0, 3.0, -3.5, 3.5, 61, 61));
}

TEST_CASE("apply handles identity, coordinates and derivatives") {
    WignerGrid g = small_gaussian();

    WignerGrid same = apply(PhaseOp::identity(), g);
    bool identical = true;
    for (std::size_t i = 0; i < g.w.size(); ++i)
        identical = identical && same.w[i] == g.w[i];
    CHECK(identical);

    WignerGrid zero = apply(PhaseOp(8), g);
    CHECK(zero.max_abs() == 0.0);

    // coordinate factors act pointwise, no stencil involved
    WignerGrid xg = apply(PhaseOp::monomial({0, 0, 1, 1}, 2.0), g);
    bool exact = true;
    for (std::size_t ix = 0; ix < g.nx; ++ix)
        for (std::size_t ip = 0; ip < g.np; ++ip)
            exact = exact && xg.at(ix, ip) == 2.0 * g.x_of(ix) * g.p_of(ip) * g.at(ix, ip);
    CHECK(exact);

    // first and second derivatives of the Gaussian against the closed form
    Vec2 mu{0.2, -0.1};
    Mat2 inv = Mat2{0.09, 0.02, 0.02, 0.16}.inverse();
    WignerGrid dx = apply(PhaseOp::monomial({1, 0, 0, 0}, 1.0), g);
    WignerGrid dpp = apply(PhaseOp::monomial({0, 2, 0, 0}, 1.0), g);
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t ix = 6; ix + 6 < g.nx; ++ix)
        for (std::size_t ip = 6; ip + 6 < g.np; ++ip) {
            double ux = g.x_of(ix) - mu.x, up = g.p_of(ip) - mu.p;
            double gx = -(inv(0, 0) * ux + inv(0, 1) * up);
            double gp = -(inv(1, 0) * ux + inv(1, 1) * up);
            e1 = std::max(e1, std::abs(dx.at(ix, ip) - gx * g.at(ix, ip)));
            e2 = std::max(e2, std::abs(dpp.at(ix, ip) -
                                       (gp * gp - inv(1, 1)) * g.at(ix, ip)));
        }
    double scale = g.max_abs();
    double h2 = g.hx() * g.hx();
    CHECK(e1 < 40.0 * h2 * scale);
    CHECK(e2 < 400.0 * h2 * scale);
}

TEST_CASE("step is a no-op under an empty generator and checks stability") {
    WignerGrid g = small_gaussian();
    WignerGrid out = step(g, PhaseOp(8), 0.1);
    bool identical = true;
    for (std::size_t i = 0; i < g.w.size(); ++i)
        identical = identical && out.w[i] == g.w[i];
    CHECK(identical);
    CHECK(out.time == doctest::Approx(0.1));

    PhaseOp diff = PhaseOp::monomial({0, 2, 0, 0}, 1.0);
    CHECK_THROWS(step(g, diff, 0.1));                // violates dt <= h^2/(4 D)
    CHECK_NOTHROW(step(g, diff, 1e-4));
}

TEST_CASE("moments of the evolved state follow the propagator and the moment ODEs") {
    SpectralModel m;
    m.family = BathFamily::OhmicExpCutoff;
    m.gamma0 = 0.2;
    m.cutoff = 10.0;
    m.temperature = 0.5;
    m.mass = 1.0;
    m.omega = 2.0;
    double t_final = 0.6;
    TimeGrid grid(t_final, 0.005);
    PropagatorTable prop = greens_function(m, grid);
    KernelTable kern = build_kernel_table(m, grid);
    CovarianceTable cov = build_covariance(prop, kern);

    std::vector<MasterCoefficients> mc;
    for (std::size_t i = 0; i < grid.size(); ++i)
        mc.push_back(hpz_coefficients(prop, cov, grid.time(i)));
    auto lerp = [&](double t, auto&& pick) {
        double u = t / grid.dt;
        std::size_t i = std::min(static_cast<std::size_t>(u), grid.size() - 2);
        double w = u - static_cast<double>(i);
        return pick(mc[i]) * (1.0 - w) + pick(mc[i + 1]) * w;
    };
    auto Hof = [&](double t) { return lerp(t, [](const MasterCoefficients& c) { return c.H; }); };
    auto Dof = [&](double t) { return lerp(t, [](const MasterCoefficients& c) { return c.D; }); };

    Vec2 z0{0.25, 0.0};
    Mat2 sig0{0.09, 0.0, 0.0, 0.36};
    WignerGrid w = init_gaussian(z0, sig0, -2.7, 2.7, -4.8, 4.8, 241, 241);

    double dt = 3e-4;
    std::size_t nsteps = static_cast<std::size_t>(std::lround(t_final / dt));
    for (std::size_t n = 0; n < nsteps; ++n) {
        double tm = (static_cast<double>(n) + 0.5) * dt;
        w = step(w, build_L0(Hof(tm), Dof(tm)), dt);
    }

    // one-sided edge stencils leave sub-1e-7 residue at the border, so
    // window adequacy is judged by conservation rather than boundary decay
    CHECK(std::abs(w.integral() - 1.0) < 1e-8);

    Vec2 zt = prop.phi[grid.index(t_final)] * z0;
    Vec2 zg = w.mean();
    CHECK(std::abs(zg.x - zt.x) < 1e-3 * std::abs(z0.x));
    CHECK(std::abs(zg.p - zt.p) < 1e-3 * m.mass * m.omega * std::abs(z0.x));

    MomentPath path = integrate_moments(Hof, Dof, z0, sig0, t_final, 0.005);
    Mat2 sg = w.covariance();
    CHECK((sg - path.cov.back()).norm() < 1e-3 * path.cov.back().norm());
}

TEST_CASE("parallel apply is bit-identical to the serial reference") {
    WignerGrid g = small_gaussian();
    PhaseOp op(8);
    op.add_term({1, 0, 1, 0}, 0.7);
    op.add_term({0, 1, 0, 1}, -1.3);
    op.add_term({0, 2, 0, 0}, 0.4);
    op.add_term({1, 1, 1, 1}, 0.05);
    WignerGrid par = apply(op, g);
    WignerGrid ser = apply_serial(op, g);
    bool identical = true;
    for (std::size_t i = 0; i < g.w.size(); ++i)
        identical = identical && par.w[i] == ser.w[i];
    CHECK(identical);
}
