// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Benchmark model: m = 1, omega = 2, Lorentz cutoff Lambda = 10,
// gamma0 in {0.2, 2.0}, T in {0.5, 10}, t_max = 5, dt = 0.005.
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qbm/covariance.hpp"
#include "qbm/master.hpp"
#include "qbm/oracle.hpp"
#include "qbm/propagator.hpp"
#include "qbm/wigner.hpp"
#include "support/oracles.hpp"

using namespace qbm;
using namespace qbm::testing;

namespace {

SpectralModel benchmark(BathFamily fam, double gamma0, double T) {
    SpectralModel m;
    m.family = fam;
    m.gamma0 = gamma0;
    m.cutoff = 10.0;
    m.temperature = T;
    m.mass = 1.0;
    m.omega = 2.0;
    return m;
}

struct Tables {
    PropagatorTable prop;
    KernelTable kern;
    CovarianceTable cov;
};

Tables tables_of(const SpectralModel& m, double t_max, double dt = 0.005) {
    Tables t;
    TimeGrid grid(t_max, dt);
    t.prop = greens_function(m, grid);
    t.kern = build_kernel_table(m, grid);
    t.cov = build_covariance(t.prop, t.kern);
    return t;
}

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

// 1. classical limit of the fluctuation-dissipation relation at T = 50 Lambda
// (smooth exponential cutoff: the Lorentz noise kernel diverges at t = 0, so
// a pointwise ratio there is meaningless)
Verdict criterion_1() {
    SpectralModel m = benchmark(BathFamily::OhmicExpCutoff, 0.2, 500.0);
    TimeGrid grid(2.0, 0.005);
    KernelTable kern = build_kernel_table(m, grid);
    double denom = 2.0 * m.mass * m.temperature * damping_kernel(m, 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst,
                         std::abs(kern.nu[i] - 2.0 * m.mass * m.temperature * kern.gamma[i]) /
                             denom);
    return {worst < 0.02, "max deviation " + fmt(worst) + " < 2e-2"};
}

// 2. Volterra Green's function vs numerical Laplace inversion of g^(s)
Verdict criterion_2() {
    SpectralModel m = benchmark(BathFamily::OhmicLorentzCutoff, 2.0, 10.0);
    TimeGrid grid(5.0, 0.005);
    PropagatorTable prop = greens_function(m, grid);
    double worst = 0.0;
    for (int k = 1; k <= 10; ++k) {
        double t = 0.5 * k;
        double ref = laplace_invert([&](std::complex<double> s) { return g_hat(m, s); }, t);
        double got = prop.g[grid.index(t)];
        worst = std::max(worst, std::abs(got - ref) / std::abs(ref));
    }
    return {worst < 1e-6, "max relative error " + fmt(worst) + " < 1e-6"};
}

// 3. sigma_T(t,t) within 3 standard errors of a 1e5-trajectory ensemble,
// all four benchmark corners
Verdict criterion_3() {
    const std::size_t N = 100000;
    double worst = 0.0;
    for (double gamma0 : {0.2, 2.0})
        for (double T : {0.5, 10.0}) {
            SpectralModel m = benchmark(BathFamily::OhmicLorentzCutoff, gamma0, T);
            Tables t = tables_of(m, 5.0);
            NoiseEnsemble ens(t.kern, t.prop.grid, N, 7771);
            std::vector<double> times{0.5, 2.0, 5.0};
            LangevinStats st = langevin_ensemble_stats(
                m, t.kern, PolynomialForce::linear_spring(m.mass, m.omega), ens,
                Vec2{0.5, 0.0}, times);
            for (std::size_t a = 0; a < times.size(); ++a) {
                Mat2 ref = t.cov.diag(t.prop.grid.index(times[a]));
                for (int r = 0; r < 2; ++r)
                    for (int c = 0; c < 2; ++c) {
                        double se = std::sqrt(
                            (ref(r, r) * ref(c, c) + ref(r, c) * ref(r, c)) /
                            static_cast<double>(N));
                        worst = std::max(worst, std::abs(st.cov[a](r, c) - ref(r, c)) / se);
                    }
            }
        }
    return {worst < 3.0, "max deviation " + fmt(worst) + " standard errors < 3"};
}

// 4. propagator consistency loop and vanishing initial diffusion
Verdict criterion_4() {
    SpectralModel m = benchmark(BathFamily::OhmicLorentzCutoff, 2.0, 10.0);
    Tables t = tables_of(m, 5.0);
    double worst = 0.0, dscale = 0.0;
    for (std::size_t i = 0; i < t.prop.grid.size(); ++i) {
        MasterCoefficients mc = hpz_coefficients(t.prop, t.cov, t.prop.grid.time(i));
        double den = t.prop.phidot[i].norm();
        if (den > 0.0)
            worst = std::max(worst, (t.prop.phidot[i] + mc.H * t.prop.phi[i]).norm() / den);
        dscale = std::max(dscale, mc.D.norm());
    }
    double d0 = hpz_coefficients(t.prop, t.cov, 0.0).D.norm();
    bool pass = worst < 1e-6 && d0 < 1e-8 * dscale;
    return {pass, "loop residual " + fmt(worst) + " < 1e-6, |D(0)| " + fmt(d0 / dscale) +
                      " < 1e-8"};
}

// 5. external force: local cancellation and the nonlocal effective force
Verdict criterion_5() {
    auto force = [](double u) { return Vec2{1.2 - 0.3 * u, 0.4}; };
    ForcingSpec spec = ForcingSpec::external(force);
    double fmag = 1.3;

    Tables loc = tables_of(benchmark(BathFamily::Local, 2.0, 0.5), 2.0);
    double local_worst = 0.0;
    for (double tt : {0.5, 1.0, 2.0}) {
        PhaseOp L1 = build_L1(spec, loc.prop, loc.cov, 0.05, tt);
        local_worst = std::max(local_worst, max_coeff_difference(L1, delta_L(spec, tt)));
    }

    Tables t = tables_of(benchmark(BathFamily::OhmicLorentzCutoff, 2.0, 0.5), 2.0);
    double nonlocal_worst = 0.0;
    for (double tt : {1.0, 2.0}) {
        PhaseOp L1 = build_L1(spec, t.prop, t.cov, 0.05, tt);
        Mat2 H = hpz_coefficients(t.prop, t.cov, tt).H;
        TimeGrid master(tt, 0.05);
        Vec2 eff = force(tt);
        for (std::size_t i = 0; i <= master.n; ++i) {
            double w = master.trap_weight(i, master.n);
            std::size_t lag = t.prop.grid.index(tt - master.time(i));
            eff += w * ((t.prop.phidot[lag] + H * t.prop.phi[lag]) * force(master.time(i)));
        }
        Vec2 got{-L1.coeff({1, 0, 0, 0}), -L1.coeff({0, 1, 0, 0})};
        nonlocal_worst = std::max(nonlocal_worst, (got - eff).norm() / eff.norm());
    }
    bool pass = local_worst < 1e-6 * fmag && nonlocal_worst < 1e-4;
    return {pass, "local correction " + fmt(local_worst / fmag) + " < 1e-6, nonlocal error " +
                      fmt(nonlocal_worst) + " < 1e-4"};
}

// 6. linear force vs the frequency-shift route
Verdict criterion_6() {
    SpectralModel m = benchmark(BathFamily::OhmicLorentzCutoff, 2.0, 0.5);
    double k = 1e-3 * m.mass * m.omega * m.omega;
    ForcingSpec spec = ForcingSpec::linear(Mat2{0.0, 0.0, k, 0.0});
    double tt = 1.0;
    Tables t = tables_of(m, 1.0, 0.0025);
    PhaseOp L1 = build_L1(spec, t.prop, t.cov, 0.0025, tt);

    auto coeffs_at = [&](double sign) {
        SpectralModel ms = m;
        ms.omega = std::sqrt(m.omega * m.omega + sign * k / m.mass);
        Tables ts = tables_of(ms, 1.0, 0.0025);
        return hpz_coefficients(ts.prop, ts.cov, tt);
    };
    MasterCoefficients up = coeffs_at(1.0), dn = coeffs_at(-1.0);
    Mat2 H1 = 0.5 * (up.H - dn.H);
    Mat2 D1 = 0.5 * (up.D - dn.D);
    Mat2 H1_op{L1.coeff({1, 0, 1, 0}), L1.coeff({1, 0, 0, 1}),
               L1.coeff({0, 1, 1, 0}), L1.coeff({0, 1, 0, 1})};
    Mat2 D1_op{L1.coeff({2, 0, 0, 0}), 0.5 * L1.coeff({1, 1, 0, 0}),
               0.5 * L1.coeff({1, 1, 0, 0}), L1.coeff({0, 2, 0, 0})};
    double h_err = (H1_op - H1).norm() / H1.norm();
    double d_err = (D1_op - D1).norm() / D1.norm();
    return {h_err < 1e-4 && d_err < 1e-3,
            "H1 error " + fmt(h_err) + " < 1e-4, D1 error " + fmt(d_err) + " < 1e-3"};
}

// 7. Delta^[k] recursion vs brute-force Wick enumeration, k <= 4
Verdict criterion_7() {
    Tables t = tables_of(benchmark(BathFamily::OhmicLorentzCutoff, 2.0, 10.0), 1.5);
    double tau = 0.45, tt = 1.35;
    Vec2 d = delta1_coeff(t.prop, t.cov, tau, tt).d;
    double s = s_kernel(t.prop, t.cov, tau, tt);
    double worst = 0.0;
    for (int k = 1; k <= 4; ++k) {
        PhaseOp ref = wick_delta(d, s, k);
        double diff = max_coeff_difference(delta_k(t.prop, t.cov, tau, tt, k), ref);
        worst = std::max(worst, diff / std::max(1.0, ref.max_abs_coeff()));
    }
    return {worst < 1e-12, "max coefficient difference " + fmt(worst) + " < 1e-12"};
}

// 8. endpoint identity dLbar(t,t) = dL(t), all five forcing kinds
Verdict criterion_8() {
    Tables t = tables_of(benchmark(BathFamily::OhmicLorentzCutoff, 2.0, 10.0), 1.5);
    std::vector<ForcingSpec> specs = {
        ForcingSpec::external([](double u) { return Vec2{0.3 + 0.1 * u, -0.2}; }),
        ForcingSpec::linear(Mat2{0.0, 0.0, 0.7, 0.1}),
        ForcingSpec::quadratic(0.4),
        ForcingSpec::cubic(0.3),
        ForcingSpec::general_poly({{2, 1, [](double u) { return 1.0 + u; }},
                                   {1, 2, [](double) { return -0.5; }}})};
    double worst = 0.0;
    bool same_keys = true;
    for (const auto& spec : specs)
        for (int i = 1; i <= 10; ++i) {
            double tt = 0.15 * i;
            PhaseOp lhs = two_time_operator(spec, t.prop, t.cov, tt, tt);
            PhaseOp rhs = delta_L(spec, tt);
            lhs.canonicalize();
            rhs.canonicalize();
            same_keys = same_keys && lhs.size() == rhs.size();
            double scale = std::max(rhs.max_abs_coeff(), 1.0);
            worst = std::max(worst, max_coeff_difference(lhs, rhs) / scale);
        }
    return {worst < 1e-10 && same_keys,
            "max coefficient difference " + fmt(worst) + " < 1e-10, monomial sets match"};
}

// 9. golden quadratic and cubic two-time operators
Verdict criterion_9() {
    Tables t = tables_of(benchmark(BathFamily::OhmicLorentzCutoff, 2.0, 0.5), 1.0);
    double worst = 0.0;
    for (auto [tau, tt] : {std::pair{0.2, 1.0}, {0.6, 0.9}}) {
        const Mat2& lag = t.prop.phi[t.prop.grid.index(tt - tau)];
        Mat2 rel = phi_rel(t.prop, tau, tt).matrix;
        Vec2 a{lag(0, 1), lag(1, 1)};
        Vec2 c{rel(0, 0), rel(0, 1)};
        Vec2 d = delta1_coeff(t.prop, t.cov, tau, tt).d;
        double s = s_kernel(t.prop, t.cov, tau, tt);

        PhaseOp gq = golden_quadratic(a, c, d, s, 0.4);
        PhaseOp quad = two_time_operator(ForcingSpec::quadratic(0.4), t.prop, t.cov, tau, tt);
        worst = std::max(worst, max_coeff_difference(quad, gq) /
                                    std::max(gq.max_abs_coeff(), 1.0));
        PhaseOp gc = golden_cubic(a, c, d, s, 0.3);
        PhaseOp cub = two_time_operator(ForcingSpec::cubic(0.3), t.prop, t.cov, tau, tt);
        worst = std::max(worst, max_coeff_difference(cub, gc) /
                                    std::max(gc.max_abs_coeff(), 1.0));
    }
    return {worst < 1e-10, "max coefficient difference " + fmt(worst) + " < 1e-10"};
}

// 10. evolution under L0: conservation and covariance vs the moment ODEs
Verdict criterion_10() {
    SpectralModel m = benchmark(BathFamily::OhmicLorentzCutoff, 0.2, 0.5);
    double t_final = 2.0;
    Tables t = tables_of(m, t_final);
    const TimeGrid& grid = t.prop.grid;

    std::vector<MasterCoefficients> mc;
    for (std::size_t i = 0; i < grid.size(); ++i)
        mc.push_back(hpz_coefficients(t.prop, t.cov, grid.time(i)));
    auto lerp = [&](double time, auto&& pick) {
        double u = time / grid.dt;
        std::size_t i = std::min(static_cast<std::size_t>(u), grid.size() - 2);
        double w = u - static_cast<double>(i);
        return pick(mc[i]) * (1.0 - w) + pick(mc[i + 1]) * w;
    };
    auto Hof = [&](double u) { return lerp(u, [](const MasterCoefficients& c) { return c.H; }); };
    auto Dof = [&](double u) { return lerp(u, [](const MasterCoefficients& c) { return c.D; }); };

    Vec2 z0{0.25, 0.0};
    Mat2 sig0{0.09, 0.0, 0.0, 0.36};
    WignerGrid w = init_gaussian(z0, sig0, -3.2, 3.2, -6.4, 6.4, 281, 341);
    double dt = 2.5e-4;
    auto nsteps = static_cast<std::size_t>(std::lround(t_final / dt));
    for (std::size_t n = 0; n < nsteps; ++n) {
        double tm = (static_cast<double>(n) + 0.5) * dt;
        w = step(w, build_L0(Hof(tm), Dof(tm)), dt);
    }
    double drift = std::abs(w.integral() - 1.0);
    MomentPath path = integrate_moments(Hof, Dof, z0, sig0, t_final, grid.dt);
    double cov_err = (w.covariance() - path.cov.back()).norm() / path.cov.back().norm();
    return {drift < 1e-8 && cov_err < 1e-3, "normalization drift " + fmt(drift) +
                                                " < 1e-8, covariance error " + fmt(cov_err) +
                                                " < 1e-3"};
}

// 11. grid convergence of the first-order drift under dt halving
Verdict criterion_11() {
    SpectralModel m = benchmark(BathFamily::OhmicExpCutoff, 2.0, 10.0);
    ForcingSpec spec = ForcingSpec::quadratic(0.4);
    double tt = 1.0;
    auto drift_of = [&](double dt) {
        Tables t = tables_of(m, 1.0, dt);
        PhaseOp L1 = build_L1(spec, t.prop, t.cov, 4.0 * dt, tt);
        std::vector<double> v;
        for (const auto& [key, coeff] : L1.terms())
            if (Mono::from_key(key).deriv_order() == 1) v.push_back(coeff);
        return v;
    };
    std::vector<double> v1 = drift_of(0.01), v2 = drift_of(0.005), v3 = drift_of(0.0025);
    auto dist = [](const std::vector<double>& a, const std::vector<double>& b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
        return std::sqrt(acc);
    };
    if (v1.size() != v2.size() || v2.size() != v3.size())
        return {false, "drift term sets differ between resolutions"};
    double order = std::log2(dist(v1, v2) / dist(v2, v3));
    return {order >= 1.8, "measured order " + fmt(order) + " >= 1.8"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "fluctuation-dissipation classical limit", criterion_1},
        {2, "Green's function vs Laplace inversion", criterion_2},
        {3, "covariance vs Langevin Monte Carlo", criterion_3},
        {4, "propagator consistency loop", criterion_4},
        {5, "external-force first-order generator", criterion_5},
        {6, "linear force vs frequency shift", criterion_6},
        {7, "propagated-moment recursion vs Wick enumeration", criterion_7},
        {8, "two-time endpoint identity", criterion_8},
        {9, "golden quadratic/cubic operators", criterion_9},
        {10, "evolution conservation and covariance", criterion_10},
        {11, "first-order drift grid convergence", criterion_11},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass) ++failures;
        std::printf("%s %2d %s: %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name,
                    v.detail.c_str());
        std::fflush(stdout);
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
