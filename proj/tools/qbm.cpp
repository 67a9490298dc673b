#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <omp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qbm/config.hpp"
#include "qbm/covariance.hpp"
#include "qbm/master.hpp"
#include "qbm/opalg.hpp"
#include "qbm/oracle.hpp"
#include "qbm/propagator.hpp"
#include "qbm/wigner.hpp"

using namespace qbm;
namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCheck = 4;

struct Options {
    std::string config_path;
    std::string out_dir;            // overrides outputs.directory when set
    long long seed = -1;            // overrides oracle.seed when >= 0
    int threads = 0;
    bool tolerance_report = false;
};

struct Report {
    std::vector<std::pair<std::string, double>> tolerances;
    void add(const std::string& name, double value) { tolerances.push_back({name, value}); }
};

RunConfig read_config(const Options& opt) {
    try {
        return load_config(opt.config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        throw CLI::RuntimeError("config error", kExitConfig);
    }
}

RunConfig load_and_validate(const Options& opt) {
    RunConfig cfg = read_config(opt);
    if (!opt.out_dir.empty()) cfg.outputs.directory = opt.out_dir;
    if (opt.seed >= 0) cfg.oracle.seed = static_cast<std::uint64_t>(opt.seed);
    std::vector<Diagnostic> diags = validate(cfg);
    bool fatal = false;
    for (const auto& d : diags) {
        std::cerr << (d.warning ? "warning " : "error ") << d.path << ": " << d.message << "\n";
        fatal = fatal || !d.warning;
    }
    if (fatal) throw CLI::RuntimeError("config validation failed", kExitConfig);
    return cfg;
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name,
                          const std::string& columns) {
    fs::create_directories(cfg.outputs.directory);
    fs::path p = fs::path(cfg.outputs.directory) / name;
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot open output file: " + p.string());
    out.precision(16);
    out << std::scientific;
    out << "# config " << config_hash_hex(cfg) << "\n";
    const SpectralModel& m = cfg.model;
    out << "# model family=" << family_name(m.family) << " gamma0=" << m.gamma0
        << " cutoff=" << m.cutoff << " temperature=" << m.temperature << " mass=" << m.mass
        << " omega=" << m.omega << "\n";
    out << "# " << columns << "\n";
    return out;
}

void write_manifest(const RunConfig& cfg, const std::string& command, const Report& report) {
    fs::create_directories(cfg.outputs.directory);
    nlohmann::json j;
    j["command"] = command;
    j["config"] = nlohmann::json::parse(config_echo(cfg));
    j["config_hash"] = config_hash_hex(cfg);
    j["seed"] = cfg.oracle.seed;
    nlohmann::json tol = nlohmann::json::object();
    for (const auto& [k, v] : report.tolerances) tol[k] = v;
    j["tolerances"] = tol;
    std::ofstream out(fs::path(cfg.outputs.directory) / "manifest.json");
    out << j.dump(2) << "\n";
}

void print_report(const Options& opt, const Report& report) {
    if (!opt.tolerance_report) return;
    std::cout.precision(6);
    for (const auto& [k, v] : report.tolerances)
        std::cout << "tolerance " << k << " = " << std::scientific << v << "\n";
}

// ---------------------------------------------------------------- pipeline

struct Tables {
    TimeGrid grid;
    PropagatorTable prop;
    KernelTable kern;
    CovarianceTable cov;
};

Tables build_tables(const RunConfig& cfg) {
    Tables t;
    t.grid = TimeGrid(cfg.t_max, cfg.dt);
    t.prop = greens_function(cfg.model, t.grid);
    t.kern = build_kernel_table(cfg.model, t.grid);
    t.cov = build_covariance(t.prop, t.kern);
    return t;
}

int cmd_kernels(const Options& opt) {
    RunConfig cfg = load_and_validate(opt);
    TimeGrid grid(cfg.t_max, cfg.dt);
    KernelTable kern = build_kernel_table(cfg.model, grid);
    Report rep;
    {
        std::ofstream out = open_output(cfg, "kernels_gamma.txt", "t gamma");
        if (kern.has_delta()) out << "# delta_weight " << kern.gamma_delta_weight << "\n";
        for (std::size_t i = 0; i < grid.size(); ++i)
            out << grid.time(i) << " " << (kern.gamma.empty() ? 0.0 : kern.gamma[i]) << "\n";
    }
    {
        std::ofstream out = open_output(cfg, "kernels_nu.txt", "t nu");
        if (kern.nu_delta_weight != 0.0) out << "# delta_weight " << kern.nu_delta_weight << "\n";
        for (std::size_t i = 0; i < grid.size(); ++i)
            out << grid.time(i) << " " << (kern.nu.empty() ? 0.0 : kern.nu[i]) << "\n";
    }
    write_manifest(cfg, "kernels", rep);
    print_report(opt, rep);
    return 0;
}

int cmd_propagator(const Options& opt) {
    RunConfig cfg = load_and_validate(opt);
    TimeGrid grid(cfg.t_max, cfg.dt);
    PropagatorTable prop = greens_function(cfg.model, grid);
    Report rep;
    rep.add("volterra_residual", volterra_residual(prop));
    std::ofstream out = open_output(cfg, "propagator.txt",
                                    "t g gdot gddot phi00 phi01 phi10 phi11");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Mat2& f = prop.phi[i];
        out << grid.time(i) << " " << prop.g[i] << " " << prop.gdot[i] << " " << prop.gddot[i]
            << " " << f(0, 0) << " " << f(0, 1) << " " << f(1, 0) << " " << f(1, 1) << "\n";
    }
    write_manifest(cfg, "propagator", rep);
    print_report(opt, rep);
    return 0;
}

int cmd_covariance(const Options& opt) {
    RunConfig cfg = load_and_validate(opt);
    Tables t = build_tables(cfg);
    Report rep;
    std::ofstream out = open_output(cfg, "covariance.txt",
                                    "t sigma_xx sigma_xp sigma_pp sdot_xx sdot_xp sdot_pp");
    for (std::size_t i = 0; i < t.grid.size(); ++i) {
        Mat2 s = t.cov.diag(i);
        Mat2 sd = t.cov.sigma_dot_diag[i];
        out << t.grid.time(i) << " " << s(0, 0) << " " << s(0, 1) << " " << s(1, 1) << " "
            << sd(0, 0) << " " << sd(0, 1) << " " << sd(1, 1) << "\n";
    }
    write_manifest(cfg, "covariance", rep);
    print_report(opt, rep);
    return 0;
}

int cmd_coeffs(const Options& opt) {
    RunConfig cfg = load_and_validate(opt);
    Tables t = build_tables(cfg);
    MasterSeries ms = build_master_series(t.prop, t.cov, cfg.master_dt, nullptr, cfg.degree_cap);
    Report rep;
    double d0 = ms.coeffs.front().D.norm();
    rep.add("diffusion_initial_norm", d0);
    {
        std::ofstream out = open_output(cfg, "coeffs_H.txt", "t h00 h01 h10 h11");
        for (const auto& c : ms.coeffs)
            out << c.t << " " << c.H(0, 0) << " " << c.H(0, 1) << " " << c.H(1, 0) << " "
                << c.H(1, 1) << "\n";
    }
    {
        std::ofstream out = open_output(cfg, "coeffs_D.txt", "t d00 d01 d10 d11");
        for (const auto& c : ms.coeffs)
            out << c.t << " " << c.D(0, 0) << " " << c.D(0, 1) << " " << c.D(1, 0) << " "
                << c.D(1, 1) << "\n";
    }
    write_manifest(cfg, "coeffs", rep);
    print_report(opt, rep);
    return 0;
}

int cmd_l1(const Options& opt) {
    RunConfig cfg = load_and_validate(opt);
    if (!cfg.forcing.enabled()) {
        std::cerr << "error forcing.kind: subcommand l1 needs a forcing\n";
        return kExitConfig;
    }
    Tables t = build_tables(cfg);
    ForcingSpec spec = cfg.forcing.to_spec();
    MasterSeries ms = build_master_series(t.prop, t.cov, cfg.master_dt, &spec, cfg.degree_cap);
    Report rep;
    std::ofstream out = open_output(cfg, "l1.txt", "t i j k l coeff   (dx^i dp^j x^k p^l)");
    for (std::size_t a = 0; a < ms.times.size(); ++a)
        for (const auto& [key, coeff] : ms.L1[a].terms()) {
            Mono m = Mono::from_key(key);
            out << ms.times[a] << " " << m.i << " " << m.j << " " << m.k << " " << m.l << " "
                << coeff << "\n";
        }
    write_manifest(cfg, "l1", rep);
    print_report(opt, rep);
    return 0;
}

// Stability bound used by step(), reproduced for substep planning.
double cfl_bound(const PhaseOp& L, const WignerGrid& g) {
    double max_d = 0.0, max_drift = 0.0;
    double xm = std::max(std::abs(g.x_min), std::abs(g.x_max));
    double pm = std::max(std::abs(g.p_min), std::abs(g.p_max));
    for (const auto& [key, coeff] : L.terms()) {
        Mono m = Mono::from_key(key);
        double scale = std::abs(coeff) * std::pow(xm, m.k) * std::pow(pm, m.l);
        if (m.deriv_order() >= 2) max_d = std::max(max_d, scale);
        else if (m.deriv_order() == 1) max_drift = std::max(max_drift, scale);
    }
    double h = std::min(g.hx(), g.hp());
    double bound = std::numeric_limits<double>::infinity();
    if (max_d > 0.0) bound = std::min(bound, 0.25 * h * h / max_d);
    if (max_drift > 0.0) bound = std::min(bound, 0.25 * h / max_drift);
    return bound;
}

int cmd_evolve(const Options& opt) {
    RunConfig cfg = load_and_validate(opt);
    Tables t = build_tables(cfg);
    ForcingSpec spec;
    const ForcingSpec* specp = nullptr;
    if (cfg.forcing.enabled()) {
        spec = cfg.forcing.to_spec();
        specp = &spec;
    }
    MasterSeries ms = build_master_series(t.prop, t.cov, cfg.master_dt, specp, cfg.degree_cap);

    // generator at arbitrary t by linear interpolation between master nodes
    auto L_at = [&](double time) {
        double u = time / cfg.master_dt;
        std::size_t k = std::min(static_cast<std::size_t>(u), ms.times.size() - 2);
        double w = u - static_cast<double>(k);
        PhaseOp L = ms.coeffs[k].L0 * (1.0 - w) + ms.coeffs[k + 1].L0 * w;
        if (specp) L += ms.L1[k] * (1.0 - w) + ms.L1[k + 1] * w;
        return L;
    };

    const WignerConfig& wc = cfg.wigner;
    WignerGrid w = init_gaussian(wc.mean, wc.covariance, wc.x_min, wc.x_max, wc.p_min, wc.p_max,
                                 wc.nx, wc.np);

    Report rep;
    std::ofstream report = open_output(cfg, "evolve_report.txt",
                                       "t integral mean_x mean_p cov_xx cov_xp cov_pp");
    std::size_t snap_count = 0;
    auto emit = [&](const WignerGrid& g) {
        Vec2 mu = g.mean();
        Mat2 s = g.covariance();
        report << g.time << " " << g.integral() << " " << mu.x << " " << mu.p << " " << s(0, 0)
               << " " << s(0, 1) << " " << s(1, 1) << "\n";
        char name[32];
        std::snprintf(name, sizeof(name), "snapshot_%04zu.txt", snap_count++);
        std::ofstream snap = open_output(cfg, name, "x p w");
        snap << "# t " << g.time << "\n";
        for (std::size_t ix = 0; ix < g.nx; ++ix)
            for (std::size_t ip = 0; ip < g.np; ++ip)
                snap << g.x_of(ix) << " " << g.p_of(ip) << " " << g.at(ix, ip) << "\n";
    };

    emit(w);
    for (std::size_t k = 0; k < t.grid.n; ++k) {
        double t0 = t.grid.time(k);
        PhaseOp Lmid = L_at(t0 + 0.5 * cfg.dt);
        double bound = cfl_bound(Lmid, w);
        auto nsub = static_cast<std::size_t>(std::ceil(cfg.dt / (0.9 * bound)));
        nsub = std::max<std::size_t>(nsub, 1);
        double h = cfg.dt / static_cast<double>(nsub);
        for (std::size_t s = 0; s < nsub; ++s)
            w = step(w, L_at(t0 + (static_cast<double>(s) + 0.5) * h), h);
        w.time = t.grid.time(k + 1);  // avoid accumulated roundoff in the stamp
        if ((k + 1) % cfg.outputs.snapshot_stride == 0 || k + 1 == t.grid.n) emit(w);
    }
    rep.add("normalization_drift", std::abs(w.integral() - 1.0));
    write_manifest(cfg, "evolve", rep);
    print_report(opt, rep);
    return 0;
}

// Classical force seen by the Langevin oracle; terms it cannot represent
// (multi-derivative deformation terms, position drift) are reported.
PolynomialForce classical_force(const RunConfig& cfg, std::vector<std::string>& notes) {
    const SpectralModel& m = cfg.model;
    PolynomialForce f = PolynomialForce::linear_spring(m.mass, m.omega);
    if (!cfg.forcing.enabled()) return f;
    auto bump = [&](int b, double coeff) {
        if (f.coeffs.size() <= static_cast<std::size_t>(b)) f.coeffs.resize(b + 1, 0.0);
        f.coeffs[static_cast<std::size_t>(b)] += coeff;
    };
    const ForcingConfig& fc = cfg.forcing;
    if (fc.kind == "quadratic") bump(2, fc.k1);
    else if (fc.kind == "cubic") bump(3, fc.k2);
    else if (fc.kind == "external") {
        bump(0, -fc.force.p);
        if (fc.force.x != 0.0) notes.push_back("external position drift F_x ignored");
    } else if (fc.kind == "general") {
        for (const auto& g : fc.general) {
            if (g.d == 1) bump(g.b, g.coeff);
            else notes.push_back("general term with d != 1 ignored (deformation sector)");
        }
    } else {
        notes.push_back("forcing kind '" + fc.kind + "' not represented in the classical oracle");
    }
    return f;
}

int cmd_oracle(const Options& opt) {
    RunConfig cfg = load_and_validate(opt);
    TimeGrid grid(cfg.t_max, cfg.dt);
    KernelTable kern = build_kernel_table(cfg.model, grid);
    NoiseEnsemble ens(kern, grid, cfg.oracle.n, cfg.oracle.seed);

    std::vector<double> times;
    for (double tt = cfg.master_dt; tt <= cfg.t_max + 1e-12; tt += cfg.master_dt)
        times.push_back(grid.time(grid.index(tt)));

    std::vector<std::string> notes;
    PolynomialForce f = classical_force(cfg, notes);
    LangevinStats st = langevin_ensemble_stats(cfg.model, kern, f, ens, cfg.wigner.mean, times);

    Report rep;
    std::ofstream out = open_output(cfg, "oracle.txt",
                                    "t mean_x mean_p cov_xx cov_xp cov_pp");
    out << "# n " << st.n << " seed " << cfg.oracle.seed << "\n";
    for (const auto& note : notes) out << "# note " << note << "\n";
    for (std::size_t a = 0; a < times.size(); ++a) {
        out << times[a] << " " << st.mean[a].x << " " << st.mean[a].p << " " << st.cov[a](0, 0)
            << " " << st.cov[a](0, 1) << " " << st.cov[a](1, 1) << "\n";
    }
    if (opt.tolerance_report && !cfg.forcing.enabled()) {
        PropagatorTable prop = greens_function(cfg.model, grid);
        CovarianceTable cov = build_covariance(prop, kern);
        double worst = 0.0;
        for (std::size_t a = 0; a < times.size(); ++a) {
            Mat2 ref = cov.diag(grid.index(times[a]));
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) {
                    double se = std::sqrt((ref(r, r) * ref(c, c) + ref(r, c) * ref(r, c)) /
                                          static_cast<double>(st.n));
                    if (se > 0.0)
                        worst = std::max(worst, std::abs(st.cov[a](r, c) - ref(r, c)) / se);
                }
        }
        rep.add("covariance_max_standard_errors", worst);
    }
    write_manifest(cfg, "oracle", rep);
    print_report(opt, rep);
    return 0;
}

// ------------------------------------------------------------------- check

struct CheckResult {
    std::string name;
    bool pass;
    double measured;
    double tol;
    bool skipped = false;
};

void hermite_delta(std::vector<CheckResult>& results, const Tables& t, int cap) {
    // Delta^[k] against the closed Hermite-polynomial form in (d.grad, s):
    // He_k with variance s, an independent route around the recursion.
    double tau = 0.3 * t.grid.t_max(), tt = 0.9 * t.grid.t_max();
    tau = t.grid.time(t.grid.index(tau));
    tt = t.grid.time(t.grid.index(tt));
    Vec2 d = delta1_coeff(t.prop, t.cov, tau, tt).d;
    double s = s_kernel(t.prop, t.cov, tau, tt);
    PhaseOp D1 = PhaseOp(cap);
    D1.add_term({1, 0, 0, 0}, d.x);
    D1.add_term({0, 1, 0, 0}, d.p);
    auto pow_op = [&](int k) {
        PhaseOp r = PhaseOp::identity(cap);
        for (int i = 0; i < k; ++i) r = product(r, D1);
        return r;
    };
    double worst = 0.0, scale = std::max({1.0, std::abs(s), d.norm()});
    // He_2 = u^2 - s, He_3 = u^3 - 3 s u, He_4 = u^4 - 6 s u^2 + 3 s^2
    PhaseOp ref2 = pow_op(2) - PhaseOp::identity(cap) * s;
    PhaseOp ref3 = pow_op(3) - pow_op(1) * (3.0 * s);
    PhaseOp ref4 = pow_op(4) - pow_op(2) * (6.0 * s) + PhaseOp::identity(cap) * (3.0 * s * s);
    worst = std::max(worst, max_coeff_difference(delta_k(t.prop, t.cov, tau, tt, 2, cap), ref2));
    worst = std::max(worst, max_coeff_difference(delta_k(t.prop, t.cov, tau, tt, 3, cap), ref3));
    worst = std::max(worst, max_coeff_difference(delta_k(t.prop, t.cov, tau, tt, 4, cap), ref4));
    double s4 = scale * scale * scale * scale;
    results.push_back({"delta_moments", worst < 1e-12 * s4, worst, 1e-12 * s4});
}

int cmd_check(const Options& opt) {
    RunConfig cfg = load_and_validate(opt);
    Tables t = build_tables(cfg);
    std::vector<CheckResult> results;

    {  // propagator consistency loop Phidot + H Phi = 0
        double worst = 0.0;
        for (std::size_t i = 0; i < t.grid.size(); ++i) {
            MasterCoefficients mc = hpz_coefficients(t.prop, t.cov, t.grid.time(i));
            double res = (t.prop.phidot[i] + mc.H * t.prop.phi[i]).norm();
            double den = t.prop.phidot[i].norm();
            if (den > 0.0) worst = std::max(worst, res / den);
        }
        results.push_back({"propagator_consistency", worst < 1e-6, worst, 1e-6});
    }

    {  // D(0) = 0 for smooth kernels; the delta kernel diffuses instantly
        if (cfg.model.is_local()) {
            results.push_back({"diffusion_initial", true, 0.0, 0.0, true});
        } else {
            double scale = 0.0;
            for (std::size_t i = 0; i < t.grid.size(); i += std::max<std::size_t>(t.grid.n / 20, 1))
                scale = std::max(scale,
                                 hpz_coefficients(t.prop, t.cov, t.grid.time(i)).D.norm());
            double d0 = hpz_coefficients(t.prop, t.cov, 0.0).D.norm();
            results.push_back({"diffusion_initial", d0 < 1e-8 * scale, d0, 1e-8 * scale});
        }
    }

    {  // endpoint identity dLbar(t,t) = dL(t) for every forcing kind
        std::vector<ForcingSpec> specs = {
            ForcingSpec::external(Vec2{0.1, -0.05}), ForcingSpec::linear(Mat2{0.0, 0.0, 0.2, 0.1}),
            ForcingSpec::quadratic(0.3), ForcingSpec::cubic(0.2),
            ForcingSpec::general_poly({{1, 2, [](double) { return 0.25; }},
                                       {2, 1, [](double) { return -0.1; }}})};
        double worst = 0.0, scale = 1.0;
        for (const auto& spec : specs)
            for (int a = 1; a <= 10; ++a) {
                double tt = t.grid.time(a * t.grid.n / 10);
                PhaseOp lhs = two_time_operator(spec, t.prop, t.cov, tt, tt, cfg.degree_cap);
                PhaseOp rhs = delta_L(spec, tt, cfg.degree_cap);
                worst = std::max(worst, max_coeff_difference(lhs, rhs));
                scale = std::max(scale, rhs.max_abs_coeff());
            }
        results.push_back({"endpoint_identity", worst < 1e-10 * scale, worst, 1e-10 * scale});
    }

    hermite_delta(results, t, cfg.degree_cap);

    {  // first-order drift for a constant external force
        Vec2 F{0.1, 0.0};
        ForcingSpec spec = ForcingSpec::external(F);
        double tt = t.grid.t_max();
        PhaseOp L1 = build_L1(spec, t.prop, t.cov, cfg.master_dt, tt, cfg.degree_cap);
        PhaseOp dL = delta_L(spec, tt, cfg.degree_cap);
        if (cfg.model.is_local()) {
            double corr = max_coeff_difference(L1, dL);
            double tol = 1e-6 * F.norm();
            results.push_back({"effective_force_local", corr < tol, corr, tol});
        } else {
            Vec2 c = F;  // F(t) + Int (Phidot + H Phi)(t - tau) F dtau
            TimeGrid master(tt, cfg.master_dt);
            Mat2 H = hpz_coefficients(t.prop, t.cov, tt).H;
            for (std::size_t j = 0; j <= master.n; ++j) {
                std::size_t lag = t.grid.index(tt - master.time(j));
                Mat2 ker = t.prop.phidot[lag] + H * t.prop.phi[lag];
                c += master.trap_weight(j, master.n) * (ker * F);
            }
            Vec2 got{-L1.coeff({1, 0, 0, 0}), -L1.coeff({0, 1, 0, 0})};
            double err = (got - c).norm() / c.norm();
            results.push_back({"effective_force_nonlocal", err < 1e-4, err, 1e-4});
        }
    }

    bool all = true;
    std::cout.precision(6);
    for (const auto& r : results) {
        all = all && (r.pass || r.skipped);
        std::cout << (r.skipped ? "SKIP" : r.pass ? "PASS" : "FAIL") << " " << r.name;
        if (opt.tolerance_report && !r.skipped)
            std::cout << "  (measured " << std::scientific << r.measured << ", tolerance "
                      << r.tol << ")";
        std::cout << "\n";
    }
    return all ? 0 : kExitCheck;
}

int cmd_validate(const Options& opt) {
    RunConfig cfg = read_config(opt);
    if (!opt.out_dir.empty()) cfg.outputs.directory = opt.out_dir;
    std::vector<Diagnostic> diags = validate(cfg);
    bool fatal = false;
    for (const auto& d : diags) {
        std::cout << (d.warning ? "warning " : "error ") << d.path << ": " << d.message << "\n";
        fatal = fatal || !d.warning;
    }
    if (diags.empty()) std::cout << "ok\n";
    return fatal ? kExitConfig : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phase-space toolkit for strongly coupled quantum Brownian motion"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    app.add_option("--config", opt.config_path, "JSON run configuration")->required();
    app.add_option("--out", opt.out_dir, "override the output directory");
    app.add_option("--seed", opt.seed, "override the Monte Carlo seed");
    app.add_option("--threads", opt.threads, "OpenMP thread count");
    app.add_flag("--tolerance-report", opt.tolerance_report, "print achieved tolerances");

    struct Command {
        const char* name;
        int (*fn)(const Options&);
        const char* help;
    };
    const Command commands[] = {
        {"kernels", cmd_kernels, "export the damping and noise kernel tables"},
        {"propagator", cmd_propagator, "export the Green's function and propagator"},
        {"covariance", cmd_covariance, "export the equal-time covariance table"},
        {"coeffs", cmd_coeffs, "export the master-equation coefficient series"},
        {"l1", cmd_l1, "export the first-order generator series"},
        {"evolve", cmd_evolve, "integrate the phase-space distribution"},
        {"oracle", cmd_oracle, "run the Langevin Monte Carlo oracle"},
        {"check", cmd_check, "run the internal consistency suite"},
        {"validate", cmd_validate, "validate the configuration"}};
    for (const Command& c : commands) app.add_subcommand(c.name, c.help);

    CLI11_PARSE(app, argc, argv);

    if (opt.threads > 0) omp_set_num_threads(opt.threads);

    std::string sub = app.get_subcommands().front()->get_name();
    try {
        for (const Command& c : commands)
            if (sub == c.name) return c.fn(opt);
        return kExitConfig;
    } catch (const CLI::RuntimeError& e) {
        return e.get_exit_code();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}
