#include "qbm/master.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace qbm {

namespace {

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double b = 1.0;
    for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
    return b;
}

Mono deriv_mono(int axis) { return axis == 0 ? Mono{1, 0, 0, 0} : Mono{0, 1, 0, 0}; }
Mono coord_mono(int axis) { return axis == 0 ? Mono{0, 0, 1, 0} : Mono{0, 0, 0, 1}; }

// grad^T c as a PhaseOp: c_x dx + c_p dp.
PhaseOp grad_dot(const Vec2& c, int cap) {
    PhaseOp op(cap);
    if (c.x != 0.0) op.add_term(deriv_mono(0), c.x);
    if (c.p != 0.0) op.add_term(deriv_mono(1), c.p);
    return op;
}

// r^T z as a PhaseOp: r_x x + r_p p.
PhaseOp coord_dot(const Vec2& r, int cap) {
    PhaseOp op(cap);
    if (r.x != 0.0) op.add_term(coord_mono(0), r.x);
    if (r.p != 0.0) op.add_term(coord_mono(1), r.p);
    return op;
}

PhaseOp op_pow(const PhaseOp& base, int n, int cap) {
    PhaseOp r = PhaseOp::identity(cap);
    for (int i = 0; i < n; ++i) r = product(r, base);
    return r;
}

}  // namespace

ForcingSpec ForcingSpec::external(Vec2 force) {
    return external([force](double) { return force; });
}

ForcingSpec ForcingSpec::external(std::function<Vec2(double)> force) {
    ForcingSpec s;
    s.kind = ForcingKind::External;
    s.F = std::move(force);
    return s;
}

ForcingSpec ForcingSpec::linear(Mat2 kmat) {
    return linear([kmat](double) { return kmat; });
}

ForcingSpec ForcingSpec::linear(std::function<Mat2(double)> kmat) {
    ForcingSpec s;
    s.kind = ForcingKind::Linear;
    s.K = std::move(kmat);
    return s;
}

ForcingSpec ForcingSpec::quadratic(double k1_const) {
    ForcingSpec s;
    s.kind = ForcingKind::Quadratic;
    s.k1 = [k1_const](double) { return k1_const; };
    return s;
}

ForcingSpec ForcingSpec::cubic(double k2_const) {
    ForcingSpec s;
    s.kind = ForcingKind::Cubic;
    s.k2 = [k2_const](double) { return k2_const; };
    return s;
}

ForcingSpec ForcingSpec::general_poly(std::vector<ForcingTerm> terms) {
    for (const auto& term : terms)
        if (term.d < 1 && term.b < 1)
            throw std::invalid_argument("ForcingSpec: general term needs d >= 1 or b >= 1");
    ForcingSpec s;
    s.kind = ForcingKind::GeneralPolynomial;
    s.general = std::move(terms);
    return s;
}

std::vector<ForcingTerm> ForcingSpec::poly_terms() const {
    switch (kind) {
        case ForcingKind::Quadratic: {
            std::vector<ForcingTerm> terms;
            terms.push_back({1, 2, k1});
            if (!classical_characteristics_only) {
                auto f = k1;
                terms.push_back({3, 0, [f](double t) { return -f(t) / 12.0; }});
            }
            return terms;
        }
        case ForcingKind::Cubic: {
            std::vector<ForcingTerm> terms;
            terms.push_back({1, 3, k2});
            if (!classical_characteristics_only) {
                auto f = k2;
                terms.push_back({3, 1, [f](double t) { return -f(t) / 4.0; }});
            }
            return terms;
        }
        case ForcingKind::GeneralPolynomial:
            return general;
        default:
            throw std::logic_error("ForcingSpec: poly_terms() needs a polynomial kind");
    }
}

MasterCoefficients hpz_coefficients(const PropagatorTable& prop, const CovarianceTable& cov,
                                    double t) {
    std::size_t i = prop.grid.index(t);
    const Mat2& phi = prop.phi[i];
    if (phi.cond() > 1e10)
        throw std::runtime_error("hpz_coefficients: Phi(t) near-singular at t = " + std::to_string(t));
    MasterCoefficients mc;
    mc.t = t;
    mc.H = prop.phidot[i] * phi.inverse() * (-1.0);
    Mat2 sigma = cov.diag(i);
    Mat2 sdot = cov.sigma_dot_diag[i];
    mc.D = 0.5 * (mc.H * sigma + sigma * mc.H.transpose() + sdot);
    mc.L0 = build_L0(mc.H, mc.D);
    return mc;
}

PhaseOp build_L0(const Mat2& H, const Mat2& D, int degree_cap) {
    PhaseOp op(degree_cap);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            if (H(a, b) != 0.0) {
                Mono m = deriv_mono(a);
                Mono c = coord_mono(b);
                op.add_term({m.i + c.i, m.j + c.j, m.k + c.k, m.l + c.l}, H(a, b));
            }
            if (D(a, b) != 0.0) {
                Mono m1 = deriv_mono(a), m2 = deriv_mono(b);
                op.add_term({m1.i + m2.i, m1.j + m2.j, 0, 0}, D(a, b));
            }
        }
    op.canonicalize();
    return op;
}

PhaseOp delta_L(const ForcingSpec& spec, double t, int degree_cap) {
    switch (spec.kind) {
        case ForcingKind::External:
            return grad_dot(-1.0 * spec.F(t), degree_cap);
        case ForcingKind::Linear: {
            Mat2 K = spec.K(t);
            return build_L0(K, Mat2::zero(), degree_cap);
        }
        default: {
            PhaseOp op(degree_cap);
            for (const auto& term : spec.poly_terms()) {
                double c = term.coeff(t);
                if (c != 0.0) op.add_term({0, term.d, term.b, 0}, c);
            }
            op.canonicalize();
            return op;
        }
    }
}

PhaseOp delta_k(const PropagatorTable& prop, const CovarianceTable& cov,
                double tau, double t, int k, int degree_cap) {
    if (k < 0) throw std::invalid_argument("delta_k: k must be >= 0");
    if (k == 0) return PhaseOp::identity(degree_cap);
    Vec2 d = delta1_coeff(prop, cov, tau, t).d;
    PhaseOp d1 = grad_dot(d, degree_cap);
    if (k == 1) return d1;
    double s = s_kernel(prop, cov, tau, t);
    PhaseOp prev2 = PhaseOp::identity(degree_cap);  // Delta^[k-2]
    PhaseOp prev1 = d1;                             // Delta^[k-1]
    for (int order = 2; order <= k; ++order) {
        PhaseOp cur = product(d1, prev1) - static_cast<double>(order - 1) * s * prev2;
        cur.canonicalize();
        prev2 = std::move(prev1);
        prev1 = std::move(cur);
    }
    return prev1;
}

PhaseOp two_time_operator(const ForcingSpec& spec, const PropagatorTable& prop,
                          const CovarianceTable& cov, double tau, double t, int degree_cap) {
    std::size_t idt = prop.grid.index(t - tau);
    const Mat2& phi_lag = prop.phi[idt];  // Phi(t - tau)

    if (spec.kind == ForcingKind::External)
        return grad_dot(-1.0 * (phi_lag * spec.F(tau)), degree_cap);

    Mat2 rel = phi_rel(prop, tau, t).matrix;  // Phi(tau, t)

    if (spec.kind == ForcingKind::Linear) {
        std::size_t it = prop.grid.index(t), itau = prop.grid.index(tau);
        Mat2 PK = phi_lag * spec.K(tau);
        Mat2 A = PK * rel;                                      // drift sector
        Mat2 B = PK * (rel * cov.diag(it) - cov.at(itau, it));  // diffusion sector
        return build_L0(A, B, degree_cap);  // grad^T A z + grad^T B grad
    }

    // Polynomial kinds via the binomial expansion
    //   [grad^T Phi(t-tau) phat]^d F(tau) sum_k C(b,k) [xhat^T Phi(tau,t) z]^{b-k} Delta^[k]
    Vec2 phi_p = {phi_lag(0, 1), phi_lag(1, 1)};       // Phi(t-tau) phat
    Vec2 rel_x = {rel(0, 0), rel(0, 1)};               // xhat^T Phi(tau,t)
    PhaseOp result(degree_cap);
    PhaseOp X = coord_dot(rel_x, degree_cap);

    for (const auto& term : spec.poly_terms()) {
        double c = term.coeff(tau);
        if (c == 0.0) continue;
        PhaseOp dpart = op_pow(grad_dot(phi_p, degree_cap), term.d, degree_cap);
        PhaseOp series(degree_cap);
        for (int k = 0; k <= term.b; ++k) {
            PhaseOp piece = product(op_pow(X, term.b - k, degree_cap),
                                    delta_k(prop, cov, tau, t, k, degree_cap));
            series += binom(term.b, k) * piece;
        }
        result += c * product(dpart, series);
    }
    result.canonicalize();
    return result;
}

PhaseOp integrated_two_time(const ForcingSpec& spec, const PropagatorTable& prop,
                            const CovarianceTable& cov, double master_dt, double t,
                            int degree_cap) {
    TimeGrid master(t, master_dt);
    // Master step must land on the fine grid.
    prop.grid.index(master_dt);
    PhaseOp M(degree_cap);
    for (std::size_t i = 0; i <= master.n; ++i) {
        double w = master.trap_weight(i, master.n);
        if (w == 0.0) continue;
        M += w * two_time_operator(spec, prop, cov, master.time(i), t, degree_cap);
    }
    M.canonicalize();
    return M;
}

PhaseOp build_L1(const ForcingSpec& spec, const PropagatorTable& prop,
                 const CovarianceTable& cov, double master_dt, double t, int degree_cap) {
    if (t == 0.0) return delta_L(spec, 0.0, degree_cap);
    double h = master_dt;
    double t_max = prop.grid.t_max();

    PhaseOp M = integrated_two_time(spec, prop, cov, h, t, degree_cap);

    if (spec.kind == ForcingKind::External) {
        // Exact differentiation under the integral: dM/dt = -grad^T [ F(t)
        // + Int_0^t Phidot(t-tau) F(tau) dtau ]. No finite differences, so
        // the local-dissipation cancellation dM/dt = [L0, M] + dL holds to
        // roundoff.
        TimeGrid master(t, h);
        Vec2 c = spec.F(t);
        for (std::size_t i = 0; i <= master.n; ++i) {
            double w = master.trap_weight(i, master.n);
            if (w == 0.0) continue;
            double tau = master.time(i);
            c += w * (prop.phidot[prop.grid.index(t - tau)] * spec.F(tau));
        }
        PhaseOp dM = grad_dot(-1.0 * c, degree_cap);
        MasterCoefficients mc = hpz_coefficients(prop, cov, t);
        PhaseOp L1 = dM - commutator(mc.L0, M);
        L1.canonicalize();
        return L1;
    }
    PhaseOp dM(degree_cap);
    if (t + h <= t_max + 1e-12 && t - h >= -1e-12) {
        PhaseOp Mp = integrated_two_time(spec, prop, cov, h, t + h, degree_cap);
        PhaseOp Mm = (t - h > 1e-12)
                         ? integrated_two_time(spec, prop, cov, h, t - h, degree_cap)
                         : PhaseOp(degree_cap);  // M(0) = 0, empty integral
        dM = (Mp - Mm) * (1.0 / (2.0 * h));
    } else {
        // One-sided second-order difference at the final time.
        PhaseOp Mm = integrated_two_time(spec, prop, cov, h, t - h, degree_cap);
        PhaseOp Mmm = (t - 2.0 * h > 1e-12)
                          ? integrated_two_time(spec, prop, cov, h, t - 2.0 * h, degree_cap)
                          : PhaseOp(degree_cap);
        dM = (3.0 * M - 4.0 * Mm + Mmm) * (1.0 / (2.0 * h));
    }

    MasterCoefficients mc = hpz_coefficients(prop, cov, t);
    PhaseOp L1 = dM - commutator(mc.L0, M);
    L1.canonicalize();
    return L1;
}

MasterSeries build_master_series(const PropagatorTable& prop, const CovarianceTable& cov,
                                 double master_dt, const ForcingSpec* spec, int degree_cap) {
    MasterSeries series;
    TimeGrid master(prop.grid.t_max(), master_dt);
    for (std::size_t i = 0; i <= master.n; ++i) {
        double t = master.time(i);
        series.times.push_back(t);
        series.coeffs.push_back(hpz_coefficients(prop, cov, t));
        if (spec != nullptr)
            series.L1.push_back(build_L1(*spec, prop, cov, master_dt, t, degree_cap));
    }
    return series;
}

}  // namespace qbm
