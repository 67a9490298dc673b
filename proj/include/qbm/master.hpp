#pragma once

#include <functional>
#include <vector>

#include "qbm/covariance.hpp"
#include "qbm/grid.hpp"
#include "qbm/mat2.hpp"
#include "qbm/opalg.hpp"
#include "qbm/propagator.hpp"

namespace qbm {

enum class ForcingKind { External, Linear, Quadratic, Cubic, GeneralPolynomial };

// One (dp)^d F_db(t) x^b term of a polynomial forcing.
struct ForcingTerm {
    int d = 0;
    int b = 0;
    std::function<double(double)> coeff;
};

// Perturbation dL(t) away from the linear damped-oscillator characteristics.
// Quadratic and cubic spring-force corrections automatically carry their
// quantum-deformation companion terms (weights 1/12 and 1/4); the
// classical_characteristics_only flag drops them for A/B comparisons.
struct ForcingSpec {
    ForcingKind kind = ForcingKind::External;
    std::function<Vec2(double)> F;                // External: dL = -grad^T F(t)
    std::function<Mat2(double)> K;                // Linear:   dL = grad^T K(t) z
    std::function<double(double)> k1;             // Quadratic spring correction
    std::function<double(double)> k2;             // Cubic spring correction
    std::vector<ForcingTerm> general;             // GeneralPolynomial
    bool classical_characteristics_only = false;

    static ForcingSpec external(Vec2 force);
    static ForcingSpec external(std::function<Vec2(double)> force);
    static ForcingSpec linear(Mat2 kmat);
    static ForcingSpec linear(std::function<Mat2(double)> kmat);
    static ForcingSpec quadratic(double k1_const);
    static ForcingSpec cubic(double k2_const);
    static ForcingSpec general_poly(std::vector<ForcingTerm> terms);

    // The (d, b, coeff) decomposition for polynomial kinds (Quadratic,
    // Cubic, GeneralPolynomial). Errors for External/Linear.
    std::vector<ForcingTerm> poly_terms() const;
};

// Time-local generator data of the zeroth-order (HPZ-type) master equation.
struct MasterCoefficients {
    double t = 0.0;
    Mat2 H;      // -Phidot Phi^-1
    Mat2 D;      // 1/2 (H sigma + sigma H^T + sigmadot)
    PhaseOp L0;  // grad^T H z + grad^T D grad
};

MasterCoefficients hpz_coefficients(const PropagatorTable& prop, const CovarianceTable& cov,
                                    double t);

PhaseOp build_L0(const Mat2& H, const Mat2& D, int degree_cap = PhaseOp::kDefaultDegreeCap);

// dL(t) itself, as a PhaseOp.
PhaseOp delta_L(const ForcingSpec& spec, double t, int degree_cap = PhaseOp::kDefaultDegreeCap);

// k-th propagated-noise-moment operator Delta^[k](tau,t), built by the
// recursion Delta^[k] = Delta^[1] Delta^[k-1] - (k-1) s Delta^[k-2].
PhaseOp delta_k(const PropagatorTable& prop, const CovarianceTable& cov,
                double tau, double t, int k, int degree_cap = PhaseOp::kDefaultDegreeCap);

// Two-time open-system operator dL_bar(tau,t); reduces to dL(t) at tau = t.
PhaseOp two_time_operator(const ForcingSpec& spec, const PropagatorTable& prop,
                          const CovarianceTable& cov, double tau, double t,
                          int degree_cap = PhaseOp::kDefaultDegreeCap);

// tau-integrated two-time operator M(t) = Int_0^t dL_bar(tau,t) dtau,
// trapezoid over the master grid (step master_dt, a multiple of grid.dt).
PhaseOp integrated_two_time(const ForcingSpec& spec, const PropagatorTable& prop,
                            const CovarianceTable& cov, double master_dt, double t,
                            int degree_cap = PhaseOp::kDefaultDegreeCap);

// First-order generator L1(t) = { d/dt - Ad[L0(t)] } M(t). For External
// forcing d/dt is taken exactly (differentiation under the integral via the
// stored Phidot); other kinds use central differences of operator
// coefficients over the master grid (one-sided at the final time).
// L1(0) = dL(0).
PhaseOp build_L1(const ForcingSpec& spec, const PropagatorTable& prop,
                 const CovarianceTable& cov, double master_dt, double t,
                 int degree_cap = PhaseOp::kDefaultDegreeCap);

// Coefficient series on the master grid: H, D, L0 and (if a forcing is
// given) L1 at every master time.
struct MasterSeries {
    std::vector<double> times;
    std::vector<MasterCoefficients> coeffs;
    std::vector<PhaseOp> L1;  // empty when built without forcing
};

MasterSeries build_master_series(const PropagatorTable& prop, const CovarianceTable& cov,
                                 double master_dt, const ForcingSpec* spec = nullptr,
                                 int degree_cap = PhaseOp::kDefaultDegreeCap);

}  // namespace qbm
