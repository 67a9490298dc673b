#include "qbm/opalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qbm {

PhaseOp PhaseOp::identity(int degree_cap) {
    return monomial({0, 0, 0, 0}, 1.0, degree_cap);
}

PhaseOp PhaseOp::monomial(Mono m, double coeff, int degree_cap) {
    PhaseOp op(degree_cap);
    op.add_term(m, coeff);
    return op;
}

double PhaseOp::coeff(Mono m) const {
    auto it = terms_.find(m.key());
    return it == terms_.end() ? 0.0 : it->second;
}

void PhaseOp::add_term(Mono m, double coeff) {
    if (m.i < 0 || m.j < 0 || m.k < 0 || m.l < 0)
        throw std::invalid_argument("PhaseOp: negative exponent");
    if (m.degree() > cap_)
        throw std::runtime_error("PhaseOp: degree " + std::to_string(m.degree()) +
                                 " exceeds cap " + std::to_string(cap_));
    terms_[m.key()] += coeff;
}

PhaseOp& PhaseOp::operator+=(const PhaseOp& o) {
    for (const auto& [key, c] : o.terms_) add_term(Mono::from_key(key), c);
    return *this;
}

PhaseOp& PhaseOp::operator-=(const PhaseOp& o) {
    for (const auto& [key, c] : o.terms_) add_term(Mono::from_key(key), -c);
    return *this;
}

PhaseOp& PhaseOp::operator*=(double s) {
    for (auto& [key, c] : terms_) c *= s;
    return *this;
}

PhaseOp PhaseOp::operator+(const PhaseOp& o) const { PhaseOp r = *this; r += o; return r; }
PhaseOp PhaseOp::operator-(const PhaseOp& o) const { PhaseOp r = *this; r -= o; return r; }
PhaseOp PhaseOp::operator*(double s) const { PhaseOp r = *this; r *= s; return r; }

int PhaseOp::max_deriv_order() const {
    int order = 0;
    for (const auto& [key, c] : terms_) order = std::max(order, Mono::from_key(key).deriv_order());
    return order;
}

double PhaseOp::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [key, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

void PhaseOp::canonicalize() {
    double cut = 1e-14 * max_abs_coeff();
    for (auto it = terms_.begin(); it != terms_.end();)
        it = (std::abs(it->second) <= cut) ? terms_.erase(it) : std::next(it);
}

std::string PhaseOp::dump() const {
    std::ostringstream os;
    os.precision(17);
    for (const auto& [key, c] : terms_) {
        Mono m = Mono::from_key(key);
        os << c << " dx^" << m.i << " dp^" << m.j << " x^" << m.k << " p^" << m.l << "\n";
    }
    return os.str();
}

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double b = 1.0;
    for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
    return b;
}

}  // namespace

PhaseOp product(const PhaseOp& a, const PhaseOp& b) {
    int cap = std::max(a.degree_cap(), b.degree_cap());
    PhaseOp out(cap);
    for (const auto& [ka, ca] : a.terms()) {
        Mono ma = Mono::from_key(ka);
        for (const auto& [kb, cb] : b.terms()) {
            Mono mb = Mono::from_key(kb);
            // Leading (r = 0) term carries the full combined degree.
            if (ma.degree() + mb.degree() > cap)
                throw std::runtime_error("product: degree-cap overflow (" +
                                         std::to_string(ma.degree() + mb.degree()) + " > " +
                                         std::to_string(cap) + ")");
            // Commute x^{k_a} past dx^{i_b} and p^{l_a} past dp^{j_b}.
            int rx_max = std::min(ma.k, mb.i);
            int rp_max = std::min(ma.l, mb.j);
            for (int rx = 0; rx <= rx_max; ++rx) {
                double cx = ((rx % 2) ? -1.0 : 1.0) * factorial(rx) * binom(mb.i, rx) * binom(ma.k, rx);
                for (int rp = 0; rp <= rp_max; ++rp) {
                    double cp = ((rp % 2) ? -1.0 : 1.0) * factorial(rp) * binom(mb.j, rp) * binom(ma.l, rp);
                    Mono m{ma.i + mb.i - rx, ma.j + mb.j - rp,
                           ma.k - rx + mb.k, ma.l - rp + mb.l};
                    out.add_term(m, ca * cb * cx * cp);
                }
            }
        }
    }
    out.canonicalize();
    return out;
}

PhaseOp commutator(const PhaseOp& a, const PhaseOp& b) {
    PhaseOp r = product(a, b) - product(b, a);
    r.canonicalize();
    return r;
}

double max_coeff_difference(const PhaseOp& a, const PhaseOp& b) {
    double worst = 0.0;
    for (const auto& [key, c] : a.terms())
        worst = std::max(worst, std::abs(c - b.coeff(Mono::from_key(key))));
    for (const auto& [key, c] : b.terms())
        worst = std::max(worst, std::abs(c - a.coeff(Mono::from_key(key))));
    return worst;
}

}  // namespace qbm
