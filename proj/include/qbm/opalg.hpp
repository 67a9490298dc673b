#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace qbm {

// Monomial key for a normal-ordered phase-space operator term
// dx^i dp^j x^k p^l, all derivatives standing left of all coordinates.
struct Mono {
    int i = 0, j = 0, k = 0, l = 0;

    int degree() const { return i + j + k + l; }
    int deriv_order() const { return i + j; }

    std::uint32_t key() const {
        return (static_cast<std::uint32_t>(i) << 24) | (static_cast<std::uint32_t>(j) << 16) |
               (static_cast<std::uint32_t>(k) << 8) | static_cast<std::uint32_t>(l);
    }
    static Mono from_key(std::uint32_t key) {
        return {static_cast<int>(key >> 24), static_cast<int>((key >> 16) & 0xff),
                static_cast<int>((key >> 8) & 0xff), static_cast<int>(key & 0xff)};
    }
};

// Finite sum of monomials with real coefficients, kept in canonical form:
// unique keys, entries below 1e-14 * max|coeff| pruned on canonicalize().
// Total degree is capped (error, never silent truncation).
class PhaseOp {
public:
    static constexpr int kDefaultDegreeCap = 8;

    PhaseOp() = default;
    explicit PhaseOp(int degree_cap) : cap_(degree_cap) {}

    static PhaseOp identity(int degree_cap = kDefaultDegreeCap);
    static PhaseOp monomial(Mono m, double coeff, int degree_cap = kDefaultDegreeCap);

    int degree_cap() const { return cap_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const std::map<std::uint32_t, double>& terms() const { return terms_; }

    double coeff(Mono m) const;
    void add_term(Mono m, double coeff);

    PhaseOp& operator+=(const PhaseOp& o);
    PhaseOp& operator-=(const PhaseOp& o);
    PhaseOp& operator*=(double s);
    PhaseOp operator+(const PhaseOp& o) const;
    PhaseOp operator-(const PhaseOp& o) const;
    PhaseOp operator*(double s) const;

    int max_deriv_order() const;
    double max_abs_coeff() const;

    // Drops entries below 1e-14 * max|coeff|.
    void canonicalize();

    // One monomial per line, "coeff dx^i dp^j x^k p^l", sorted by key.
    std::string dump() const;

private:
    int cap_ = kDefaultDegreeCap;
    std::map<std::uint32_t, double> terms_;
};

inline PhaseOp operator*(double s, const PhaseOp& op) { return op * s; }

// Operator composition A.B re-expressed in normal order via
// x^k dx^i = sum_r (-1)^r r! C(i,r) C(k,r) dx^{i-r} x^{k-r} (and the p sector
// likewise). Errors on degree-cap overflow.
PhaseOp product(const PhaseOp& a, const PhaseOp& b);

// [A, B] = product(A,B) - product(B,A), canonicalized.
PhaseOp commutator(const PhaseOp& a, const PhaseOp& b);

// Max |coefficient difference| over the union of monomials.
double max_coeff_difference(const PhaseOp& a, const PhaseOp& b);

}  // namespace qbm
