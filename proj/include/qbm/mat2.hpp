#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qbm {

struct Vec2 {
    double x = 0.0, p = 0.0;

    double& operator[](int i) { return i == 0 ? x : p; }
    double operator[](int i) const { return i == 0 ? x : p; }

    Vec2 operator+(const Vec2& o) const { return {x + o.x, p + o.p}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, p - o.p}; }
    Vec2 operator*(double s) const { return {x * s, p * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; p += o.p; return *this; }
    double dot(const Vec2& o) const { return x * o.x + p * o.p; }
    double norm() const { return std::sqrt(x * x + p * p); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Row-major 2x2 matrix; a(i,j), i,j in {0,1} with 0 = x, 1 = p.
struct Mat2 {
    std::array<double, 4> a{0.0, 0.0, 0.0, 0.0};

    Mat2() = default;
    Mat2(double a00, double a01, double a10, double a11) : a{a00, a01, a10, a11} {}

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 zero() { return {}; }

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(2 * i + j)]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(2 * i + j)]; }

    Mat2 operator+(const Mat2& o) const { return {a[0] + o.a[0], a[1] + o.a[1], a[2] + o.a[2], a[3] + o.a[3]}; }
    Mat2 operator-(const Mat2& o) const { return {a[0] - o.a[0], a[1] - o.a[1], a[2] - o.a[2], a[3] - o.a[3]}; }
    Mat2 operator*(double s) const { return {a[0] * s, a[1] * s, a[2] * s, a[3] * s}; }
    Mat2& operator+=(const Mat2& o) { for (int i = 0; i < 4; ++i) a[static_cast<std::size_t>(i)] += o.a[static_cast<std::size_t>(i)]; return *this; }

    Mat2 operator*(const Mat2& o) const {
        return {a[0] * o.a[0] + a[1] * o.a[2], a[0] * o.a[1] + a[1] * o.a[3],
                a[2] * o.a[0] + a[3] * o.a[2], a[2] * o.a[1] + a[3] * o.a[3]};
    }
    Vec2 operator*(const Vec2& v) const { return {a[0] * v.x + a[1] * v.p, a[2] * v.x + a[3] * v.p}; }

    Mat2 transpose() const { return {a[0], a[2], a[1], a[3]}; }
    double det() const { return a[0] * a[3] - a[1] * a[2]; }
    double norm() const {  // Frobenius
        return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]);
    }

    Mat2 inverse() const {
        double d = det();
        if (d == 0.0) throw std::runtime_error("Mat2: singular matrix");
        double s = 1.0 / d;
        return {a[3] * s, -a[1] * s, -a[2] * s, a[0] * s};
    }

    // Condition number estimate in the Frobenius sense: ||A||_F * ||A^-1||_F.
    double cond() const {
        double d = std::abs(det());
        if (d == 0.0) return std::numeric_limits<double>::infinity();
        double f2 = a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3];
        return f2 / d;  // ||A||_F * ||A^-1||_F = ||A||_F^2 / |det A| for 2x2
    }
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

// v * w^T
inline Mat2 outer(const Vec2& v, const Vec2& w) {
    return {v.x * w.x, v.x * w.p, v.p * w.x, v.p * w.p};
}

inline Vec2 xhat() { return {1.0, 0.0}; }
inline Vec2 phat() { return {0.0, 1.0}; }

}  // namespace qbm
