#pragma once

#include <cmath>

namespace morrey {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

// Row-major 2x2 matrix [[f11, f12], [f21, f22]].
struct Matrix2 {
    double f11 = 0.0, f12 = 0.0;
    double f21 = 0.0, f22 = 0.0;

    static Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Matrix2 diag(double a, double b) { return {a, 0.0, 0.0, b}; }
    static Matrix2 rotation(double angle);
    static Matrix2 outer(Vec2 a, Vec2 b) { return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y}; }

    double det() const;
    double frobenius_sq() const { return f11 * f11 + f12 * f12 + f21 * f21 + f22 * f22; }
    double trace() const { return f11 + f22; }
    Matrix2 transpose() const { return {f11, f21, f12, f22}; }
    Matrix2 inverse() const;
    bool is_finite() const;

    Vec2 operator*(Vec2 v) const { return {f11 * v.x + f12 * v.y, f21 * v.x + f22 * v.y}; }
};

Matrix2 operator+(const Matrix2& a, const Matrix2& b);
Matrix2 operator-(const Matrix2& a, const Matrix2& b);
Matrix2 operator*(const Matrix2& a, const Matrix2& b);
Matrix2 operator*(double s, const Matrix2& a);

struct SingularValues {
    double lam_max = 1.0;
    double lam_min = 1.0;

    double ratio() const { return lam_max / lam_min; }
    double product() const { return lam_max * lam_min; }
};

// Ordered singular values of F with det F > 0.
SingularValues singular_values(const Matrix2& F);

// Largest singular value for any F (also det F <= 0).
double operator_norm(const Matrix2& F);

// Linear distortion lam_max / lam_min.
double distortion_K(const Matrix2& F);

// Outer distortion |F|^2 / (2 det F).
double distortion_nonlinear(const Matrix2& F);

} // namespace morrey
