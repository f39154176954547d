#pragma once

#include <cmath>

namespace morrey {

// Value with first and second derivative with respect to one scalar variable.
struct Jet2 {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;

    static Jet2 constant(double c) { return {c, 0.0, 0.0}; }
    static Jet2 variable(double x) { return {x, 1.0, 0.0}; }
};

inline Jet2 operator+(Jet2 a, Jet2 b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
inline Jet2 operator-(Jet2 a, Jet2 b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
inline Jet2 operator-(Jet2 a) { return {-a.v, -a.d1, -a.d2}; }

inline Jet2 operator*(Jet2 a, Jet2 b)
{
    return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}

inline Jet2 operator/(Jet2 a, Jet2 b)
{
    const double q = a.v / b.v;
    const double q1 = (a.d1 - q * b.d1) / b.v;
    const double q2 = (a.d2 - 2.0 * q1 * b.d1 - q * b.d2) / b.v;
    return {q, q1, q2};
}

inline Jet2 operator*(double s, Jet2 a) { return {s * a.v, s * a.d1, s * a.d2}; }
inline Jet2 operator+(double s, Jet2 a) { return {s + a.v, a.d1, a.d2}; }

// Composition phi(a) given phi, phi', phi'' at a.v.
inline Jet2 compose(Jet2 a, double p0, double p1, double p2)
{
    return {p0, p1 * a.d1, p2 * a.d1 * a.d1 + p1 * a.d2};
}

inline Jet2 log(Jet2 a) { return compose(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }

inline Jet2 exp(Jet2 a)
{
    const double e = std::exp(a.v);
    return compose(a, e, e, e);
}

inline Jet2 sqrt(Jet2 a)
{
    const double s = std::sqrt(a.v);
    return compose(a, s, 0.5 / s, -0.25 / (s * a.v));
}

inline Jet2 sin(Jet2 a)
{
    const double s = std::sin(a.v);
    return compose(a, s, std::cos(a.v), -s);
}

inline Jet2 cos(Jet2 a)
{
    const double c = std::cos(a.v);
    return compose(a, c, -std::sin(a.v), -c);
}

inline Jet2 abs(Jet2 a)
{
    const double s = a.v < 0.0 ? -1.0 : 1.0;
    return {std::abs(a.v), s * a.d1, s * a.d2};
}

// a^n for integer n, valid for any sign of a (a != 0 when n < 0).
inline Jet2 ipow(Jet2 a, int n)
{
    if (n == 0)
        return Jet2::constant(1.0);
    const double nn = n;
    const double p2 = n >= 2 || n < 0 ? nn * (nn - 1.0) * std::pow(a.v, n - 2) : 0.0;
    const double p1 = nn * std::pow(a.v, n - 1);
    return compose(a, std::pow(a.v, n), p1, p2);
}

// a^c for real constant c, a > 0.
inline Jet2 pow(Jet2 a, double c)
{
    const double p = std::pow(a.v, c);
    return compose(a, p, c * p / a.v, c * (c - 1.0) * p / (a.v * a.v));
}

} // namespace morrey
