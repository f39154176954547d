#include "morrey/matrix2.hpp"

#include "morrey/errors.hpp"

#include <cmath>
#include <sstream>

namespace morrey {

namespace {

// ad - bc with one rounding error less than the naive form.
double diff_of_products(double a, double b, double c, double d)
{
    const double cd = c * d;
    const double err = std::fma(-c, d, cd);
    const double dop = std::fma(a, b, -cd);
    return dop + err;
}

void require_positive_det(const Matrix2& F, double det)
{
    if (!(det > 0.0)) {
        std::ostringstream os;
        os << "det F = " << det << " is not positive";
        throw Error(ErrorKind::NonPositiveDeterminant, os.str());
    }
    if (!F.is_finite())
        throw Error(ErrorKind::Degenerate, "non-finite matrix entry");
}

} // namespace

Matrix2 Matrix2::rotation(double angle)
{
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c, -s, s, c};
}

double Matrix2::det() const { return diff_of_products(f11, f22, f12, f21); }

Matrix2 Matrix2::inverse() const
{
    const double d = det();
    if (d == 0.0)
        throw Error(ErrorKind::Degenerate, "singular matrix has no inverse");
    return {f22 / d, -f12 / d, -f21 / d, f11 / d};
}

bool Matrix2::is_finite() const
{
    return std::isfinite(f11) && std::isfinite(f12) && std::isfinite(f21) && std::isfinite(f22);
}

Matrix2 operator+(const Matrix2& a, const Matrix2& b)
{
    return {a.f11 + b.f11, a.f12 + b.f12, a.f21 + b.f21, a.f22 + b.f22};
}

Matrix2 operator-(const Matrix2& a, const Matrix2& b)
{
    return {a.f11 - b.f11, a.f12 - b.f12, a.f21 - b.f21, a.f22 - b.f22};
}

Matrix2 operator*(const Matrix2& a, const Matrix2& b)
{
    return {a.f11 * b.f11 + a.f12 * b.f21, a.f11 * b.f12 + a.f12 * b.f22,
            a.f21 * b.f11 + a.f22 * b.f21, a.f21 * b.f12 + a.f22 * b.f22};
}

Matrix2 operator*(double s, const Matrix2& a) { return {s * a.f11, s * a.f12, s * a.f21, s * a.f22}; }

// |F|^4 - 4 det^2 = (|F|^2 - 2 det)(|F|^2 + 2 det), and both factors are sums of squares:
//   |F|^2 - 2 det = (f11 - f22)^2 + (f12 + f21)^2 = 4|w|^2
//   |F|^2 + 2 det = (f11 + f22)^2 + (f21 - f12)^2 = 4|z|^2
// so lam_max = |z| + |w| without cancellation in the radicand.
double operator_norm(const Matrix2& F)
{
    const double zabs = 0.5 * std::hypot(F.f11 + F.f22, F.f21 - F.f12);
    const double wabs = 0.5 * std::hypot(F.f11 - F.f22, F.f12 + F.f21);
    return zabs + wabs;
}

SingularValues singular_values(const Matrix2& F)
{
    const double d = F.det();
    require_positive_det(F, d);
    const double lmax = operator_norm(F);
    if (!(lmax > 0.0) || !std::isfinite(lmax))
        throw Error(ErrorKind::Degenerate, "operator norm is not a positive finite number");
    double lmin = d / lmax;
    // Equal singular values up to rounding.
    if (lmin > lmax)
        lmin = lmax;
    return {lmax, lmin};
}

double distortion_K(const Matrix2& F) { return singular_values(F).ratio(); }

double distortion_nonlinear(const Matrix2& F)
{
    const double d = F.det();
    require_positive_det(F, d);
    return F.frobenius_sq() / (2.0 * d);
}

} // namespace morrey
