#include "morrey/transforms.hpp"

#include "morrey/errors.hpp"
#include "morrey/report.hpp"

#include <algorithm>
#include <cmath>

namespace morrey {

ComplexPair to_complex(const Matrix2& F)
{
    return {Complex(0.5 * (F.f11 + F.f22), 0.5 * (F.f21 - F.f12)),
            Complex(0.5 * (F.f11 - F.f22), 0.5 * (F.f21 + F.f12))};
}

Matrix2 from_complex(const ComplexPair& zw)
{
    const Complex z = zw.z;
    const Complex w = zw.w;
    return {z.real() + w.real(), w.imag() - z.imag(), z.imag() + w.imag(), z.real() - w.real()};
}

BurkholderParams::BurkholderParams(double p_) : p(p_)
{
    if (!(p > 1.0) || !std::isfinite(p))
        throw Error(ErrorKind::InvalidArgument, "Burkholder exponent must satisfy p > 1");
}

double BurkholderParams::p_star() const { return std::max(p, p / (p - 1.0)); }

double BurkholderParams::alpha_p() const { return p * std::pow(1.0 - 1.0 / p_star(), p - 1.0); }

namespace {

void require_p2(const BurkholderParams& params)
{
    if (!(params.p >= 2.0))
        throw Error(ErrorKind::InvalidArgument, "B_p and L_p need p >= 2");
}

// ghat of B_p at ordered singular values a >= b (b may be negative for det F < 0).
double bp_ordered(double a, double b, double p)
{
    return -(0.5 * p * a * b + (1.0 - 0.5 * p) * a * a) * std::pow(a, p - 2.0);
}

} // namespace

double burkholder_bp(const Matrix2& F, const BurkholderParams& params)
{
    require_p2(params);
    const double p = params.p;
    if (p == 2.0)
        return -F.det();
    const double l = operator_norm(F);
    return -(0.5 * p * F.det() + (1.0 - 0.5 * p) * l * l) * std::pow(l, p - 2.0);
}

double burkholder_lp(const ComplexPair& zw, const BurkholderParams& params)
{
    require_p2(params);
    const double z = std::abs(zw.z);
    const double w = std::abs(zw.w);
    return (z - (params.p - 1.0) * w) * std::pow(z + w, params.p - 1.0);
}

double burkholder_bstar(const Matrix2& F)
{
    const double l = operator_norm(F);
    if (!(l > 0.0))
        throw Error(ErrorKind::ZeroMatrix, "B_star needs F != 0");
    return -0.5 * (1.0 + 2.0 * std::log(l)) * F.det() + 0.5 * l * l;
}

InequalityMargin burkholder_inequality(const ComplexPair& zw, const BurkholderParams& params)
{
    const double p = params.p;
    const double q = params.p_star() - 1.0;
    const double z = std::abs(zw.z);
    const double w = std::abs(zw.w);
    const double zp = std::pow(z, p);
    const double wp = std::pow(q, p) * std::pow(w, p);
    const double rhs = params.alpha_p() * (z - q * w) * std::pow(z + w, p - 1.0);
    return {rhs - (zp - wp), zp + wp + std::abs(rhs)};
}

Energy burkholder_energy(double p)
{
    const BurkholderParams params(p);
    require_p2(params);
    std::string name = "B_p(p=" + format_double(p) + ")";
    Energy e(name, [params](const Matrix2& F) { return burkholder_bp(F, params); }, EnergyDomain::AllMatrices);
    return e.with_ordered([p](double a, double b) { return bp_ordered(a, b, p); },
                          [p](double a, double b) {
                              const double ap = std::pow(a, p - 2.0);
                              const double inner = 0.5 * p * a * b + (1.0 - 0.5 * p) * a * a;
                              const double da = -((0.5 * p * b + (2.0 - p) * a) * ap
                                                  + inner * (p - 2.0) * std::pow(a, p - 3.0));
                              const double db = -0.5 * p * a * ap;
                              return std::pair{da, db};
                          });
}

Energy bstar_energy()
{
    Energy e("B_star", [](const Matrix2& F) { return burkholder_bstar(F); }, EnergyDomain::AllMatrices);
    return e.with_ordered(
        [](double a, double b) { return -0.5 * (1.0 + 2.0 * std::log(a)) * a * b + 0.5 * a * a; },
        [](double a, double b) { return std::pair{a - b * (1.5 + std::log(a)), -a * (0.5 + std::log(a))}; });
}

Energy shield(const Energy& W)
{
    const std::string name = W.name() + "#";
    if (!W.isotropic()) {
        return Energy(name, [W](const Matrix2& F) {
            const double d = F.det();
            if (!(d > 0.0))
                throw Error(ErrorKind::NonPositiveDeterminant, "Shield transformation needs det F > 0");
            return d * W(F.inverse());
        });
    }
    auto ghat = [W](double a, double b) { return a * b * W.ordered(1.0 / b, 1.0 / a); };
    Energy e(name, [ghat](const Matrix2& F) {
        const SingularValues sv = singular_values(F);
        return ghat(sv.lam_max, sv.lam_min);
    });
    // d/da [a b g(1/b, 1/a)] = b g - (b/a) g_2,  d/db = a g - (a/b) g_1
    return e.with_ordered(ghat, [W](double a, double b) {
        const double g = W.ordered(1.0 / b, 1.0 / a);
        const auto [g1, g2] = W.ordered_gradient(1.0 / b, 1.0 / a);
        return std::pair{b * g - (b / a) * g2, a * g - (a / b) * g1};
    });
}

double IdentityReport::worst() const
{
    double w = 0.0;
    for (const IdentityCheck& c : checks)
        w = std::max(w, c.margin);
    return w;
}

IdentityReport identity_suite(const Matrix2& F)
{
    IdentityReport r;
    const ComplexPair zw = to_complex(F);
    const double z = std::abs(zw.z);
    const double w = std::abs(zw.w);
    auto add = [&r](std::string name, double lhs, double rhs) {
        r.checks.push_back({std::move(name), lhs, rhs, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs))});
    };
    const double d = F.det();
    const double lmax = operator_norm(F);
    add("det F = |z|^2 - |w|^2", d, (z - w) * (z + w));
    add("|F|^2 / 2 = |z|^2 + |w|^2", 0.5 * F.frobenius_sq(), z * z + w * w);
    add("lam_max^2 = (|z| + |w|)^2", lmax * lmax, (z + w) * (z + w));
    if (d >= 0.0) {
        const double lmin = lmax > 0.0 ? d / lmax : 0.0;
        add("lam_min = |z| - |w|", lmin, z - w);
    } else {
        r.notes.push_back("det F < 0: lam_min identity skipped");
    }
    if (d > 0.0) {
        const SingularValues sv = singular_values(F);
        add("K = lam_max / lam_min = (|z| + |w|) / (|z| - |w|)", sv.ratio(), (z + w) / (z - w));
        add("outer distortion |F|^2 / (2 det F) = (|z|^2 + |w|^2) / (|z|^2 - |w|^2)", distortion_nonlinear(F),
            (z * z + w * w) / ((z - w) * (z + w)));
    } else {
        r.notes.push_back("det F <= 0: distortion identities skipped");
    }
    return r;
}

} // namespace morrey
