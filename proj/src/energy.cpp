#include "morrey/energy.hpp"

#include "morrey/errors.hpp"

#include <algorithm>
#include <cmath>

namespace morrey {

SplitEnergy::SplitEnergy(std::string name, ScalarFunction h_upper, ScalarFunction f)
    : name_(std::move(name)), h_upper_(std::move(h_upper)), f_(std::move(f))
{
    if (!h_upper_.valid() || !f_.valid())
        throw Error(ErrorKind::InvalidArgument, "split energy '" + name_ + "' needs both h and f");
}

Jet2 SplitEnergy::h_jet(double t) const
{
    if (!(t > 0.0))
        throw Error(ErrorKind::Domain, "h evaluated at non-positive t");
    if (t >= 1.0)
        return h_upper_.jet(t);
    // h(t) = H(1/t)
    // h'(t) = -H'(1/t) / t^2
    // h''(t) = 2 H'(1/t) / t^3 + H''(1/t) / t^4
    const Jet2 H = h_upper_.jet(1.0 / t);
    const double t2 = t * t;
    return {H.v, -H.d1 / t2, 2.0 * H.d1 / (t2 * t) + H.d2 / (t2 * t2)};
}

double SplitEnergy::evaluate(const Matrix2& F) const
{
    const SingularValues sv = singular_values(F);
    // det F directly: more accurate than lam_max * lam_min.
    return h_upper_.value(sv.ratio()) + f_.value(F.det());
}

double SplitEnergy::g(double x, double y) const
{
    if (!(x > 0.0) || !(y > 0.0))
        throw Error(ErrorKind::NonPositiveDeterminant, "singular values must be positive");
    return h(x / y) + f_.value(x * y);
}

IsotropicPartials SplitEnergy::partials(double x, double y) const
{
    if (!(x > 0.0) || !(y > 0.0))
        throw Error(ErrorKind::NonPositiveDeterminant, "singular values must be positive");
    const Jet2 H = h_jet(x / y);
    const Jet2 Fz = f_.jet(x * y);
    const double y2 = y * y;
    IsotropicPartials p;
    p.g = H.v + Fz.v;
    p.gx = H.d1 / y + Fz.d1 * y;
    p.gy = -H.d1 * x / y2 + Fz.d1 * x;
    p.gxx = H.d2 / y2 + Fz.d2 * y2;
    p.gyy = H.d2 * x * x / (y2 * y2) + 2.0 * H.d1 * x / (y2 * y) + Fz.d2 * x * x;
    p.gxy = -H.d1 / y2 - H.d2 * x / (y2 * y) + Fz.d1 + Fz.d2 * x * y;
    return p;
}

SplitEnergy SplitEnergy::renamed(std::string name) const
{
    SplitEnergy copy = *this;
    copy.name_ = std::move(name);
    return copy;
}

GeneralIsotropicEnergy::GeneralIsotropicEnergy(std::string name, ValueFn g, PartialsFn partials,
                                               std::string description)
    : name_(std::move(name)), g_(std::move(g)), partials_(std::move(partials)),
      description_(std::move(description))
{
    if (!g_)
        throw Error(ErrorKind::InvalidArgument, "isotropic energy '" + name_ + "' needs g");
}

GeneralIsotropicEnergy GeneralIsotropicEnergy::from_split(const SplitEnergy& W)
{
    return GeneralIsotropicEnergy(
        W.name(), [W](double x, double y) { return W.g(x, y); },
        [W](double x, double y) { return W.partials(x, y); },
        "h(t) = " + W.h_source() + ", f(z) = " + W.f_source());
}

IsotropicPartials GeneralIsotropicEnergy::partials(double x, double y) const
{
    if (partials_)
        return partials_(x, y);
    const double hx = 1e-4 * x;
    const double hy = 1e-4 * y;
    IsotropicPartials p;
    p.g = g_(x, y);
    const double xp = g_(x + hx, y);
    const double xm = g_(x - hx, y);
    const double yp = g_(x, y + hy);
    const double ym = g_(x, y - hy);
    p.gx = (xp - xm) / (2.0 * hx);
    p.gy = (yp - ym) / (2.0 * hy);
    p.gxx = (xp - 2.0 * p.g + xm) / (hx * hx);
    p.gyy = (yp - 2.0 * p.g + ym) / (hy * hy);
    p.gxy = (g_(x + hx, y + hy) - g_(x + hx, y - hy) - g_(x - hx, y + hy) + g_(x - hx, y - hy))
            / (4.0 * hx * hy);
    return p;
}

double GeneralIsotropicEnergy::evaluate(const Matrix2& F) const
{
    const SingularValues sv = singular_values(F);
    return g_(sv.lam_max, sv.lam_min);
}

double GeneralIsotropicEnergy::symmetry_defect(double lo, double hi, int n) const
{
    double worst = 0.0;
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            const double x = lo * std::exp(step * i);
            const double y = lo * std::exp(step * j);
            const double a = g_(x, y);
            const double b = g_(y, x);
            worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(a)));
        }
    }
    return worst;
}

Energy::Energy(std::string name, MatrixFn fn, EnergyDomain domain)
    : name_(std::move(name)), fn_(std::move(fn)), domain_(domain)
{
}

Energy Energy::from(const SplitEnergy& W)
{
    Energy e(W.name(), [W](const Matrix2& F) { return W.evaluate(F); });
    return e.with_ordered([W](double a, double b) { return W.g(a, b); },
                          [W](double a, double b) {
                              const IsotropicPartials p = W.partials(a, b);
                              return std::pair{p.gx, p.gy};
                          });
}

Energy Energy::from(const GeneralIsotropicEnergy& W)
{
    Energy e(W.name(), [W](const Matrix2& F) { return W.evaluate(F); });
    if (!W.has_analytic_partials())
        return e.with_ordered([W](double a, double b) { return W.g(a, b); });
    return e.with_ordered([W](double a, double b) { return W.g(a, b); },
                          [W](double a, double b) {
                              const IsotropicPartials p = W.partials(a, b);
                              return std::pair{p.gx, p.gy};
                          });
}

Energy Energy::with_ordered(OrderedFn ghat, OrderedGradFn grad) const
{
    Energy copy = *this;
    copy.ghat_ = std::move(ghat);
    copy.grad_ = std::move(grad);
    return copy;
}

Energy Energy::renamed(std::string name) const
{
    Energy copy = *this;
    copy.name_ = std::move(name);
    return copy;
}

double Energy::ordered(double a, double b) const
{
    if (a < b)
        std::swap(a, b);
    if (ghat_)
        return ghat_(a, b);
    return fn_(Matrix2::diag(a, b));
}

std::pair<double, double> Energy::ordered_gradient(double a, double b) const
{
    if (a < b)
        std::swap(a, b);
    if (grad_)
        return grad_(a, b);
    const double ha = 1e-6 * a;
    const double hb = 1e-6 * b;
    return {(ordered(a + ha, b) - ordered(a - ha, b)) / (2.0 * ha),
            (ordered(a, b + hb) - ordered(a, b - hb)) / (2.0 * hb)};
}

} // namespace morrey
