#include "morrey/catalog.hpp"

#include "morrey/errors.hpp"

#include <cmath>
#include <sstream>

namespace morrey {

namespace {

std::string num(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

ScalarFunction log_fn(double sign, std::string source)
{
    return ScalarFunction::analytic(
        [sign](double z) {
            if (!(z > 0.0))
                throw Error(ErrorKind::Domain, "log of non-positive argument");
            return Jet2{sign * std::log(z), sign / z, -sign / (z * z)};
        },
        std::move(source));
}

ScalarFunction zero_fn()
{
    return ScalarFunction::analytic([](double) { return Jet2{}; }, "0");
}

// Partials of g(x, y) = G(log x, log y) from the partials of G.
IsotropicPartials from_log_variables(double x, double y, double G, double Gu, double Gv,
                                     double Guu, double Gvv, double Guv)
{
    IsotropicPartials p;
    p.g = G;
    p.gx = Gu / x;
    p.gy = Gv / y;
    p.gxx = (Guu - Gu) / (x * x);
    p.gyy = (Gvv - Gv) / (y * y);
    p.gxy = Guv / (x * y);
    return p;
}

void require_positive(double x, double y)
{
    if (!(x > 0.0) || !(y > 0.0))
        throw Error(ErrorKind::NonPositiveDeterminant, "singular values must be positive");
}

} // namespace

void BuiltinParams::validate() const
{
    if (!(mu >= 0.0) || !(kappa >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "Hencky moduli must be non-negative");
    if (!(k >= 0.0) || !(k_hat >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "exponentiated Hencky exponents must be non-negative");
    if (!(p >= 2.0))
        throw Error(ErrorKind::InvalidArgument, "Burkholder exponent must satisfy p >= 2");
    if (!(alpha >= 1.0 && alpha < 4.0))
        throw Error(ErrorKind::InvalidArgument, "Hadamard exponent must lie in [1, 4)");
}

SplitEnergy w_magic_plus()
{
    auto h = ScalarFunction::analytic(
        [](double t) { return Jet2{t - std::log(t), 1.0 - 1.0 / t, 1.0 / (t * t)}; }, "t - log(t)");
    return SplitEnergy("W_magic_plus", h, log_fn(1.0, "log(z)"));
}

SplitEnergy w_magic_minus()
{
    auto h = ScalarFunction::analytic(
        [](double t) { return Jet2{t + std::log(t), 1.0 + 1.0 / t, -1.0 / (t * t)}; }, "t + log(t)");
    return SplitEnergy("W_magic_minus", h, log_fn(-1.0, "-log(z)"));
}

SplitEnergy w_smooth()
{
    auto h = ScalarFunction::analytic(
        [](double t) {
            const double t2 = t * t;
            return Jet2{t / 3.0 + 4.0 / (3.0 * t) + std::log(t), 1.0 / 3.0 - 4.0 / (3.0 * t2) + 1.0 / t,
                        8.0 / (3.0 * t2 * t) - 1.0 / t2};
        },
        "t/3 + 4/(3*t) + log(t)");
    return SplitEnergy("W_smooth", h, log_fn(-1.0, "-log(z)"));
}

SplitEnergy w_3b(double c)
{
    if (!(c > 0.0))
        throw Error(ErrorKind::InvalidArgument, "W_3b parameter c must be positive");
    // h(t) = (1 + t^2 + (1+t) Q) / (2 c t) - log t + log(1 + 2(1+c) t + t^2 + (1+t) Q),
    // Q = sqrt(t^2 + 2(1+2c) t + 1).
    auto fn = [c](double tv) {
        const Jet2 t = Jet2::variable(tv);
        const Jet2 one = Jet2::constant(1.0);
        const Jet2 t2 = t * t;
        const Jet2 Q = sqrt(t2 + (2.0 * (1.0 + 2.0 * c)) * t + one);
        const Jet2 R = (one + t) * Q;
        const Jet2 first = (one + t2 + R) / ((2.0 * c) * t);
        const Jet2 inner = one + (2.0 * (1.0 + c)) * t + t2 + R;
        return first - log(t) + log(inner);
    };
    const std::string q = "sqrt(t^2 + " + num(2.0 * (1.0 + 2.0 * c)) + "*t + 1)";
    const std::string src = "(1 + t^2 + (1 + t)*" + q + ")/(" + num(2.0 * c) + "*t) - log(t) + log(1 + "
                            + num(2.0 * (1.0 + c)) + "*t + t^2 + (1 + t)*" + q + ")";
    const std::string name = c == 1.0 ? "W_3b" : "W_3b(c=" + num(c) + ")";
    return SplitEnergy(name, ScalarFunction::analytic(fn, src), log_fn(-1.0, "-log(z)"));
}

SplitEnergy k_distortion()
{
    auto h = ScalarFunction::analytic(
        [](double t) { return Jet2{0.5 * (t + 1.0 / t), 0.5 * (1.0 - 1.0 / (t * t)), 1.0 / (t * t * t)}; },
        "(t + 1/t)/2");
    return SplitEnergy("K_distortion", h, zero_fn());
}

SplitEnergy det_energy()
{
    auto f = ScalarFunction::analytic([](double z) { return Jet2{z, 1.0, 0.0}; }, "z");
    return SplitEnergy("det_F", zero_fn(), f);
}

GeneralIsotropicEnergy hencky(double mu, double kappa)
{
    // g = mu/2 (log x - log y)^2 + kappa/2 (log x + log y)^2
    auto partials = [mu, kappa](double x, double y) {
        require_positive(x, y);
        const double a = std::log(x) - std::log(y);
        const double b = std::log(x) + std::log(y);
        const double G = 0.5 * mu * a * a + 0.5 * kappa * b * b;
        const double Gu = mu * a + kappa * b;
        const double Gv = -mu * a + kappa * b;
        return from_log_variables(x, y, G, Gu, Gv, mu + kappa, mu + kappa, kappa - mu);
    };
    auto g = [partials](double x, double y) { return partials(x, y).g; };
    return GeneralIsotropicEnergy("hencky", g, partials,
                                  "mu/2 log(lam1/lam2)^2 + kappa/2 log(det F)^2, mu = " + num(mu)
                                      + ", kappa = " + num(kappa));
}

GeneralIsotropicEnergy exp_hencky(double mu, double kappa, double k, double k_hat)
{
    if (!(k > 0.0) || !(k_hat > 0.0))
        throw Error(ErrorKind::InvalidArgument, "exponentiated Hencky needs k, k_hat > 0");
    // g = mu/k exp(k/2 a^2) + kappa/(2 k_hat) exp(k_hat b^2), a = log(x/y), b = log(xy)
    auto partials = [=](double x, double y) {
        require_positive(x, y);
        const double a = std::log(x) - std::log(y);
        const double b = std::log(x) + std::log(y);
        const double E1 = std::exp(0.5 * k * a * a);
        const double E2 = std::exp(k_hat * b * b);
        const double G = mu / k * E1 + kappa / (2.0 * k_hat) * E2;
        const double iso1 = mu * a * E1;
        const double iso2 = mu * E1 * (1.0 + k * a * a);
        const double vol1 = kappa * b * E2;
        const double vol2 = kappa * E2 * (1.0 + 2.0 * k_hat * b * b);
        return from_log_variables(x, y, G, iso1 + vol1, -iso1 + vol1, iso2 + vol2, iso2 + vol2,
                                  -iso2 + vol2);
    };
    auto g = [partials](double x, double y) { return partials(x, y).g; };
    return GeneralIsotropicEnergy("exp_hencky", g, partials,
                                  "mu/k exp(k/2 log(lam1/lam2)^2) + kappa/(2 k_hat) exp(k_hat log(det F)^2), mu = "
                                      + num(mu) + ", kappa = " + num(kappa) + ", k = " + num(k)
                                      + ", k_hat = " + num(k_hat));
}

GeneralIsotropicEnergy hadamard(double alpha) { return hadamard(alpha, log_fn(-1.0, "-log(z)")); }

GeneralIsotropicEnergy hadamard(double alpha, const ScalarFunction& f)
{
    if (!(alpha >= 1.0 && alpha < 4.0))
        throw Error(ErrorKind::InvalidArgument, "Hadamard exponent must lie in [1, 4)");
    auto partials = [alpha, f](double x, double y) {
        require_positive(x, y);
        const double S = x * x + y * y;
        const double P = std::pow(S, 0.5 * alpha);
        const double P1 = alpha * std::pow(S, 0.5 * alpha - 1.0);
        const double P2 = alpha * (alpha - 2.0) * std::pow(S, 0.5 * alpha - 2.0);
        const Jet2 fz = f.jet(x * y);
        IsotropicPartials p;
        p.g = P + fz.v;
        p.gx = P1 * x + fz.d1 * y;
        p.gy = P1 * y + fz.d1 * x;
        p.gxx = P1 + P2 * x * x + fz.d2 * y * y;
        p.gyy = P1 + P2 * y * y + fz.d2 * x * x;
        p.gxy = P2 * x * y + fz.d1 + fz.d2 * x * y;
        return p;
    };
    auto g = [partials](double x, double y) { return partials(x, y).g; };
    return GeneralIsotropicEnergy("hadamard", g, partials,
                                  "|F|^" + num(alpha) + " + f(det F), f(z) = " + f.source());
}

GeneralIsotropicEnergy frobenius_sq()
{
    auto partials = [](double x, double y) {
        IsotropicPartials p;
        p.g = x * x + y * y;
        p.gx = 2.0 * x;
        p.gy = 2.0 * y;
        p.gxx = 2.0;
        p.gyy = 2.0;
        p.gxy = 0.0;
        return p;
    };
    return GeneralIsotropicEnergy("frobenius_sq", [](double x, double y) { return x * x + y * y; },
                                  partials, "|F|^2");
}

GeneralIsotropicEnergy CatalogEntry::general() const
{
    if (const SplitEnergy* s = split())
        return GeneralIsotropicEnergy::from_split(*s);
    return std::get<GeneralIsotropicEnergy>(energy);
}

Energy CatalogEntry::as_energy() const
{
    if (const SplitEnergy* s = split())
        return Energy::from(*s);
    return Energy::from(std::get<GeneralIsotropicEnergy>(energy));
}

std::vector<CatalogEntry> catalog(const BuiltinParams& params)
{
    params.validate();
    std::vector<CatalogEntry> out;
    out.push_back({"W_magic_plus", "t - log t + log det F", w_magic_plus()});
    out.push_back({"W_magic_minus", "t + log t - log det F", w_magic_minus()});
    out.push_back({"W_smooth", "t/3 + 4/(3t) + log t - log det F", w_smooth()});
    out.push_back({"W_3b", "solution of the 3b equation with -log det F", w_3b(1.0)});
    out.push_back({"K_distortion", "outer distortion |F|^2 / (2 det F)", k_distortion()});
    out.push_back({"det_F", "determinant (Null-Lagrangian)", det_energy()});
    out.push_back({"hencky", "quadratic Hencky energy", hencky(params.mu, params.kappa)});
    out.push_back({"exp_hencky", "exponentiated Hencky energy",
                   exp_hencky(params.mu, params.kappa, params.k, params.k_hat)});
    out.push_back({"hadamard", "|F|^alpha - log det F", hadamard(params.alpha)});
    out.push_back({"frobenius_sq", "|F|^2", frobenius_sq()});
    return out;
}

std::optional<CatalogEntry> find_energy(const std::string& name, const BuiltinParams& params)
{
    for (auto& e : catalog(params))
        if (e.name == name)
            return e;
    return std::nullopt;
}

} // namespace morrey
