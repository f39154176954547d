#include "morrey/radial.hpp"

#include "morrey/errors.hpp"
#include "morrey/expression.hpp"
#include "morrey/report.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace morrey {

const char* to_string(ProfileClass c)
{
    switch (c) {
    case ProfileClass::Expanding: return "Expanding";
    case ProfileClass::Contracting: return "Contracting";
    case ProfileClass::Neither: return "Neither";
    case ProfileClass::Identity: return "Identity";
    }
    return "Neither";
}

namespace {

constexpr double kEndpointTol = 1e-10;

double smoothstep(double x) { return x * x * (3.0 - 2.0 * x); }
double smoothstep_d(double x) { return 6.0 * x * (1.0 - x); }

bool is_conformal(const Matrix2& F)
{
    const double s = std::max(1.0, std::sqrt(F.frobenius_sq()));
    return std::abs(F.f11 - F.f22) <= 1e-14 * s && std::abs(F.f12 + F.f21) <= 1e-14 * s && F.det() > 0.0;
}

} // namespace

RadialProfile::RadialProfile(std::string description, double R, Fn v, Fn dv, std::vector<double> breakpoints)
    : description_(std::move(description)), R_(R), v_(std::move(v)), dv_(std::move(dv)),
      breakpoints_(std::move(breakpoints))
{
    if (!(R_ > 0.0) || !std::isfinite(R_))
        throw Error(ErrorKind::InvalidArgument, "profile radius must be positive");
    if (!v_)
        throw Error(ErrorKind::InvalidArgument, "profile needs a value function");
    double v0 = std::numeric_limits<double>::quiet_NaN();
    try {
        v0 = v_(0.0);
    } catch (const Error&) {
    }
    if (!std::isfinite(v0))
        v0 = v_(1e-200 * R_);
    if (!(std::abs(v0) <= kEndpointTol * std::max(1.0, R_)))
        throw Error(ErrorKind::InvalidArgument, "profile " + description_ + " must satisfy v(0) = 0");
    const double vR = v_(R_);
    if (!(vR > 0.0) || !std::isfinite(vR))
        throw Error(ErrorKind::InvalidArgument, "profile " + description_ + " needs v(R) > 0");
    if (std::abs(vR - R_) > kEndpointTol * R_) {
        const double c = R_ / vR;
        warnings_.push_back("v(R) = " + format_double(vR) + " rescaled to R = " + format_double(R_));
        v_ = [f = v_, c](double r) { return c * f(r); };
        if (dv_)
            dv_ = [f = dv_, c](double r) { return c * f(r); };
    }
    std::sort(breakpoints_.begin(), breakpoints_.end());
    breakpoints_.erase(std::remove_if(breakpoints_.begin(), breakpoints_.end(),
                                      [this](double b) { return !(b > 0.0 && b < R_); }),
                       breakpoints_.end());
    tag_ = classify_profile(*this);
}

RadialProfile RadialProfile::power(double k, double R)
{
    if (!(k > 0.0) || !std::isfinite(k))
        throw Error(ErrorKind::InvalidArgument, "power profile needs k > 0");
    RadialProfile p("r^" + format_double(k), R, [k, R](double r) { return R * std::pow(r / R, k); },
                    [k, R](double r) { return k * std::pow(r / R, k - 1.0); });
    if (k == 1.0)
        p.core_ = R;
    return p;
}

RadialProfile RadialProfile::expression(const std::string& src, double R)
{
    const Expr e = parse(src, "r");
    return RadialProfile(print(e), R, [e](double r) { return eval(e, r); },
                         [e](double r) { return eval_jet(e, r).d1; });
}

RadialProfile RadialProfile::linear_core(double mu, double core, double R)
{
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw Error(ErrorKind::InvalidArgument, "linear-core profile needs mu > 0");
    if (!(core > 0.0 && core < R))
        throw Error(ErrorKind::InvalidArgument, "linear-core profile needs 0 < core < R");
    const double width = R - core;
    auto m = [=](double r) { return r <= core ? mu : mu + (1.0 - mu) * smoothstep((r - core) / width); };
    auto v = [=](double r) { return r * m(r); };
    auto dv = [=](double r) {
        if (r <= core)
            return mu;
        return m(r) + r * (1.0 - mu) * smoothstep_d((r - core) / width) / width;
    };
    RadialProfile p("linear_core(mu=" + format_double(mu) + ",core=" + format_double(core) + ")", R, v, dv,
                    {core});
    p.core_ = core;
    p.core_slope_ = mu;
    return p;
}

RadialProfile RadialProfile::blend(const std::vector<double>& weights, const std::vector<double>& exponents,
                                   double R)
{
    if (weights.empty() || weights.size() != exponents.size())
        throw Error(ErrorKind::InvalidArgument, "blend needs matching non-empty weights and exponents");
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w))
            throw Error(ErrorKind::InvalidArgument, "blend weights must be positive");
        total += w;
    }
    for (double k : exponents)
        if (!(k > 0.0) || !std::isfinite(k))
            throw Error(ErrorKind::InvalidArgument, "blend exponents must be positive");
    std::vector<double> w(weights);
    for (double& x : w)
        x /= total;
    std::string desc = "blend(";
    for (std::size_t i = 0; i < w.size(); ++i)
        desc += (i ? "," : "") + format_double(w[i]) + "*r^" + format_double(exponents[i]);
    desc += ")";
    const std::vector<double> k(exponents);
    auto v = [w, k, R](double r) {
        double s = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            s += w[i] * std::pow(r / R, k[i]);
        return R * s;
    };
    auto dv = [w, k, R](double r) {
        double s = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            s += w[i] * k[i] * std::pow(r / R, k[i] - 1.0);
        return s;
    };
    return RadialProfile(desc, R, v, dv);
}

double RadialProfile::value(double r) const
{
    if (!(r >= 0.0 && r <= R_ * (1.0 + 1e-12)))
        throw Error(ErrorKind::OutOfDomain, "radius " + format_double(r) + " outside [0, R]");
    return r == 0.0 ? 0.0 : v_(std::min(r, R_));
}

double RadialProfile::derivative(double r) const
{
    if (!(r >= 0.0 && r <= R_ * (1.0 + 1e-12)))
        throw Error(ErrorKind::OutOfDomain, "radius " + format_double(r) + " outside [0, R]");
    r = std::min(r, R_);
    if (dv_)
        return dv_(r);
    const double h = 1e-5 * (r > 0.0 ? std::min(r, R_ - r > 0.0 ? R_ - r : r) : R_);
    if (r - h >= 0.0 && r + h <= R_)
        return (v_(r + h) - v_(r - h)) / (2.0 * h);
    if (r - 2.0 * h < 0.0)
        return (-3.0 * v_(r) + 4.0 * v_(r + h) - v_(r + 2.0 * h)) / (2.0 * h);
    return (3.0 * v_(r) - 4.0 * v_(r - h) + v_(r - 2.0 * h)) / (2.0 * h);
}

std::pair<double, double> radial_gradient_singular_values(const RadialProfile& v, double r)
{
    if (!(r > 0.0 && r <= v.R() * (1.0 + 1e-12)))
        throw Error(ErrorKind::OutOfDomain, "radius " + format_double(r) + " outside (0, R]");
    return {v.derivative(r), v.value(r) / r};
}

Matrix2 radial_gradient(const RadialProfile& v, Vec2 y)
{
    const double r = y.norm();
    if (r == 0.0) {
        const double d = v.derivative(0.0);
        return Matrix2::diag(d, d);
    }
    const auto [a, b] = radial_gradient_singular_values(v, r);
    const Vec2 n = (1.0 / r) * y;
    const Matrix2 P = Matrix2::outer(n, n);
    return a * P + b * (Matrix2::identity() - P);
}

RadialIntegral radial_energy_integral(const Energy& W, const RadialProfile& v, const Matrix2& F0,
                                      const RadialQuadrature& q)
{
    const double R = v.R();
    const bool one_angle = W.isotropic() && is_conformal(F0);
    const int n_theta = std::max(4, q.angular_nodes);

    // Angular mean of W(F0 grad phi) on the circle of radius r.
    auto density = [&](double r) {
        const auto [a, b] = radial_gradient_singular_values(v, r);
        if (one_angle)
            return W(F0 * Matrix2::diag(a, b));
        double sum = 0.0;
        for (int j = 0; j < n_theta; ++j) {
            const double th = 2.0 * M_PI * j / n_theta;
            sum += W(F0 * radial_gradient(v, {r * std::cos(th), r * std::sin(th)}));
        }
        return sum / n_theta;
    };
    // dx = r dr dtheta and dr = r ds.
    auto integrand = [&](double s) {
        const double r = R * std::exp(s);
        const double val = r * r * density(r);
        if (!std::isfinite(val))
            throw Error(ErrorKind::QuadratureDivergence,
                        "non-finite energy density at r = " + format_double(r) + " for " + v.description());
        return val;
    };

    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    std::vector<double> cuts{-q.s_max};
    for (double b : v.breakpoints())
        if (std::log(b / R) > -q.s_max)
            cuts.push_back(std::log(b / R));
    cuts.push_back(0.0);

    RadialIntegral out;
    double l1 = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double err = 0.0;
        double piece_l1 = 0.0;
        out.value += GK::integrate(integrand, cuts[i], cuts[i + 1], q.max_depth, q.rel_tol, &err, &piece_l1);
        out.error += err;
        l1 += piece_l1;
    }
    // Extend towards r = 0 in chunks of width s_max until a chunk is negligible; chunks that
    // stop shrinking mean the energy diverges at the origin.
    const double scale = 2.0 * M_PI;
    const double tol = q.max_rel_error * std::max(1.0, scale * l1) / scale;
    double lo = -q.s_max;
    double prev = std::numeric_limits<double>::infinity();
    bool settled = false;
    for (int k = 0; k < q.max_tail_chunks && !settled; ++k) {
        double err = 0.0;
        const double c = GK::integrate(integrand, lo - q.s_max, lo, q.max_depth, q.rel_tol, &err);
        out.tail += c;
        out.error += err;
        settled = std::abs(c) <= tol;
        if (!settled && !(std::abs(c) < std::abs(prev)))
            break;
        if (settled)
            out.error += std::abs(c);
        prev = c;
        lo -= q.s_max;
    }
    if (!settled)
        throw Error(ErrorKind::QuadratureDivergence,
                    "energy near r = 0 does not settle for " + v.description() + " (last chunk " +
                        format_double(scale * prev) + ")");
    out.value = scale * (out.value + out.tail);
    out.error *= scale;
    out.tail *= scale;
    l1 *= scale;
    if (!(out.error <= q.max_rel_error * std::max(1.0, l1)))
        throw Error(ErrorKind::QuadratureDivergence,
                    "quadrature error " + format_double(out.error) + " too large for " + v.description());
    return out;
}

double radial_energy(const Energy& W, const RadialProfile& v, const Matrix2& F0, const RadialQuadrature& q)
{
    return radial_energy_integral(W, v, F0, q).value;
}

ProfileClass classify_profile(const RadialProfile& v, int n_samples, double tol)
{
    bool expanding = true;
    bool contracting = true;
    for (int i = 1; i <= n_samples; ++i) {
        const double r = v.R() * i / n_samples;
        const double a = v.derivative(r);
        const double b = v.value(r) / r;
        if (!std::isfinite(a) || !std::isfinite(b))
            return ProfileClass::Neither;
        const double t = tol * std::max({1.0, std::abs(a), std::abs(b)});
        expanding = expanding && b - a >= -t && a >= -t;
        contracting = contracting && a - b >= -t && b >= -t;
    }
    if (expanding && contracting)
        return ProfileClass::Identity;
    if (expanding)
        return ProfileClass::Expanding;
    if (contracting)
        return ProfileClass::Contracting;
    return ProfileClass::Neither;
}

RadialProfile invert_profile(const RadialProfile& v)
{
    const double R = v.R();
    const int n = 1000;
    double prev = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double cur = v.value(R * i / n);
        if (!(cur > prev))
            throw Error(ErrorKind::NotMonotone,
                        "profile " + v.description() + " is not strictly increasing near r = " +
                            format_double(R * i / n));
        prev = cur;
    }
    auto solve = [v, R](double t) {
        if (t <= 0.0)
            return 0.0;
        if (t >= R)
            return R;
        auto f = [&v, t](double r) {
            if (r == 0.0)
                return -t;
            return v.value(r) - t;
        };
        std::uintmax_t iters = 400;
        const auto [lo, hi] = boost::math::tools::toms748_solve(
            f, 0.0, R, -t, R - t, boost::math::tools::eps_tolerance<double>(52), iters);
        return 0.5 * (lo + hi);
    };
    auto dsolve = [v, solve](double t) { return 1.0 / v.derivative(solve(t)); };
    std::vector<double> breaks;
    for (double b : v.breakpoints())
        breaks.push_back(v.value(b));
    return RadialProfile("inverse(" + v.description() + ")", R, solve, dsolve, breaks);
}

double ConstancyReport::worst_abs_margin() const
{
    double w = 0.0;
    for (const ConstancyEntry& e : entries)
        w = std::max(w, std::abs(e.margin));
    return w;
}

double ConstancyReport::min_margin() const
{
    double w = std::numeric_limits<double>::infinity();
    for (const ConstancyEntry& e : entries)
        w = std::min(w, e.margin);
    return w;
}

ConstancyReport constancy_check(const Energy& W, const std::vector<RadialProfile>& family)
{
    ConstancyReport rep;
    rep.energy_name = W.name();
    const double w_id = W(Matrix2::identity());
    for (const RadialProfile& v : family) {
        const RadialIntegral I = radial_energy_integral(W, v);
        ConstancyEntry e;
        e.profile = v.description();
        e.tag = v.tag();
        e.R = v.R();
        e.energy = I.value;
        e.error = I.error;
        e.reference = M_PI * v.R() * v.R() * w_id;
        e.margin = I.value - e.reference;
        rep.entries.push_back(e);
    }
    return rep;
}

nlohmann::json to_json(const ConstancyReport& r)
{
    nlohmann::json entries = nlohmann::json::array();
    for (const ConstancyEntry& e : r.entries)
        entries.push_back({{"profile", e.profile},
                           {"class", to_string(e.tag)},
                           {"R", e.R},
                           {"energy", e.energy},
                           {"error", e.error},
                           {"reference", e.reference},
                           {"margin", e.margin}});
    return {{"energy", r.energy_name},
            {"entries", entries},
            {"worst_abs_margin", r.worst_abs_margin()},
            {"min_margin", r.entries.empty() ? 0.0 : r.min_margin()}};
}

namespace {

std::shared_ptr<const RadialProfile> profile_from_json(const nlohmann::json& j, double radius)
{
    if (j.is_string())
        return std::make_shared<RadialProfile>(RadialProfile::expression(j.get<std::string>(), radius));
    if (!j.is_object() || !j.contains("kind"))
        throw Error(ErrorKind::InvalidArgument, "profile must be an expression or an object with a kind");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "power")
        return std::make_shared<RadialProfile>(RadialProfile::power(j.at("k").get<double>(), radius));
    if (kind == "linear_core")
        return std::make_shared<RadialProfile>(
            RadialProfile::linear_core(j.at("mu").get<double>(), j.at("core").get<double>() * radius, radius));
    if (kind == "blend")
        return std::make_shared<RadialProfile>(RadialProfile::blend(
            j.at("weights").get<std::vector<double>>(), j.at("exponents").get<std::vector<double>>(), radius));
    throw Error(ErrorKind::InvalidArgument, "unknown profile kind '" + kind + "'");
}

BallSpec ball_from_json(const nlohmann::json& j)
{
    BallSpec b;
    const auto c = j.at("center").get<std::vector<double>>();
    if (c.size() != 2)
        throw Error(ErrorKind::InvalidArgument, "ball center needs two coordinates");
    b.center = {c[0], c[1]};
    b.radius = j.at("radius").get<double>();
    if (!(b.radius > 0.0))
        throw Error(ErrorKind::InvalidArgument, "ball radius must be positive");
    b.profile = profile_from_json(j.at("profile"), b.radius);
    if (j.contains("lambda"))
        b.lambda = j.at("lambda").get<double>();
    if (j.contains("rotation_angle"))
        b.rotation_angle = j.at("rotation_angle").get<double>();
    if (j.contains("children"))
        for (const auto& child : j.at("children"))
            b.children.push_back(ball_from_json(child));
    return b;
}

} // namespace

PiecewiseRadialMap packing_from_json(const nlohmann::json& doc)
{
    PiecewiseRadialMap m;
    const nlohmann::json* balls = &doc;
    if (doc.is_object()) {
        m.domain_radius = doc.value("domain_radius", 1.0);
        m.lambda = doc.value("lambda", 1.0);
        m.rotation_angle = doc.value("rotation_angle", 0.0);
        if (!doc.contains("balls"))
            throw Error(ErrorKind::InvalidArgument, "packing document needs a balls array");
        balls = &doc.at("balls");
    }
    if (!balls->is_array())
        throw Error(ErrorKind::InvalidArgument, "packing balls must be an array");
    for (const auto& b : *balls)
        m.balls.push_back(ball_from_json(b));
    return m;
}

struct PackingEvaluator::Node {
    Vec2 center;
    double radius = 0.0;
    std::shared_ptr<const RadialProfile> profile;
    double lambda = 1.0;
    double angle = 0.0;
    Matrix2 G;  // lambda Q, the boundary gradient
    std::vector<Node> children;
};

namespace {

using Node = PackingEvaluator::Node;

bool same_angle(double a, double b)
{
    const double d = std::remainder(a - b, 2.0 * M_PI);
    return std::abs(d) <= 1e-12;
}

std::vector<Node> resolve(const std::vector<BallSpec>& balls, Vec2 parent_center, double parent_radius,
                          double lambda, double angle, const std::string& where)
{
    std::vector<Node> out;
    for (std::size_t i = 0; i < balls.size(); ++i) {
        const BallSpec& b = balls[i];
        if (!b.profile)
            throw Error(ErrorKind::InvalidArgument, "ball without profile");
        if (!((b.center - parent_center).norm() + b.radius < parent_radius))
            throw Error(ErrorKind::Nesting, "ball " + std::to_string(i) + " is not strictly inside " + where);
        if (b.lambda && std::abs(*b.lambda - lambda) > 1e-12 * lambda)
            throw Error(ErrorKind::Nesting, "ball " + std::to_string(i) + " declares lambda " +
                                                format_double(*b.lambda) + " but " + where + " has " +
                                                format_double(lambda));
        if (b.rotation_angle && !same_angle(*b.rotation_angle, angle))
            throw Error(ErrorKind::Nesting, "ball " + std::to_string(i) + " declares a rotation that differs from " +
                                                where);
        for (std::size_t k = 0; k < i; ++k)
            if ((b.center - balls[k].center).norm() < b.radius + balls[k].radius)
                throw Error(ErrorKind::Overlap,
                            "balls " + std::to_string(k) + " and " + std::to_string(i) + " overlap in " + where);
        Node n;
        n.center = b.center;
        n.radius = b.radius;
        n.profile = b.profile;
        n.lambda = lambda;
        n.angle = angle;
        n.G = lambda * Matrix2::rotation(angle);
        if (!b.children.empty()) {
            const double core = b.profile->core_radius();
            if (!(core > 0.0))
                throw Error(ErrorKind::Nesting, "ball " + std::to_string(i) + " has children but no affine core");
            n.children = resolve(b.children, b.center, core, lambda * b.profile->core_slope(), angle,
                                 "the core of ball " + std::to_string(i));
        }
        out.push_back(std::move(n));
    }
    return out;
}

struct Local {
    Vec2 value;
    Matrix2 gradient;
};

// phi and grad phi with A(x) = G x + offset outside all balls of the current level.
Local evaluate(const std::vector<Node>& level, Matrix2 G, Vec2 offset, Vec2 x)
{
    const std::vector<Node>* nodes = &level;
    while (true) {
        const Node* hit = nullptr;
        for (const Node& n : *nodes)
            if ((x - n.center).norm() < n.radius) {
                hit = &n;
                break;
            }
        if (!hit)
            return {G * x + offset, G};
        const Vec2 y = x - hit->center;
        const Vec2 ac = G * hit->center + offset;
        const double r = y.norm();
        if (!hit->children.empty() && r < hit->profile->core_radius()) {
            G = hit->profile->core_slope() * hit->G;
            offset = ac - G * hit->center;
            nodes = &hit->children;
            continue;
        }
        const double scale = r > 0.0 ? hit->profile->value(r) / r : 0.0;
        return {ac + hit->G * (scale * y), hit->G * radial_gradient(*hit->profile, y)};
    }
}

// Energy of left * phi over the ball, children included.
RadialIntegral ball_energy(const Energy& W, const Node& n, const Matrix2& left, const RadialQuadrature& q)
{
    RadialIntegral e = radial_energy_integral(W, *n.profile, left * n.G, q);
    if (!n.children.empty()) {
        const double w_core = W(left * (n.profile->core_slope() * n.G));
        for (const Node& c : n.children) {
            const RadialIntegral ce = ball_energy(W, c, left, q);
            e.value += ce.value - M_PI * c.radius * c.radius * w_core;
            e.error += ce.error;
            e.tail += ce.tail;
        }
    }
    return e;
}

} // namespace

PackingEvaluator::PackingEvaluator(PiecewiseRadialMap spec) : spec_(std::move(spec))
{
    if (!(spec_.domain_radius > 0.0))
        throw Error(ErrorKind::InvalidArgument, "domain radius must be positive");
    if (!(spec_.lambda > 0.0))
        throw Error(ErrorKind::InvalidArgument, "lambda must be positive");
    roots_ = std::make_shared<const std::vector<Node>>(
        resolve(spec_.balls, {0.0, 0.0}, spec_.domain_radius, spec_.lambda, spec_.rotation_angle, "the domain"));
}

Vec2 PackingEvaluator::map(Vec2 x) const
{
    return evaluate(*roots_, spec_.lambda * Matrix2::rotation(spec_.rotation_angle), {0.0, 0.0}, x).value;
}

Matrix2 PackingEvaluator::gradient(Vec2 x) const
{
    return evaluate(*roots_, spec_.lambda * Matrix2::rotation(spec_.rotation_angle), {0.0, 0.0}, x).gradient;
}

RadialIntegral PackingEvaluator::energy_integral(const Energy& W, const Matrix2& left,
                                                const RadialQuadrature& q) const
{
    const Matrix2 F0 = left * (spec_.lambda * Matrix2::rotation(spec_.rotation_angle));
    const double w0 = W(F0);
    RadialIntegral e;
    e.value = M_PI * spec_.domain_radius * spec_.domain_radius * w0;
    for (const Node& n : *roots_) {
        const RadialIntegral be = ball_energy(W, n, left, q);
        e.value += be.value - M_PI * n.radius * n.radius * w0;
        e.error += be.error;
        e.tail += be.tail;
    }
    return e;
}

double PackingEvaluator::total_energy(const Energy& W, const RadialQuadrature& q) const
{
    return energy_integral(W, Matrix2::identity(), q).value;
}

PackingEvaluator build_packing(const PiecewiseRadialMap& spec) { return PackingEvaluator(spec); }

} // namespace morrey
