#include "morrey/harness.hpp"

#include "morrey/errors.hpp"
#include "morrey/report.hpp"

#include <gsl/gsl_integration.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

namespace morrey {

const char* to_string(FamilyKind k)
{
    switch (k) {
    case FamilyKind::TrigBubble: return "TrigBubble";
    case FamilyKind::ContractingRadial: return "ContractingRadial";
    case FamilyKind::MollifiedLaminate: return "MollifiedLaminate";
    case FamilyKind::Packing: return "Packing";
    }
    return "TrigBubble";
}

FamilyKind family_kind_from_string(const std::string& s)
{
    for (FamilyKind k : {FamilyKind::TrigBubble, FamilyKind::ContractingRadial, FamilyKind::MollifiedLaminate,
                         FamilyKind::Packing})
        if (s == to_string(k))
            return k;
    throw Error(ErrorKind::InvalidArgument, "unknown perturbation family '" + s + "'");
}

const char* to_string(QCVerdict v)
{
    switch (v) {
    case QCVerdict::NoViolationFound: return "NoViolationFound";
    case QCVerdict::CandidateViolation: return "CandidateViolation";
    case QCVerdict::EnergyNeutralFamily: return "EnergyNeutralFamily";
    }
    return "NoViolationFound";
}

PerturbationFamily PerturbationFamily::trig_bubble(int modes)
{
    PerturbationFamily f;
    f.kind = FamilyKind::TrigBubble;
    f.modes = modes;
    f.resolution = 4;
    return f;
}

PerturbationFamily PerturbationFamily::contracting_radial(int terms)
{
    PerturbationFamily f;
    f.kind = FamilyKind::ContractingRadial;
    f.blend_terms = terms;
    f.resolution = 1;
    return f;
}

PerturbationFamily PerturbationFamily::mollified_laminate(int frequency)
{
    PerturbationFamily f;
    f.kind = FamilyKind::MollifiedLaminate;
    f.frequency = frequency;
    f.resolution = 1;
    return f;
}

PerturbationFamily PerturbationFamily::packing(nlohmann::json layout)
{
    PerturbationFamily f;
    f.kind = FamilyKind::Packing;
    f.layout = std::move(layout);
    f.resolution = 1;
    return f;
}

nlohmann::json PerturbationFamily::default_packing_layout()
{
    return nlohmann::json::parse(R"([
        {"center": [-0.45, 0.0], "radius": 0.4, "profile": "r"},
        {"center": [0.45, 0.1], "radius": 0.35, "profile": "r"},
        {"center": [0.0, -0.75], "radius": 0.2, "profile": "r"}
    ])");
}

namespace {

std::size_t top_level_balls(const nlohmann::json& layout)
{
    const nlohmann::json& balls = layout.is_object() ? layout.at("balls") : layout;
    return balls.size();
}

} // namespace

std::size_t PerturbationFamily::n_params() const
{
    switch (kind) {
    case FamilyKind::TrigBubble: return static_cast<std::size_t>(2 * modes * modes);
    case FamilyKind::ContractingRadial: return static_cast<std::size_t>(2 * blend_terms);
    case FamilyKind::MollifiedLaminate: return 3;
    case FamilyKind::Packing: return static_cast<std::size_t>(2 * blend_terms) * top_level_balls(layout);
    }
    return 0;
}

void PerturbationFamily::validate() const
{
    if (resolution < 1)
        throw Error(ErrorKind::InvalidArgument, "family resolution must be at least 1");
    switch (kind) {
    case FamilyKind::TrigBubble:
        if (modes < 1 || modes > 8)
            throw Error(ErrorKind::InvalidArgument, "TrigBubble needs 1 <= modes <= 8");
        break;
    case FamilyKind::ContractingRadial:
    case FamilyKind::Packing:
        if (blend_terms < 1 || blend_terms > 8)
            throw Error(ErrorKind::InvalidArgument, "radial blends need 1 to 8 terms");
        if (kind == FamilyKind::Packing) {
            if (top_level_balls(layout) == 0)
                throw Error(ErrorKind::InvalidArgument, "Packing layout has no balls");
            build_packing(packing_from_json(layout));
        }
        break;
    case FamilyKind::MollifiedLaminate:
        if (frequency < 1)
            throw Error(ErrorKind::InvalidArgument, "laminate frequency must be at least 1");
        if (!(delta > 0.0 && delta < 0.5))
            throw Error(ErrorKind::InvalidArgument, "laminate cutoff width must lie in (0, 1/2)");
        if (!(rounding > 0.0 && rounding < 0.25))
            throw Error(ErrorKind::InvalidArgument, "laminate rounding must lie in (0, 1/4)");
        break;
    }
}

PerturbationFamily PerturbationFamily::refined(int factor) const
{
    PerturbationFamily f = *this;
    f.resolution *= factor;
    return f;
}

nlohmann::json PerturbationFamily::to_json() const
{
    nlohmann::json j = {{"kind", to_string(kind)}, {"resolution", resolution}, {"n_params", n_params()}};
    switch (kind) {
    case FamilyKind::TrigBubble: j["modes"] = modes; break;
    case FamilyKind::ContractingRadial: j["blend_terms"] = blend_terms; break;
    case FamilyKind::MollifiedLaminate:
        j["frequency"] = frequency;
        j["delta"] = delta;
        j["rounding"] = rounding;
        break;
    case FamilyKind::Packing:
        j["blend_terms"] = blend_terms;
        j["layout"] = layout;
        break;
    }
    return j;
}

namespace {

constexpr double kRoundoffFloor = 1e-12;
constexpr double kRejected = 1e30;

// 10-point Gauss-Legendre rule on [0, 1].
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;

    GaussRule()
    {
        std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> t(
            gsl_integration_glfixed_table_alloc(10), &gsl_integration_glfixed_table_free);
        for (std::size_t i = 0; i < 10; ++i) {
            double xi = 0.0;
            double wi = 0.0;
            gsl_integration_glfixed_point(0.0, 1.0, i, &xi, &wi, t.get());
            x.push_back(xi);
            w.push_back(wi);
        }
    }
};

const GaussRule& gauss_rule()
{
    static const GaussRule rule;
    return rule;
}

// Nodes and weights of the composite rule on the given breakpoints, each piece split `parts` times.
void composite(const std::vector<double>& breaks, int parts, std::vector<double>& x, std::vector<double>& w)
{
    const GaussRule& g = gauss_rule();
    x.clear();
    w.clear();
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double h = (breaks[i + 1] - breaks[i]) / parts;
        if (!(h > 0.0))
            continue;
        for (int p = 0; p < parts; ++p) {
            const double a = breaks[i] + p * h;
            for (std::size_t k = 0; k < g.x.size(); ++k) {
                x.push_back(a + h * g.x[k]);
                w.push_back(h * g.w[k]);
            }
        }
    }
}

struct Accumulator {
    double sum = 0.0;
    double l1 = 0.0;
};

double node_excess(const Energy& W, const Matrix2& F, double w0)
{
    if (W.domain() == EnergyDomain::GLPlus && !(F.det() > 0.0))
        throw Error(ErrorKind::LeftGLPlus, "perturbed gradient left GL+ (det = " + format_double(F.det()) + ")");
    const double v = W(F);
    if (!std::isfinite(v))
        throw Error(ErrorKind::LeftGLPlus, "energy is not finite at a quadrature node");
    return v - w0;
}

Accumulator trig_bubble(const Energy& W, const Matrix2& F0, int modes, int cells, const std::vector<double>& p)
{
    std::vector<double> breaks;
    for (int i = 0; i <= cells; ++i)
        breaks.push_back(static_cast<double>(i) / cells);
    std::vector<double> x, w;
    composite(breaks, 1, x, w);
    const std::size_t n = x.size();
    // sin and cos of pi k x at the 1-D nodes.
    std::vector<double> s(n * modes), c(n * modes);
    for (std::size_t i = 0; i < n; ++i)
        for (int k = 1; k <= modes; ++k) {
            s[i * modes + k - 1] = std::sin(M_PI * k * x[i]);
            c[i * modes + k - 1] = std::cos(M_PI * k * x[i]);
        }
    const double w0 = W(F0);
    Accumulator acc;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Matrix2 G = F0;
            for (int k1 = 1; k1 <= modes; ++k1)
                for (int k2 = 1; k2 <= modes; ++k2) {
                    const std::size_t m = static_cast<std::size_t>((k1 - 1) * modes + (k2 - 1));
                    const double ax = p[2 * m];
                    const double ay = p[2 * m + 1];
                    const double d1 = M_PI * k1 * c[i * modes + k1 - 1] * s[j * modes + k2 - 1];
                    const double d2 = M_PI * k2 * s[i * modes + k1 - 1] * c[j * modes + k2 - 1];
                    G = G + Matrix2::outer({ax, ay}, {d1, d2});
                }
            const double e = node_excess(W, G, w0);
            acc.sum += w[i] * w[j] * e;
            acc.l1 += w[i] * w[j] * (std::abs(e + w0) + std::abs(w0));
        }
    return acc;
}

// Triangle wave of period 1 and slope +-1, T(0) = 0, corners rounded over half-width m.
struct RoundedTriangle {
    double m;

    // Returns (T, T').
    std::pair<double, double> operator()(double s) const
    {
        double y = s + 0.25;
        y -= std::floor(y);
        if (y < m)
            return {-0.25 + 0.5 * m + y * y / (2.0 * m), y / m};
        if (y > 1.0 - m)
            return {-0.25 + 0.5 * m + (1.0 - y) * (1.0 - y) / (2.0 * m), -(1.0 - y) / m};
        if (std::abs(y - 0.5) < m)
            return {0.25 - 0.5 * m - (y - 0.5) * (y - 0.5) / (2.0 * m), -(y - 0.5) / m};
        if (y < 0.5)
            return {y - 0.25, 1.0};
        return {0.75 - y, -1.0};
    }
};

// C1 cutoff on [0, 1]: smoothstep ramps of width delta at both ends. Returns (chi, chi').
std::pair<double, double> cutoff(double u, double delta)
{
    auto ss = [](double x) { return x * x * (3.0 - 2.0 * x); };
    auto dss = [](double x) { return 6.0 * x * (1.0 - x); };
    if (u < delta)
        return {ss(u / delta), dss(u / delta) / delta};
    if (u > 1.0 - delta)
        return {ss((1.0 - u) / delta), -dss((1.0 - u) / delta) / delta};
    return {1.0, 0.0};
}

struct LaminateSums {
    double interior = 0.0;
    double layer = 0.0;
    double l1 = 0.0;
};

LaminateSums laminate_sums(const Energy& W, const Matrix2& F0, Vec2 xi, Vec2 eta, int freq, double amp,
                           double delta, double m, int parts)
{
    const Vec2 eta_perp{-eta.y, eta.x};
    std::vector<double> ub{0.0, delta, 1.0 - delta, 1.0};
    for (int j = -1; j <= freq + 1; ++j)
        for (double y : {m, 0.5 - m, 0.5 + m, 1.0 - m}) {
            const double u = (y - 0.25 + j) / freq;
            if (u > 0.0 && u < 1.0)
                ub.push_back(u);
        }
    std::sort(ub.begin(), ub.end());
    ub.erase(std::unique(ub.begin(), ub.end()), ub.end());
    const std::vector<double> vb{0.0, delta, 1.0 - delta, 1.0};
    std::vector<double> ux, uw, vx, vw;
    composite(ub, parts, ux, uw);
    composite(vb, parts, vx, vw);

    const RoundedTriangle T{m};
    const double w0 = W(F0);
    LaminateSums out;
    for (std::size_t i = 0; i < ux.size(); ++i) {
        const auto [t, dt] = T(freq * ux[i]);
        const auto [cu, dcu] = cutoff(ux[i], delta);
        for (std::size_t j = 0; j < vx.size(); ++j) {
            const auto [cv, dcv] = cutoff(vx[j], delta);
            const double du = amp * (dt * cu + t * dcu / freq) * cv;
            const double dv = amp / freq * t * cu * dcv;
            const Matrix2 F = F0 + Matrix2::outer(xi, du * eta + dv * eta_perp);
            const double e = node_excess(W, F, w0);
            const double wt = uw[i] * vw[j];
            const bool inner = ux[i] > delta && ux[i] < 1.0 - delta && vx[j] > delta && vx[j] < 1.0 - delta;
            (inner ? out.interior : out.layer) += wt * e;
            out.l1 += wt * (std::abs(e + w0) + std::abs(w0));
        }
    }
    return out;
}

Vec2 unit(Vec2 v)
{
    const double n = v.norm();
    if (!(n > 0.0))
        throw Error(ErrorKind::InvalidArgument, "laminate directions must be non-zero");
    return (1.0 / n) * v;
}

RadialProfile blend_from_params(const double* p, int terms, double R)
{
    std::vector<double> a(p, p + terms);
    const double amax = *std::max_element(a.begin(), a.end());
    std::vector<double> w, k;
    for (int i = 0; i < terms; ++i) {
        w.push_back(std::exp(a[i] - amax));
        const double t = std::tanh(p[terms + i]);
        k.push_back(1.0 + 3.0 * t * t);
    }
    return RadialProfile::blend(w, k, R);
}

struct Evaluated {
    double value = 0.0;
    double l1 = 0.0;
    double quad_error = 0.0;
};

Evaluated evaluate_at(const Energy& W, const Matrix2& F0, const PerturbationFamily& f, const std::vector<double>& p,
                      int level)
{
    switch (f.kind) {
    case FamilyKind::TrigBubble: {
        const Accumulator a = trig_bubble(W, F0, f.modes, f.resolution * level, p);
        return {a.sum, a.l1, 0.0};
    }
    case FamilyKind::MollifiedLaminate: {
        const Vec2 xi{std::cos(p[0]), std::sin(p[0])};
        const Vec2 eta{std::cos(p[1]), std::sin(p[1])};
        const LaminateSums s =
            laminate_sums(W, F0, xi, eta, f.frequency, p[2], f.delta, f.rounding, f.resolution * level);
        return {s.interior + s.layer, s.l1, 0.0};
    }
    case FamilyKind::ContractingRadial: {
        RadialQuadrature q;
        q.rel_tol = 1e-10 / (f.resolution * level);
        const RadialProfile v = blend_from_params(p.data(), f.blend_terms, 1.0);
        const RadialIntegral I = radial_energy_integral(W, v, F0, q);
        const double ref = M_PI * W(F0);
        return {I.value - ref, std::abs(I.value) + std::abs(ref), I.error};
    }
    case FamilyKind::Packing: {
        PiecewiseRadialMap map = packing_from_json(f.layout);
        for (std::size_t b = 0; b < map.balls.size(); ++b) {
            const double* pb = p.data() + 2 * f.blend_terms * b;
            map.balls[b].profile =
                std::make_shared<RadialProfile>(blend_from_params(pb, f.blend_terms, map.balls[b].radius));
        }
        RadialQuadrature q;
        q.rel_tol = 1e-10 / (f.resolution * level);
        const PackingEvaluator ev(map);
        const RadialIntegral I = ev.energy_integral(W, F0, q);
        const Matrix2 Fr = F0 * (map.lambda * Matrix2::rotation(map.rotation_angle));
        const double ref = M_PI * map.domain_radius * map.domain_radius * W(Fr);
        return {I.value - ref, std::abs(I.value) + std::abs(ref), I.error};
    }
    }
    return {};
}

} // namespace

ExcessEnergy excess_energy(const Energy& W, const Matrix2& F0, const PerturbationFamily& family,
                           const std::vector<double>& params)
{
    family.validate();
    if (params.size() != family.n_params())
        throw Error(ErrorKind::InvalidArgument, "family " + std::string(to_string(family.kind)) + " needs " +
                                                    std::to_string(family.n_params()) + " parameters");
    const Evaluated coarse = evaluate_at(W, F0, family, params, 1);
    const Evaluated fine = evaluate_at(W, F0, family, params, 2);
    ExcessEnergy out;
    out.value = fine.value;
    out.coarse = coarse.value;
    out.resolution_gap = std::abs(fine.value - coarse.value);
    out.error = out.resolution_gap + fine.quad_error + kRoundoffFloor * std::max(1.0, fine.l1);
    return out;
}

LaminateResult laminate_second_variation(const Energy& W, const Matrix2& F0, Vec2 xi, Vec2 eta, int frequency,
                                         double amplitude, double delta, double rounding, int resolution)
{
    PerturbationFamily f = PerturbationFamily::mollified_laminate(frequency);
    f.delta = delta;
    f.rounding = rounding;
    f.resolution = resolution;
    f.validate();
    const Vec2 a = unit(xi);
    const Vec2 b = unit(eta);
    const LaminateSums c = laminate_sums(W, F0, a, b, frequency, amplitude, delta, rounding, resolution);
    const LaminateSums s = laminate_sums(W, F0, a, b, frequency, amplitude, delta, rounding, 2 * resolution);
    LaminateResult r;
    r.interior = s.interior;
    r.layer = s.layer;
    r.excess = s.interior + s.layer;
    r.error = std::abs(r.excess - (c.interior + c.layer)) + kRoundoffFloor * std::max(1.0, s.l1);
    return r;
}

namespace {

std::vector<double> initial_point(const PerturbationFamily& f, std::mt19937_64& rng)
{
    std::vector<double> x(f.n_params());
    switch (f.kind) {
    case FamilyKind::TrigBubble: {
        std::normal_distribution<double> d(0.0, 0.05);
        for (double& v : x)
            v = d(rng);
        break;
    }
    case FamilyKind::ContractingRadial:
    case FamilyKind::Packing: {
        std::normal_distribution<double> d(0.0, 1.0);
        for (double& v : x)
            v = d(rng);
        break;
    }
    case FamilyKind::MollifiedLaminate: {
        std::uniform_real_distribution<double> angle(0.0, M_PI);
        std::uniform_real_distribution<double> amp(0.05, 0.5);
        x[0] = angle(rng);
        x[1] = angle(rng);
        x[2] = amp(rng);
        break;
    }
    }
    return x;
}

std::vector<double> initial_step(const PerturbationFamily& f)
{
    switch (f.kind) {
    case FamilyKind::TrigBubble: return std::vector<double>(f.n_params(), 0.05);
    case FamilyKind::MollifiedLaminate: return {0.3, 0.3, 0.1};
    default: return std::vector<double>(f.n_params(), 0.5);
    }
}

struct SearchState {
    const Energy* W;
    const Matrix2* F0;
    const PerturbationFamily* family;
    int budget;
    int evaluations = 0;
    int rejected = 0;
    int unresolved = 0;
    bool any = false;
    bool neutral = true;
    double neutral_ratio = 0.0;
    ExcessEnergy best;
    std::vector<double> argmin;
};

double objective(const gsl_vector* v, void* data)
{
    auto* st = static_cast<SearchState*>(data);
    if (st->evaluations >= st->budget)
        return kRejected;
    ++st->evaluations;
    std::vector<double> p(v->size);
    for (std::size_t i = 0; i < v->size; ++i)
        p[i] = gsl_vector_get(v, i);
    try {
        const ExcessEnergy e = excess_energy(*st->W, *st->F0, *st->family, p);
        if (!(e.resolution_gap < 1e-6)) {
            ++st->unresolved;
            return kRejected;
        }
        const double ratio = std::abs(e.value) / (10.0 * e.error);
        st->neutral_ratio = std::max(st->neutral_ratio, ratio);
        st->neutral = st->neutral && ratio <= 1.0;
        if (!st->any || e.value < st->best.value) {
            st->best = e;
            st->argmin = p;
            st->any = true;
        }
        return e.value;
    } catch (const Error&) {
        ++st->rejected;
        return kRejected;
    }
}

} // namespace

QCResult search_violation(const Energy& W, const Matrix2& F0, const PerturbationFamily& family,
                          const SearchOptions& options)
{
    family.validate();
    QCResult r;
    r.energy_name = W.name();
    r.F0 = F0;
    r.family = family;
    r.seed = options.seed;

    SearchState st;
    st.W = &W;
    st.F0 = &F0;
    st.family = &family;
    st.budget = options.budget;

    const std::size_t n = family.n_params();
    std::mt19937_64 rng(options.seed);
    gsl_multimin_function fn{&objective, n, &st};
    std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> mini(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n), &gsl_multimin_fminimizer_free);
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(n), &gsl_vector_free);
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(n), &gsl_vector_free);
    const std::vector<double> steps = initial_step(family);
    for (std::size_t i = 0; i < n; ++i)
        gsl_vector_set(step.get(), i, steps[i]);

    while (st.evaluations < st.budget && r.restarts < options.max_restarts) {
        ++r.restarts;
        const std::vector<double> x0 = initial_point(family, rng);
        for (std::size_t i = 0; i < n; ++i)
            gsl_vector_set(x.get(), i, x0[i]);
        if (gsl_multimin_fminimizer_set(mini.get(), &fn, x.get(), step.get()) != GSL_SUCCESS)
            continue;
        while (st.evaluations < st.budget) {
            if (gsl_multimin_fminimizer_iterate(mini.get()) != GSL_SUCCESS)
                break;
            if (gsl_multimin_fminimizer_size(mini.get()) < options.simplex_tol)
                break;
        }
    }
    r.evaluations = st.evaluations;
    r.rejected = st.rejected;
    r.unresolved = st.unresolved;
    r.neutral_ratio = st.neutral_ratio;

    if (!st.any) {
        r.verdict = QCVerdict::NoViolationFound;
        r.converged = false;
        r.notes.push_back("no admissible sample within the budget");
        return r;
    }
    r.min_excess = st.best.value;
    r.error = st.best.error;
    r.argmin = st.argmin;
    r.converged = st.best.resolution_gap < 1e-6;
    r.refined_excess = st.best.value;
    r.refined_error = st.best.error;

    if (st.best.value < -10.0 * st.best.error) {
        try {
            const ExcessEnergy fine = excess_energy(W, F0, family.refined(4), st.argmin);
            r.refined_excess = fine.value;
            r.refined_error = fine.error;
            if (fine.value < -10.0 * fine.error && r.converged) {
                r.verdict = QCVerdict::CandidateViolation;
                if (W.name() == "W_magic_plus") {
                    r.requires_verification = true;
                    r.notes.push_back("requires independent verification");
                }
                return r;
            }
            r.notes.push_back("negative excess did not survive 4x refinement");
        } catch (const Error& e) {
            r.notes.push_back(std::string("refinement failed: ") + e.what());
        }
    }
    if (!r.converged)
        r.notes.push_back("excess at resolutions n and 2n differs by 1e-6 or more at the best sample");
    r.verdict = st.neutral ? QCVerdict::EnergyNeutralFamily : QCVerdict::NoViolationFound;
    return r;
}

nlohmann::json to_json(const QCResult& r)
{
    return {{"verdict", to_string(r.verdict)},
            {"energy", r.energy_name},
            {"F0", {r.F0.f11, r.F0.f12, r.F0.f21, r.F0.f22}},
            {"family", r.family.to_json()},
            {"min_excess", r.min_excess},
            {"error", r.error},
            {"argmin", r.argmin},
            {"evaluations", r.evaluations},
            {"rejected", r.rejected},
            {"unresolved", r.unresolved},
            {"restarts", r.restarts},
            {"neutral_ratio", r.neutral_ratio},
            {"converged", r.converged},
            {"refined_excess", r.refined_excess},
            {"refined_error", r.refined_error},
            {"requires_verification", r.requires_verification},
            {"seed", r.seed},
            {"notes", r.notes}};
}

} // namespace morrey
