#include "morrey/polyconvexity.hpp"

#include "morrey/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace morrey {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ProbePoint {
    double nu1;
    double nu2;
    double g;
};

// Terms of the criterion at one probe, so margins for any c cost two multiplications.
struct ProbeTerms {
    double a;      // g(nu) - g(gamma) - f1 d1 - f2 d2
    double b;      // d1 d2
    double scale;  // 1 + |g(nu)| + |g(gamma)| + |f1 d1| + |f2 d2|
};

struct MarginAt {
    double margin = kInf;
    std::size_t index = 0;
};

MarginAt worst_margin(const std::vector<ProbeTerms>& terms, double c)
{
    MarginAt w;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const ProbeTerms& p = terms[k];
        const double cb = c * p.b;
        const double m = (p.a - cb) / (p.scale + std::abs(cb));
        if (m < w.margin) {
            w.margin = m;
            w.index = k;
        }
    }
    return w;
}

SilhavyProbe examine_base(const Energy& W, double g1, double g2, bool near_diagonal,
                          const std::vector<ProbePoint>& probes, const SilhavyGrid& grid)
{
    SilhavyProbe p;
    p.gamma1 = g1;
    p.gamma2 = g2;
    p.near_diagonal = near_diagonal;
    const auto [f1, f2] = W.ordered_gradient(g1, g2);
    p.f1 = f1;
    p.f2 = f2;
    p.c_lo = -(f1 - f2) / (g1 - g2);
    p.c_hi = (f1 + f2) / (g1 + g2);

    const double g0 = W.ordered(g1, g2);
    std::vector<ProbeTerms> terms;
    terms.reserve(probes.size());
    for (const ProbePoint& q : probes) {
        const double d1 = q.nu1 - g1;
        const double d2 = q.nu2 - g2;
        const double t1 = f1 * d1;
        const double t2 = f2 * d2;
        terms.push_back({q.g - g0 - t1 - t2, d1 * d2,
                         1.0 + std::abs(q.g) + std::abs(g0) + std::abs(t1) + std::abs(t2)});
    }

    p.margin_at_c_lo = worst_margin(terms, p.c_lo).margin;
    p.margin_at_c_hi = worst_margin(terms, p.c_hi).margin;

    // An empty interval leaves no admissible c; still scan between the two
    // values so the report shows how close the base comes.
    const double lo = std::min(p.c_lo, p.c_hi);
    const double hi = std::max(p.c_lo, p.c_hi);
    const double interval_gap = (p.c_lo - p.c_hi) / std::max(1.0, std::abs(p.c_lo) + std::abs(p.c_hi));

    double best_c = p.c_lo;
    MarginAt best = worst_margin(terms, p.c_lo);
    if (p.margin_at_c_hi > best.margin) {
        best_c = p.c_hi;
        best = worst_margin(terms, p.c_hi);
    }
    std::vector<double> cs(grid.c_scan);
    for (int i = 0; i < grid.c_scan; ++i)
        cs[i] = lo + (hi - lo) * (i + 0.5) / grid.c_scan;
    int best_i = -1;
    for (int i = 0; i < grid.c_scan; ++i) {
        const MarginAt m = worst_margin(terms, cs[i]);
        if (m.margin > best.margin) {
            best = m;
            best_c = cs[i];
            best_i = i;
        }
    }
    if (best_i >= 0 && hi > lo) {
        // Golden-section refinement on the bracket around the best scan point.
        double a = best_i == 0 ? lo : cs[best_i - 1];
        double b = best_i == grid.c_scan - 1 ? hi : cs[best_i + 1];
        const double r = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - r * (b - a);
        double x2 = a + r * (b - a);
        double m1 = worst_margin(terms, x1).margin;
        double m2 = worst_margin(terms, x2).margin;
        for (int it = 0; it < 60 && b - a > 1e-15 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
            if (m1 < m2) {
                a = x1;
                x1 = x2;
                m1 = m2;
                x2 = a + r * (b - a);
                m2 = worst_margin(terms, x2).margin;
            } else {
                b = x2;
                x2 = x1;
                m2 = m1;
                x1 = b - r * (b - a);
                m1 = worst_margin(terms, x1).margin;
            }
        }
        const double c = m1 > m2 ? x1 : x2;
        const MarginAt m = worst_margin(terms, c);
        if (m.margin > best.margin) {
            best = m;
            best_c = c;
        }
    }

    p.chosen_c = best_c;
    p.worst_margin = best.margin;
    p.worst_nu1 = probes[best.index].nu1;
    p.worst_nu2 = probes[best.index].nu2;
    const double vtol = W.has_analytic_gradient() ? grid.violation_tol : grid.violation_tol_fd;
    p.feasible = best.margin >= -vtol && interval_gap <= vtol;
    return p;
}

} // namespace

void SilhavyGrid::validate() const
{
    if (!(base_min > 0.0) || !(base_max > base_min) || n_base < 2)
        throw Error(ErrorKind::InvalidArgument, "Silhavy base grid needs 0 < min < max and n >= 2");
    if (!(probe_min > 0.0) || !(probe_max > probe_min) || n_probe < 2)
        throw Error(ErrorKind::InvalidArgument, "Silhavy probe grid needs 0 < min < max and n >= 2");
    if (!(diagonal_ratio > 1.0) || c_scan < 1)
        throw Error(ErrorKind::InvalidArgument, "Silhavy diagonal ratio must exceed 1 and c_scan >= 1");
}

SilhavyResult check_silhavy(const Energy& W, const SilhavyGrid& grid)
{
    grid.validate();
    if (!W.isotropic())
        throw Error(ErrorKind::InvalidArgument, "Silhavy criterion needs an isotropic energy");

    const std::vector<double> nus = log_space(grid.probe_min, grid.probe_max, grid.n_probe);
    std::vector<ProbePoint> probes;
    for (std::size_t i = 0; i < nus.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j)
            probes.push_back({nus[i], nus[j], W.ordered(nus[i], nus[j])});

    SilhavyResult result;
    const std::vector<double> gs = log_space(grid.base_min, grid.base_max, grid.n_base);
    for (std::size_t i = 0; i < gs.size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const bool diag = i == j;
            const double g1 = diag ? gs[i] * grid.diagonal_ratio : gs[i];
            result.probes.push_back(examine_base(W, g1, gs[j], diag, probes, grid));
        }
    }

    ConvexityReport& r = result.report;
    r.check = "polyconvex";
    r.energy_name = W.name();
    ConditionRecord sil;
    sil.id = "Silhavy";
    sil.note = "best margin over c per base point; margins divided by 1 + sum of absolute term sizes";
    ConditionRecord lo;
    lo.id = "Silhavy-c_lo";
    lo.required = false;
    ConditionRecord hi;
    hi.id = "Silhavy-c_hi";
    hi.required = false;
    const double vtol = W.has_analytic_gradient() ? grid.violation_tol : grid.violation_tol_fd;
    const SilhavyProbe* worst = nullptr;
    std::size_t near_diagonal = 0;
    for (const SilhavyProbe& p : result.probes) {
        const std::vector<double> pt{p.gamma1, p.gamma2};
        sil.observe(p.worst_margin, pt, false);
        lo.observe(p.margin_at_c_lo, pt, false);
        hi.observe(p.margin_at_c_hi, pt, false);
        near_diagonal += p.near_diagonal;
        if (!p.feasible && (!worst || p.worst_margin < worst->worst_margin))
            worst = &p;
    }
    sil.satisfied = worst == nullptr;
    lo.satisfied = lo.min_margin >= -vtol;
    hi.satisfied = hi.min_margin >= -vtol;
    r.conditions = {sil, lo, hi};
    r.verdict = worst ? Verdict::ViolatedAt : Verdict::ConsistentOnGrid;
    if (worst) {
        std::ostringstream os;
        os << "no admissible c at base (" << format_double(worst->gamma1) << ", "
           << format_double(worst->gamma2) << "); best c = " << format_double(worst->chosen_c)
           << " fails at probe (" << format_double(worst->worst_nu1) << ", "
           << format_double(worst->worst_nu2) << ")";
        r.witnesses.push_back({"Silhavy", {worst->gamma1, worst->gamma2, worst->worst_nu1, worst->worst_nu2},
                               worst->worst_margin, os.str()});
    }
    r.notes.push_back(std::to_string(near_diagonal) + " diagonal base points replaced by gamma1 = "
                      + format_double(grid.diagonal_ratio) + " gamma2");
    r.extra["silhavy_grid"] = {{"base_min", grid.base_min},   {"base_max", grid.base_max},
                               {"n_base", grid.n_base},       {"probe_min", grid.probe_min},
                               {"probe_max", grid.probe_max}, {"n_probe", grid.n_probe},
                               {"diagonal_ratio", grid.diagonal_ratio}, {"c_scan", grid.c_scan},
                               {"violation_tol", vtol}};
    r.extra["gradient"] = W.has_analytic_gradient() ? "analytic" : "finite-difference";
    return result;
}

const char* to_string(GrowthVerdict v)
{
    return v == GrowthVerdict::NotPolyconvex ? "NotPolyconvex" : "NoObstruction";
}

GrowthResult growth_obstruction(const Energy& W)
{
    GrowthResult g;
    for (int k = 0; k <= 12; ++k) {
        const double lambda = std::pow(10.0, -k);
        g.lambdas.push_back(lambda);
        g.values.push_back(W(Matrix2::diag(lambda, lambda)));
        if (std::isnan(g.values.back()))
            throw Error(ErrorKind::Domain, "W(lambda id) is NaN at lambda = " + format_double(lambda));
    }
    if (g.values.back() == kInf || std::any_of(g.values.begin(), g.values.end(), [](double v) { return v == -kInf; })) {
        const bool up = g.values.back() == kInf;
        g.verdict = up ? GrowthVerdict::NoObstruction : GrowthVerdict::NotPolyconvex;
        g.log_slope = up ? -kInf : kInf;
        g.note = up ? "W(lambda id) overflows to +infinity as lambda -> 0"
                    : "W(lambda id) reaches -infinity as lambda -> 0";
        return g;
    }
    const std::size_t n = g.values.size();
    g.log_slope = (g.values[n - 1] - g.values[n - 7]) / (std::log(g.lambdas[n - 1]) - std::log(g.lambdas[n - 7]));

    // Over the last six decades every decrement must be positive and must not
    // shrink geometrically; summable decrements mean a finite limit.
    bool unbounded = true;
    for (std::size_t k = n - 6; k < n; ++k) {
        const double d = g.values[k - 1] - g.values[k];
        const double prev = g.values[k - 2] - g.values[k - 1];
        const double tol = 1e-12 * std::max(1.0, std::abs(g.values[k]));
        if (!(d > tol) || !(prev > tol) || d < 0.5 * prev)
            unbounded = false;
    }
    g.verdict = unbounded ? GrowthVerdict::NotPolyconvex : GrowthVerdict::NoObstruction;
    std::ostringstream os;
    if (unbounded)
        os << "W(lambda id) keeps decreasing by about " << format_double(-g.log_slope * std::log(10.0))
           << " per decade as lambda -> 0; no affine function of (F, det F) stays below it";
    else
        os << "W(lambda id) stays bounded below as lambda -> 0 on the sampled decades";
    g.note = os.str();
    return g;
}

namespace {

void track(double value, double x, double& worst, double& argmin)
{
    if (value < worst) {
        worst = value;
        argmin = x;
    }
}

} // namespace

ScalarClassification classify_volumetric(const ScalarFunction& f, const GridSpec& grid, double tol)
{
    grid.validate();
    ScalarClassification c;
    c.worst_second = kInf;
    c.worst_first = 0.0;
    for (double z : grid.z_points())
        track(z * z * f.d2(z), z, c.worst_second, c.argmin_second);
    c.convex = c.worst_second >= -tol;
    return c;
}

ScalarClassification classify_isochoric(const ScalarFunction& h_upper, const GridSpec& grid, double tol)
{
    grid.validate();
    ScalarClassification c;
    c.worst_second = kInf;
    c.worst_first = kInf;
    std::vector<double> ts = grid.t_points();
    ts.insert(ts.begin(), 1.0);
    for (double t : ts) {
        const Jet2 j = h_upper.jet(t);
        track(t * t * j.d2, t, c.worst_second, c.argmin_second);
        track(t * j.d1, t, c.worst_first, c.argmin_first);
    }
    c.convex = c.worst_second >= -tol && c.worst_first >= -tol;
    return c;
}

const char* to_string(MorreyClass c)
{
    switch (c) {
    case MorreyClass::MPlus: return "M_plus";
    case MorreyClass::MMinus: return "M_minus";
    case MorreyClass::BothConvex: return "BothConvex";
    case MorreyClass::NeitherConvex: return "NeitherConvex";
    }
    return "?";
}

SplitClassification classify_split(const SplitEnergy& W, const GridSpec& grid)
{
    SplitClassification s;
    s.isochoric = classify_isochoric(W.h_upper(), grid);
    s.volumetric = classify_volumetric(W.f(), grid);
    const bool h = s.isochoric.convex;
    const bool f = s.volumetric.convex;
    if (h && f) {
        s.morrey_class = MorreyClass::BothConvex;
        s.summary = "h convex and non-decreasing, f convex: polyconvex (sum of polyconvex parts)";
    } else if (h) {
        s.morrey_class = MorreyClass::MPlus;
        s.summary = "h convex and non-decreasing, f not convex: class M_plus";
    } else if (f) {
        s.morrey_class = MorreyClass::MMinus;
        s.summary = "f convex, h not convex and non-decreasing: class M_minus";
    } else {
        s.morrey_class = MorreyClass::NeitherConvex;
        s.summary = "neither h nor f convex: not rank-one convex";
    }
    return s;
}

ConvexityReport check_polyconvex(const Energy& W, const SilhavyGrid& grid)
{
    ConvexityReport r = check_silhavy(W, grid).report;
    const GrowthResult g = growth_obstruction(W);
    ConditionRecord rec;
    rec.id = "GrowthObstruction";
    for (std::size_t k = 0; k < g.lambdas.size(); ++k)
        rec.observe(g.values[k], {g.lambdas[k]}, false);
    rec.satisfied = g.verdict == GrowthVerdict::NoObstruction;
    rec.note = "min of W(lambda id) over lambda = 1 ... 1e-12";
    r.conditions.push_back(rec);
    if (!rec.satisfied) {
        r.verdict = Verdict::ViolatedAt;
        r.witnesses.push_back({"GrowthObstruction", {g.lambdas.back()}, g.values.back(), g.note});
    }
    r.notes.push_back(g.note);
    r.extra["growth"] = {{"verdict", to_string(g.verdict)},
                         {"lambdas", g.lambdas},
                         {"values", g.values},
                         {"log_slope", g.log_slope}};
    return r;
}

} // namespace morrey
