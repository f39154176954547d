#include "morrey/rank_one.hpp"

#include "morrey/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>

namespace morrey {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct TailTrend {
    bool decreasing = false;
    bool divergent = false;
    double limit = kInf;
};

// e0 at the grid end, e1 and e2 one and two decades further out.
TailTrend analyze_tail(double e0, double e1, double e2)
{
    TailTrend trend;
    const double tol = 1e-9 * std::max({std::abs(e0), std::abs(e1), std::abs(e2)});
    const double d1 = e0 - e1;
    const double d2 = e1 - e2;
    if (d2 <= tol)
        return trend;
    trend.decreasing = true;
    if (d1 > 0.0 && d2 <= 0.5 * d1) {
        const double r = d2 / d1;
        trend.limit = e2 - d2 * r / (1.0 - r);
    } else {
        trend.divergent = true;
    }
    return trend;
}

std::optional<double> try_eval(const std::function<double(double)>& fn, double x)
{
    try {
        const double v = fn(x);
        if (std::isfinite(v))
            return v;
    } catch (const Error&) {
    }
    return std::nullopt;
}

InfimumResult grid_infimum(const std::function<double(double)>& fn, const std::vector<double>& xs,
                           bool probe_lower, bool include_limits)
{
    InfimumResult res;
    res.value = kInf;
    for (double x : xs) {
        const double v = fn(x);
        if (v < res.value) {
            res.value = v;
            res.argmin = x;
        }
    }
    res.limit = res.value;
    if (!include_limits)
        return res;

    auto examine = [&](double e0, double x1, double x2, double x_end) {
        const auto e1 = try_eval(fn, x1);
        const auto e2 = try_eval(fn, x2);
        if (!e1 || !e2) {
            res.note += "tail probe beyond " + format_double(x_end) + " not evaluable; ";
            return std::optional<TailTrend>{};
        }
        return std::optional<TailTrend>{analyze_tail(e0, *e1, *e2)};
    };

    const double hi = xs.back();
    const double e_hi = fn(hi);
    if (const auto trend = examine(e_hi, hi * 10.0, hi * 100.0, hi)) {
        for (double x : {hi * 10.0, hi * 100.0}) {
            const double v = fn(x);
            if (v < res.value) {
                res.value = v;
                res.argmin = x;
            }
        }
        if (trend->decreasing) {
            res.boundary_argmin = true;
            if (trend->divergent) {
                res.unreliable = true;
                res.note += "values keep decreasing toward the upper end; ";
            } else {
                res.limit = std::min(res.limit, trend->limit);
                res.note += "infimum approached toward the upper end (limit "
                            + format_double(trend->limit) + "); ";
            }
        }
    }
    if (probe_lower) {
        const double lo = xs.front();
        if (const auto trend = examine(fn(lo), lo / 10.0, lo / 100.0, lo)) {
            if (trend->decreasing) {
                res.boundary_argmin = true;
                if (trend->divergent) {
                    res.unreliable = true;
                    res.note += "values keep decreasing toward the lower end; ";
                } else {
                    res.limit = std::min(res.limit, trend->limit);
                    res.note += "infimum approached toward the lower end (limit "
                                + format_double(trend->limit) + "); ";
                }
            }
        }
    }
    res.limit = std::min(res.limit, res.value);
    return res;
}

std::vector<double> point(double t) { return {t}; }

ConditionRecord make_record(const std::string& id, bool required)
{
    ConditionRecord r;
    r.id = id;
    r.required = required;
    return r;
}

double normalized(double margin, double scale) { return margin / std::max(1.0, scale); }

} // namespace

InfimumResult infimum_h0(const SplitEnergy& W, const GridSpec& grid)
{
    grid.validate();
    auto fn = [&W](double t) { return t * t * W.h2(t); };
    return grid_infimum(fn, grid.t_points(), false, grid.include_limits);
}

InfimumResult infimum_f0(const SplitEnergy& W, const GridSpec& grid)
{
    grid.validate();
    auto fn = [&W](double z) { return z * z * W.f().d2(z); };
    return grid_infimum(fn, grid.z_points(), true, grid.include_limits);
}

SplitConditionValues split_conditions(const SplitEnergy& W, double t, double f0)
{
    const Jet2 h = W.h_jet(t);
    const double h1 = h.d1;
    const double h2 = h.d2;
    const double t2 = t * t;
    SplitConditionValues v;

    v.c1 = t2 * h2 + f0;
    v.s1 = std::abs(t2 * h2) + std::abs(f0);

    v.c2 = h1;
    v.s2 = std::abs(h1);

    if (t > 1.0) {
        const double q = 2.0 * t / (t - 1.0) * h1;
        v.c3a = q - t2 * h2 + f0;
        v.s3a = std::abs(q) + std::abs(t2 * h2) + std::abs(f0);
    } else {
        v.c3a = kInf;
        v.s3a = 0.0;
    }
    const double q4 = 2.0 * t / (t + 1.0) * h1;
    v.c4a = q4 + t2 * h2 - f0;
    v.s4a = std::abs(q4) + std::abs(t2 * h2) + std::abs(f0);

    // a = t^2 (t^2 - 1) h' h'' - 2 t h'^2
    // b - c = (t - 1)(t - 3) h' + 2 t (t - 1)^2 h''
    // b + c = (t + 1)(t + 3) h' + 2 t (t + 1)^2 h''
    const double a1 = t2 * (t2 - 1.0) * h1 * h2;
    const double a2 = 2.0 * t * h1 * h1;
    const double m1 = (t - 1.0) * (t - 3.0) * h1;
    const double m2 = 2.0 * t * (t - 1.0) * (t - 1.0) * h2;
    const double p1 = (t + 1.0) * (t + 3.0) * h1;
    const double p2 = 2.0 * t * (t + 1.0) * (t + 1.0) * h2;
    v.c3b = (a1 - a2 + (m1 + m2) * f0) / t2;
    v.s3b = (std::abs(a1) + std::abs(a2) + (std::abs(m1) + std::abs(m2)) * std::abs(f0)) / t2;
    v.c4b = (a1 - a2 + (p1 + p2) * f0) / t2;
    v.s4b = (std::abs(a1) + std::abs(a2) + (std::abs(p1) + std::abs(p2)) * std::abs(f0)) / t2;
    return v;
}

ConvexityReport check_split(const SplitEnergy& W, const GridSpec& grid)
{
    grid.validate();
    ConvexityReport report;
    report.check = "rank-one";
    report.energy_name = W.name();
    report.h = W.h_source();
    report.f = W.f_source();

    const InfimumResult h0 = infimum_h0(W, grid);
    const InfimumResult f0r = infimum_f0(W, grid);
    const double f0 = f0r.conservative();

    report.conditions = {make_record("C1", true),   make_record("C2", true),
                         make_record("C3a", false), make_record("C3b", false),
                         make_record("C4a", false), make_record("C4b", false),
                         make_record("C3", true),   make_record("C4", true)};
    auto rec = [&](const char* id) { return report.condition(id); };

    struct Worst {
        double normalized = 0.0;
        double margin = 0.0;
        double t = 0.0;
    };
    std::vector<std::pair<std::string, Worst>> violations;
    auto note_violation = [&](const std::string& id, double nm, double m, double t) {
        for (auto& [vid, w] : violations) {
            if (vid == id) {
                if (nm < w.normalized)
                    w = {nm, m, t};
                return;
            }
        }
        violations.push_back({id, {nm, m, t}});
    };

    auto observe = [&](const char* id, double m, double s, double t) {
        if (!std::isfinite(m))
            return;
        ConditionRecord* r = rec(id);
        const double nm = normalized(m, s);
        r->observe(m, point(t), std::abs(nm) <= grid.eq_tol);
        if (nm < -grid.violation_tol) {
            r->satisfied = false;
            if (r->required)
                note_violation(id, nm, m, t);
        }
    };

    std::vector<double> domain_failures;
    auto evaluate_at = [&](double t) {
        SplitConditionValues v;
        try {
            v = split_conditions(W, t, f0);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Domain)
                throw;
            domain_failures.push_back(t);
            return;
        }
        observe("C1", v.c1, v.s1, t);
        observe("C2", v.c2, v.s2, t);
        observe("C3a", v.c3a, v.s3a, t);
        observe("C3b", v.c3b, v.s3b, t);
        observe("C4a", v.c4a, v.s4a, t);
        observe("C4b", v.c4b, v.s4b, t);
        const double n4 = std::max(normalized(v.c4a, v.s4a), normalized(v.c4b, v.s4b));
        observe("C4", n4, 0.0, t);
        // At t = 1 only the limit t -> 1+ of condition 3a is meaningful; skip the disjunction there.
        if (t > 1.0) {
            const double n3 = std::max(normalized(v.c3a, v.s3a), normalized(v.c3b, v.s3b));
            observe("C3", n3, 0.0, t);
        }
    };

    evaluate_at(1.0);
    std::vector<double> ts = grid.t_points();
    if (grid.include_limits) {
        ts.push_back(grid.t_max * 10.0);
        ts.push_back(grid.t_max * 100.0);
    }
    for (double t : ts)
        evaluate_at(t);

    rec("C3")->note = "per t: C3a or C3b, larger normalized margin";
    rec("C4")->note = "per t: C4a or C4b, larger normalized margin";
    rec("C3b")->note = "divided by t^2";
    rec("C4b")->note = "divided by t^2";

    const bool violated = !violations.empty();
    bool certified = violated;
    if (violated && f0r.unreliable) {
        // Only C1 (increasing in f0) and C2 (independent of f0) stay certified
        // when the true f0 may be lower than the sampled one.
        certified = std::any_of(violations.begin(), violations.end(),
                                [](const auto& v) { return v.first == "C1" || v.first == "C2"; });
    }
    for (const auto& [id, w] : violations) {
        std::ostringstream os;
        os << id << " fails at t = " << format_double(w.t) << " with margin " << format_double(w.margin);
        report.witnesses.push_back({id, point(w.t), w.margin, os.str()});
    }

    if (certified) {
        report.verdict = Verdict::ViolatedAt;
    } else if (violated || h0.unreliable || f0r.unreliable || !domain_failures.empty()) {
        report.verdict = Verdict::Inconclusive;
    } else {
        report.verdict = Verdict::ConsistentOnGrid;
    }

    if (h0.unreliable || f0r.unreliable)
        report.notes.push_back(std::string(to_string(ErrorKind::InfimumUnreliable))
                               + ": " + h0.note + f0r.note);
    if (!domain_failures.empty()) {
        std::ostringstream os;
        os << "DomainError at " << domain_failures.size() << " grid points, first t = "
           << format_double(domain_failures.front());
        report.notes.push_back(os.str());
    }

    auto infimum_json = [](const InfimumResult& r) {
        return nlohmann::json{{"value", r.value},
                              {"argmin", r.argmin},
                              {"limit", r.limit},
                              {"boundary_argmin", r.boundary_argmin},
                              {"unreliable", r.unreliable},
                              {"note", r.note}};
    };
    report.extra["h0"] = infimum_json(h0);
    report.extra["f0"] = infimum_json(f0r);
    report.extra["f0_used"] = f0;
    report.extra["grid"] = {{"t_min", grid.t_min}, {"t_max", grid.t_max}, {"n_t", grid.n_t},
                            {"z_min", grid.z_min}, {"z_max", grid.z_max}, {"n_z", grid.n_z},
                            {"include_limits", grid.include_limits},
                            {"eq_tol", grid.eq_tol}, {"violation_tol", grid.violation_tol}};
    report.extra["derivatives"] = {{"h", to_string(W.h_upper().derivative_source())},
                                   {"f", to_string(W.f().derivative_source())}};
    return report;
}

KSGridSpec KSGridSpec::matched(const GridSpec& grid)
{
    KSGridSpec ks;
    ks.x_min = std::sqrt(grid.z_min);
    ks.x_max = std::sqrt(grid.z_max);
    ks.eq_tol = grid.eq_tol;
    ks.violation_tol = grid.violation_tol;
    return ks;
}

ConvexityReport check_knowles_sternberg(const GeneralIsotropicEnergy& W, const KSGridSpec& grid)
{
    if (grid.n < 2 || !(grid.x_min > 0.0) || !(grid.x_max > grid.x_min))
        throw Error(ErrorKind::InvalidArgument, "Knowles-Sternberg grid needs 0 < x_min < x_max, n >= 2");

    ConvexityReport report;
    report.check = "ks";
    report.energy_name = W.name();
    report.h = W.description();
    report.conditions = {make_record("SepConv", true), make_record("BakerEricksen", true),
                         make_record("KS-iii", true), make_record("KS-iv", true),
                         make_record("KS-v", true)};
    const double vtol = W.has_analytic_partials() ? grid.violation_tol : grid.violation_tol_fd;
    bool negative_radicand = false;

    struct Worst {
        double margin = 0.0;
        std::vector<double> pt;
    };
    std::vector<std::pair<std::string, Worst>> violations;

    auto observe = [&](const char* id, double raw, double scale, double fallback_scale,
                       const std::vector<double>& pt) {
        const double s = scale > 0.0 ? scale : fallback_scale;
        const double m = s > 0.0 ? raw / s : raw;
        ConditionRecord* r = report.condition(id);
        r->observe(m, pt, std::abs(m) <= grid.eq_tol);
        if (m < -vtol) {
            r->satisfied = false;
            for (auto& [vid, w] : violations) {
                if (vid == id) {
                    if (m < w.margin)
                        w = {m, pt};
                    return;
                }
            }
            violations.push_back({id, {m, pt}});
        }
    };

    const std::vector<double> xs = log_space(grid.x_min, grid.x_max, grid.n);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double x = xs[i];
            const double y = xs[j];
            const IsotropicPartials p = W.partials(x, y);
            const std::vector<double> pt{x, y};
            const double P = std::abs(p.gxx) + std::abs(p.gyy) + std::abs(p.gxy)
                             + std::abs(p.gx) / x + std::abs(p.gy) / y;

            const double sep = std::min(p.gxx, p.gyy);
            // g_xx and g_yy may vanish identically on the diagonal; measure them against the point scale.
            observe("SepConv", sep, P, P, pt);

            const bool diagonal = std::abs(x - y) <= grid.diagonal_band * std::max(x, y);
            if (diagonal) {
                const double m1 = p.gxx - p.gxy + p.gx / x;
                const double m2 = p.gyy - p.gxy + p.gy / y;
                const double s1 = std::abs(p.gxx) + std::abs(p.gxy) + std::abs(p.gx / x);
                const double s2 = std::abs(p.gyy) + std::abs(p.gxy) + std::abs(p.gy / y);
                if (m1 / std::max(s1, 1e-300) < m2 / std::max(s2, 1e-300))
                    observe("KS-iii", m1, s1, P, pt);
                else
                    observe("KS-iii", m2, s2, P, pt);
            }

            // Second derivatives that are negative beyond roundoff fail condition i) and
            // make the square roots below undefined.
            double gxx = p.gxx;
            double gyy = p.gyy;
            const double clamp = vtol * P;
            if (gxx < -clamp || gyy < -clamp)
                negative_radicand = true;
            gxx = std::max(gxx, 0.0);
            gyy = std::max(gyy, 0.0);
            const double root = std::sqrt(gxx * gyy);

            const double sum_q = (p.gx + p.gy) / (x + y);
            observe("KS-v", root - p.gxy + sum_q, root + std::abs(p.gxy) + std::abs(sum_q), P, pt);

            if (!diagonal) {
                const double be = (x * p.gx - y * p.gy) / (x - y);
                observe("BakerEricksen", be, (std::abs(x * p.gx) + std::abs(y * p.gy)) / (x - y), P, pt);
                const double diff_q = (p.gx - p.gy) / (x - y);
                observe("KS-iv", root + p.gxy + diff_q, root + std::abs(p.gxy) + std::abs(diff_q), P, pt);
            }
        }
    }

    for (const auto& [id, w] : violations) {
        std::ostringstream os;
        os << id << " fails at (x, y) = (" << format_double(w.pt[0]) << ", " << format_double(w.pt[1])
           << ") with relative margin " << format_double(w.margin);
        report.witnesses.push_back({id, w.pt, w.margin, os.str()});
    }
    report.verdict = violations.empty() ? Verdict::ConsistentOnGrid : Verdict::ViolatedAt;
    if (negative_radicand)
        report.notes.push_back(std::string(to_string(ErrorKind::NegativeRadicand))
                               + ": g_xx g_yy < 0 at some points; counted as failure of SepConv");
    report.notes.push_back("margins are relative to the sum of absolute term sizes");
    report.extra["grid"] = {{"x_min", grid.x_min}, {"x_max", grid.x_max}, {"n", grid.n},
                            {"diagonal_band", grid.diagonal_band}, {"eq_tol", grid.eq_tol},
                            {"violation_tol", vtol}};
    report.extra["partials"] = W.has_analytic_partials() ? "analytic" : "finite-difference";
    return report;
}

namespace {

// Rounds each entry of the step to a multiple of 2 ulp(F_ij) so that F + D and
// F - D are exact and the three probe points are exactly equally spaced.
Matrix2 exact_step(const Matrix2& F, const Matrix2& D)
{
    auto snap = [](double f, double d) {
        const double af = std::abs(f);
        const double q = 2.0 * (std::nextafter(af, kInf) - af);
        return std::round(d / q) * q;
    };
    return {snap(F.f11, D.f11), snap(F.f12, D.f12), snap(F.f21, D.f21), snap(F.f22, D.f22)};
}

} // namespace

double legendre_hadamard(const Energy& W, const Matrix2& F, Vec2 xi, Vec2 eta)
{
    const double nx = xi.norm();
    const double ne = eta.norm();
    if (!(nx > 0.0) || !(ne > 0.0))
        throw Error(ErrorKind::InvalidArgument, "probe directions must be non-zero");
    const Matrix2 A = Matrix2::outer((1.0 / nx) * xi, (1.0 / ne) * eta);
    const double h = 1e-4;
    const Matrix2 D = exact_step(F, h * A);
    const Matrix2 Fp = F + D;
    const Matrix2 Fm = F - D;
    if (W.domain() == EnergyDomain::GLPlus) {
        for (const Matrix2* M : {&F, &Fp, &Fm})
            if (!(M->det() > 0.0))
                throw Error(ErrorKind::NonPositiveDeterminant, "probe line leaves GL+(2)");
    }
    return (W(Fp) - 2.0 * W(F) + W(Fm)) / (h * h);
}

SplitEnergy reduce_to_log_volumetric(const SplitEnergy& W, const GridSpec& grid)
{
    const InfimumResult f0 = infimum_f0(W, grid);
    if (f0.unreliable)
        throw Error(ErrorKind::InfimumUnreliable, "f0 of '" + W.name() + "' is not reliable: " + f0.note);
    const double c = -f0.conservative();
    auto f = ScalarFunction::analytic(
        [c](double z) {
            if (!(z > 0.0))
                throw Error(ErrorKind::Domain, "log of non-positive argument");
            return Jet2{c * std::log(z), c / z, -c / (z * z)};
        },
        format_double(c) + "*log(z)");
    return SplitEnergy(W.name() + "_reduced", W.h_upper(), f);
}

} // namespace morrey
