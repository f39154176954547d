// Acceptance run: one PASS/FAIL line per criterion. Exit status is 0 only if all pass.

#include "morrey/catalog.hpp"
#include "morrey/cli.hpp"
#include "morrey/expression.hpp"
#include "morrey/harness.hpp"
#include "morrey/polyconvexity.hpp"
#include "morrey/radial.hpp"
#include "morrey/rank_one.hpp"
#include "morrey/transforms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace morrey;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> failures;
    std::string summary;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            failures.push_back(what);
        }
    }
};

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

Matrix2 random_glplus(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> logs(std::log(0.2), std::log(5.0));
    const double s1 = std::exp(logs(rng));
    const double s2 = std::exp(logs(rng));
    return Matrix2::rotation(angle(rng)) * Matrix2::diag(s1, s2) * Matrix2::rotation(angle(rng));
}

Vec2 random_unit(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    const double a = angle(rng);
    return {std::cos(a), std::sin(a)};
}

double f0_of(const SplitEnergy& W) { return infimum_f0(W).conservative(); }

// Tail of a margin as t -> infinity: value at t = 1e12 and monotone decrease over the last decades.
bool tends_to_zero(const std::function<double(double)>& m, double tol, double& tail)
{
    double prev = std::abs(m(1e6));
    for (double t : {1e8, 1e10, 1e12}) {
        const double v = std::abs(m(t));
        if (v > prev * (1.0 + 1e-12))
            return false;
        prev = v;
    }
    tail = prev;
    return tail <= tol;
}

Outcome criterion1()
{
    Outcome o;
    const SplitEnergy W = w_magic_plus();
    const double f0 = f0_of(W);
    double c1 = 0.0, c3a = 0.0, c4a = 0.0;
    for (double t : GridSpec{}.t_points()) {
        const SplitConditionValues v = split_conditions(W, t, f0);
        c1 = std::max(c1, std::abs(v.c1));
        c3a = std::max(c3a, std::abs(v.c3a));
        c4a = std::max(c4a, std::abs(v.c4a - 4.0 * t / (t + 1.0)));
    }
    const double c2 = split_conditions(W, 1.0 + 1e-6, f0).c2;
    o.require(c1 <= 1e-9, "C1 not identically 0");
    o.require(c3a <= 1e-9, "C3a not identically 0");
    o.require(c2 <= 1e-5, "C2 at 1+1e-6 above 1e-5");
    o.require(c4a <= 1e-9, "C4a differs from 4t/(t+1)");
    o.summary = "max|C1| " + fmt("%.1e", c1) + ", max|C3a| " + fmt("%.1e", c3a) + ", C2(1+1e-6) " + fmt("%.1e", c2)
                + ", max|C4a - 4t/(t+1)| " + fmt("%.1e", c4a);
    return o;
}

Outcome criterion2()
{
    Outcome o;
    const std::vector<double> ts = GridSpec{}.t_points();

    const SplitEnergy m = w_magic_minus();
    const double fm = f0_of(m);
    double c1 = 0.0, c4a = 0.0, c4b = 0.0;
    for (double t : ts) {
        const SplitConditionValues v = split_conditions(m, t, fm);
        c1 = std::max(c1, std::abs(v.c1));
        c4a = std::max(c4a, std::abs(v.c4a));
        c4b = std::max(c4b, std::abs(v.c4b));
    }
    o.require(c1 <= 1e-8, "W_magic_minus C1 not identically 0");
    o.require(c4a <= 1e-8, "W_magic_minus C4a not identically 0");
    o.require(c4b <= 1e-8, "W_magic_minus C4b not identically 0");
    double m_c2_tail = 0.0;
    const bool m_c2 = tends_to_zero([&](double t) { return split_conditions(m, t, fm).c2; }, 1e-8, m_c2_tail);
    if (!m_c2)
        m_c2_tail = split_conditions(m, 1e12, fm).c2;
    o.require(m_c2, "W_magic_minus C2 does not tend to 0 (C2(1e12) = " + fmt("%.6g", m_c2_tail) + ")");

    const SplitEnergy s = w_smooth();
    const double fs = f0_of(s);
    double s_c1_tail = 0.0;
    const bool s_c1 = tends_to_zero([&](double t) { return split_conditions(s, t, fs).c1; }, 1e-8, s_c1_tail);
    o.require(s_c1, "W_smooth C1 does not tend to 0");
    const double s_c2 = split_conditions(s, 1.0, fs).c2;
    o.require(std::abs(s_c2) <= 1e-8, "W_smooth C2(1) != 0");

    const SplitEnergy b = w_3b(1.0);
    const double fb = f0_of(b);
    double c3b = 0.0;
    for (double t : ts)
        c3b = std::max(c3b, std::abs(split_conditions(b, t, fb).c3b));
    o.require(c3b <= 1e-7, "W_3b C3b not identically 0");
    const double b_c2 = split_conditions(b, 1.0, fb).c2;
    o.require(std::abs(b_c2) <= 1e-8, "W_3b C2(1) != 0");

    o.summary = "W_magic_minus max|C1,C4a,C4b| " + fmt("%.1e", std::max({c1, c4a, c4b})) + ", C2(1e12) "
                + fmt("%.6g", m_c2_tail) + "; W_smooth C1(1e12) " + fmt("%.1e", s_c1_tail) + ", C2(1) "
                + fmt("%.1e", s_c2) + "; W_3b max|C3b| " + fmt("%.1e", c3b) + ", C2(1) " + fmt("%.1e", b_c2);
    return o;
}

Outcome criterion3()
{
    Outcome o;
    SilhavyGrid g;
    g.n_base = 40;
    g.n_probe = 80;
    const SilhavyResult r = check_silhavy(Energy::from(w_magic_minus()), g);
    double worst = 1.0;
    double endpoint = 0.0;
    bool feasible = true;
    for (const SilhavyProbe& p : r.probes) {
        worst = std::min(worst, p.margin_at_c_hi);
        endpoint = std::max(endpoint, std::abs(p.c_hi + 1.0 / (p.gamma2 * p.gamma2)) * p.gamma2 * p.gamma2);
        feasible = feasible && p.margin_at_c_hi >= -1e-10;
    }
    o.require(!r.probes.empty(), "no base points");
    o.require(endpoint <= 1e-12, "c_hi differs from -1/gamma2^2");
    o.require(feasible && worst >= -1e-10, "endpoint c = -1/gamma2^2 infeasible somewhere");

    const GrowthResult gr = growth_obstruction(Energy::from(w_magic_plus()));
    const double expected = 1.0 + 2.0 * std::log(1e-6);
    const double at = gr.values.size() > 6 ? gr.values[6] : NAN;
    o.require(gr.verdict == GrowthVerdict::NotPolyconvex, "growth obstruction not found");
    o.require(std::abs(at - expected) <= 1e-12 * std::abs(expected), "W(1e-6 id) != 1 + 2 log 1e-6");
    o.require(at < -26.0, "W(1e-6 id) not below -26");
    o.summary = std::to_string(r.probes.size()) + " base points, worst margin at c_hi " + fmt("%.2e", worst)
                + "; W_magic_plus(1e-6 id) = " + fmt("%.12g", at) + ", " + to_string(gr.verdict);
    return o;
}

Outcome criterion4()
{
    Outcome o;
    std::mt19937_64 rng(4);
    const Energy plus = Energy::from(w_magic_plus());
    const Energy bs = shield(bstar_energy());
    double inv = 0.0, bstar = 0.0, b2 = 0.0, bl = 0.0, dq = 0.0;
    for (const CatalogEntry& e : catalog()) {
        const Energy W = e.as_energy();
        const Energy W2 = shield(shield(W));
        std::mt19937_64 r(40);
        for (int i = 0; i < 500; ++i) {
            const Matrix2 F = random_glplus(r);
            const double a = W(F);
            inv = std::max(inv, std::abs(W2(F) - a) / std::max(1.0, std::abs(a)));
        }
    }
    for (int i = 0; i < 500; ++i) {
        const Matrix2 F = random_glplus(rng);
        bstar = std::max(bstar, std::abs(bs(F) - 0.5 * (plus(F) - 1.0)));
        const double q = (burkholder_bp(F, BurkholderParams(2.0 + 1e-6)) - burkholder_bp(F, BurkholderParams(2.0))) / 1e-6;
        dq = std::max(dq, std::abs(q - burkholder_bstar(F)));
    }
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 1000; ++i) {
        const Matrix2 F{u(rng), u(rng), u(rng), u(rng)};
        b2 = std::max(b2, std::abs(burkholder_bp(F, BurkholderParams(2.0)) + F.det()));
    }
    std::uniform_real_distribution<double> up(2.0, 8.0);
    std::uniform_real_distribution<double> rad(0.0, 2.0), ang(0.0, 2.0 * M_PI);
    for (int i = 0; i < 1000; ++i) {
        const ComplexPair zw{std::polar(rad(rng), ang(rng)), std::polar(rad(rng), ang(rng))};
        const BurkholderParams p(up(rng));
        const double l = burkholder_lp(zw, p);
        bl = std::max(bl, std::abs(burkholder_bp(from_complex(zw), p) + l) / std::max(1.0, std::abs(l)));
    }
    o.require(inv <= 1e-11, "shield is not an involution");
    o.require(bstar <= 1e-10, "shield(B_star) != (W_magic_plus - 1)/2");
    o.require(b2 <= 1e-14, "B_2 != -det");
    o.require(bl <= 1e-10, "B_p != -L_p");
    o.require(dq <= 1e-4, "B_star differs from the p-difference quotient");
    o.summary = "involution " + fmt("%.1e", inv) + ", shield(B_star) " + fmt("%.1e", bstar) + ", B_2 + det "
                + fmt("%.1e", b2) + ", B_p + L_p (rel) " + fmt("%.1e", bl) + ", difference quotient " + fmt("%.1e", dq);
    return o;
}

Outcome criterion5()
{
    Outcome o;
    std::mt19937_64 rng(5);
    double worst_id = 0.0;
    for (int i = 0; i < 1000; ++i)
        worst_id = std::max(worst_id, identity_suite(random_glplus(rng)).worst());
    std::uniform_real_distribution<double> rad(0.0, 10.0), ang(0.0, 2.0 * M_PI), up(2.0, 8.0);
    double worst_ineq = 1.0;
    for (int i = 0; i < 100000; ++i) {
        const ComplexPair zw{std::polar(rad(rng), ang(rng)), std::polar(rad(rng), ang(rng))};
        worst_ineq = std::min(worst_ineq, burkholder_inequality(zw, BurkholderParams(up(rng))).relative());
    }
    o.require(worst_id <= 1e-10, "complex identities off by more than 1e-10");
    o.require(worst_ineq >= -1e-9, "Burkholder inequality margin below -1e-9");
    o.summary = "worst identity " + fmt("%.1e", worst_id) + ", worst inequality margin " + fmt("%.2e", worst_ineq);
    return o;
}

Outcome criterion6()
{
    Outcome o;
    const Energy plus = Energy::from(w_magic_plus());
    double worst_plus = 0.0;
    for (const char* src : {"r^2", "r^3", "r^4", "(r + r^3)/2"}) {
        const double e = radial_energy(plus, RadialProfile::expression(src));
        worst_plus = std::max(worst_plus, std::abs(e - M_PI));
        o.require(std::abs(e - M_PI) <= 1e-6, std::string("W_magic_plus on ") + src);
    }
    std::string bp;
    for (const char* src : {"sqrt(r)", "r^0.7"})
        for (double p : {2.0, 3.0, 4.0}) {
            const double e = radial_energy(burkholder_energy(p), RadialProfile::expression(src));
            const bool ok = std::abs(e + M_PI) <= 1e-6;
            o.require(ok, "B_" + fmt("%g", p) + " on " + src + " gives " + fmt("%.9g", e) + ", not -pi");
            bp += (bp.empty() ? "" : ", ") + std::string(src) + "/p=" + fmt("%g", p) + (ok ? " ok" : " off");
        }
    const nlohmann::json layout = nlohmann::json::parse(R"([
        {"center": [-0.5, 0.0], "radius": 0.4, "profile": {"kind": "power", "k": 2}},
        {"center": [0.45, 0.1], "radius": 0.45, "profile": {"kind": "blend", "weights": [1, 1], "exponents": [2, 3]}}])");
    const double pk = build_packing(packing_from_json(layout)).total_energy(plus);
    const double target = M_PI * plus(Matrix2::identity());
    o.require(std::abs(pk - target) <= 2e-6, "two-ball packing total");
    o.summary = "W_magic_plus max|E - pi| " + fmt("%.1e", worst_plus) + "; B_p: " + bp + "; packing |E - pi| "
                + fmt("%.1e", std::abs(pk - target));
    return o;
}

Outcome criterion7()
{
    Outcome o;
    const GridSpec grid;
    const KSGridSpec ks = KSGridSpec::matched(grid);
    std::mt19937_64 rng(7);
    int poly = 0, rank_one = 0, lh_probes = 0;
    double worst_lh = 1.0;
    for (const CatalogEntry& e : catalog()) {
        const Energy E = e.as_energy();
        const bool pc = check_polyconvex(E).verdict == Verdict::ConsistentOnGrid;
        const SplitEnergy* s = e.split();
        const bool ro = s ? check_split(*s, grid).verdict == Verdict::ConsistentOnGrid
                          : check_knowles_sternberg(e.general(), ks).verdict == Verdict::ConsistentOnGrid;
        poly += pc;
        rank_one += ro;
        o.require(!pc || ro, e.name + ": polyconvex-consistent but not rank-one-consistent");
        if (!ro)
            continue;
        if (s) {
            bool h_convex = true, f_convex = true;
            for (double t : grid.t_points())
                h_convex = h_convex && s->h2(t) >= -1e-9;
            for (double z : grid.z_points())
                f_convex = f_convex && s->f().d2(z) >= -1e-9;
            o.require(h_convex || f_convex, e.name + ": neither h'' >= 0 nor f'' >= 0");
        }
        for (int i = 0; i < 200; ++i) {
            const double lh = legendre_hadamard(E, random_glplus(rng), random_unit(rng), random_unit(rng));
            worst_lh = std::min(worst_lh, lh);
            ++lh_probes;
            if (!(lh >= -1e-6)) {
                o.require(false, e.name + ": Legendre-Hadamard " + fmt("%.3e", lh));
                break;
            }
        }
    }
    o.summary = std::to_string(catalog().size()) + " energies, " + std::to_string(poly) + " polyconvex-consistent, "
                + std::to_string(rank_one) + " rank-one-consistent, " + std::to_string(lh_probes)
                + " LH probes, worst " + fmt("%.2e", worst_lh);
    return o;
}

Outcome criterion8()
{
    Outcome o;
    SearchOptions opts;
    opts.budget = 2000;
    const QCResult a = search_violation(Energy::from(w_magic_plus()), Matrix2::identity(),
                                        PerturbationFamily::contracting_radial(), opts);
    const QCResult b = search_violation(Energy::from(k_distortion()), Matrix2::identity(),
                                        PerturbationFamily::trig_bubble(), opts);
    const Energy synthetic = Energy::from(make_split_energy("-(t + 1/t)", "-(z^2)", "synthetic").energy);
    const QCResult c = search_violation(synthetic, Matrix2::identity(), PerturbationFamily::mollified_laminate(), opts);
    o.require(a.verdict == QCVerdict::EnergyNeutralFamily,
              std::string("W_magic_plus/ContractingRadial gave ") + to_string(a.verdict));
    o.require(b.verdict == QCVerdict::NoViolationFound, std::string("K/TrigBubble gave ") + to_string(b.verdict));
    o.require(c.verdict == QCVerdict::CandidateViolation, std::string("synthetic gave ") + to_string(c.verdict));
    o.require(c.refined_excess < -10.0 * c.refined_error, "synthetic violation did not survive 4x refinement");
    o.summary = std::string(to_string(a.verdict)) + " (min " + fmt("%.1e", a.min_excess) + "); " + to_string(b.verdict)
                + " (min " + fmt("%.1e", b.min_excess) + "); " + to_string(c.verdict) + " (refined "
                + fmt("%.4g", c.refined_excess) + " +- " + fmt("%.1e", c.refined_error) + ")";
    return o;
}

std::string random_expression(std::mt19937_64& rng, int depth)
{
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
    std::uniform_real_distribution<double> num(0.5, 3.0);
    auto sub = [&] { return random_expression(rng, depth - 1); };
    switch (pick(rng)) {
    case 0: return "x";
    case 1: return fmt("%.3f", num(rng));
    case 2: return "(" + sub() + " + " + sub() + ")";
    case 3: return "(" + sub() + " - " + sub() + ")";
    case 4: return "(" + sub() + ")*(" + sub() + ")";
    case 5: return "(" + sub() + ")/(3 + cos(" + sub() + "))";
    case 6: return "exp(cos(" + sub() + "))";
    case 7: return "log(2 + sin(" + sub() + "))";
    case 8: return "sqrt(1 + (" + sub() + ")^2)";
    default: return "abs(2 + sin(" + sub() + "))^1.5";
    }
}

Outcome criterion9()
{
    Outcome o;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ux(0.5, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const Expr e = parse(random_expression(rng, 4), "x");
        const double x = ux(rng);
        const double h = 1e-5;
        const Jet2 j = eval_jet(e, x);
        const double fd1 = (eval(e, x + h) - eval(e, x - h)) / (2.0 * h);
        const double rel = std::abs(j.d1 - fd1) / std::max(1.0, std::abs(fd1));
        worst = std::max(worst, rel);
        o.require(rel <= 1e-5, "derivative of " + print(e));
    }
    const Energy custom = Energy::from(make_split_energy("t - log(t)", "log(z)", "custom").energy);
    const Energy plus = Energy::from(w_magic_plus());
    double diff = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Matrix2 F = random_glplus(rng);
        diff = std::max(diff, std::abs(custom(F) - plus(F)) / std::max(1.0, std::abs(plus(F))));
    }
    o.require(diff <= 1e-12, "custom W_magic_plus differs from the built-in");
    o.summary = "50 expressions, worst derivative error " + fmt("%.1e", worst) + "; custom vs built-in "
                + fmt("%.1e", diff);
    return o;
}

Outcome criterion10()
{
    Outcome o;
    const std::vector<std::vector<std::string>> cmds{
        {"catalog"},
        {"classify", "W_magic_plus"},
        {"classify", "--h", "t^2", "--f", "z^2"},
        {"check", "rank-one", "W_magic_plus"},
        {"check", "ks", "hencky"},
        {"check", "polyconvex", "W_magic_plus"},
        {"shield", "B_star", "--seed", "10"},
        {"radial", "W_magic_plus", "--profile", "r^2"},
        {"radial", "B_p", "--p", "3", "--profile", "r^0.7"},
        {"qc", "W_magic_plus", "--family", "ContractingRadial", "--budget", "200", "--seed", "10"},
        {"qc", "K_distortion", "--family", "TrigBubble", "--budget", "200", "--seed", "10"},
        {"qc", "det_F", "--family", "Packing", "--budget", "40", "--seed", "10"},
        {"identities", "--seed", "10"},
    };
    int runs = 0;
    for (const auto& cmd : cmds)
        for (const char* format : {"json", "csv"}) {
            std::vector<std::string> args = cmd;
            args.insert(args.end(), {"--format", format});
            std::ostringstream a, b, ea, eb;
            const int ca = run_cli(args, a, ea);
            const int cb = run_cli(args, b, eb);
            std::string name;
            for (const auto& s : args)
                name += s + " ";
            o.require(ca == cb && a.str() == b.str() && !a.str().empty(), "not reproducible: " + name);
            o.require(ca != kExitUsage, "usage error: " + name + ea.str());
            ++runs;
        }
    o.summary = std::to_string(runs) + " command lines, each run twice";
    return o;
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        double limit_s;
        Outcome (*run)();
    };
    const std::vector<Criterion> criteria{
        {1, "W_magic_plus rank-one equality pattern", 5.0, criterion1},
        {2, "equality-pattern table", 30.0, criterion2},
        {3, "polyconvexity", 60.0, criterion3},
        {4, "shield and Burkholder identities", 5.0, criterion4},
        {5, "complex identities and Burkholder inequality", 5.0, criterion5},
        {6, "radial constancy", 60.0, criterion6},
        {7, "hierarchy properties", 120.0, criterion7},
        {8, "harness neutrality", 600.0, criterion8},
        {9, "expressions and automatic derivatives", 1e9, criterion9},
        {10, "CLI determinism", 1e9, criterion10},
    };
    bool all = true;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (s > c.limit_s)
            o.require(false, "runtime " + fmt("%.1f", s) + " s over " + fmt("%.0f", c.limit_s) + " s");
        all = all && o.pass;
        std::printf("criterion %2d %s: %s (%.2f s) %s", c.id, c.name, o.pass ? "PASS" : "FAIL", s, o.summary.c_str());
        for (const std::string& f : o.failures)
            std::printf(" | %s", f.c_str());
        std::printf("\n");
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
