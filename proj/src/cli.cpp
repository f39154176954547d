#include "morrey/cli.hpp"

#include "morrey/catalog.hpp"
#include "morrey/errors.hpp"
#include "morrey/expression.hpp"
#include "morrey/harness.hpp"
#include "morrey/polyconvexity.hpp"
#include "morrey/radial.hpp"
#include "morrey/rank_one.hpp"
#include "morrey/report.hpp"
#include "morrey/transforms.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

namespace morrey {

namespace {

using json = nlohmann::json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Outcome {
    json doc;
    int code = kExitConsistent;
};

struct ResolvedEnergy {
    std::optional<Energy> energy;
    std::optional<SplitEnergy> split;
    std::optional<GeneralIsotropicEnergy> general;
    json header;
    std::vector<std::string> notes;
};

ResolvedEnergy resolve_energy(const RunConfig& cfg)
{
    const bool custom = !cfg.h_expr.empty() || !cfg.f_expr.empty();
    if (custom && !cfg.energy.empty())
        throw UsageError("give either an energy name or --h/--f, not both");
    if (!custom && cfg.energy.empty())
        throw UsageError("no energy given: pass a name or --h and --f");

    ResolvedEnergy r;
    if (custom) {
        if (cfg.h_expr.empty() || cfg.f_expr.empty())
            throw UsageError("--h and --f must be given together");
        ParsedSplitEnergy parsed = make_split_energy(cfg.h_expr, cfg.f_expr, "custom");
        if (parsed.symmetry_warning)
            r.notes.push_back(*parsed.symmetry_warning);
        r.split = parsed.energy;
    } else if (cfg.energy == "B_p") {
        if (!cfg.p)
            throw UsageError("B_p needs --p");
        r.energy = burkholder_energy(*cfg.p);
    } else if (cfg.energy == "B_star") {
        r.energy = bstar_energy();
    } else {
        const std::optional<CatalogEntry> e = find_energy(cfg.energy);
        if (!e)
            throw UsageError("unknown energy '" + cfg.energy + "'");
        if (const SplitEnergy* s = e->split())
            r.split = *s;
        else
            r.general = e->general();
    }

    if (r.split) {
        r.general = GeneralIsotropicEnergy::from_split(*r.split);
        r.energy = Energy::from(*r.split);
        r.header = {{"name", r.split->name()}, {"h", r.split->h_source()}, {"f", r.split->f_source()}};
    } else if (r.general) {
        r.energy = Energy::from(*r.general);
        r.header = {{"name", r.general->name()}, {"h", nullptr}, {"f", nullptr}};
    } else {
        r.header = {{"name", r.energy->name()}, {"h", nullptr}, {"f", nullptr}};
    }
    return r;
}

GridSpec split_grid(const RunConfig& cfg)
{
    GridSpec g;
    if (!cfg.grid_t.empty()) {
        const GridRange t = parse_grid_range(cfg.grid_t);
        g.t_min = t.min;
        g.t_max = t.max;
        g.n_t = t.n;
    }
    if (!cfg.grid_z.empty()) {
        const GridRange z = parse_grid_range(cfg.grid_z);
        g.z_min = z.min;
        g.z_max = z.max;
        g.n_z = z.n;
    }
    g.validate();
    return g;
}

Matrix2 parse_matrix(const std::string& s)
{
    if (s.empty())
        return Matrix2::identity();
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size())
                throw UsageError("");
        } catch (const std::exception&) {
            throw UsageError("malformed matrix entry '" + tok + "'");
        }
    }
    if (v.size() != 4)
        throw UsageError("--F0 needs four comma-separated entries f11,f12,f21,f22");
    return {v[0], v[1], v[2], v[3]};
}

json matrix_json(const Matrix2& F) { return json::array({F.f11, F.f12, F.f21, F.f22}); }

Matrix2 random_glplus(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> logs(std::log(0.2), std::log(5.0));
    const double s1 = std::exp(logs(rng));
    const double s2 = std::exp(logs(rng));
    return Matrix2::rotation(angle(rng)) * Matrix2::diag(s1, s2) * Matrix2::rotation(angle(rng));
}

int exit_for(Verdict v)
{
    switch (v) {
    case Verdict::ConsistentOnGrid: return kExitConsistent;
    case Verdict::ViolatedAt: return kExitViolated;
    case Verdict::Inconclusive: return kExitNumeric;
    }
    return kExitNumeric;
}

json base_doc(const RunConfig& cfg, const json& energy)
{
    std::string command = cfg.command;
    if (!cfg.check_kind.empty())
        command += " " + cfg.check_kind;
    return {{"tool_version", kToolVersion},
            {"command", command},
            {"energy", energy},
            {"verdict", nullptr},
            {"conditions", json::array()},
            {"witnesses", json::array()},
            {"notes", json::array()}};
}

Outcome cmd_catalog(const RunConfig& cfg)
{
    Outcome o{base_doc(cfg, nullptr)};
    json entries = json::array();
    for (const CatalogEntry& e : catalog()) {
        json j = {{"name", e.name}, {"description", e.description}};
        if (const SplitEnergy* s = e.split()) {
            j["kind"] = "split";
            j["h"] = s->h_source();
            j["f"] = s->f_source();
        } else {
            j["kind"] = "isotropic";
            j["formula"] = e.general().description();
        }
        entries.push_back(j);
    }
    entries.push_back({{"name", "B_p"}, {"kind", "transform"}, {"description", "Burkholder functional, needs --p"}});
    entries.push_back({{"name", "B_star"}, {"kind", "transform"}, {"description", "p-derivative of B_p at p = 2"}});
    o.doc["entries"] = entries;
    o.doc["verdict"] = "Listed";
    return o;
}

Outcome cmd_classify(const RunConfig& cfg)
{
    const ResolvedEnergy e = resolve_energy(cfg);
    if (!e.split)
        throw UsageError("classify needs a split energy h(t) + f(z)");
    const GridSpec grid = split_grid(cfg);
    const SplitClassification c = classify_split(*e.split, grid);
    const SplitEnergy reduced = reduce_to_log_volumetric(*e.split, grid);

    Outcome o{base_doc(cfg, e.header)};
    ConditionRecord iso;
    iso.id = "isochoric_convex";
    iso.min_margin = c.isochoric.worst_second;
    iso.argmin = {c.isochoric.argmin_second};
    iso.required = false;
    iso.satisfied = c.isochoric.convex;
    ConditionRecord vol;
    vol.id = "volumetric_convex";
    vol.min_margin = c.volumetric.worst_second;
    vol.argmin = {c.volumetric.argmin_second};
    vol.required = false;
    vol.satisfied = c.volumetric.convex;
    o.doc["conditions"] = json::array({to_json(iso), to_json(vol)});
    o.doc["verdict"] = to_string(c.morrey_class);
    o.doc["summary"] = c.summary;
    o.doc["reduced"] = {{"name", reduced.name()}, {"h", reduced.h_source()}, {"f", reduced.f_source()}};
    o.doc["notes"] = e.notes;
    return o;
}

Outcome cmd_check(const RunConfig& cfg)
{
    const ResolvedEnergy e = resolve_energy(cfg);
    ConvexityReport report;
    std::vector<std::string> notes = e.notes;
    if (cfg.check_kind == "rank-one") {
        if (e.split) {
            report = check_split(*e.split, split_grid(cfg));
        } else if (e.general) {
            report = check_knowles_sternberg(*e.general, KSGridSpec::matched(split_grid(cfg)));
            notes.push_back("no split form; checked with the singular-value rank-one criterion");
        } else {
            throw UsageError("rank-one check needs a split or isotropic catalog energy");
        }
    } else if (cfg.check_kind == "ks") {
        if (!e.general)
            throw UsageError("ks check needs a split or isotropic catalog energy");
        report = check_knowles_sternberg(*e.general, KSGridSpec::matched(split_grid(cfg)));
    } else if (cfg.check_kind == "polyconvex") {
        SilhavyGrid sg;
        if (!cfg.grid_t.empty()) {
            const GridRange b = parse_grid_range(cfg.grid_t);
            sg.base_min = b.min;
            sg.base_max = b.max;
            sg.n_base = b.n;
        }
        if (!cfg.grid_z.empty()) {
            const GridRange p = parse_grid_range(cfg.grid_z);
            sg.probe_min = p.min;
            sg.probe_max = p.max;
            sg.n_probe = p.n;
        }
        sg.validate();
        report = check_polyconvex(*e.energy, sg);
    } else {
        throw UsageError("unknown check '" + cfg.check_kind + "'");
    }
    report.h = e.header["h"].is_string() ? e.header["h"].get<std::string>() : std::string();
    report.f = e.header["f"].is_string() ? e.header["f"].get<std::string>() : std::string();
    for (const std::string& n : notes)
        report.notes.push_back(n);

    Outcome o{base_doc(cfg, e.header), exit_for(report.verdict)};
    json r = to_json(report);
    r.erase("check");
    r["energy"] = e.header;
    o.doc.update(r);
    return o;
}

Outcome cmd_shield(const RunConfig& cfg)
{
    const ResolvedEnergy e = resolve_energy(cfg);
    const Energy S = shield(*e.energy);
    const Energy SS = shield(S);
    std::mt19937_64 rng(cfg.seed);

    ConditionRecord inv;
    inv.id = "involution";
    json samples = json::array();
    for (int i = 0; i < cfg.samples; ++i) {
        const Matrix2 F = random_glplus(rng);
        const double w = (*e.energy)(F);
        const double ws = S(F);
        const double wss = SS(F);
        const double defect = std::abs(wss - w) / std::max(1.0, std::abs(w));
        inv.observe(-defect, {F.f11, F.f12, F.f21, F.f22}, false);
        if (i < 16)
            samples.push_back({{"F", matrix_json(F)}, {"W", w}, {"W_shield", ws}});
    }
    inv.satisfied = inv.min_margin >= -1e-10;

    Outcome o{base_doc(cfg, e.header)};
    o.doc["shield_name"] = S.name();
    o.doc["samples"] = samples;
    o.doc["conditions"] = json::array({to_json(inv)});
    o.doc["notes"] = e.notes;
    if (inv.satisfied) {
        o.doc["verdict"] = to_string(Verdict::ConsistentOnGrid);
    } else {
        o.doc["verdict"] = to_string(Verdict::ViolatedAt);
        o.doc["witnesses"] = json::array(
            {to_json(Witness{"involution", inv.argmin, inv.min_margin, "shield of the shield differs from W"})});
        o.code = kExitViolated;
    }
    return o;
}

Outcome cmd_radial(const RunConfig& cfg)
{
    const ResolvedEnergy e = resolve_energy(cfg);
    if (cfg.profile.empty() == cfg.packing.empty())
        throw UsageError("radial needs exactly one of --profile and --packing");
    const Matrix2 F0 = parse_matrix(cfg.f0);
    const double w0 = (*e.energy)(F0);

    Outcome o{base_doc(cfg, e.header)};
    json notes = e.notes;
    RadialIntegral I;
    double area = 0.0;
    json witness;
    if (!cfg.profile.empty()) {
        const RadialProfile v = RadialProfile::expression(cfg.profile, cfg.radius);
        for (const std::string& w : v.warnings())
            notes.push_back(w);
        I = radial_energy_integral(*e.energy, v, F0);
        area = M_PI * cfg.radius * cfg.radius;
        o.doc["profile"] = {{"expression", v.description()},
                            {"R", cfg.radius},
                            {"class", to_string(classify_profile(v))}};
        witness = {{"profile", cfg.profile}, {"R", cfg.radius}};
    } else {
        std::ifstream in(cfg.packing);
        if (!in)
            throw UsageError("cannot read packing file '" + cfg.packing + "'");
        const json layout = json::parse(in);
        const PackingEvaluator p = build_packing(packing_from_json(layout));
        I = p.energy_integral(*e.energy, F0);
        area = M_PI * p.spec().domain_radius * p.spec().domain_radius;
        o.doc["packing"] = layout;
        witness = {{"packing", layout}};
    }
    const double reference = area * w0;
    const double margin = I.value - reference;
    const double tol = std::max(10.0 * I.error, 1e-6 * std::max(1.0, std::abs(reference)));

    ConditionRecord c;
    c.id = "radial_margin";
    c.min_margin = margin;
    c.satisfied = margin >= -tol;
    o.doc["F0"] = matrix_json(F0);
    o.doc["energy_value"] = I.value;
    o.doc["error"] = I.error;
    o.doc["reference"] = reference;
    o.doc["margin"] = margin;
    o.doc["conditions"] = json::array({to_json(c)});
    o.doc["notes"] = notes;
    if (margin < -tol) {
        o.doc["verdict"] = to_string(QCVerdict::CandidateViolation);
        witness["margin"] = margin;
        o.doc["witnesses"] = json::array({witness});
        o.code = kExitViolated;
    } else if (std::abs(margin) <= tol) {
        o.doc["verdict"] = to_string(QCVerdict::EnergyNeutralFamily);
    } else {
        o.doc["verdict"] = to_string(QCVerdict::NoViolationFound);
    }
    return o;
}

PerturbationFamily family_from(const std::string& name)
{
    switch (family_kind_from_string(name)) {
    case FamilyKind::TrigBubble: return PerturbationFamily::trig_bubble();
    case FamilyKind::ContractingRadial: return PerturbationFamily::contracting_radial();
    case FamilyKind::MollifiedLaminate: return PerturbationFamily::mollified_laminate();
    case FamilyKind::Packing: return PerturbationFamily::packing();
    }
    throw UsageError("unknown family '" + name + "'");
}

Outcome cmd_qc(const RunConfig& cfg)
{
    const ResolvedEnergy e = resolve_energy(cfg);
    if (cfg.budget < 1)
        throw UsageError("--budget must be positive");
    const Matrix2 F0 = parse_matrix(cfg.f0);
    const PerturbationFamily family = family_from(cfg.family);
    SearchOptions opts;
    opts.budget = cfg.budget;
    opts.seed = cfg.seed;
    const QCResult r = search_violation(*e.energy, F0, family, opts);

    Outcome o{base_doc(cfg, e.header)};
    ConditionRecord c;
    c.id = "min_excess";
    c.min_margin = r.min_excess;
    c.argmin = r.argmin;
    c.satisfied = r.verdict != QCVerdict::CandidateViolation;
    o.doc["conditions"] = json::array({to_json(c)});
    o.doc["verdict"] = to_string(r.verdict);
    o.doc["search"] = to_json(r);
    json notes = e.notes;
    for (const std::string& n : r.notes)
        notes.push_back(n);
    o.doc["notes"] = notes;
    if (r.verdict == QCVerdict::CandidateViolation) {
        o.doc["witnesses"] = json::array({{{"family", family.to_json()},
                                          {"F0", matrix_json(F0)},
                                          {"params", r.argmin},
                                          {"excess", r.refined_excess},
                                          {"error", r.refined_error}}});
        o.code = kExitViolated;
    } else if (r.argmin.empty()) {
        o.code = kExitNumeric;
    }
    return o;
}

Outcome cmd_identities(const RunConfig& cfg)
{
    std::mt19937_64 rng(cfg.seed);
    ConditionRecord ids;
    ids.id = "complex_identities";
    ConditionRecord ineq;
    ineq.id = "burkholder_inequality";
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> pd(2.0, 8.0);
    for (int i = 0; i < cfg.samples; ++i) {
        const Matrix2 F = random_glplus(rng);
        ids.observe(-identity_suite(F).worst(), {F.f11, F.f12, F.f21, F.f22}, false);
        const ComplexPair zw{{u(rng), u(rng)}, {u(rng), u(rng)}};
        const double p = pd(rng);
        ineq.observe(burkholder_inequality(zw, BurkholderParams(p)).relative(),
                     {zw.z.real(), zw.z.imag(), zw.w.real(), zw.w.imag(), p}, false);
    }
    ids.satisfied = ids.min_margin >= -1e-10;
    ineq.satisfied = ineq.min_margin >= -1e-9;

    Outcome o{base_doc(cfg, nullptr)};
    o.doc["samples"] = cfg.samples;
    o.doc["conditions"] = json::array({to_json(ids), to_json(ineq)});
    const bool ok = ids.satisfied && ineq.satisfied;
    o.doc["verdict"] = to_string(ok ? Verdict::ConsistentOnGrid : Verdict::ViolatedAt);
    if (!ok) {
        const ConditionRecord& bad = ids.satisfied ? ineq : ids;
        o.doc["witnesses"] = json::array({to_json(Witness{bad.id, bad.argmin, bad.min_margin, "identity fails"})});
        o.code = kExitViolated;
    }
    return o;
}

Outcome dispatch(const RunConfig& cfg)
{
    if (cfg.command == "catalog")
        return cmd_catalog(cfg);
    if (cfg.command == "classify")
        return cmd_classify(cfg);
    if (cfg.command == "check")
        return cmd_check(cfg);
    if (cfg.command == "shield")
        return cmd_shield(cfg);
    if (cfg.command == "radial")
        return cmd_radial(cfg);
    if (cfg.command == "qc")
        return cmd_qc(cfg);
    if (cfg.command == "identities")
        return cmd_identities(cfg);
    throw UsageError("unknown command '" + cfg.command + "'");
}

bool is_usage_kind(ErrorKind k)
{
    switch (k) {
    case ErrorKind::Syntax:
    case ErrorKind::UnknownIdentifier:
    case ErrorKind::WrongVariable:
    case ErrorKind::InvalidArgument:
    case ErrorKind::Overlap:
    case ErrorKind::Nesting:
        return true;
    default:
        return false;
    }
}

void add_common(CLI::App* sub, RunConfig& cfg, bool energy)
{
    if (energy) {
        sub->add_option("energy_name", cfg.energy, "built-in energy name");
        sub->add_option("--energy", cfg.energy, "built-in energy name");
        sub->add_option("--h", cfg.h_expr, "isochoric part h(t) for t >= 1");
        sub->add_option("--f", cfg.f_expr, "volumetric part f(z)");
        sub->add_option("--p", cfg.p, "Burkholder exponent for B_p");
    }
    sub->add_option("--grid-t", cfg.grid_t, "MIN:MAX:N (polyconvex: base singular values)");
    sub->add_option("--grid-z", cfg.grid_z, "MIN:MAX:N (polyconvex: probe singular values)");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--out", cfg.out, "write the report to this path");
}

} // namespace

GridRange parse_grid_range(const std::string& s)
{
    const std::size_t a = s.find(':');
    const std::size_t b = a == std::string::npos ? a : s.find(':', a + 1);
    if (b == std::string::npos)
        throw UsageError("grid '" + s + "' is not MIN:MAX:N");
    GridRange g;
    try {
        std::size_t used = 0;
        const std::string smin = s.substr(0, a), smax = s.substr(a + 1, b - a - 1), sn = s.substr(b + 1);
        g.min = std::stod(smin, &used);
        if (used != smin.size())
            throw UsageError("");
        g.max = std::stod(smax, &used);
        if (used != smax.size())
            throw UsageError("");
        g.n = std::stoi(sn, &used);
        if (used != sn.size())
            throw UsageError("");
    } catch (const std::exception&) {
        throw UsageError("grid '" + s + "' is not MIN:MAX:N");
    }
    if (!(g.min > 0.0 && g.max > g.min && g.n >= 2))
        throw UsageError("grid '" + s + "' needs 0 < MIN < MAX and N >= 2");
    return g;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    CLI::App app{"Convexity checks and quasiconvexity experiments for planar isotropic energies", "morrey"};
    // --h names the isochoric part, so help has no short form.
    app.set_help_flag("--help", "print help");
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    CLI::App* catalog_cmd = app.add_subcommand("catalog", "list built-in energies");
    add_common(catalog_cmd, cfg, false);
    CLI::App* classify_cmd = app.add_subcommand("classify", "classify a split energy by convexity of h and f");
    add_common(classify_cmd, cfg, true);
    CLI::App* check_cmd = app.add_subcommand("check", "rank-one, polyconvexity or singular-value check");
    check_cmd->add_option("kind", cfg.check_kind, "rank-one, polyconvex or ks")
        ->required()
        ->check(CLI::IsMember({"rank-one", "polyconvex", "ks"}));
    add_common(check_cmd, cfg, true);
    CLI::App* shield_cmd = app.add_subcommand("shield", "shield transform samples and involution check");
    add_common(shield_cmd, cfg, true);
    shield_cmd->add_option("--samples", cfg.samples, "number of random matrices")->check(CLI::PositiveNumber);
    CLI::App* radial_cmd = app.add_subcommand("radial", "energy of a radial map or a packing of radial maps");
    add_common(radial_cmd, cfg, true);
    radial_cmd->add_option("--profile", cfg.profile, "profile v(r) as an expression in r");
    radial_cmd->add_option("--packing", cfg.packing, "JSON layout of radial balls");
    radial_cmd->add_option("--radius", cfg.radius, "ball radius for --profile")->check(CLI::PositiveNumber);
    radial_cmd->add_option("--F0", cfg.f0, "affine boundary map f11,f12,f21,f22");
    CLI::App* qc_cmd = app.add_subcommand("qc", "search for negative excess energy");
    add_common(qc_cmd, cfg, true);
    qc_cmd->add_option("--budget", cfg.budget, "energy evaluations");
    qc_cmd->add_option("--family", cfg.family, "TrigBubble, ContractingRadial, MollifiedLaminate or Packing");
    qc_cmd->add_option("--F0", cfg.f0, "affine boundary map f11,f12,f21,f22");
    CLI::App* ident_cmd = app.add_subcommand("identities", "complex-variable identities and the Burkholder inequality");
    add_common(ident_cmd, cfg, false);
    ident_cmd->add_option("--samples", cfg.samples, "number of random samples")->check(CLI::PositiveNumber);

    std::vector<const char*> argv{"morrey"};
    for (const std::string& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitConsistent : kExitUsage;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        const Outcome o = dispatch(cfg);
        const std::string text = cfg.format == "csv" ? to_csv(o.doc) : o.doc.dump(2) + "\n";
        if (cfg.out.empty()) {
            out << text;
        } else {
            std::ofstream f(cfg.out, std::ios::binary);
            if (!f)
                throw UsageError("cannot write '" + cfg.out + "'");
            f << text;
        }
        return o.code;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << to_string(e.kind()) << ": " << e.what() << "\n";
        return is_usage_kind(e.kind()) ? kExitUsage : kExitNumeric;
    } catch (const nlohmann::json::exception& e) {
        err << "malformed JSON: " << e.what() << "\n";
        return kExitUsage;
    }
}

} // namespace morrey
