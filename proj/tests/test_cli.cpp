#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "morrey/cli.hpp"
#include "morrey/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace morrey;
using json = nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

json run_json(const std::vector<std::string>& args, int expected_code)
{
    const Run r = run(args);
    REQUIRE_MESSAGE(r.code == expected_code, r.err);
    return json::parse(r.out);
}

const std::vector<std::vector<std::string>>& quick_commands()
{
    static const std::vector<std::vector<std::string>> cmds{
        {"catalog"},
        {"classify", "W_magic_plus", "--grid-t", "1.000001:1e4:200", "--grid-z", "1e-4:1e4:200"},
        {"check", "rank-one", "W_magic_plus", "--grid-t", "1.000001:1e4:200", "--grid-z", "1e-4:1e4:200"},
        {"check", "ks", "hencky", "--grid-t", "1.000001:1e2:60", "--grid-z", "1e-2:1e2:60"},
        {"check", "polyconvex", "W_magic_minus", "--grid-t", "1e-1:1e1:8", "--grid-z", "1e-2:1e2:16"},
        {"shield", "K_distortion", "--samples", "50", "--seed", "3"},
        {"radial", "W_magic_plus", "--profile", "r^3"},
        {"qc", "K_distortion", "--family", "TrigBubble", "--budget", "40", "--seed", "5"},
        {"identities", "--samples", "200", "--seed", "9"},
    };
    return cmds;
}

} // namespace

TEST_CASE("report header and schema")
{
    const json d = run_json({"check", "rank-one", "W_magic_plus", "--grid-t", "1.000001:1e4:200"}, 0);
    CHECK(d["tool_version"] == kToolVersion);
    CHECK(d["command"] == "check rank-one");
    CHECK(d["energy"]["name"] == "W_magic_plus");
    CHECK(d["energy"]["h"] == "t - log(t)");
    CHECK(d["energy"]["f"] == "log(z)");
    CHECK(d["verdict"] == "ConsistentOnGrid");
    REQUIRE(d["conditions"].is_array());
    for (const json& c : d["conditions"]) {
        CHECK(c.contains("id"));
        CHECK(c.contains("min_margin"));
        CHECK(c.contains("argmin"));
        CHECK(c.contains("equality_points"));
    }
    CHECK(d["witnesses"].is_array());

    // C1 and C3a hold with equality at every grid point.
    for (const json& c : d["conditions"])
        if (c["id"] == "C1" || c["id"] == "C3a")
            CHECK(c["equality_count"].get<int>() >= 200);
}

TEST_CASE("custom energies echo canonical h and f")
{
    const json d = run_json({"classify", "--h", "t -  log( t )", "--f", "log(z)"}, 0);
    CHECK(d["energy"]["name"] == "custom");
    CHECK(d["energy"]["h"] == "t - log(t)");
    CHECK(d["energy"]["f"] == "log(z)");
    CHECK(d["verdict"] == "M_plus");
}

TEST_CASE("classify examples")
{
    CHECK(run_json({"classify", "W_magic_plus"}, 0)["verdict"] == "M_plus");
    CHECK(run_json({"classify", "W_smooth"}, 0)["verdict"] == "M_minus");
    const json both = run_json({"classify", "--h", "t^2", "--f", "z^2"}, 0);
    CHECK(both["verdict"] == "BothConvex");
    CHECK(both["summary"].get<std::string>().find("polyconvex (sum of polyconvex parts)") != std::string::npos);
    CHECK(run_json({"classify", "W_magic_plus"}, 0)["reduced"]["h"] == "t - log(t)");
}

TEST_CASE("exit codes")
{
    CHECK(run({"check", "polyconvex", "W_magic_plus"}).code == kExitViolated);
    const json poly = run_json({"check", "polyconvex", "W_magic_plus"}, kExitViolated);
    CHECK_FALSE(poly["witnesses"].empty());

    CHECK(run({"qc", "--h", "-(t + 1/t)", "--f", "-(z^2)", "--family", "MollifiedLaminate", "--budget", "300"}).code
          == kExitViolated);
    CHECK(run({"radial", "W_magic_plus", "--profile", "r^2"}).code == kExitConsistent);

    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"check", "convex", "W_magic_plus"}).code == kExitUsage);
    CHECK(run({"check", "rank-one"}).code == kExitUsage);
    CHECK(run({"check", "rank-one", "no_such_energy"}).code == kExitUsage);
    CHECK(run({"check", "rank-one", "W_magic_plus", "--h", "t", "--f", "z"}).code == kExitUsage);
    CHECK(run({"check", "rank-one", "--h", "t"}).code == kExitUsage);
    CHECK(run({"check", "rank-one", "--h", "t^", "--f", "z"}).code == kExitUsage);
    CHECK(run({"check", "rank-one", "--h", "t", "--f", "q"}).code == kExitUsage);
    CHECK(run({"check", "rank-one", "W_magic_plus", "--grid-t", "1:2"}).code == kExitUsage);
    CHECK(run({"check", "rank-one", "W_magic_plus", "--format", "xml"}).code == kExitUsage);
    CHECK(run({"radial", "W_magic_plus"}).code == kExitUsage);
    CHECK(run({"radial", "B_p", "--profile", "r^2"}).code == kExitUsage);
    CHECK(run({"qc", "W_magic_plus", "--family", "Spiral"}).code == kExitUsage);
    CHECK(run({"classify", "hencky"}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitConsistent);

    // Numeric failures: a divergent radial energy.
    const Run div = run({"radial", "--h", "t", "--f", "z^2", "--profile", "sqrt(r)"});
    CHECK(div.code == kExitNumeric);
    CHECK(div.err.find("QuadratureDivergence") != std::string::npos);
}

TEST_CASE("radial reports")
{
    const json d = run_json({"radial", "W_magic_plus", "--profile", "r^2"}, 0);
    CHECK(std::abs(d["margin"].get<double>()) <= 1e-6);
    CHECK(d["verdict"] == "EnergyNeutralFamily");
    CHECK(d["profile"]["class"] == "Contracting");

    const json b = run_json({"radial", "B_p", "--p", "3", "--profile", "r^0.7"}, 0);
    CHECK(b["energy_value"].get<double>() == doctest::Approx(-M_PI).epsilon(1e-9));

    const std::string path = (std::filesystem::temp_directory_path() / "morrey_cli_packing.json").string();
    {
        std::ofstream f(path);
        f << R"([{"center": [-0.5, 0], "radius": 0.4, "profile": "r^2/0.4"},
                 {"center": [0.5, 0], "radius": 0.4, "profile": {"kind": "power", "k": 3}}])";
    }
    const json p = run_json({"radial", "W_magic_plus", "--packing", path}, 0);
    CHECK(p["energy_value"].get<double>() == doctest::Approx(M_PI).epsilon(1e-9));
    CHECK(p["packing"].size() == 2);
    std::remove(path.c_str());
}

TEST_CASE("csv and json carry the same payload")
{
    for (const auto& cmd : quick_commands()) {
        std::vector<std::string> as_json = cmd, as_csv = cmd;
        as_csv.insert(as_csv.end(), {"--format", "csv"});
        const Run a = run(as_json);
        const Run b = run(as_csv);
        CHECK(a.code == b.code);
        CHECK_MESSAGE(from_csv(b.out) == json::parse(a.out), cmd.front());
    }
}

TEST_CASE("commands are deterministic")
{
    for (const auto& cmd : quick_commands()) {
        const Run a = run(cmd);
        const Run b = run(cmd);
        CHECK_MESSAGE(a.out == b.out, cmd.front());
        CHECK(a.code == b.code);
    }
    const Run s1 = run({"identities", "--samples", "20", "--seed", "1"});
    const Run s2 = run({"identities", "--samples", "20", "--seed", "2"});
    CHECK(s1.out != s2.out);
}

TEST_CASE("--out writes the report to a file")
{
    const std::string path = (std::filesystem::temp_directory_path() / "morrey_cli_out.json").string();
    const Run r = run({"catalog", "--out", path});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream f(path);
    const json d = json::parse(f);
    CHECK(d["entries"].size() >= 10);
    std::remove(path.c_str());
}

TEST_CASE("grid ranges")
{
    const GridRange g = parse_grid_range("1e-3:1e3:50");
    CHECK(g.min == 1e-3);
    CHECK(g.max == 1e3);
    CHECK(g.n == 50);
    CHECK_THROWS(parse_grid_range("1:2"));
    CHECK_THROWS(parse_grid_range("2:1:10"));
    CHECK_THROWS(parse_grid_range("a:2:10"));
    CHECK_THROWS(parse_grid_range("1:2:1"));
}
