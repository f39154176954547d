#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace morrey {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes shared by every command.
enum ExitCode : int { kExitConsistent = 0, kExitViolated = 1, kExitUsage = 2, kExitNumeric = 3 };

struct RunConfig {
    std::string command;
    // check: rank-one, polyconvex or ks.
    std::string check_kind;
    // Exactly one source: a built-in name, or h and f expressions.
    std::string energy;
    std::string h_expr;
    std::string f_expr;
    std::optional<double> p;
    std::string grid_t;
    std::string grid_z;
    std::string format = "json";
    std::uint64_t seed = 0;
    std::string out;
    int budget = 2000;
    // radial
    std::string profile;
    std::string packing;
    double radius = 1.0;
    // qc
    std::string family = "ContractingRadial";
    std::string f0;
    // shield, identities
    int samples = 1000;
};

// Parses "MIN:MAX:N".
struct GridRange {
    double min = 0.0;
    double max = 0.0;
    int n = 0;
};
GridRange parse_grid_range(const std::string& s);

// Runs one command. args excludes the program name. The report goes to out
// (or to cfg.out when set), diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace morrey
