#pragma once

#include "morrey/energy.hpp"
#include "morrey/grid.hpp"
#include "morrey/report.hpp"

#include <string>
#include <vector>

namespace morrey {

struct SilhavyGrid {
    double base_min = 1e-2;
    double base_max = 1e2;
    int n_base = 40;
    double probe_min = 1e-4;
    double probe_max = 1e4;
    int n_probe = 80;
    // Diagonal bases gamma1 = gamma2 are replaced by (ratio * gamma, gamma).
    double diagonal_ratio = 1.0 + 1e-4;
    int c_scan = 64;
    double violation_tol = 1e-9;
    // Used when the gradient of the energy comes from finite differences.
    double violation_tol_fd = 1e-6;

    void validate() const;
};

// One base point (gamma1 >= gamma2) of the Silhavy criterion
//   g(nu) >= g(gamma) + f1 (nu1 - gamma1) + f2 (nu2 - gamma2) + c (nu1 - gamma1)(nu2 - gamma2)
// with c restricted to [-(f1 - f2)/(gamma1 - gamma2), (f1 + f2)/(gamma1 + gamma2)].
// Margins are divided by 1 + the sum of absolute term sizes.
struct SilhavyProbe {
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
    double c_lo = 0.0;
    double c_hi = 0.0;
    bool near_diagonal = false;
    double chosen_c = 0.0;
    double worst_margin = 0.0;  // at chosen_c
    double worst_nu1 = 0.0;
    double worst_nu2 = 0.0;
    double margin_at_c_lo = 0.0;
    double margin_at_c_hi = 0.0;
    bool feasible = false;
};

struct SilhavyResult {
    std::vector<SilhavyProbe> probes;
    ConvexityReport report;
};

SilhavyResult check_silhavy(const Energy& W, const SilhavyGrid& grid = {});

enum class GrowthVerdict { NotPolyconvex, NoObstruction };

const char* to_string(GrowthVerdict v);

struct GrowthResult {
    GrowthVerdict verdict = GrowthVerdict::NoObstruction;
    std::vector<double> lambdas;  // 1, 1e-1, ..., 1e-12
    std::vector<double> values;   // W(lambda id)
    // d W(lambda id) / d log(lambda) over the last six decades.
    double log_slope = 0.0;
    std::string note;
};

// A polyconvex energy is bounded below by an affine function of (F, det F); along
// lambda id that minorant stays bounded as lambda -> 0. Energies falling without
// bound there cannot be polyconvex.
GrowthResult growth_obstruction(const Energy& W);

struct ScalarClassification {
    bool convex = false;
    // Smallest x^2 g''(x) seen (and for the isochoric test the smallest x g'(x)).
    double worst_second = 0.0;
    double argmin_second = 0.0;
    double worst_first = 0.0;
    double argmin_first = 0.0;
};

// f(det F) alone: convex f is equivalent to every convexity notion.
ScalarClassification classify_volumetric(const ScalarFunction& f, const GridSpec& grid = {},
                                         double tol = 1e-9);
// h(lam_max/lam_min) alone: polyconvex iff h is convex and non-decreasing on [1, inf).
ScalarClassification classify_isochoric(const ScalarFunction& h_upper, const GridSpec& grid = {},
                                        double tol = 1e-9);

enum class MorreyClass { MPlus, MMinus, BothConvex, NeitherConvex };

const char* to_string(MorreyClass c);

struct SplitClassification {
    MorreyClass morrey_class = MorreyClass::NeitherConvex;
    ScalarClassification isochoric;
    ScalarClassification volumetric;
    std::string summary;
};

SplitClassification classify_split(const SplitEnergy& W, const GridSpec& grid = {});

// Silhavy grid search plus the growth obstruction, merged into one report.
ConvexityReport check_polyconvex(const Energy& W, const SilhavyGrid& grid = {});

} // namespace morrey
