#pragma once

#include "morrey/energy.hpp"
#include "morrey/grid.hpp"
#include "morrey/report.hpp"

#include <string>

namespace morrey {

struct InfimumResult {
    // Minimum over the grid and the tail probes beyond the large end.
    double value = 0.0;
    double argmin = 0.0;
    // Limit extrapolated from geometrically shrinking tail decrements; equals value otherwise.
    double limit = 0.0;
    // The minimum sits at a grid end and the values keep decreasing there.
    bool boundary_argmin = false;
    // The tail decreases without visible convergence; the infimum is not trustworthy.
    bool unreliable = false;
    std::string note;

    double conservative() const { return limit < value ? limit : value; }
};

// inf over t > 1 of t^2 h''(t).
InfimumResult infimum_h0(const SplitEnergy& W, const GridSpec& grid = {});
// inf over z > 0 of z^2 f''(z).
InfimumResult infimum_f0(const SplitEnergy& W, const GridSpec& grid = {});

// Margins of the six split conditions at one stretch ratio t, given f0.
// C3b and C4b are divided by t^2. Each margin comes with the sum of the
// absolute values of its terms, used as a roundoff scale.
struct SplitConditionValues {
    double c1 = 0.0, c2 = 0.0, c3a = 0.0, c3b = 0.0, c4a = 0.0, c4b = 0.0;
    double s1 = 0.0, s2 = 0.0, s3a = 0.0, s3b = 0.0, s4a = 0.0, s4b = 0.0;
};

// C3a is only defined for t > 1; at t = 1 it is reported as +infinity.
SplitConditionValues split_conditions(const SplitEnergy& W, double t, double f0);

ConvexityReport check_split(const SplitEnergy& W, const GridSpec& grid = {});

struct KSGridSpec {
    double x_min = 1e-3;
    double x_max = 1e3;
    int n = 400;
    double diagonal_band = 1e-8;
    double eq_tol = 1e-7;
    double violation_tol = 1e-9;
    // Used instead of violation_tol when the partials come from finite differences.
    double violation_tol_fd = 1e-5;

    // Singular-value range whose ratios and products cover the given split grid.
    static KSGridSpec matched(const GridSpec& grid);
};

ConvexityReport check_knowles_sternberg(const GeneralIsotropicEnergy& W, const KSGridSpec& grid = {});

// Second central difference of s -> W(F + s xi^ (x) eta^) at s = 0 with unit
// directions xi^ = xi/|xi|, eta^ = eta/|eta| and step 1e-4.
double legendre_hadamard(const Energy& W, const Matrix2& F, Vec2 xi, Vec2 eta);

// Same h, volumetric part replaced by -f0 log z.
SplitEnergy reduce_to_log_volumetric(const SplitEnergy& W, const GridSpec& grid = {});

} // namespace morrey
