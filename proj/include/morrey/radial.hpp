#pragma once

#include "morrey/energy.hpp"
#include "morrey/matrix2.hpp"

#include <json.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace morrey {

enum class ProfileClass { Expanding, Contracting, Neither, Identity };

const char* to_string(ProfileClass c);

// Radial displacement v on [0, R] with v(0) = 0 and v(R) = R.
// The deformation is phi(x) = v(|x|) x / |x|.
class RadialProfile {
public:
    using Fn = std::function<double(double)>;

    // dv may be empty; derivatives then come from finite differences.
    // Breakpoints mark interior points where v'' may jump.
    RadialProfile(std::string description, double R, Fn v, Fn dv = {}, std::vector<double> breakpoints = {});

    // R (r / R)^k with k > 0.
    static RadialProfile power(double k, double R = 1.0);
    // Expression in the variable r, differentiated automatically.
    static RadialProfile expression(const std::string& src, double R = 1.0);
    // v = mu r on [0, core], then v / r moves from mu to 1 along a C1 smoothstep.
    static RadialProfile linear_core(double mu, double core, double R = 1.0);
    // sum_i w_i R (r / R)^k_i with w_i > 0 normalized to sum 1 and k_i > 0.
    static RadialProfile blend(const std::vector<double>& weights, const std::vector<double>& exponents,
                               double R = 1.0);

    const std::string& description() const { return description_; }
    double R() const { return R_; }
    double value(double r) const;
    double derivative(double r) const;
    bool analytic_derivative() const { return static_cast<bool>(dv_); }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    // Radius of the affine core (0 if none) and the slope v / r inside it.
    double core_radius() const { return core_; }
    double core_slope() const { return core_slope_; }
    ProfileClass tag() const { return tag_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    std::string description_;
    double R_ = 1.0;
    Fn v_;
    Fn dv_;
    std::vector<double> breakpoints_;
    double core_ = 0.0;
    double core_slope_ = 1.0;
    ProfileClass tag_ = ProfileClass::Neither;
    std::vector<std::string> warnings_;
};

// (v'(r), v(r) / r) for 0 < r <= R.
std::pair<double, double> radial_gradient_singular_values(const RadialProfile& v, double r);

// Gradient of x -> v(|x|) x / |x| at a point y != 0.
Matrix2 radial_gradient(const RadialProfile& v, Vec2 y);

struct RadialIntegral {
    double value = 0.0;
    double error = 0.0;
    // Part of value from r < R e^-S.
    double tail = 0.0;
};

struct RadialQuadrature {
    // The radial variable is r = R e^s with s in [-s_max, 0].
    double s_max = 50.0;
    double rel_tol = 1e-12;
    double max_rel_error = 1e-8;
    int max_depth = 10;
    // Chunks of width s_max added below -s_max until one is negligible.
    int max_tail_chunks = 13;
    // Angular nodes for energies without an ordered singular-value form.
    int angular_nodes = 64;
};

// int_{B_R} W(F0 grad phi) dx for the radial map phi of v.
RadialIntegral radial_energy_integral(const Energy& W, const RadialProfile& v,
                                      const Matrix2& F0 = Matrix2::identity(), const RadialQuadrature& q = {});
double radial_energy(const Energy& W, const RadialProfile& v, const Matrix2& F0 = Matrix2::identity(),
                     const RadialQuadrature& q = {});

// Tags from sampled inequalities v/r >= v' >= 0 (Expanding) and v' >= v/r >= 0 (Contracting).
ProfileClass classify_profile(const RadialProfile& v, int n_samples = 1000, double tol = 1e-9);

// Inverse by bracketing root-finding; throws NotMonotone unless v increases strictly on samples.
RadialProfile invert_profile(const RadialProfile& v);

struct ConstancyEntry {
    std::string profile;
    ProfileClass tag = ProfileClass::Neither;
    double R = 1.0;
    double energy = 0.0;
    double error = 0.0;
    // pi R^2 W(identity)
    double reference = 0.0;
    double margin = 0.0;
};

struct ConstancyReport {
    std::string energy_name;
    std::vector<ConstancyEntry> entries;
    double worst_abs_margin() const;
    double min_margin() const;
};

ConstancyReport constancy_check(const Energy& W, const std::vector<RadialProfile>& family);

nlohmann::json to_json(const ConstancyReport& r);

// A ball replaced by the radial map of its profile, scaled by its boundary map lambda Q.
// Children sit inside the affine core of the profile.
// Missing lambda or rotation_angle is inherited from the surrounding affine map.
struct BallSpec {
    Vec2 center;
    double radius = 0.0;
    std::shared_ptr<const RadialProfile> profile;
    std::optional<double> lambda;
    std::optional<double> rotation_angle;
    std::vector<BallSpec> children;
};

struct PiecewiseRadialMap {
    double domain_radius = 1.0;
    double lambda = 1.0;
    double rotation_angle = 0.0;
    std::vector<BallSpec> balls;
};

// Accepts a list of balls or {"domain_radius", "lambda", "rotation_angle", "balls"}.
// Each ball is {center, radius, profile, lambda, rotation_angle, children}. The profile is an
// expression in r or one of {"kind": "power", "k"}, {"kind": "linear_core", "mu", "core"} with
// core as a fraction of the radius, {"kind": "blend", "weights", "exponents"}.
PiecewiseRadialMap packing_from_json(const nlohmann::json& doc);

class PackingEvaluator {
public:
    // Throws Overlap or Nesting errors for invalid layouts.
    explicit PackingEvaluator(PiecewiseRadialMap spec);

    const PiecewiseRadialMap& spec() const { return spec_; }
    Vec2 map(Vec2 x) const;
    Matrix2 gradient(Vec2 x) const;
    double total_energy(const Energy& W, const RadialQuadrature& q = {}) const;
    // Energy of x -> left phi(x) over the domain.
    RadialIntegral energy_integral(const Energy& W, const Matrix2& left = Matrix2::identity(),
                                   const RadialQuadrature& q = {}) const;

    struct Node;

private:
    PiecewiseRadialMap spec_;
    std::shared_ptr<const std::vector<Node>> roots_;
};

PackingEvaluator build_packing(const PiecewiseRadialMap& spec);

} // namespace morrey
