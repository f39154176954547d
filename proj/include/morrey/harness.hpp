#pragma once

#include "morrey/energy.hpp"
#include "morrey/matrix2.hpp"
#include "morrey/radial.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace morrey {

enum class FamilyKind { TrigBubble, ContractingRadial, MollifiedLaminate, Packing };

const char* to_string(FamilyKind k);
FamilyKind family_kind_from_string(const std::string& s);

// Parameterized perturbations theta with zero boundary values; zero parameters give theta = 0.
//   TrigBubble:        unit square, theta = sum_{k1,k2 <= modes} a_k sin(pi k1 x1) sin(pi k2 x2), 2 modes^2 params.
//   ContractingRadial: unit ball, theta = F0 (phi - x) for phi radial with v = sum_i w_i r^(k_i),
//                      w = softmax(a), k_i = 1 + 3 tanh(b_i)^2, params (a_1.., b_1..).
//   MollifiedLaminate: unit square in coordinates (eta.x, eta_perp.x), theta = (amp / freq) xi T(freq u) chi,
//                      T a triangle wave with rounded corners, chi a cutoff of width delta; params
//                      (angle of xi, angle of eta, amp).
//   Packing:           balls of a layout inside the unit ball, each with a ContractingRadial profile.
struct PerturbationFamily {
    FamilyKind kind = FamilyKind::TrigBubble;
    int modes = 2;
    int blend_terms = 3;
    int frequency = 8;
    double delta = 0.05;
    double rounding = 0.05;
    // TrigBubble: cells per axis. Laminate: subdivisions of each smooth piece.
    // Radial kinds: the adaptive tolerance is 1e-10 / resolution.
    int resolution = 4;
    nlohmann::json layout;

    static PerturbationFamily trig_bubble(int modes = 2);
    static PerturbationFamily contracting_radial(int terms = 3);
    static PerturbationFamily mollified_laminate(int frequency = 8);
    static PerturbationFamily packing(nlohmann::json layout = default_packing_layout());
    static nlohmann::json default_packing_layout();

    std::size_t n_params() const;
    void validate() const;
    PerturbationFamily refined(int factor) const;
    nlohmann::json to_json() const;
};

struct ExcessEnergy {
    // Value at resolution 2n and |I_n - I_2n| plus the quadrature's own estimate.
    double value = 0.0;
    double error = 0.0;
    double coarse = 0.0;
    // |I_n - I_2n| alone, for the convergence gate.
    double resolution_gap = 0.0;
};

// int_Omega W(F0 + grad theta) - W(F0) dx. Throws LeftGLPlus when a node leaves det > 0.
ExcessEnergy excess_energy(const Energy& W, const Matrix2& F0, const PerturbationFamily& family,
                           const std::vector<double>& params);

enum class QCVerdict { NoViolationFound, CandidateViolation, EnergyNeutralFamily };

const char* to_string(QCVerdict v);

struct SearchOptions {
    int budget = 2000;
    std::uint64_t seed = 1;
    // Nelder-Mead stops a restart when the simplex is smaller than this.
    double simplex_tol = 1e-6;
    int max_restarts = 64;
};

struct QCResult {
    QCVerdict verdict = QCVerdict::NoViolationFound;
    std::string energy_name;
    Matrix2 F0 = Matrix2::identity();
    PerturbationFamily family;
    double min_excess = 0.0;
    double error = 0.0;
    std::vector<double> argmin;
    int evaluations = 0;
    // Samples scored +inf: outside GL+ or non-finite energy, and quadrature gap |I_n - I_2n| >= 1e-6.
    int rejected = 0;
    int unresolved = 0;
    int restarts = 0;
    // Largest |I| / (10 error) over accepted samples; at most 1 for a neutral family.
    double neutral_ratio = 0.0;
    bool converged = true;
    double refined_excess = 0.0;
    double refined_error = 0.0;
    bool requires_verification = false;
    std::uint64_t seed = 0;
    std::vector<std::string> notes;
};

nlohmann::json to_json(const QCResult& r);

QCResult search_violation(const Energy& W, const Matrix2& F0, const PerturbationFamily& family,
                          const SearchOptions& options = {});

struct LaminateResult {
    double excess = 0.0;
    // Split of the excess between the region where the cutoff is 1 and the boundary layer.
    double interior = 0.0;
    double layer = 0.0;
    double error = 0.0;
};

LaminateResult laminate_second_variation(const Energy& W, const Matrix2& F0, Vec2 xi, Vec2 eta, int frequency,
                                         double amplitude, double delta = 0.05, double rounding = 0.05,
                                         int resolution = 1);

} // namespace morrey
