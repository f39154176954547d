#pragma once

#include "morrey/energy.hpp"
#include "morrey/matrix2.hpp"

#include <complex>
#include <string>
#include <vector>

namespace morrey {

using Complex = std::complex<double>;

// F = [[Re z + Re w, Im w - Im z], [Im z + Im w, Re z - Re w]]
struct ComplexPair {
    Complex z;
    Complex w;
};

ComplexPair to_complex(const Matrix2& F);
Matrix2 from_complex(const ComplexPair& zw);

struct BurkholderParams {
    double p;

    explicit BurkholderParams(double p);
    double p_star() const;   // max(p, p/(p - 1))
    double alpha_p() const;  // p (1 - 1/p_star)^(p - 1)
};

// B_p(F) = -(p/2 det F + (1 - p/2) |F|_op^2) |F|_op^(p - 2), defined on all matrices; needs p >= 2.
double burkholder_bp(const Matrix2& F, const BurkholderParams& params);
// L_p(z, w) = (|z| - (p - 1)|w|)(|z| + |w|)^(p - 1); needs p >= 2.
double burkholder_lp(const ComplexPair& zw, const BurkholderParams& params);
// B_star(F) = -1/2 (1 + log |F|_op^2) det F + 1/2 |F|_op^2, the p-derivative of B_p at p = 2.
double burkholder_bstar(const Matrix2& F);

struct InequalityMargin {
    double margin = 0.0;  // RHS - LHS
    double scale = 0.0;   // |z|^p + (p_star - 1)^p |w|^p + |RHS|
    double relative() const { return scale > 0.0 ? margin / scale : margin; }
};

// |z|^p - (p_star - 1)^p |w|^p <= alpha_p (|z| - (p_star - 1)|w|)(|z| + |w|)^(p - 1), any p > 1.
InequalityMargin burkholder_inequality(const ComplexPair& zw, const BurkholderParams& params);

Energy burkholder_energy(double p);
Energy bstar_energy();

// W#(F) = det F W(F^-1). Isotropic energies go through ghat#(a, b) = a b ghat(1/b, 1/a).
Energy shield(const Energy& W);

struct IdentityCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    // |lhs - rhs| / max(1, |lhs|)
    double margin = 0.0;
};

struct IdentityReport {
    std::vector<IdentityCheck> checks;
    std::vector<std::string> notes;
    double worst() const;
};

// Complex-variable identities for det F, |F|^2, lam_max, lam_min and the distortions.
// The lam_min and ratio identities need det F >= 0 and det F > 0 and are skipped otherwise.
IdentityReport identity_suite(const Matrix2& F);

} // namespace morrey
