#pragma once

#include "morrey/energy.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace morrey {

struct BuiltinParams {
    double mu = 1.0;     // Hencky shear modulus
    double kappa = 1.0;  // Hencky bulk modulus
    double k = 1.0;      // exponentiated Hencky, isochoric exponent
    double k_hat = 1.0;  // exponentiated Hencky, volumetric exponent
    double p = 2.0;      // Burkholder exponent
    double alpha = 2.0;  // Hadamard exponent

    void validate() const;
};

SplitEnergy w_magic_plus();
SplitEnergy w_magic_minus();
SplitEnergy w_smooth();
// Solution family of the 3b equation with volumetric part -log z; c = 1 is the catalog member.
SplitEnergy w_3b(double c = 1.0);
SplitEnergy k_distortion();
SplitEnergy det_energy();

GeneralIsotropicEnergy hencky(double mu = 1.0, double kappa = 1.0);
GeneralIsotropicEnergy exp_hencky(double mu = 1.0, double kappa = 1.0, double k = 1.0,
                                  double k_hat = 1.0);
// |F|^alpha + f(det F); f defaults to -log z.
GeneralIsotropicEnergy hadamard(double alpha = 2.0);
GeneralIsotropicEnergy hadamard(double alpha, const ScalarFunction& f);
GeneralIsotropicEnergy frobenius_sq();

using CatalogEnergy = std::variant<SplitEnergy, GeneralIsotropicEnergy>;

struct CatalogEntry {
    std::string name;
    std::string description;
    CatalogEnergy energy;

    const SplitEnergy* split() const { return std::get_if<SplitEnergy>(&energy); }
    GeneralIsotropicEnergy general() const;
    Energy as_energy() const;
};

std::vector<CatalogEntry> catalog(const BuiltinParams& params = {});
std::optional<CatalogEntry> find_energy(const std::string& name, const BuiltinParams& params = {});

} // namespace morrey
