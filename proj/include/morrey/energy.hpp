#pragma once

#include "morrey/jet.hpp"
#include "morrey/matrix2.hpp"
#include "morrey/scalar_function.hpp"

#include <functional>
#include <string>
#include <utility>

namespace morrey {

// Value and partial derivatives of g(x, y) at unordered singular values.
struct IsotropicPartials {
    double g = 0.0;
    double gx = 0.0;
    double gy = 0.0;
    double gxx = 0.0;
    double gyy = 0.0;
    double gxy = 0.0;
};

// W(F) = h(lam_max / lam_min) + f(det F).
// h is given on t >= 1 and extended to t < 1 through h(t) = h(1/t).
class SplitEnergy {
public:
    SplitEnergy(std::string name, ScalarFunction h_upper, ScalarFunction f);

    const std::string& name() const { return name_; }
    const ScalarFunction& h_upper() const { return h_upper_; }
    const ScalarFunction& f() const { return f_; }
    const std::string& h_source() const { return h_upper_.source(); }
    const std::string& f_source() const { return f_.source(); }

    Jet2 h_jet(double t) const;
    Jet2 f_jet(double z) const { return f_.jet(z); }
    double h(double t) const { return h_jet(t).v; }
    double h1(double t) const { return h_jet(t).d1; }
    double h2(double t) const { return h_jet(t).d2; }

    double evaluate(const Matrix2& F) const;
    // g(x, y) for unordered positive singular values.
    double g(double x, double y) const;
    IsotropicPartials partials(double x, double y) const;

    SplitEnergy renamed(std::string name) const;

private:
    std::string name_;
    ScalarFunction h_upper_;
    ScalarFunction f_;
};

// W(F) = g(lam_1, lam_2) with g symmetric in its arguments.
class GeneralIsotropicEnergy {
public:
    using ValueFn = std::function<double(double, double)>;
    using PartialsFn = std::function<IsotropicPartials(double, double)>;

    GeneralIsotropicEnergy(std::string name, ValueFn g, PartialsFn partials = {},
                           std::string description = {});

    static GeneralIsotropicEnergy from_split(const SplitEnergy& W);

    const std::string& name() const { return name_; }
    const std::string& description() const { return description_; }
    bool has_analytic_partials() const { return static_cast<bool>(partials_); }

    double g(double x, double y) const { return g_(x, y); }
    // Analytic when available, else central differences.
    IsotropicPartials partials(double x, double y) const;
    double evaluate(const Matrix2& F) const;

    // Largest |g(x,y) - g(y,x)| relative to 1 + |g| over log-spaced samples.
    double symmetry_defect(double lo = 1e-2, double hi = 1e2, int n = 25) const;

private:
    std::string name_;
    ValueFn g_;
    PartialsFn partials_;
    std::string description_;
};

enum class EnergyDomain { GLPlus, AllMatrices };

// Type-erased energy on 2x2 matrices. Isotropic energies also carry their
// ordered singular-value form ghat(lam_max, lam_min) and its gradient.
class Energy {
public:
    using MatrixFn = std::function<double(const Matrix2&)>;
    using OrderedFn = std::function<double(double, double)>;
    using OrderedGradFn = std::function<std::pair<double, double>(double, double)>;

    Energy(std::string name, MatrixFn fn, EnergyDomain domain = EnergyDomain::GLPlus);

    static Energy from(const SplitEnergy& W);
    static Energy from(const GeneralIsotropicEnergy& W);

    Energy with_ordered(OrderedFn ghat, OrderedGradFn grad = {}) const;
    Energy renamed(std::string name) const;

    const std::string& name() const { return name_; }
    EnergyDomain domain() const { return domain_; }
    bool isotropic() const { return static_cast<bool>(ghat_); }
    bool has_analytic_gradient() const { return static_cast<bool>(grad_); }

    double operator()(const Matrix2& F) const { return fn_(F); }
    // ghat(a, b) with a >= b > 0; arguments are swapped if given in the other order.
    double ordered(double a, double b) const;
    // (d ghat / d lam_max, d ghat / d lam_min); central differences if no analytic form.
    std::pair<double, double> ordered_gradient(double a, double b) const;

private:
    std::string name_;
    MatrixFn fn_;
    EnergyDomain domain_;
    OrderedFn ghat_;
    OrderedGradFn grad_;
};

} // namespace morrey
