#pragma once

#include "morrey/jet.hpp"

#include <functional>
#include <string>

namespace morrey {

enum class DerivativeSource { Analytic, AutoDiff, FiniteDifference };

const char* to_string(DerivativeSource s);

// A real function of one variable together with its first two derivatives.
class ScalarFunction {
public:
    using JetFn = std::function<Jet2(double)>;

    ScalarFunction() = default;

    static ScalarFunction analytic(JetFn fn, std::string source);
    static ScalarFunction autodiff(JetFn fn, std::string source);
    // Derivatives by central differences of the value function.
    static ScalarFunction from_values(std::function<double(double)> fn, std::string source);

    Jet2 jet(double x) const { return fn_(x); }
    double value(double x) const { return fn_(x).v; }
    double d1(double x) const { return fn_(x).d1; }
    double d2(double x) const { return fn_(x).d2; }

    const std::string& source() const { return source_; }
    DerivativeSource derivative_source() const { return derivative_source_; }
    bool valid() const { return static_cast<bool>(fn_); }

private:
    ScalarFunction(JetFn fn, std::string source, DerivativeSource ds)
        : fn_(std::move(fn)), source_(std::move(source)), derivative_source_(ds) {}

    JetFn fn_;
    std::string source_;
    DerivativeSource derivative_source_ = DerivativeSource::Analytic;
};

} // namespace morrey
