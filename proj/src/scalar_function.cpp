#include "morrey/scalar_function.hpp"

#include <algorithm>
#include <cmath>

namespace morrey {

const char* to_string(DerivativeSource s)
{
    switch (s) {
    case DerivativeSource::Analytic: return "analytic";
    case DerivativeSource::AutoDiff: return "autodiff";
    case DerivativeSource::FiniteDifference: return "finite-difference";
    }
    return "unknown";
}

ScalarFunction ScalarFunction::analytic(JetFn fn, std::string source)
{
    return ScalarFunction(std::move(fn), std::move(source), DerivativeSource::Analytic);
}

ScalarFunction ScalarFunction::autodiff(JetFn fn, std::string source)
{
    return ScalarFunction(std::move(fn), std::move(source), DerivativeSource::AutoDiff);
}

ScalarFunction ScalarFunction::from_values(std::function<double(double)> fn, std::string source)
{
    auto jet = [fn = std::move(fn)](double x) {
        // Step sizes near the optimum for first and second central differences.
        const double scale = std::max(1.0, std::abs(x));
        const double h1 = 6e-6 * scale;
        const double h2 = 1e-4 * scale;
        const double f0 = fn(x);
        const double d1 = (fn(x + h1) - fn(x - h1)) / (2.0 * h1);
        const double d2 = (fn(x + h2) - 2.0 * f0 + fn(x - h2)) / (h2 * h2);
        return Jet2{f0, d1, d2};
    };
    return ScalarFunction(std::move(jet), std::move(source), DerivativeSource::FiniteDifference);
}

} // namespace morrey
