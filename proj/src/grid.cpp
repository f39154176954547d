#include "morrey/grid.hpp"

#include "morrey/errors.hpp"

#include <cmath>

namespace morrey {

std::vector<double> log_space(double lo, double hi, int n)
{
    if (n < 2 || !(lo > 0.0) || !(hi > lo))
        throw Error(ErrorKind::InvalidArgument, "log_space needs 0 < lo < hi and n >= 2");
    std::vector<double> out(static_cast<std::size_t>(n));
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

void GridSpec::validate() const
{
    if (!(t_min > 1.0) || !(t_max > t_min))
        throw Error(ErrorKind::InvalidArgument, "t grid needs 1 < t_min < t_max");
    if (!(z_min > 0.0) || !(z_max > z_min))
        throw Error(ErrorKind::InvalidArgument, "z grid needs 0 < z_min < z_max");
    if (n_t < 2 || n_z < 2)
        throw Error(ErrorKind::InvalidArgument, "grids need at least two points");
    if (!(eq_tol >= 0.0) || !(violation_tol >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "tolerances must be non-negative");
}

} // namespace morrey
