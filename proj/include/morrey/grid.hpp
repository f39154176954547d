#pragma once

#include <vector>

namespace morrey {

// n log-spaced points from lo to hi inclusive.
std::vector<double> log_space(double lo, double hi, int n);

struct GridSpec {
    double t_min = 1.0 + 1e-6;
    double t_max = 1e6;
    int n_t = 2000;
    double z_min = 1e-6;
    double z_max = 1e6;
    int n_z = 2000;
    bool include_limits = true;
    double eq_tol = 1e-7;
    double violation_tol = 1e-9;

    void validate() const;
    std::vector<double> t_points() const { return log_space(t_min, t_max, n_t); }
    std::vector<double> z_points() const { return log_space(z_min, z_max, n_z); }
};

} // namespace morrey
