#pragma once

#include <utility>
#include <vector>

#include "hypforge/field.hpp"

namespace hypforge {

struct fit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// exponent/log-power pair (s, p) of a fit monomial rho^s log^p(rho)
using FitExponent = std::pair<double, unsigned>;

struct FitResult {
    std::vector<double> coefficients; // one per requested exponent
    double residual_rms = 0;
    double condition = 0;             // of the midpoint-scaled design matrix
    std::size_t nodes = 0;
};

// Least-squares fit of samples (rho_j, y_j) on [lo, hi] against the monomials
// rho^s log^p(rho). Columns are scaled by the window midpoint to control
// conditioning; a condition number above cond_limit is a conditioning error.
FitResult fit_expansion(const std::vector<double>& rho, const std::vector<double>& y,
                        const std::vector<FitExponent>& exponents, double lo, double hi,
                        double cond_limit = 1e8);

inline FitResult fit_expansion(const RadialField& f, const std::vector<FitExponent>& exponents,
                               double lo, double hi, double cond_limit = 1e8) {
    return fit_expansion(f.grid().nodes(), f.values(), exponents, lo, hi, cond_limit);
}

struct RateFit {
    double slope = 0;
    double constant = 0; // value of the fitted line at x = 1
    double r2 = 0;
};

// log-log least squares of positive (x, value) pairs
RateFit rate_fit(const std::vector<double>& x, const std::vector<double>& values);

// leading decay exponent of a positive profile over the window: the slope of
// log|y| against log(rho)
double fit_decay_exponent(const std::vector<double>& rho, const std::vector<double>& y,
                          double lo, double hi, double floor = 1e-300);

} // namespace hypforge
