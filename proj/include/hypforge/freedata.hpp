#pragma once

#include <optional>
#include <vector>

#include "hypforge/field.hpp"
#include "hypforge/metric.hpp"

namespace hypforge {

struct freedata_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Smooth step built from exp(-1/x): 0 for x <= 0, 1 for x >= 1, C^infty and
// monotone, with closed-form first and second derivatives.
struct StepJet {
    double value, d1, d2;
};
StepJet smooth_step(double x);

// Cutoff family chi_eps(rho) = chi(rho/eps) with chi = step(x-1): vanishes for
// rho <= eps, equals 1 exactly for rho >= 2 eps.
class CutoffProfile {
  public:
    CutoffProfile(double eps, double rho_c);
    double eps() const { return eps_; }
    StepJet at(double rho) const; // chi and its first two rho-derivatives

  private:
    double eps_;
};

// Preferred background for a compactified AH input metric: product
// (a = 1, b = b0 = induced boundary radius) on [0, rho_glue], blended by a
// convex combination of squared profiles into the flat closing reference
// b = rho_c - rho on [2 rho_glue, rho_c]. Exact jets are attached.
RadialMetric make_background(const RadialMetric& gbar, double rho_glue);

struct FamilyEntry {
    double eps;
    RadialMetric lambda;     // compactified profiles of lambda_eps (with jets)
    RadialTT mu;             // physical lambda-frame profile of mu_eps
    RadialField mu_bar;      // profile of rho*mu_eps in the lambda_bar frame
};

// Free data family: lambda_bar_eps = chi_eps gbar + (1-chi_eps) hbar combined
// on squared profiles (hence always a metric), mu_eps = chi_eps Sigma.
// Nodes with chi == 1 copy the input profiles bitwise.
struct FreeDataFamily {
    RadialMetric background;
    double rho_glue;
    std::vector<FamilyEntry> entries;
};

FreeDataFamily build_family(const RadialMetric& gbar, const RadialTT& Sigma_physical,
                            const std::vector<double>& eps_list,
                            std::optional<RadialMetric> background_override = std::nullopt,
                            double glue_fraction = 0.25);

} // namespace hypforge
