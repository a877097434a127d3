#include "hypforge/fitting.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

namespace hypforge {

FitResult fit_expansion(const std::vector<double>& rho, const std::vector<double>& y,
                        const std::vector<FitExponent>& exponents, double lo, double hi,
                        double cond_limit) {
    if (exponents.empty()) throw fit_error("fit_expansion: no exponents requested");
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < rho.size(); ++j)
        if (rho[j] >= lo && rho[j] <= hi) idx.push_back(j);
    if (idx.size() < 3 * exponents.size())
        throw fit_error("fit_expansion: window holds fewer than 3x as many nodes as unknowns");

    const double mid = 0.5 * (lo + hi);
    Eigen::MatrixXd A(idx.size(), exponents.size());
    Eigen::VectorXd b(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const double x = rho[idx[r]];
        b(long(r)) = y[idx[r]];
        for (std::size_t c = 0; c < exponents.size(); ++c) {
            const auto& [s, p] = exponents[c];
            A(long(r), long(c)) = std::pow(x / mid, s) * std::pow(std::log(x), double(p));
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cond = sv(0) / sv(sv.size() - 1);
    if (!(cond < cond_limit))
        throw fit_error("fit_expansion: design matrix condition " + std::to_string(cond) +
                        " exceeds limit (window too narrow or basis degenerate)");
    Eigen::VectorXd coef = svd.solve(b);
    const Eigen::VectorXd res = A * coef - b;

    FitResult out;
    out.nodes = idx.size();
    out.condition = cond;
    out.residual_rms = std::sqrt(res.squaredNorm() / double(idx.size()));
    out.coefficients.resize(exponents.size());
    for (std::size_t c = 0; c < exponents.size(); ++c)
        out.coefficients[c] = coef(long(c)) / std::pow(mid, exponents[c].first);
    return out;
}

RateFit rate_fit(const std::vector<double>& x, const std::vector<double>& values) {
    if (x.size() != values.size() || x.size() < 3)
        throw fit_error("rate_fit: need at least 3 pairs");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(values[i] > 0)) throw fit_error("rate_fit: values must be positive");
        const double lx = std::log(x[i]), ly = std::log(values[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly; syy += ly * ly;
    }
    RateFit out;
    const double den = n * sxx - sx * sx;
    out.slope = (n * sxy - sx * sy) / den;
    const double intercept = (sy - out.slope * sx) / n;
    out.constant = std::exp(intercept);
    const double sse = syy - intercept * sy - out.slope * sxy;
    const double sst = syy - sy * sy / n;
    out.r2 = sst > 0 ? 1.0 - sse / sst : 1.0;
    return out;
}

double fit_decay_exponent(const std::vector<double>& rho, const std::vector<double>& y,
                          double lo, double hi, double floor) {
    std::vector<double> xs, vs;
    for (std::size_t j = 0; j < rho.size(); ++j) {
        if (rho[j] < lo || rho[j] > hi) continue;
        const double a = std::fabs(y[j]);
        if (a > floor) { xs.push_back(rho[j]); vs.push_back(a); }
    }
    if (xs.size() < 3) throw fit_error("fit_decay_exponent: too few positive samples in window");
    return rate_fit(xs, vs).slope;
}

} // namespace hypforge
