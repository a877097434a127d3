#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hypforge/fd.hpp"
#include "hypforge/field.hpp"
#include "hypforge/grid.hpp"

namespace hypforge {

struct metric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Compactified radial metric  gbar = a(rho)^2 drho x drho + b(rho)^2 ghat
// on (0, rho_c] x S^2, with physical counterpart g = rho^-2 gbar.
//
// Profiles may carry exact first and second derivatives (supplied by
// closed-form constructors and propagated through gluing); operators fall
// back to finite differences when jets are absent. Differentiated cutoff
// profiles concentrate at scale eps, so exact jets matter there.
//
// closes_at_center: b(rho_c) = 0, the grid's inner end is a geometric center.
// center_chart_singular: the chart's a blows up at rho_c (smooth defining
// function case, e.g. the Euclidean compactification of hyperbolic space);
// the stored last-node value of a is a finite extrapolated placeholder and
// operators never rely on node-n metric data beyond the extrapolation zone.
class RadialMetric {
  public:
    RadialMetric(RadialGrid grid, std::vector<double> a, std::vector<double> b,
                 bool closes_at_center, bool center_chart_singular = false)
        : grid_(std::move(grid)), a_(std::move(a)), b_(std::move(b)),
          closes_(closes_at_center), chart_singular_(center_chart_singular) {
        if (a_.size() != grid_.n() || b_.size() != grid_.n())
            throw metric_error("RadialMetric: profile size mismatch");
        const std::size_t last = grid_.n() - 1;
        for (std::size_t j = 0; j < last; ++j) {
            if (!(a_[j] > 0) || !(b_[j] > 0))
                throw metric_error("RadialMetric: profiles must be positive for rho < rho_c");
        }
        if (!(a_[last] > 0)) throw metric_error("RadialMetric: a(rho_c) must be positive");
        if (!closes_ && !(b_[last] > 0))
            throw metric_error("RadialMetric: non-closing metric needs b(rho_c) > 0");
    }

    const RadialGrid& grid() const { return grid_; }
    const std::vector<double>& a() const { return a_; }
    const std::vector<double>& b() const { return b_; }
    bool closes_at_center() const { return closes_; }
    bool center_chart_singular() const { return chart_singular_; }

    void set_jets(std::vector<double> da, std::vector<double> d2a,
                  std::vector<double> db, std::vector<double> d2b) {
        da_ = std::move(da); d2a_ = std::move(d2a);
        db_ = std::move(db); d2b_ = std::move(d2b);
    }
    bool has_jets() const { return da_.has_value(); }

    // derivative profiles: exact when supplied, FD otherwise
    std::vector<double> da(FdOrder ord = FdOrder::two) const {
        return da_ ? *da_ : fd_d1(a_, grid_.h(), ord);
    }
    std::vector<double> d2a(FdOrder ord = FdOrder::two) const {
        return d2a_ ? *d2a_ : fd_d2(a_, grid_.h(), ord);
    }
    std::vector<double> db(FdOrder ord = FdOrder::two) const {
        return db_ ? *db_ : fd_d1(b_, grid_.h(), ord);
    }
    std::vector<double> d2b(FdOrder ord = FdOrder::two) const {
        return d2b_ ? *d2b_ : fd_d2(b_, grid_.h(), ord);
    }

    // |drho|^2_gbar = 1/a^2 at the boundary end, extrapolated to rho = 0
    double boundary_drho_squared() const {
        std::vector<double> u(6);
        for (std::size_t j = 0; j < 6; ++j) u[j] = 1.0 / (a_[j] * a_[j]);
        return extrapolate_to_boundary(grid_.nodes(), u, 6);
    }
    bool asymptotically_hyperbolic(double tol = 1e-3) const {
        return std::fabs(boundary_drho_squared() - 1.0) <= tol;
    }
    double boundary_b() const {
        std::vector<double> bb(b_.begin(), b_.begin() + 6);
        return extrapolate_to_boundary(grid_.nodes(), bb, 6);
    }

  private:
    RadialGrid grid_;
    std::vector<double> a_, b_;
    bool closes_, chart_singular_;
    std::optional<std::vector<double>> da_, d2a_, db_, d2b_;
};

// ------------------------------------------------------------------ catalog

// Euclidean compactification of hyperbolic space: gbar = delta on the unit
// ball with rho = (1-r^2)/2, rho_c = 1/2. The chart is degenerate at the
// center (a ~ (1-2rho)^{-1/2}), so the last-node a is an extrapolated
// placeholder and the metric is flagged chart-singular.
inline RadialMetric hyperbolic_delta_chart(const RadialGrid& g) {
    if (std::fabs(g.rho_c() - 0.5) > 1e-14)
        throw metric_error("hyperbolic_delta_chart: rho_c must be 1/2");
    const std::size_t n = g.n();
    std::vector<double> a(n), b(n), da(n), d2a(n), db(n), d2b(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = 1.0 - 2.0 * g.rho(j);
        b[j] = std::sqrt(t);
        if (j + 1 < n) {
            a[j] = 1.0 / b[j];
            da[j] = std::pow(t, -1.5);
            d2a[j] = 3.0 * std::pow(t, -2.5);
        }
        db[j] = (j + 1 < n) ? -std::pow(t, -0.5) : 0.0;
        d2b[j] = (j + 1 < n) ? -std::pow(t, -1.5) : 0.0;
    }
    // finite placeholders at the center node
    a[n - 1] = 3 * a[n - 2] - 3 * a[n - 3] + a[n - 4];
    da[n - 1] = da[n - 2];
    d2a[n - 1] = d2a[n - 2];
    db[n - 1] = db[n - 2];
    d2b[n - 1] = d2b[n - 2];
    RadialMetric m(g, std::move(a), std::move(b), true, true);
    m.set_jets(std::move(da), std::move(d2a), std::move(db), std::move(d2b));
    return m;
}

// Flat space in the shifted chart a = 1, b = rho_c - rho (rho = rho_c - r).
inline RadialMetric flat_shifted_chart(const RadialGrid& g) {
    const std::size_t n = g.n();
    std::vector<double> a(n, 1.0), b(n), da(n, 0.0), d2a(n, 0.0), db(n, -1.0), d2b(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) b[j] = g.rho_c() - g.rho(j);
    RadialMetric m(g, std::move(a), std::move(b), true);
    m.set_jets(std::move(da), std::move(d2a), std::move(db), std::move(d2b));
    return m;
}

// Non-closing operator test metric: a = 1, b = 0.8 + 0.3 rho. AH at rho = 0,
// truncated inner end at rho_c (Dirichlet closure for solves). The divergence-
// free sector is nontrivial here, which makes it the natural domain for
// exercising the momentum solve's decay rates.
inline RadialMetric slab_metric(const RadialGrid& g) {
    const std::size_t n = g.n();
    std::vector<double> a(n, 1.0), b(n), da(n, 0.0), d2a(n, 0.0), db(n, 0.3), d2b(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) b[j] = 0.8 + 0.3 * g.rho(j);
    RadialMetric m(g, std::move(a), std::move(b), false);
    m.set_jets(std::move(da), std::move(d2a), std::move(db), std::move(d2b));
    return m;
}

// Perturbed delta-chart metric: a = 1, b = sqrt(1-2rho)(1 + rho^3/10).
inline RadialMetric perturbed_delta_chart(const RadialGrid& g) {
    const std::size_t n = g.n();
    std::vector<double> a(n, 1.0), b(n), da(n, 0.0), d2a(n, 0.0), db(n), d2b(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double r = g.rho(j), t = 1.0 - 2.0 * r, p = 1.0 + 0.1 * r * r * r;
        const double s = std::sqrt(std::max(t, 0.0));
        b[j] = s * p;
        if (j + 1 < n) {
            const double sp = -1.0 / s, spp = -1.0 / (s * t);
            db[j] = sp * p + s * 0.3 * r * r;
            d2b[j] = spp * p + 2 * sp * 0.3 * r * r + s * 0.6 * r;
        } else {
            db[j] = d2b[j] = 0.0;
        }
    }
    db[n - 1] = db[n - 2]; d2b[n - 1] = d2b[n - 2];
    RadialMetric m(g, std::move(a), std::move(b), true, true);
    m.set_jets(std::move(da), std::move(d2a), std::move(db), std::move(d2b));
    return m;
}

} // namespace hypforge
