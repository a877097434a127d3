#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace hypforge {

struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tridiagonal system (lo, di, up) x = b via the Thomas algorithm, with one
// pass of iterative refinement to push the algebraic residual to rounding.
struct Tridiag {
    std::vector<double> lo, di, up;

    std::size_t n() const { return di.size(); }

    std::vector<double> apply(const std::vector<double>& x) const {
        const std::size_t m = n();
        std::vector<double> y(m);
        for (std::size_t j = 0; j < m; ++j) {
            y[j] = di[j] * x[j];
            if (j > 0) y[j] += lo[j] * x[j - 1];
            if (j + 1 < m) y[j] += up[j] * x[j + 1];
        }
        return y;
    }

    std::vector<double> solve(const std::vector<double>& b, int refine = 2) const {
        std::vector<double> x = solve_once(b);
        for (int k = 0; k < refine; ++k) {
            std::vector<double> r = apply(x);
            for (std::size_t j = 0; j < b.size(); ++j) r[j] = b[j] - r[j];
            const std::vector<double> dx = solve_once(r);
            for (std::size_t j = 0; j < b.size(); ++j) x[j] += dx[j];
        }
        return x;
    }

    double relative_residual(const std::vector<double>& x, const std::vector<double>& b) const {
        const auto Ax = apply(x);
        double rm = 0, bm = 0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            rm = std::max(rm, std::fabs(Ax[j] - b[j]));
            bm = std::max(bm, std::fabs(b[j]));
        }
        return rm / std::max(bm, 1e-300);
    }

    // crude condition diagnostic for error reporting: min |pivot| seen
    double min_pivot() const {
        const std::size_t m = n();
        double c = std::fabs(di[0]);
        double piv = di[0];
        for (std::size_t i = 1; i < m; ++i) {
            const double w = lo[i] / piv;
            piv = di[i] - w * up[i - 1];
            c = std::min(c, std::fabs(piv));
        }
        return c;
    }

  private:
    std::vector<double> solve_once(const std::vector<double>& b) const {
        const std::size_t m = n();
        std::vector<double> c(m), d(m), x(m);
        double piv = di[0];
        if (piv == 0.0) throw solver_error("tridiagonal solve: zero pivot at row 0");
        c[0] = up[0] / piv;
        d[0] = b[0] / piv;
        for (std::size_t i = 1; i < m; ++i) {
            piv = di[i] - lo[i] * c[i - 1];
            if (piv == 0.0)
                throw solver_error("tridiagonal solve: zero pivot at row " + std::to_string(i));
            c[i] = (i + 1 < m) ? up[i] / piv : 0.0;
            d[i] = (b[i] - lo[i] * d[i - 1]) / piv;
        }
        x[m - 1] = d[m - 1];
        for (std::size_t i = m - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
        return x;
    }
};

// General banded LU with partial pivoting. Band element A(i,j) is stored at
// diagonal offset d = i - j; assembly fills d in [-ku, kl], elimination with
// row swaps creates fill-in up to d = -(ku + kl), so storage covers
// d in [-(ku+kl), kl].
class BandedMatrix {
  public:
    BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
        : n_(n), kl_(kl), ku_(ku), rows_(2 * kl + ku + 1), a_(rows_ * n, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return a_[idx(i, j)]; }
    double at(std::size_t i, std::size_t j) const { return a_[idx(i, j)]; }
    std::size_t n() const { return n_; }

    std::vector<double> solve(std::vector<double> b) const {
        std::vector<double> a = a_; // factor a copy
        const std::size_t kl = kl_;
        const std::size_t width = kl_ + ku_; // max superdiagonal reach after pivoting
        auto A = [&](std::size_t i, std::size_t j) -> double& {
            return a[std::size_t(long(i) - long(j) + long(width)) * n_ + j];
        };
        for (std::size_t k = 0; k < n_; ++k) {
            std::size_t imax = k;
            double amax = std::fabs(A(k, k));
            for (std::size_t i = k + 1; i < std::min(n_, k + kl + 1); ++i)
                if (std::fabs(A(i, k)) > amax) { amax = std::fabs(A(i, k)); imax = i; }
            if (amax == 0.0) throw solver_error("banded solve: singular matrix");
            if (imax != k) {
                for (std::size_t j = k; j < std::min(n_, k + width + 1); ++j)
                    std::swap(A(k, j), A(imax, j));
                std::swap(b[k], b[imax]);
            }
            for (std::size_t i = k + 1; i < std::min(n_, k + kl + 1); ++i) {
                const double m = A(i, k) / A(k, k);
                A(i, k) = 0.0;
                for (std::size_t j = k + 1; j < std::min(n_, k + width + 1); ++j)
                    A(i, j) -= m * A(k, j);
                b[i] -= m * b[k];
            }
        }
        std::vector<double> x(n_);
        for (std::size_t i = n_; i-- > 0;) {
            double s = b[i];
            for (std::size_t j = i + 1; j < std::min(n_, i + width + 1); ++j)
                s -= A(i, j) * x[j];
            x[i] = s / A(i, i);
        }
        return x;
    }

  private:
    std::size_t n_, kl_, ku_, rows_;
    std::vector<double> a_;
    std::size_t idx(std::size_t i, std::size_t j) const {
        if (j >= n_ || i >= n_) throw solver_error("banded index out of range");
        const long d = long(i) - long(j);
        if (d < -long(ku_ + kl_) || d > long(kl_)) throw solver_error("banded index outside band");
        return std::size_t(d + long(kl_ + ku_)) * n_ + j;
    }
};

} // namespace hypforge
