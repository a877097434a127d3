#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace hypforge {

// Finite-difference stencils on uniform grids. Centered interior stencils
// with one-sided closures of matching order at both ends.
enum class FdOrder { two, four };

inline std::vector<double> fd_d1(const std::vector<double>& y, double h, FdOrder ord = FdOrder::two) {
    const std::size_t n = y.size();
    std::vector<double> out(n);
    if (ord == FdOrder::two) {
        for (std::size_t j = 1; j + 1 < n; ++j) out[j] = (y[j + 1] - y[j - 1]) / (2 * h);
        out[0] = (-3 * y[0] + 4 * y[1] - y[2]) / (2 * h);
        out[n - 1] = (3 * y[n - 1] - 4 * y[n - 2] + y[n - 3]) / (2 * h);
    } else {
        for (std::size_t j = 2; j + 2 < n; ++j)
            out[j] = (y[j - 2] - 8 * y[j - 1] + 8 * y[j + 1] - y[j + 2]) / (12 * h);
        out[0] = (-25 * y[0] + 48 * y[1] - 36 * y[2] + 16 * y[3] - 3 * y[4]) / (12 * h);
        out[1] = (-3 * y[0] - 10 * y[1] + 18 * y[2] - 6 * y[3] + y[4]) / (12 * h);
        out[n - 1] = (25 * y[n - 1] - 48 * y[n - 2] + 36 * y[n - 3] - 16 * y[n - 4] + 3 * y[n - 5]) / (12 * h);
        out[n - 2] = (3 * y[n - 1] + 10 * y[n - 2] - 18 * y[n - 3] + 6 * y[n - 4] - y[n - 5]) / (12 * h);
    }
    return out;
}

inline std::vector<double> fd_d2(const std::vector<double>& y, double h, FdOrder ord = FdOrder::two) {
    const std::size_t n = y.size();
    std::vector<double> out(n);
    const double h2 = h * h;
    if (ord == FdOrder::two) {
        for (std::size_t j = 1; j + 1 < n; ++j) out[j] = (y[j + 1] - 2 * y[j] + y[j - 1]) / h2;
        out[0] = (2 * y[0] - 5 * y[1] + 4 * y[2] - y[3]) / h2;
        out[n - 1] = (2 * y[n - 1] - 5 * y[n - 2] + 4 * y[n - 3] - y[n - 4]) / h2;
    } else {
        for (std::size_t j = 2; j + 2 < n; ++j)
            out[j] = (-y[j - 2] + 16 * y[j - 1] - 30 * y[j] + 16 * y[j + 1] - y[j + 2]) / (12 * h2);
        out[0] = (45 * y[0] - 154 * y[1] + 214 * y[2] - 156 * y[3] + 61 * y[4] - 10 * y[5]) / (12 * h2);
        out[1] = (10 * y[0] - 15 * y[1] - 4 * y[2] + 14 * y[3] - 6 * y[4] + y[5]) / (12 * h2);
        out[n - 1] = (45 * y[n - 1] - 154 * y[n - 2] + 214 * y[n - 3] - 156 * y[n - 4] + 61 * y[n - 5] - 10 * y[n - 6]) / (12 * h2);
        out[n - 2] = (10 * y[n - 1] - 15 * y[n - 2] - 4 * y[n - 3] + 14 * y[n - 4] - 6 * y[n - 5] + y[n - 6]) / (12 * h2);
    }
    return out;
}

// Number of centermost nodes whose values are replaced by extrapolation when a
// metric closes at rho_c. The radial chart degenerates there (the areal factor
// vanishes), so pointwise curvature formulas lose accuracy on a fixed number of
// nodes next to the center; quadratic extrapolation from the regular region
// restores O(h^2) values.
inline constexpr std::size_t kCenterZone = 16;
inline constexpr std::size_t kExtrapBase = 8;

// Replace y[n-zone .. n-1] by a quadratic fit through the preceding base nodes.
inline void extrapolate_center_zone(const std::vector<double>& rho, std::vector<double>& y,
                                    std::size_t zone = kCenterZone, std::size_t base = kExtrapBase) {
    const std::size_t n = y.size();
    if (n < zone + base + 2) return;
    const std::size_t b0 = n - zone - base;
    double x0 = 0;
    for (std::size_t k = 0; k < base; ++k) x0 += rho[b0 + k];
    x0 /= double(base);
    // least squares quadratic in (rho - x0)
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
    for (std::size_t k = 0; k < base; ++k) {
        const double x = rho[b0 + k] - x0, v = y[b0 + k];
        const double x2 = x * x;
        s0 += 1; s1 += x; s2 += x2; s3 += x2 * x; s4 += x2 * x2;
        t0 += v; t1 += v * x; t2 += v * x2;
    }
    // solve 3x3 normal equations by Cramer
    const double A[3][3] = {{s0, s1, s2}, {s1, s2, s3}, {s2, s3, s4}};
    const double b[3] = {t0, t1, t2};
    auto det3 = [](const double m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
             - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
             + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    const double D = det3(A);
    double c[3];
    for (int i = 0; i < 3; ++i) {
        double M[3][3];
        for (int r = 0; r < 3; ++r)
            for (int cc = 0; cc < 3; ++cc) M[r][cc] = (cc == i) ? b[r] : A[r][cc];
        c[i] = det3(M) / D;
    }
    for (std::size_t j = n - zone; j < n; ++j) {
        const double x = rho[j] - x0;
        y[j] = c[0] + c[1] * x + c[2] * x * x;
    }
}

// Quadratic extrapolation of the first m samples to rho = 0.
inline double extrapolate_to_boundary(const std::vector<double>& rho, const std::vector<double>& y,
                                      std::size_t m = 6) {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double x = rho[k], v = y[k], x2 = x * x;
        s0 += 1; s1 += x; s2 += x2; s3 += x2 * x; s4 += x2 * x2;
        t0 += v; t1 += v * x; t2 += v * x2;
    }
    const double A[3][3] = {{s0, s1, s2}, {s1, s2, s3}, {s2, s3, s4}};
    auto det3 = [](const double mm[3][3]) {
        return mm[0][0] * (mm[1][1] * mm[2][2] - mm[1][2] * mm[2][1])
             - mm[0][1] * (mm[1][0] * mm[2][2] - mm[1][2] * mm[2][0])
             + mm[0][2] * (mm[1][0] * mm[2][1] - mm[1][1] * mm[2][0]);
    };
    const double b[3] = {t0, t1, t2};
    double M[3][3];
    for (int r = 0; r < 3; ++r) { M[r][0] = b[r]; M[r][1] = A[r][1]; M[r][2] = A[r][2]; }
    return det3(M) / det3(A);
}

} // namespace hypforge
