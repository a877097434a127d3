#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hypforge {

struct grid_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Uniform radial grid on (0, rho_c]: nodes rho_j = j*h, j = 1..n, h = rho_c/n.
// There is no node at rho = 0; boundary values are obtained by expansion
// fitting or by the ghost conventions of the solvers.
class RadialGrid {
  public:
    RadialGrid(std::size_t n, double rho_c) : n_(n), rho_c_(rho_c), h_(rho_c / double(n)) {
        if (n < 16) throw grid_error("RadialGrid: need n >= 16");
        if (!(rho_c > 0)) throw grid_error("RadialGrid: rho_c must be positive");
        rho_.resize(n);
        for (std::size_t j = 0; j < n; ++j) rho_[j] = h_ * double(j + 1);
    }

    std::size_t n() const { return n_; }
    double rho_c() const { return rho_c_; }
    double h() const { return h_; }
    double rho(std::size_t j) const { return rho_[j]; }
    const std::vector<double>& nodes() const { return rho_; }

    // index of the node nearest to r
    std::size_t index_of(double r) const {
        long long j = static_cast<long long>(r / h_ + 0.5) - 1;
        if (j < 0) j = 0;
        if (j >= static_cast<long long>(n_)) j = static_cast<long long>(n_) - 1;
        return static_cast<std::size_t>(j);
    }

    bool operator==(const RadialGrid& o) const { return n_ == o.n_ && rho_c_ == o.rho_c_; }

  private:
    std::size_t n_;
    double rho_c_, h_;
    std::vector<double> rho_;
};

} // namespace hypforge
