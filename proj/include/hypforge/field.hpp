#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hypforge/grid.hpp"

namespace hypforge {

struct field_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Frame tag: profiles of tensors are stored with respect to either the
// compactified metric gbar = rho^2 g or the physical metric g.
enum class Frame { compactified, physical };

inline const char* frame_name(Frame f) {
    return f == Frame::compactified ? "compactified" : "physical";
}

namespace detail {
inline void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw field_error(std::string(what) + ": non-finite value");
}
} // namespace detail

// Rotationally symmetric scalar field: one value per node.
class RadialField {
  public:
    RadialField(RadialGrid grid, std::vector<double> values)
        : grid_(std::move(grid)), v_(std::move(values)) {
        if (v_.size() != grid_.n()) throw field_error("RadialField: size mismatch");
        detail::check_finite(v_, "RadialField");
    }
    static RadialField zero(const RadialGrid& g) { return RadialField(g, std::vector<double>(g.n(), 0.0)); }

    const RadialGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return v_; }
    double operator[](std::size_t j) const { return v_[j]; }

    double sup() const {
        double m = 0;
        for (double x : v_) m = std::max(m, std::fabs(x));
        return m;
    }

  private:
    RadialGrid grid_;
    std::vector<double> v_;
};

// Radial vector field W = w(rho) d/drho, stored via the coordinate component w.
// For metrics that close at the center the component must vanish at rho_c.
class RadialVector {
  public:
    RadialVector(RadialGrid grid, std::vector<double> w, bool center_regular = true)
        : grid_(std::move(grid)), w_(std::move(w)) {
        if (w_.size() != grid_.n()) throw field_error("RadialVector: size mismatch");
        detail::check_finite(w_, "RadialVector");
        if (center_regular && std::fabs(w_.back()) > 1e-9 * (1 + sup()))
            throw field_error("RadialVector: component does not vanish at the center");
    }
    static RadialVector zero(const RadialGrid& g) { return RadialVector(g, std::vector<double>(g.n(), 0.0)); }

    const RadialGrid& grid() const { return grid_; }
    const std::vector<double>& component() const { return w_; }
    double operator[](std::size_t j) const { return w_[j]; }
    double sup() const {
        double m = 0;
        for (double x : w_) m = std::max(m, std::fabs(x));
        return m;
    }

  private:
    RadialGrid grid_;
    std::vector<double> w_;
};

// Radial one-form omega = p(rho) drho.
class RadialOneForm {
  public:
    RadialOneForm(RadialGrid grid, std::vector<double> p) : grid_(std::move(grid)), p_(std::move(p)) {
        if (p_.size() != grid_.n()) throw field_error("RadialOneForm: size mismatch");
        detail::check_finite(p_, "RadialOneForm");
    }
    const RadialGrid& grid() const { return grid_; }
    const std::vector<double>& component() const { return p_; }
    double operator[](std::size_t j) const { return p_[j]; }

  private:
    RadialGrid grid_;
    std::vector<double> p_;
};

// Rotationally symmetric trace-free symmetric 2-tensor, stored through the
// single profile q of the unique radial trace-free shape
//     S = q * ( a^2 drho x drho - (b^2/2) ghat ),
// where (a, b) are the profiles of the tagged metric. Trace-freeness and
// symmetry hold identically by construction; |S| = sqrt(3/2) |q|.
class RadialTT {
  public:
    RadialTT(RadialGrid grid, std::vector<double> q, Frame frame)
        : grid_(std::move(grid)), q_(std::move(q)), frame_(frame) {
        if (q_.size() != grid_.n()) throw field_error("RadialTT: size mismatch");
        detail::check_finite(q_, "RadialTT");
    }
    static RadialTT zero(const RadialGrid& g, Frame f) {
        return RadialTT(g, std::vector<double>(g.n(), 0.0), f);
    }

    const RadialGrid& grid() const { return grid_; }
    const std::vector<double>& profile() const { return q_; }
    double operator[](std::size_t j) const { return q_[j]; }
    Frame frame() const { return frame_; }

    // pointwise norm with respect to the tagged metric
    std::vector<double> norm() const {
        std::vector<double> out(q_.size());
        const double s = std::sqrt(1.5);
        for (std::size_t j = 0; j < q_.size(); ++j) out[j] = s * std::fabs(q_[j]);
        return out;
    }

    // The same tensor re-expressed in the other frame: the shape factor
    // (a^2 drho^2 - (b^2/2) ghat) scales by rho^-2 between frames, so the
    // profile scales by rho^{+2} from compactified to physical.
    RadialTT to_frame(Frame target) const {
        if (target == frame_) return *this;
        std::vector<double> q2(q_.size());
        for (std::size_t j = 0; j < q_.size(); ++j) {
            const double r2 = grid_.rho(j) * grid_.rho(j);
            q2[j] = (target == Frame::physical) ? q_[j] * r2 : q_[j] / r2;
        }
        return RadialTT(grid_, std::move(q2), target);
    }

  private:
    RadialGrid grid_;
    std::vector<double> q_;
    Frame frame_;
};

} // namespace hypforge
