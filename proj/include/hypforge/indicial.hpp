#pragma once

#include <vector>

#include "hypforge/phg.hpp"
#include "hypforge/rational.hpp"

namespace hypforge {

enum class OperatorKind { VectorLaplacian, LichnerowiczLinear };

// Quadratic indicial polynomial p(s) of a geometric operator together with
// the weight r of the tensor bundle it acts on. The indicial map on the
// radial sector is p(s) times a fixed isomorphism.
class IndicialPolynomial {
  public:
    IndicialPolynomial(Rational c2, Rational c1, Rational c0, int weight)
        : c2_(c2), c1_(c1), c0_(c0), weight_(weight) {
        if (c2_.is_zero()) throw phg_error("IndicialPolynomial: degree must be exactly 2");
    }

    Rational eval(const Rational& s) const { return (c2_ * s + c1_) * s + c0_; }
    Rational deriv(const Rational& s) const { return Rational(2) * c2_ * s + c1_; }
    Rational deriv2() const { return Rational(2) * c2_; }
    int weight() const { return weight_; }
    Rational c2() const { return c2_; }
    Rational c1() const { return c1_; }
    Rational c0() const { return c0_; }

  private:
    Rational c2_, c1_, c0_;
    int weight_;
};

// p(s) for the operators of the conformal method (radial sector):
//   VectorLaplacian    -> s^2 - 4s      on vectors  (weight -1)
//   LichnerowiczLinear -> s^2 - 2s - 3  on functions (weight 0)
IndicialPolynomial indicial_polynomial(OperatorKind kind);

struct CharacteristicData {
    std::vector<Rational> exponents;  // sorted roots
    Rational indicial_radius;         // smallest R >= 0 with Re s <= 1 - r + R
    Rational max_exponent;
    // Fredholm/isomorphism window (1-R, 1+R) in the weighted-space convention
    Rational window_lo, window_hi;
};

// Roots and derived data; requires real rational simple roots.
CharacteristicData characteristic_data(const IndicialPolynomial& p);

// Formal particular solution of the Cauchy-Euler problem I(P) u = rhs,
// term by term. Non-resonant terms invert the finite triangular system in
// descending log powers; a term at a simple root gains one log power with
// top coefficient c / ((p+1) p'(s)).
PhgSeries cauchy_euler_solve(const IndicialPolynomial& p, const PhgSeries& rhs);

// Action of the indicial operator on a series:
//   I(P)(rho^s log^m) = sum_k binom(m,k) rho^s log^{m-k} p^{(k)}(s).
PhgSeries indicial_apply(const IndicialPolynomial& p, const PhgSeries& u);

} // namespace hypforge
