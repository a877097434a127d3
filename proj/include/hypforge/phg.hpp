#pragma once

#include <string>
#include <variant>
#include <vector>

#include "hypforge/rational.hpp"

namespace hypforge {

struct phg_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Coefficient of a series term: exact rational or floating point. Arithmetic
// stays exact as long as both operands are exact.
class Coeff {
  public:
    Coeff() : v_(Rational(0)) {}
    Coeff(Rational r) : v_(r) {}
    Coeff(long long n) : v_(Rational(n)) {}
    Coeff(double d) : v_(d) {}

    bool exact() const { return std::holds_alternative<Rational>(v_); }
    double value() const {
        return exact() ? std::get<Rational>(v_).value() : std::get<double>(v_);
    }
    const Rational& rat() const { return std::get<Rational>(v_); }

    bool is_zero() const {
        return exact() ? std::get<Rational>(v_).is_zero() : std::get<double>(v_) == 0.0;
    }

    friend Coeff operator+(const Coeff& a, const Coeff& b) {
        if (a.exact() && b.exact()) return Coeff(a.rat() + b.rat());
        return Coeff(a.value() + b.value());
    }
    friend Coeff operator*(const Coeff& a, const Coeff& b) {
        if (a.exact() && b.exact()) return Coeff(a.rat() * b.rat());
        return Coeff(a.value() * b.value());
    }
    friend Coeff operator*(const Rational& a, const Coeff& b) { return Coeff(a) * b; }
    Coeff operator-() const {
        if (exact()) return Coeff(-rat());
        return Coeff(-value());
    }
    friend Coeff operator/(const Coeff& a, const Rational& b) {
        if (a.exact()) return Coeff(a.rat() / b);
        return Coeff(a.value() / b.value());
    }

    std::string str() const;

  private:
    std::variant<Rational, double> v_;
};

// One term c * rho^s * (log rho)^p.
struct PhgTerm {
    Rational s;
    unsigned p = 0;
    Coeff c;
};

// Finite polyhomogeneous series: sum of terms, valid modulo rho^{truncation}.
// Invariants: terms sorted lexicographically by (s, p), no duplicate (s, p),
// zero coefficients removed, every s < truncation.
class PhgSeries {
  public:
    PhgSeries() : trunc_(Rational(1000000)) {}
    explicit PhgSeries(Rational truncation) : trunc_(truncation) {}
    PhgSeries(std::vector<PhgTerm> terms, Rational truncation);

    static PhgSeries monomial(Rational s, unsigned p, Coeff c,
                              Rational truncation = Rational(1000000)) {
        return PhgSeries({PhgTerm{s, p, c}}, truncation);
    }
    static PhgSeries zero(Rational truncation = Rational(1000000)) { return PhgSeries(truncation); }

    const std::vector<PhgTerm>& terms() const { return t_; }
    Rational truncation() const { return trunc_; }
    bool empty() const { return t_.empty(); }

    Coeff coefficient(const Rational& s, unsigned p) const;

    // evaluate at rho > 0 (floating point)
    double eval(double rho) const;

    std::string pretty() const; // "c·rho^s·log^p(rho) + ..."

    friend PhgSeries operator+(const PhgSeries& a, const PhgSeries& b);
    friend PhgSeries operator-(const PhgSeries& a, const PhgSeries& b);
    friend PhgSeries operator*(const PhgSeries& a, const PhgSeries& b);
    PhgSeries scaled(const Coeff& c) const;

  private:
    std::vector<PhgTerm> t_;
    Rational trunc_;
    void normalize();
};

} // namespace hypforge
