#include "hypforge/phg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hypforge {

std::string Coeff::str() const {
    if (exact()) return rat().str();
    std::ostringstream os;
    os.precision(17);
    os << value();
    return os.str();
}

PhgSeries::PhgSeries(std::vector<PhgTerm> terms, Rational truncation)
    : t_(std::move(terms)), trunc_(truncation) {
    normalize();
}

void PhgSeries::normalize() {
    // sort by (s, p), merge duplicates, drop zeros and terms at/above truncation.
    // Normalization is justified by the linear independence of the monomials
    // rho^s (log rho)^p.
    std::sort(t_.begin(), t_.end(), [](const PhgTerm& x, const PhgTerm& y) {
        if (x.s != y.s) return x.s < y.s;
        return x.p < y.p;
    });
    std::vector<PhgTerm> out;
    for (auto& term : t_) {
        if (!(term.s < trunc_)) continue;
        if (!out.empty() && out.back().s == term.s && out.back().p == term.p)
            out.back().c = out.back().c + term.c;
        else
            out.push_back(term);
    }
    t_.clear();
    for (auto& term : out)
        if (!term.c.is_zero()) t_.push_back(term);
}

Coeff PhgSeries::coefficient(const Rational& s, unsigned p) const {
    for (const auto& term : t_)
        if (term.s == s && term.p == p) return term.c;
    return Coeff(Rational(0));
}

double PhgSeries::eval(double rho) const {
    double out = 0;
    const double lg = std::log(rho);
    for (const auto& term : t_)
        out += term.c.value() * std::pow(rho, term.s.value()) * std::pow(lg, double(term.p));
    return out;
}

std::string PhgSeries::pretty() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& term : t_) {
        if (!first) os << " + ";
        first = false;
        os << term.c.str() << "·rho^" << term.s.str();
        if (term.p > 0) os << "·log^" << term.p << "(rho)";
    }
    os << "  (mod rho^" << trunc_.str() << ")";
    return os.str();
}

PhgSeries operator+(const PhgSeries& a, const PhgSeries& b) {
    std::vector<PhgTerm> t = a.t_;
    t.insert(t.end(), b.t_.begin(), b.t_.end());
    return PhgSeries(std::move(t), std::min(a.trunc_, b.trunc_));
}

PhgSeries operator-(const PhgSeries& a, const PhgSeries& b) {
    std::vector<PhgTerm> t = a.t_;
    for (auto term : b.t_) {
        term.c = -term.c;
        t.push_back(term);
    }
    return PhgSeries(std::move(t), std::min(a.trunc_, b.trunc_));
}

PhgSeries operator*(const PhgSeries& a, const PhgSeries& b) {
    // truncation propagates: a product term is reliable below min over the
    // cross-truncations s_a + trunc_b and s_b + trunc_a.
    Rational tr = a.trunc_ + b.trunc_;
    if (!a.t_.empty()) tr = std::min(tr, a.t_.front().s + b.trunc_);
    if (!b.t_.empty()) tr = std::min(tr, b.t_.front().s + a.trunc_);
    std::vector<PhgTerm> t;
    t.reserve(a.t_.size() * b.t_.size());
    for (const auto& x : a.t_)
        for (const auto& y : b.t_)
            t.push_back(PhgTerm{x.s + y.s, x.p + y.p, x.c * y.c});
    return PhgSeries(std::move(t), tr);
}

PhgSeries PhgSeries::scaled(const Coeff& c) const {
    std::vector<PhgTerm> t = t_;
    for (auto& term : t) term.c = term.c * c;
    return PhgSeries(std::move(t), trunc_);
}

} // namespace hypforge
