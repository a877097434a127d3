#include "hypforge/indicial.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace hypforge {

IndicialPolynomial indicial_polynomial(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::VectorLaplacian:
            return IndicialPolynomial(Rational(1), Rational(-4), Rational(0), -1);
        case OperatorKind::LichnerowiczLinear:
            return IndicialPolynomial(Rational(1), Rational(-2), Rational(-3), 0);
    }
    throw phg_error("indicial_polynomial: unknown operator");
}

CharacteristicData characteristic_data(const IndicialPolynomial& p) {
    // roots of c2 s^2 + c1 s + c0 with rational discriminant check
    const Rational A = p.c2(), B = p.c1(), C = p.c0();
    const Rational disc = B * B - Rational(4) * A * C;
    if (disc < Rational(0))
        throw phg_error("characteristic_data: complex roots unsupported");
    if (disc.is_zero())
        throw phg_error("characteristic_data: repeated root unsupported");
    // rational square root required
    long long num = disc.num(), den = disc.den();
    auto isqrt = [](long long x) {
        long long r = static_cast<long long>(std::sqrt(double(x)));
        while (r * r > x) --r;
        while ((r + 1) * (r + 1) <= x) ++r;
        return r;
    };
    const long long rn = isqrt(num), rd = isqrt(den);
    if (rn * rn != num || rd * rd != den)
        throw phg_error("characteristic_data: irrational roots unsupported");
    const Rational sq(rn, rd);
    Rational s1 = (-B - sq) / (Rational(2) * A);
    Rational s2 = (-B + sq) / (Rational(2) * A);
    if (s2 < s1) std::swap(s1, s2);

    CharacteristicData out;
    out.exponents = {s1, s2};
    out.max_exponent = s2;
    const Rational center = Rational(1) - Rational(p.weight());
    Rational R(0);
    for (const auto& s : out.exponents) {
        Rational d = s - center;
        if (d < Rational(0)) d = -d;
        if (R < d) R = d;
    }
    out.indicial_radius = R;
    out.window_lo = Rational(1) - R;
    out.window_hi = Rational(1) + R;
    return out;
}

PhgSeries indicial_apply(const IndicialPolynomial& p, const PhgSeries& u) {
    std::vector<PhgTerm> out;
    for (const auto& t : u.terms()) {
        // k = 0,1,2 (p is quadratic, higher s-derivatives vanish)
        out.push_back(PhgTerm{t.s, t.p, p.eval(t.s) * t.c});
        if (t.p >= 1)
            out.push_back(PhgTerm{t.s, t.p - 1, (Rational((long long)t.p) * p.deriv(t.s)) * t.c});
        if (t.p >= 2) {
            const Rational binom((long long)t.p * (t.p - 1) / 2);
            out.push_back(PhgTerm{t.s, t.p - 2, (binom * p.deriv2()) * t.c});
        }
    }
    return PhgSeries(std::move(out), u.truncation());
}

PhgSeries cauchy_euler_solve(const IndicialPolynomial& p, const PhgSeries& rhs) {
    // group rhs terms by exponent s
    std::map<Rational, std::map<unsigned, Coeff>> groups;
    for (const auto& t : rhs.terms()) groups[t.s][t.p] = t.c;

    std::vector<PhgTerm> out;
    for (auto& [s, byp] : groups) {
        const unsigned pmax = byp.rbegin()->first;
        const bool resonant = p.eval(s).is_zero();
        if (!resonant) {
            // ansatz sum_{m<=pmax} a_m rho^s log^m; match log powers downward:
            //   p(s) a_m + (m+1) p'(s) a_{m+1} + C(m+2,2) p''(s) a_{m+2} = c_m
            std::vector<Coeff> a(pmax + 1, Coeff(Rational(0)));
            for (int m = int(pmax); m >= 0; --m) {
                Coeff c = byp.count(m) ? byp[unsigned(m)] : Coeff(Rational(0));
                Coeff corr = c;
                if (unsigned(m) + 1 <= pmax)
                    corr = corr + (-(Rational(m + 1) * p.deriv(s)) * a[m + 1]);
                if (unsigned(m) + 2 <= pmax) {
                    const Rational binom((long long)(m + 2) * (m + 1) / 2);
                    corr = corr + (-(binom * p.deriv2()) * a[m + 2]);
                }
                a[m] = corr / p.eval(s);
            }
            for (unsigned m = 0; m <= pmax; ++m)
                if (!a[m].is_zero()) out.push_back(PhgTerm{s, m, a[m]});
        } else {
            // simple root: log powers shift up by one. Ansatz sum_{m=1..pmax+1}
            // a_m rho^s log^m; p(s) = 0 leaves
            //   (m+1) p'(s) a_{m+1} + C(m+2,2) p''(s) a_{m+2} = c_m.
            if (p.deriv(s).is_zero())
                throw phg_error("cauchy_euler_solve: repeated root outside scope");
            std::vector<Coeff> a(pmax + 2, Coeff(Rational(0)));
            for (int m = int(pmax); m >= 0; --m) {
                Coeff c = byp.count(m) ? byp[unsigned(m)] : Coeff(Rational(0));
                Coeff corr = c;
                if (unsigned(m) + 2 <= pmax + 1) {
                    const Rational binom((long long)(m + 2) * (m + 1) / 2);
                    corr = corr + (-(binom * p.deriv2()) * a[m + 2]);
                }
                a[m + 1] = corr / (Rational(m + 1) * p.deriv(s));
            }
            for (unsigned m = 1; m <= pmax + 1; ++m)
                if (!a[m].is_zero()) out.push_back(PhgTerm{s, m, a[m]});
        }
    }
    return PhgSeries(std::move(out), rhs.truncation());
}

} // namespace hypforge
