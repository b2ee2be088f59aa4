#ifndef WALKSPEC_POLYNOMIAL_HPP
#define WALKSPEC_POLYNOMIAL_HPP

#include "walkspec/bigmath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace walkspec {

// Integer polynomial, coefficients ascending by degree.
using IntPoly = std::vector<BigInt>;
// Complex polynomial, same layout.
using CPoly = std::vector<Complex>;

inline void poly_normalize(IntPoly& p) {
    while (p.size() > 1 && p.back() == 0) p.pop_back();
}

inline int poly_degree(const IntPoly& p) { return static_cast<int>(p.size()) - 1; }

inline bool poly_is_zero(const IntPoly& p) {
    return p.empty() || (p.size() == 1 && p[0] == 0);
}

inline IntPoly poly_derivative(const IntPoly& p) {
    if (p.size() <= 1) return {BigInt(0)};
    IntPoly d(p.size() - 1);
    for (size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * BigInt(i);
    poly_normalize(d);
    return d;
}

inline BigInt poly_eval(const IntPoly& p, const BigInt& x) {
    BigInt r = 0;
    for (size_t i = p.size(); i-- > 0;) r = r * x + p[i];
    return r;
}

inline IntMatrix poly_eval_matrix(const IntPoly& p, const IntMatrix& a) {
    const int n = a.rows();
    IntMatrix r(n, n);
    for (size_t i = p.size(); i-- > 0;) {
        r = r * a;
        for (int d = 0; d < n; ++d) r(d, d) += p[i];
    }
    return r;
}

inline IntPoly poly_mul(const IntPoly& a, const IntPoly& b) {
    IntPoly r(a.size() + b.size() - 1, BigInt(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    poly_normalize(r);
    return r;
}

// Exact division by a monic divisor; throws if the remainder is nonzero.
inline IntPoly poly_div_exact(IntPoly num, const IntPoly& den) {
    if (poly_is_zero(den) || den.back() != 1)
        throw std::invalid_argument("poly_div_exact: divisor must be monic");
    poly_normalize(num);
    const int dn = poly_degree(num), dd = poly_degree(den);
    if (poly_is_zero(num)) return {BigInt(0)};
    if (dn < dd) throw std::invalid_argument("poly_div_exact: not divisible");
    IntPoly q(dn - dd + 1, BigInt(0));
    for (int k = dn - dd; k >= 0; --k) {
        BigInt c = num[k + dd];
        q[k] = c;
        if (c == 0) continue;
        for (int i = 0; i <= dd; ++i) num[k + i] -= c * den[i];
    }
    for (const BigInt& c : num)
        if (c != 0) throw std::invalid_argument("poly_div_exact: not divisible");
    poly_normalize(q);
    return q;
}

inline BigInt poly_content(const IntPoly& p) {
    BigInt g = 0;
    for (const BigInt& c : p) g = boost::multiprecision::gcd(g, c);
    return g;
}

inline IntPoly poly_primitive(IntPoly p) {
    poly_normalize(p);
    BigInt g = poly_content(p);
    if (g == 0) return {BigInt(0)};
    if (p.back() < 0) g = -g;
    for (BigInt& c : p) c /= g;
    return p;
}

// Pseudo-remainder of a by b (b nonzero).
inline IntPoly poly_pseudo_rem(IntPoly a, const IntPoly& b) {
    poly_normalize(a);
    const int db = poly_degree(b);
    const BigInt lb = b.back();
    while (!poly_is_zero(a) && poly_degree(a) >= db) {
        const int da = poly_degree(a);
        const BigInt la = a.back();
        for (BigInt& c : a) c *= lb;
        for (int i = 0; i <= db; ++i) a[da - db + i] -= la * b[i];
        poly_normalize(a);
        if (!a.empty() && poly_degree(a) == da) break;  // defensive; cannot happen
    }
    return a;
}

// gcd over Z, returned primitive with positive leading coefficient.
// Primitive-PRS Euclid; degrees here stay small so coefficient growth is fine.
inline IntPoly poly_gcd(IntPoly a, IntPoly b) {
    a = poly_primitive(std::move(a));
    b = poly_primitive(std::move(b));
    if (poly_is_zero(a)) return b;
    if (poly_is_zero(b)) return a;
    if (poly_degree(a) < poly_degree(b)) std::swap(a, b);
    while (!poly_is_zero(b)) {
        IntPoly r = poly_primitive(poly_pseudo_rem(a, b));
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

// Yun squarefree decomposition of a monic integer polynomial.
// Returns factors f_1, f_2, ... where p = prod f_i^i; each f_i is monic.
inline std::vector<IntPoly> squarefree_decomposition(const IntPoly& p) {
    if (poly_is_zero(p) || p.back() != 1)
        throw std::invalid_argument("squarefree_decomposition: expects a monic polynomial");
    std::vector<IntPoly> out;
    if (poly_degree(p) == 0) return out;
    IntPoly dp = poly_derivative(p);
    IntPoly g = poly_gcd(p, dp);
    IntPoly c = poly_div_exact(p, g);
    // d = p'/g - c'
    IntPoly d;
    {
        IntPoly t = poly_div_exact(dp, g);
        IntPoly cd = poly_derivative(c);
        d.assign(std::max(t.size(), cd.size()), BigInt(0));
        for (size_t i = 0; i < t.size(); ++i) d[i] += t[i];
        for (size_t i = 0; i < cd.size(); ++i) d[i] -= cd[i];
        poly_normalize(d);
    }
    while (poly_degree(c) > 0) {
        IntPoly a = poly_gcd(c, d);
        out.push_back(a);
        c = poly_div_exact(c, a);
        IntPoly t = poly_is_zero(d) ? IntPoly{BigInt(0)} : poly_div_exact(d, a);
        IntPoly cd = poly_derivative(c);
        d.assign(std::max(t.size(), cd.size()), BigInt(0));
        for (size_t i = 0; i < t.size(); ++i) d[i] += t[i];
        for (size_t i = 0; i < cd.size(); ++i) d[i] -= cd[i];
        poly_normalize(d);
    }
    return out;
}

inline Complex cpoly_eval(const CPoly& p, Complex x) {
    Complex r(0.0, 0.0);
    for (size_t i = p.size(); i-- > 0;) r = r * x + p[i];
    return r;
}

inline CPoly cpoly_derivative(const CPoly& p) {
    if (p.size() <= 1) return {Complex(0.0)};
    CPoly d(p.size() - 1);
    for (size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * double(i);
    return d;
}

inline CPoly cpoly_mul(const CPoly& a, const CPoly& b) {
    CPoly r(a.size() + b.size() - 1, Complex(0.0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

inline CPoly to_cpoly(const IntPoly& p) {
    CPoly c(p.size());
    for (size_t i = 0; i < p.size(); ++i) c[i] = Complex(p[i].convert_to<double>(), 0.0);
    return c;
}

inline double cpoly_coeff_norm(const CPoly& p) {
    double s = 0.0;
    for (Complex c : p) s += std::abs(c);
    return s;
}

// Aberth-Ehrlich simultaneous root finder for a squarefree polynomial.
// Initialization on a circle at the Cauchy bound; 200-iteration cap.
inline std::vector<Complex> aberth_roots(const CPoly& poly, int max_iter = 200) {
    CPoly p = poly;
    while (p.size() > 1 && std::abs(p.back()) == 0.0) p.pop_back();
    const int deg = static_cast<int>(p.size()) - 1;
    if (deg <= 0) return {};
    // Make leading coefficient 1 for stability.
    const Complex lead = p.back();
    for (Complex& c : p) c /= lead;
    if (deg == 1) return {-p[0]};
    const CPoly dp = cpoly_derivative(p);

    double cauchy = 0.0;
    for (int i = 0; i < deg; ++i) cauchy = std::max(cauchy, std::abs(p[i]));
    const double radius = 1.0 + cauchy;

    std::vector<Complex> z(deg);
    for (int i = 0; i < deg; ++i) {
        // Irrational angle offset avoids symmetric stalls.
        const double theta = 2.0 * M_PI * (double(i) / deg) + 0.4;
        z[i] = radius * Complex(std::cos(theta), std::sin(theta));
    }

    const double norm = cpoly_coeff_norm(p);
    for (int it = 0; it < max_iter; ++it) {
        double worst = 0.0;
        for (int i = 0; i < deg; ++i) {
            const Complex pv = cpoly_eval(p, z[i]);
            worst = std::max(worst, std::abs(pv));
            if (std::abs(pv) <= 1e-15 * norm) continue;
            const Complex dv = cpoly_eval(dp, z[i]);
            Complex newton = (std::abs(dv) > 0.0) ? pv / dv : Complex(1e-8, 1e-8);
            Complex sum(0.0, 0.0);
            for (int j = 0; j < deg; ++j)
                if (j != i) sum += 1.0 / (z[i] - z[j]);
            const Complex denom = 1.0 - newton * sum;
            z[i] -= (std::abs(denom) > 1e-300) ? newton / denom : newton;
        }
        if (worst <= 1e-14 * norm) break;
        if (it == max_iter - 1 && worst > 1e-8 * norm)
            throw std::runtime_error(
                "aberth_roots: no convergence after iteration cap (residual " +
                std::to_string(worst) + ")");
    }
    return z;
}

}  // namespace walkspec

#endif
