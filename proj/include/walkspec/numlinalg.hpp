#ifndef WALKSPEC_NUMLINALG_HPP
#define WALKSPEC_NUMLINALG_HPP

#include "walkspec/bigmath.hpp"
#include "walkspec/polynomial.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace walkspec {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

constexpr double kDefaultRankTol = 1e-9;

inline CMatrix to_cmatrix(const IntMatrix& a) {
    CMatrix m(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m(i, j) = Complex(a(i, j).convert_to<double>(), 0.0);
    return m;
}

struct EigenvalueRecord {
    Complex lambda;
    int alg_mult = 0;  // m(lambda)
    int index = 0;     // nu(lambda), 1 <= nu <= m
};

struct Spectrum {
    std::vector<EigenvalueRecord> values;

    int dimension() const {
        int s = 0;
        for (const auto& r : values) s += r.alg_mult;
        return s;
    }
    int max_index() const {
        int s = 0;
        for (const auto& r : values) s = std::max(s, r.index);
        return s;
    }
};

// Exact monic det(xI - A) by Faddeev-LeVerrier; the division at step k is exact.
inline IntPoly char_poly(const IntMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("char_poly: matrix not square");
    const int n = a.rows();
    IntPoly p(n + 1, BigInt(0));
    p[n] = 1;
    IntMatrix m = IntMatrix::identity(n);  // M_0
    for (int k = 1; k <= n; ++k) {
        m = a * m;
        BigInt c = -m.trace() / BigInt(k);
        p[n - k] = c;
        for (int i = 0; i < n; ++i) m(i, i) += c;
    }
    return p;
}

// Roots with exact algebraic multiplicities. Multiplicities come from integer
// squarefree factorization; only the (distinct) roots of each factor are found
// numerically. Roots that are numerically integral are snapped when the exact
// integer evaluation confirms them.
inline std::vector<std::pair<Complex, int>> eigenvalues(const IntPoly& p) {
    if (poly_is_zero(p) || p.back() != 1 || poly_degree(p) < 1)
        throw std::invalid_argument("eigenvalues: expects a monic polynomial of degree >= 1");
    std::vector<std::pair<Complex, int>> out;
    const auto factors = squarefree_decomposition(p);
    for (size_t i = 0; i < factors.size(); ++i) {
        const int mult = static_cast<int>(i) + 1;
        if (poly_degree(factors[i]) == 0) continue;
        CPoly cf = to_cpoly(factors[i]);
        for (Complex root : aberth_roots(cf)) {
            const double re = std::round(root.real());
            if (std::abs(root.real() - re) <= 1e-8 && std::abs(root.imag()) <= 1e-8 &&
                std::abs(re) < 1e15 &&
                poly_eval(factors[i], BigInt(static_cast<long long>(re))) == 0) {
                root = Complex(re, 0.0);
            }
            out.push_back({root, mult});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        const double ax = std::abs(x.first), ay = std::abs(y.first);
        if (std::abs(ax - ay) > 1e-12) return ax > ay;
        if (std::abs(x.first.real() - y.first.real()) > 1e-12)
            return x.first.real() > y.first.real();
        return x.first.imag() > y.first.imag();
    });
    return out;
}

// Orthonormal basis of {v : ||Mv|| <= tol * ||M|| * ||v||} via SVD.
inline std::vector<CVector> null_space(const CMatrix& m, double tol = kDefaultRankTol) {
    if (tol <= 0) throw std::invalid_argument("null_space: tol must be positive");
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double scale = sv.size() > 0 ? sv(0) : 0.0;
    const int n = static_cast<int>(m.cols());
    std::vector<CVector> basis;
    for (int j = 0; j < n; ++j) {
        const double s = j < sv.size() ? sv(j) : 0.0;
        if (s <= tol * scale) basis.push_back(svd.matrixV().col(j));
    }
    return basis;
}

inline int numeric_rank(const CMatrix& m, double tol = kDefaultRankTol) {
    return static_cast<int>(m.cols()) - static_cast<int>(null_space(m, tol).size());
}

struct GeneralizedEigenspace {
    CMatrix basis;  // n x m(lambda), columns orthonormal
    int index = 0;  // nu(lambda)
};

// Basis of null((A - lambda I)^k) for the least k reaching nullity m(lambda).
inline GeneralizedEigenspace generalized_eigenspace(const CMatrix& a, Complex lambda,
                                                    int alg_mult,
                                                    double tol = kDefaultRankTol) {
    const int n = static_cast<int>(a.rows());
    CMatrix shifted = a - lambda * CMatrix::Identity(n, n);
    CMatrix power = CMatrix::Identity(n, n);
    for (int k = 1; k <= n; ++k) {
        power *= shifted;
        // Normalize so the nullity tolerance is scale independent across powers.
        const double nrm = power.norm();
        CMatrix probe = nrm > 0 ? CMatrix(power / nrm) : power;
        auto basis = null_space(probe, tol);
        if (static_cast<int>(basis.size()) == alg_mult) {
            CMatrix v(n, alg_mult);
            for (int j = 0; j < alg_mult; ++j) v.col(j) = basis[j];
            return {v, k};
        }
        if (static_cast<int>(basis.size()) > alg_mult)
            throw std::runtime_error(
                "generalized_eigenspace: nullity overshoots algebraic multiplicity "
                "(tolerance misconfiguration)");
    }
    throw std::runtime_error(
        "generalized_eigenspace: nullity never reached the algebraic multiplicity "
        "(tolerance misconfiguration)");
}

// Full spectrum of an integer matrix: exact multiplicities, numeric indices.
inline Spectrum spectrum_of(const IntMatrix& a, double tol = kDefaultRankTol) {
    Spectrum s;
    const CMatrix ac = to_cmatrix(a);
    for (const auto& [lambda, mult] : eigenvalues(char_poly(a))) {
        const auto ge = generalized_eigenspace(ac, lambda, mult, tol);
        s.values.push_back({lambda, mult, ge.index});
    }
    return s;
}

// m_A(x) = prod (x - lambda)^{nu(lambda)} with complex coefficients.
inline CPoly minimal_polynomial(const Spectrum& s) {
    CPoly m{Complex(1.0, 0.0)};
    for (const auto& r : s.values)
        for (int k = 0; k < r.index; ++k) m = cpoly_mul(m, CPoly{-r.lambda, Complex(1.0, 0.0)});
    return m;
}

inline CMatrix cpoly_eval_matrix(const CPoly& p, const CMatrix& a) {
    const int n = static_cast<int>(a.rows());
    CMatrix r = CMatrix::Zero(n, n);
    for (size_t i = p.size(); i-- > 0;) {
        r *= a;
        r += p[i] * CMatrix::Identity(n, n);
    }
    return r;
}

}  // namespace walkspec

#endif
