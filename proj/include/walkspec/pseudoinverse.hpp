#ifndef WALKSPEC_PSEUDOINVERSE_HPP
#define WALKSPEC_PSEUDOINVERSE_HPP

#include "walkspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace walkspec {

// A^D = sum_{lambda != 0} lambda^{-1} sum_{i<nu} (I - A/lambda)^i E_lambda.
// A nilpotent matrix gives the empty sum, i.e. the zero matrix.
inline CMatrix drazin(const SpectralDecomposition& d) {
    const int n = static_cast<int>(d.a.rows());
    CMatrix out = CMatrix::Zero(n, n);
    for (size_t i = 0; i < d.spectrum.values.size(); ++i) {
        const auto& r = d.spectrum.values[i];
        if (std::abs(r.lambda) == 0.0) continue;
        CMatrix factor = CMatrix::Identity(n, n) - d.a / r.lambda;
        CMatrix acc = d.projectors[i];
        for (int k = 0; k < r.index; ++k) {
            out += acc / r.lambda;
            acc = factor * acc;
        }
    }
    return out;
}

// Same sum restricted by the invertibility hypothesis: it is then A^{-1}.
inline CMatrix inverse_spectral(const SpectralDecomposition& d) {
    for (const auto& r : d.spectrum.values)
        if (std::abs(r.lambda) <= 1e-12)
            throw std::invalid_argument("inverse_spectral: singular");
    return drazin(d);
}

// Exact determinant by fraction-free Bareiss elimination.
inline BigInt bareiss_determinant(IntMatrix m) {
    const int n = m.rows();
    if (n != m.cols()) throw std::invalid_argument("bareiss_determinant: not square");
    if (n == 0) return 1;
    BigInt sign = 1, prev = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m(k, k) == 0) {
            int pivot = -1;
            for (int i = k + 1; i < n; ++i)
                if (m(i, k) != 0) {
                    pivot = i;
                    break;
                }
            if (pivot == -1) return 0;
            for (int j = 0; j < n; ++j) std::swap(m(k, j), m(pivot, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
            }
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

namespace detail {

template <typename M>
M drop_row_col(const M& m, int row, int col) {
    M out(m.rows() - 1, m.cols() - 1);
    for (int i = 0, oi = 0; i < m.rows(); ++i) {
        if (i == row) continue;
        for (int j = 0, oj = 0; j < m.cols(); ++j) {
            if (j == col) continue;
            out(oi, oj) = m(i, j);
            ++oj;
        }
        ++oi;
    }
    return out;
}

}  // namespace detail

// Cofactor matrix, exact. Entry (i,j) = (-1)^{i+j} det(minor_{i,j}).
inline IntMatrix cofactor(const IntMatrix& m) {
    const int n = m.rows();
    if (n != m.cols()) throw std::invalid_argument("cofactor: not square");
    if (n == 1) {
        IntMatrix one(1, 1);
        one(0, 0) = 1;
        return one;
    }
    IntMatrix out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            BigInt det = bareiss_determinant(detail::drop_row_col(m, i, j));
            out(i, j) = ((i + j) % 2 == 0) ? det : -det;
        }
    return out;
}

// Float cofactor for complex input, via LU determinants of minors.
inline CMatrix cofactor(const CMatrix& m) {
    const int n = static_cast<int>(m.rows());
    if (n != m.cols()) throw std::invalid_argument("cofactor: not square");
    if (n == 1) return CMatrix::Ones(1, 1);
    CMatrix out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            CMatrix minor(n - 1, n - 1);
            for (int a = 0, oa = 0; a < n; ++a) {
                if (a == i) continue;
                for (int b = 0, ob = 0; b < n; ++b) {
                    if (b == j) continue;
                    minor(oa, ob) = m(a, b);
                    ++ob;
                }
                ++oa;
            }
            const Complex det = minor.fullPivLu().determinant();
            out(i, j) = ((i + j) % 2 == 0) ? det : -det;
        }
    return out;
}

inline IntMatrix adjugate_exact(const IntMatrix& m) { return cofactor(m).transpose(); }

// adj(A) = sum_lambda sum_{i<nu} (prod_{mu != lambda} mu^{m(mu)}) lambda^{m-1-i} (lambda I - A)^i E_lambda.
// The lambda = 0 term uses 0^0 = 1, which is exactly the i = m(0)-1 summand.
inline CMatrix adjugate_spectral(const SpectralDecomposition& d) {
    const int n = static_cast<int>(d.a.rows());
    CMatrix out = CMatrix::Zero(n, n);
    for (size_t i = 0; i < d.spectrum.values.size(); ++i) {
        const auto& r = d.spectrum.values[i];
        Complex others(1.0, 0.0);
        for (size_t j = 0; j < d.spectrum.values.size(); ++j) {
            if (j == i) continue;
            others *= cpow_int(d.spectrum.values[j].lambda, d.spectrum.values[j].alg_mult);
        }
        if (std::abs(others) == 0.0) continue;
        CMatrix shifted = r.lambda * CMatrix::Identity(n, n) - d.a;
        CMatrix acc = d.projectors[i];
        for (int k = 0; k < r.index; ++k) {
            out += others * cpow_int(r.lambda, r.alg_mult - 1 - k) * acc;
            acc = shifted * acc;
        }
    }
    return out;
}

// Extended elementary matrices: row operations, with zero row-scales allowed.
struct ElementaryFactor {
    enum class Kind { RowAdd, RowScale, RowSwap };
    Kind kind;
    int i = 0, j = 0;  // 0-indexed rows
    Complex c{0.0, 0.0};

    CMatrix as_matrix(int n) const {
        CMatrix m = CMatrix::Identity(n, n);
        switch (kind) {
            case Kind::RowAdd: m(i, j) = c; break;          // row_i += c * row_j
            case Kind::RowScale: m(i, i) = c; break;        // row_i *= c (c may be 0)
            case Kind::RowSwap:
                m(i, i) = m(j, j) = 0.0;
                m(i, j) = m(j, i) = 1.0;
                break;
        }
        return m;
    }
};

inline CMatrix factor_product(const std::vector<ElementaryFactor>& factors, int n) {
    CMatrix m = CMatrix::Identity(n, n);
    for (const auto& f : factors) m *= f.as_matrix(n);
    return m;
}

// Write M as an ordered product of extended elementary matrices. Independent
// rows are completed to a basis, the completion rows are zero-scaled, and the
// dependent rows are rebuilt by recorded row additions.
inline std::vector<ElementaryFactor> elementary_factorization(const CMatrix& m,
                                                              double tol = kDefaultRankTol) {
    const int n = static_cast<int>(m.rows());
    if (n != m.cols()) throw std::invalid_argument("elementary_factorization: not square");

    // Row echelon pass on a copy to pick a maximal independent row set.
    CMatrix work = m;
    std::vector<int> independent;
    std::vector<int> pivot_col;
    const double scale = std::max(m.norm(), 1e-300);
    for (int r = 0; r < n; ++r) {
        Eigen::RowVectorXcd row = m.row(r);
        // Reduce against previously accepted rows.
        for (size_t k = 0; k < independent.size(); ++k) {
            const Complex c = row(pivot_col[k]) / work(independent[k], pivot_col[k]);
            row -= c * work.row(independent[k]);
        }
        int pc = -1;
        double best = 0.0;
        for (int j = 0; j < n; ++j)
            if (std::abs(row(j)) > best) {
                best = std::abs(row(j));
                pc = j;
            }
        if (best > tol * scale) {
            work.row(r) = row;
            independent.push_back(r);
            pivot_col.push_back(pc);
        }
    }

    std::vector<bool> is_independent(n, false);
    for (int r : independent) is_independent[r] = true;

    // Basis completion: each dependent row slot gets the standard basis vector
    // farthest from the span of the rows accepted so far.
    CMatrix basis = m;
    std::vector<Eigen::RowVectorXcd> ortho;  // orthonormal span of accepted rows
    auto residual = [&](Eigen::RowVectorXcd v) {
        for (const auto& q : ortho) v -= (v * q.adjoint())(0) * q;
        return v;
    };
    for (int r : independent) {
        Eigen::RowVectorXcd q = residual(m.row(r));
        ortho.push_back(q / q.norm());
    }
    for (int r = 0; r < n; ++r) {
        if (is_independent[r]) continue;
        int best_j = 0;
        double best = -1.0;
        for (int j = 0; j < n; ++j) {
            Eigen::RowVectorXcd e = Eigen::RowVectorXcd::Zero(n);
            e(j) = 1.0;
            const double res = residual(e).norm();
            if (res > best) {
                best = res;
                best_j = j;
            }
        }
        basis.row(r) = Eigen::RowVectorXcd::Zero(n);
        basis(r, best_j) = 1.0;
        Eigen::RowVectorXcd q = residual(basis.row(r));
        ortho.push_back(q / q.norm());
    }
    // Coefficients for dependent rows: m.row(r) = coeffs * rows(independent).
    // Solve with the completed invertible basis (dependent slots have zero
    // coefficients automatically up to round-off).
    CMatrix basis_t = basis.transpose();
    auto lu = basis_t.partialPivLu();

    // Factor the invertible basis by Gauss-Jordan, recording inverse ops.
    std::vector<ElementaryFactor> inv_ops;  // ops applied to basis to reach I
    CMatrix g = basis;
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        double best = 0.0;
        for (int r = col; r < n; ++r)
            if (std::abs(g(r, col)) > best) {
                best = std::abs(g(r, col));
                pivot = r;
            }
        if (pivot != col) {
            g.row(pivot).swap(g.row(col));
            inv_ops.push_back({ElementaryFactor::Kind::RowSwap, col, pivot, Complex(0.0)});
        }
        const Complex p = g(col, col);
        if (p != Complex(1.0)) {
            g.row(col) /= p;
            inv_ops.push_back({ElementaryFactor::Kind::RowScale, col, col, 1.0 / p});
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const Complex c = g(r, col);
            if (std::abs(c) == 0.0) continue;
            g.row(r) -= c * g.row(col);
            inv_ops.push_back({ElementaryFactor::Kind::RowAdd, r, col, -c});
        }
    }
    // op_k ... op_1 basis = I, so basis = op_1^{-1} ... op_k^{-1} left to right.
    std::vector<ElementaryFactor> factors;
    for (const auto& op : inv_ops) {
        ElementaryFactor inv = op;
        switch (op.kind) {
            case ElementaryFactor::Kind::RowAdd: inv.c = -op.c; break;
            case ElementaryFactor::Kind::RowScale: inv.c = 1.0 / op.c; break;
            case ElementaryFactor::Kind::RowSwap: break;
        }
        factors.push_back(inv);
    }

    // Prepend, in application order: zero-scale the completion rows, then
    // rebuild each dependent row from the independent ones.
    std::vector<ElementaryFactor> left_ops;
    for (int r = 0; r < n; ++r)
        if (!is_independent[r])
            left_ops.push_back({ElementaryFactor::Kind::RowScale, r, r, Complex(0.0)});
    for (int r = 0; r < n; ++r) {
        if (is_independent[r]) continue;
        CVector coeffs = lu.solve(m.row(r).transpose());
        for (int k : independent) {
            const Complex c = coeffs(k);
            if (std::abs(c) > tol) left_ops.push_back({ElementaryFactor::Kind::RowAdd, r, k, c});
        }
    }
    // Product order: left_ops last applied -> they multiply on the left.
    std::vector<ElementaryFactor> result;
    for (auto it = left_ops.rbegin(); it != left_ops.rend(); ++it) result.push_back(*it);
    for (const auto& f : factors) result.push_back(f);
    return result;
}

struct ResolventReport {
    std::vector<double> errors;  // ||(lambda-x_i)^nu (A - x_i I)^{-1} - target|| per step
    bool decreasing = false;
    double final_error = 0.0;
};

// Empirical check of the resolvent limit:
// (x_i - lambda)^{nu} (x_i I - A)^{-1} -> (A - lambda I)^{nu-1} E_lambda.
inline ResolventReport resolvent_limit_check(const SpectralDecomposition& d, Complex lambda,
                                             int steps) {
    const int n = static_cast<int>(d.a.rows());
    int which = -1;
    for (size_t i = 0; i < d.spectrum.values.size(); ++i)
        if (std::abs(d.spectrum.values[i].lambda - lambda) <= 1e-9 * (std::abs(lambda) + 1.0))
            which = static_cast<int>(i);
    if (which < 0) throw std::invalid_argument("resolvent_limit_check: lambda not in spectrum");
    const int nu = d.spectrum.values[which].index;

    CMatrix target = d.projectors[which];
    const CMatrix shifted = d.a - lambda * CMatrix::Identity(n, n);
    for (int k = 0; k < nu - 1; ++k) target = shifted * target;

    ResolventReport rep;
    for (int i = 1; i <= steps; ++i) {
        Complex x = lambda + std::pow(10.0, -double(i));
        // If the perturbed point collides with another eigenvalue, tilt it.
        int attempts = 0;
        auto collides = [&](Complex pt) {
            for (const auto& r : d.spectrum.values)
                if (std::abs(r.lambda - pt) < 1e-14 * (std::abs(pt) + 1.0)) return true;
            return false;
        };
        while (collides(x) && attempts < 100) {
            ++attempts;
            x = lambda + std::pow(10.0, -double(i)) * (1.0 + double(attempts) * 1e-3);
        }
        const CMatrix resolvent = (x * CMatrix::Identity(n, n) - d.a).partialPivLu().inverse();
        const Complex factor = std::pow(x - lambda, double(nu));
        rep.errors.push_back((factor * resolvent - target).norm());
    }
    rep.final_error = rep.errors.empty() ? 0.0 : rep.errors.back();
    rep.decreasing = true;
    for (size_t i = 1; i < rep.errors.size(); ++i)
        if (rep.errors[i] > rep.errors[i - 1] * 1.5) rep.decreasing = false;
    return rep;
}

}  // namespace walkspec

#endif
