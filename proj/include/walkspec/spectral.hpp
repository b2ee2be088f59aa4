#ifndef WALKSPEC_SPECTRAL_HPP
#define WALKSPEC_SPECTRAL_HPP

#include "walkspec/digraph.hpp"
#include "walkspec/numlinalg.hpp"
#include "walkspec/regex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace walkspec {

constexpr double kDominantTieTol = 1e-9;
constexpr long kSnapMaxDenominator = 1 << 16;

// Best rational approximation p/q with q bounded, by continued fractions.
// Returns nothing if no bounded-denominator rational sits within tol.
inline std::optional<std::pair<long long, long long>> snap_rational(
    double x, long max_den = kSnapMaxDenominator, double tol = 1e-9) {
    if (!std::isfinite(x)) return std::nullopt;
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double v = x;
    for (int it = 0; it < 64; ++it) {
        const double fl = std::floor(v);
        if (std::abs(fl) > 9e17) break;
        const long long a = static_cast<long long>(fl);
        long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        const double rem = v - fl;
        if (rem < 1e-15) break;
        v = 1.0 / rem;
    }
    if (q1 == 0) return std::nullopt;
    if (std::abs(x - double(p1) / double(q1)) <= tol) return std::make_pair(p1, q1);
    return std::nullopt;
}

inline double snap_value(double x, double tol = 1e-9) {
    auto r = snap_rational(x, kSnapMaxDenominator, tol);
    return r ? double(r->first) / double(r->second) : x;
}

inline void snap_matrix(CMatrix& m, double tol = 1e-9) {
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            m(i, j) = Complex(snap_value(m(i, j).real(), tol), snap_value(m(i, j).imag(), tol));
}

// E_lambda = V_R (V_L V_R)^{-1} V_L from independent generalized eigenvector
// bases. V_L V_R is invertible whenever the bases are valid; the condition
// number is checked so a bad basis fails loudly.
inline CMatrix spectral_projector(const CMatrix& a, Complex lambda, const CMatrix& v_right,
                                  const CMatrix& v_left) {
    (void)a;
    (void)lambda;
    if (v_right.cols() != v_left.rows())
        throw std::invalid_argument("spectral_projector: basis size mismatch");
    const CMatrix gram = v_left * v_right;
    Eigen::JacobiSVD<CMatrix> svd(gram);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(sv.size() - 1) <= 1e-12 * sv(0))
        throw std::invalid_argument("spectral_projector: V_L V_R numerically singular (invalid bases)");
    return v_right * gram.partialPivLu().solve(v_left);
}

// Hermite interpolation data for one eigenvalue: e_i is 1 at lambda_i, its
// derivatives 1..nu(lambda_i)-1 vanish there, and it vanishes to order
// nu(lambda_k) at every other eigenvalue. Built in Newton form with repeated
// nodes (confluent divided differences).
namespace detail {

inline CPoly hermite_indicator(const Spectrum& s, size_t which) {
    std::vector<Complex> nodes;
    std::vector<Complex> values;  // f(node); every occurrence of a node repeats it
    for (size_t i = 0; i < s.values.size(); ++i)
        for (int j = 0; j < s.values[i].index; ++j) {
            nodes.push_back(s.values[i].lambda);
            values.push_back(i == which ? Complex(1.0) : Complex(0.0));
        }
    const size_t n = nodes.size();
    // Confluent divided differences. All prescribed derivatives of order >= 1
    // are zero, so coincident spans contribute f^{(len)}(z)/len! = 0.
    std::vector<std::vector<Complex>> table(n);
    table[0] = values;
    std::vector<Complex> coeffs(n);
    coeffs[0] = table[0][0];
    for (size_t len = 1; len < n; ++len) {
        table[len].resize(n - len);
        for (size_t i = 0; i + len < n; ++i) {
            if (nodes[i] == nodes[i + len])
                table[len][i] = Complex(0.0);
            else
                table[len][i] =
                    (table[len - 1][i + 1] - table[len - 1][i]) / (nodes[i + len] - nodes[i]);
        }
        coeffs[len] = table[len][0];
    }
    // Newton form -> dense coefficients.
    CPoly poly{coeffs[n - 1]};
    for (size_t k = n - 1; k-- > 0;) {
        poly = cpoly_mul(poly, CPoly{-nodes[k], Complex(1.0)});
        poly[0] += coeffs[k];
    }
    return poly;
}

}  // namespace detail

struct PolyProjectorResult {
    std::vector<CMatrix> projectors;  // aligned with spectrum order
    bool ill_conditioned = false;     // condition estimate exceeded 1e12
    double condition_estimate = 0.0;
};

// Projectors as Hermite interpolation polynomials evaluated at A.
inline PolyProjectorResult spectral_projector_poly(const CMatrix& a, const Spectrum& s) {
    PolyProjectorResult out;
    for (size_t i = 0; i < s.values.size(); ++i) {
        CPoly e = detail::hermite_indicator(s, i);
        double mag = 0.0;
        for (Complex c : e) mag = std::max(mag, std::abs(c));
        out.condition_estimate = std::max(out.condition_estimate, mag);
        out.projectors.push_back(cpoly_eval_matrix(e, a));
    }
    out.ill_conditioned = out.condition_estimate > 1e12;
    return out;
}

struct SpectralDecomposition {
    CMatrix a;                      // the analyzed matrix (complex copy)
    Spectrum spectrum;
    std::vector<CMatrix> projectors;       // E_lambda, aligned with spectrum.values
    std::vector<CMatrix> right_bases;      // generalized right bases, n x m(lambda)
    std::vector<CMatrix> left_bases;       // generalized left bases, m(lambda) x n
    CMatrix a_diag;                 // A_D = sum lambda E_lambda
    CMatrix a_nilp;                 // A_N = A - A_D
    bool integer_spectrum = false;  // all eigenvalues exactly integral

    const CMatrix& projector(size_t i) const { return projectors[i]; }
};

// Decomposition via the outerproduct construction. Entries snap to small
// rationals when the matrix is integer with integer spectrum, so exact
// projector displays come out exactly.
inline SpectralDecomposition decompose(const IntMatrix& m, double tol = kDefaultRankTol) {
    SpectralDecomposition d;
    d.a = to_cmatrix(m);
    d.spectrum = spectrum_of(m, tol);
    const int n = static_cast<int>(d.a.rows());
    const CMatrix at = d.a.transpose();

    d.integer_spectrum = true;
    for (const auto& r : d.spectrum.values)
        if (r.lambda.imag() != 0.0 || r.lambda.real() != std::round(r.lambda.real()))
            d.integer_spectrum = false;

    for (const auto& r : d.spectrum.values) {
        const auto right = generalized_eigenspace(d.a, r.lambda, r.alg_mult, tol);
        const auto left = generalized_eigenspace(at, r.lambda, r.alg_mult, tol);
        CMatrix v_left = left.basis.transpose();
        CMatrix e = spectral_projector(d.a, r.lambda, right.basis, v_left);
        if (d.integer_spectrum) snap_matrix(e);
        d.projectors.push_back(std::move(e));
        d.right_bases.push_back(right.basis);
        d.left_bases.push_back(std::move(v_left));
    }

    d.a_diag = CMatrix::Zero(n, n);
    for (size_t i = 0; i < d.projectors.size(); ++i)
        d.a_diag += d.spectrum.values[i].lambda * d.projectors[i];
    d.a_nilp = d.a - d.a_diag;
    return d;
}

inline std::pair<CMatrix, CMatrix> jordan_chevalley_split(const SpectralDecomposition& d) {
    return {d.a_diag, d.a_nilp};
}

// A^n = sum_lambda sum_{j<nu} C(n,j) lambda^{n-j} M_j with M_j = (A-lambda I)^j E_lambda,
// under the convention 0^e = 1 for e <= 0.
struct ClosedFormTerm {
    Complex lambda;
    std::vector<CMatrix> coefficients;  // M_0 .. M_{nu-1}
};

struct ClosedForm {
    std::vector<ClosedFormTerm> terms;

    CMatrix evaluate(long long n) const {
        const int dim = static_cast<int>(terms.front().coefficients.front().rows());
        CMatrix r = CMatrix::Zero(dim, dim);
        for (const auto& t : terms)
            for (size_t j = 0; j < t.coefficients.size(); ++j)
                r += binomial_real(n, static_cast<int>(j)) *
                     cpow_int(t.lambda, n - static_cast<long long>(j)) * t.coefficients[j];
        return r;
    }
};

inline ClosedForm power_expansion(const SpectralDecomposition& d) {
    ClosedForm cf;
    const int n = static_cast<int>(d.a.rows());
    for (size_t i = 0; i < d.spectrum.values.size(); ++i) {
        const auto& r = d.spectrum.values[i];
        ClosedFormTerm term{r.lambda, {}};
        CMatrix shifted = d.a - r.lambda * CMatrix::Identity(n, n);
        CMatrix m = d.projectors[i];
        for (int j = 0; j < r.index; ++j) {
            term.coefficients.push_back(m);
            m = shifted * m;
        }
        cf.terms.push_back(std::move(term));
    }
    return cf;
}

// f(m) = sum_{lambda != 0} lambda^m p_lambda(m) plus a finite transient from
// eigenvalue zero (it only affects m < nu(0)).
struct ScalarTerm {
    Complex lambda;
    std::vector<Complex> poly;  // p_lambda coefficients, ascending in m
};

struct ScalarClosedForm {
    std::vector<ScalarTerm> terms;      // lambda != 0
    std::vector<Complex> transient;     // index m contribution for m < nu(0)

    Complex evaluate(long long m) const {
        Complex r(0.0, 0.0);
        for (const auto& t : terms) {
            Complex p(0.0, 0.0);
            for (size_t k = t.poly.size(); k-- > 0;) p = p * double(m) + t.poly[k];
            r += cpow_int(t.lambda, m) * p;
        }
        if (m >= 0 && static_cast<size_t>(m) < transient.size()) r += transient[m];
        return r;
    }

    long long evaluate_rounded(long long m) const {
        return static_cast<long long>(std::llround(evaluate(m).real()));
    }
};

namespace detail {

// C(m,j) as a polynomial in m: prod_{i<j} (m - i) / j!.
inline std::vector<Complex> binomial_polynomial(int j) {
    std::vector<Complex> p{Complex(1.0)};
    for (int i = 0; i < j; ++i) {
        std::vector<Complex> q(p.size() + 1, Complex(0.0));
        for (size_t k = 0; k < p.size(); ++k) {
            q[k + 1] += p[k];
            q[k] -= double(i) * p[k];
        }
        p = std::move(q);
    }
    double fact = 1.0;
    for (int i = 2; i <= j; ++i) fact *= i;
    for (Complex& c : p) c /= fact;
    return p;
}

}  // namespace detail

inline ScalarClosedForm scalar_closed_form(const AutomatonSystem& sys, const ClosedForm& cf) {
    const int n = sys.digraph.n;
    Eigen::RowVectorXcd vi = Eigen::RowVectorXcd::Zero(n);
    CVector vf = CVector::Zero(n);
    for (int v : sys.initial) vi(v - 1) = 1.0;
    for (int v : sys.final) vf(v - 1) = 1.0;

    ScalarClosedForm out;
    for (const auto& t : cf.terms) {
        std::vector<Complex> contracted;  // s_j = v_I^T M_j v_F
        for (const auto& mj : t.coefficients) contracted.push_back((vi * mj * vf)(0));
        if (std::abs(t.lambda) == 0.0) {
            out.transient = contracted;  // C(m,j) 0^{m-j} picks exactly j = m
            continue;
        }
        // p_lambda(m) = sum_j s_j C(m,j) lambda^{-j}
        std::vector<Complex> poly(contracted.size(), Complex(0.0));
        for (size_t j = 0; j < contracted.size(); ++j) {
            const Complex scale = contracted[j] * std::pow(t.lambda, -double(j));
            auto bp = detail::binomial_polynomial(static_cast<int>(j));
            for (size_t k = 0; k < bp.size(); ++k) poly[k] += scale * bp[k];
        }
        out.terms.push_back({t.lambda, std::move(poly)});
    }
    return out;
}

inline ScalarClosedForm structure_closed_form(const AutomatonSystem& sys,
                                              double tol = kDefaultRankTol) {
    const auto d = decompose(sys.digraph.adj, tol);
    return scalar_closed_form(sys, power_expansion(d));
}

struct DominantTerm {
    double rho = 0.0;
    int nu = 1;                      // maximal index among dominant eigenvalues
    std::vector<size_t> all_dominant;        // S, spectrum indices with |lambda| = rho
    std::vector<size_t> dominant_max_index;  // T subset of S with index nu
    std::vector<CMatrix> e_hat;              // aligned with dominant_max_index
    std::vector<int> e_hat_rank;             // rank 0 flags a tolerance failure
};

// rho, nu, T and E-hat_lambda = (A/lambda - I)^{nu-1} E_lambda for lambda in T.
inline DominantTerm dominant_term(const SpectralDecomposition& d, double tol = kDefaultRankTol) {
    DominantTerm out;
    for (const auto& r : d.spectrum.values) out.rho = std::max(out.rho, std::abs(r.lambda));
    if (out.rho <= 0.0) throw std::invalid_argument("dominant_term: nilpotent: all walks die out");

    for (size_t i = 0; i < d.spectrum.values.size(); ++i)
        if (std::abs(d.spectrum.values[i].lambda) >= out.rho * (1.0 - kDominantTieTol))
            out.all_dominant.push_back(i);
    out.nu = 0;
    for (size_t i : out.all_dominant) out.nu = std::max(out.nu, d.spectrum.values[i].index);
    for (size_t i : out.all_dominant)
        if (d.spectrum.values[i].index == out.nu) out.dominant_max_index.push_back(i);

    const int n = static_cast<int>(d.a.rows());
    for (size_t i : out.dominant_max_index) {
        const Complex lambda = d.spectrum.values[i].lambda;
        CMatrix factor = d.a / lambda - CMatrix::Identity(n, n);
        CMatrix e_hat = d.projectors[i];
        for (int k = 0; k < out.nu - 1; ++k) e_hat = factor * e_hat;
        if (d.integer_spectrum) snap_matrix(e_hat);
        out.e_hat_rank.push_back(numeric_rank(e_hat, tol));
        out.e_hat.push_back(std::move(e_hat));
    }
    return out;
}

struct EigenvectorPair {
    CVector right;              // right lambda-eigenvector
    Eigen::RowVectorXcd left;   // left lambda-eigenvector
};

// Rank factorization E-hat = sum right_j * left_j where every factor is a
// plain (index 1) eigenvector. A residual failure here is a bug, not an input
// error: the factorization theorem guarantees eigenvectors.
inline std::vector<EigenvectorPair> eigenvector_factorization(const CMatrix& e_hat,
                                                              const CMatrix& a, Complex lambda,
                                                              double tol = 1e-8) {
    Eigen::JacobiSVD<CMatrix> svd(e_hat, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double scale = sv.size() > 0 ? sv(0) : 0.0;
    std::vector<EigenvectorPair> pairs;
    const int n = static_cast<int>(a.rows());
    const CMatrix shifted = a - lambda * CMatrix::Identity(n, n);
    for (int j = 0; j < sv.size(); ++j) {
        if (sv(j) <= kDefaultRankTol * scale) break;
        CVector right = svd.matrixU().col(j);
        Eigen::RowVectorXcd left = sv(j) * svd.matrixV().col(j).adjoint();
        const double res_r = (shifted * right).norm() / (std::abs(lambda) + 1.0);
        const double res_l = (left * shifted).norm() / ((std::abs(lambda) + 1.0) * left.norm());
        if (res_r > tol || res_l > tol)
            throw std::logic_error(
                "eigenvector_factorization: factor fails the eigenvector residual test");
        pairs.push_back({std::move(right), std::move(left)});
    }
    return pairs;
}

// Rothblum residue polynomials: (A/rho)^{Pm+k} - S_k(Pm+k) -> 0 entrywise.
struct ResiduePolynomials {
    int period = 1;                                 // P
    std::vector<std::vector<CMatrix>> polynomials;  // S_k as coefficients of x^j

    CMatrix evaluate(int k, long long x) const {
        const auto& coeffs = polynomials[static_cast<size_t>(k)];
        CMatrix r = CMatrix::Zero(coeffs.front().rows(), coeffs.front().cols());
        double xp = 1.0;
        for (const auto& c : coeffs) {
            r += xp * c;
            xp *= double(x);
        }
        return r;
    }
};

inline ResiduePolynomials residue_polynomials(const IntMatrix& a,
                                              const SpectralDecomposition& d) {
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (a(i, j) < 0)
                throw std::invalid_argument("residue_polynomials: matrix must be nonnegative");
    const auto dom = dominant_term(d);
    const double rho = dom.rho;

    // P = lcm of dominant-component periods, extended until lambda^P = rho^P
    // for every dominant eigenvalue.
    Digraph dg;
    dg.n = a.rows();
    dg.adj = a;
    const auto parts = irreducible_components(dg);
    long long p = 1;
    for (const auto& comp : parts.components) {
        IntMatrix sub(static_cast<int>(comp.size()), static_cast<int>(comp.size()));
        std::vector<int> ids(comp.begin(), comp.end());
        for (size_t x = 0; x < ids.size(); ++x)
            for (size_t y = 0; y < ids.size(); ++y) sub(int(x), int(y)) = a(ids[x] - 1, ids[y] - 1);
        double comp_rho = 0.0;
        if (!sub.is_zero())
            for (const auto& [lam, mult] : eigenvalues(char_poly(sub)))
                comp_rho = std::max(comp_rho, std::abs(lam));
        if (comp_rho >= rho * (1.0 - kDominantTieTol)) p = std::lcm(p, (long long)period(dg, comp).period);
    }
    for (size_t i : dom.all_dominant) {
        const Complex ratio = d.spectrum.values[i].lambda / rho;
        long long q = 1;
        while (q <= 256 && std::abs(std::pow(ratio, double(q)) - Complex(1.0)) > 1e-6) ++q;
        if (q > 256)
            throw std::runtime_error("residue_polynomials: dominant ratio is not a root of unity");
        p = std::lcm(p, q);
    }

    const auto cf = power_expansion(d);
    ResiduePolynomials out;
    out.period = static_cast<int>(p);
    const int n = a.rows();
    for (int k = 0; k < out.period; ++k) {
        int max_deg = 0;
        for (size_t i : dom.all_dominant)
            max_deg = std::max(max_deg, d.spectrum.values[i].index - 1);
        std::vector<CMatrix> coeffs(static_cast<size_t>(max_deg) + 1, CMatrix::Zero(n, n));
        for (size_t i : dom.all_dominant) {
            const Complex ratio = d.spectrum.values[i].lambda / rho;
            const auto& term = cf.terms[i];
            for (size_t j = 0; j < term.coefficients.size(); ++j) {
                const Complex scale =
                    std::pow(ratio, double(k) - double(j)) * std::pow(rho, -double(j));
                const auto bp = detail::binomial_polynomial(static_cast<int>(j));
                for (size_t deg = 0; deg < bp.size(); ++deg)
                    coeffs[deg] += scale * bp[deg] * term.coefficients[j];
            }
        }
        out.polynomials.push_back(std::move(coeffs));
    }
    return out;
}

}  // namespace walkspec

#endif
