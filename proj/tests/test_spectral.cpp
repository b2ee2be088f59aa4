#include "helpers.hpp"

#include <doctest.h>

#include <random>

using namespace walkspec;
using namespace testutil;

namespace {

CMatrix matrix_from(const std::vector<std::vector<double>>& rows) {
    CMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) m(int(i), int(j)) = rows[i][j];
    return m;
}

const CMatrix kE2 = matrix_from({{1, 0, 1.0 / 8, -1.0 / 16},
                                 {0, 1, 0, 0},
                                 {0, 0, 1.0 / 2, 1.0 / 4},
                                 {0, 0, 1, 1.0 / 2}});
const CMatrix kEm2 = matrix_from({{0, 0, -1.0 / 8, 1.0 / 16},
                                  {0, 0, 0, 0},
                                  {0, 0, 1.0 / 2, -1.0 / 4},
                                  {0, 0, -1, 1.0 / 2}});

}  // namespace

TEST_CASE("rational snapping") {
    auto r = snap_rational(0.125);
    REQUIRE(r.has_value());
    CHECK(r->first == 1);
    CHECK(r->second == 8);
    r = snap_rational(-1.0 / 16.0);
    REQUIRE(r.has_value());
    CHECK(r->first == -1);
    CHECK(r->second == 16);
    // Close to 3 but nowhere near any fraction with denominator <= 2^16.
    CHECK(!snap_rational(3.000001234567).has_value());
    CHECK(snap_value(0.3333333333333333) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("outerproduct projectors reproduce the displayed matrices") {
    const auto d = decompose(ex2_matrix());
    REQUIRE(d.projectors.size() == 2);
    CHECK(max_abs_diff(d.projectors[0], kE2) == 0.0);   // snapped, so exact
    CHECK(max_abs_diff(d.projectors[1], kEm2) == 0.0);
}

TEST_CASE("projector of the identity is the identity") {
    const auto d = decompose(IntMatrix::identity(3));
    REQUIRE(d.projectors.size() == 1);
    CHECK(max_abs_diff(d.projectors[0], CMatrix::Identity(3, 3)) < 1e-12);
}

TEST_CASE("projector axioms on a random corpus") {
    std::mt19937 rng(1234);
    for (int trial = 0; trial < 15; ++trial) {
        const IntMatrix a = random_matrix(rng);
        const int n = a.rows();
        const CMatrix ac = to_cmatrix(a);
        const auto d = decompose(a);
        const double scale = std::max(ac.norm(), 1.0);
        CMatrix total = CMatrix::Zero(n, n);
        for (size_t i = 0; i < d.projectors.size(); ++i) {
            const CMatrix& e = d.projectors[i];
            CHECK((e * e - e).norm() <= 1e-8 * std::max(e.norm(), 1.0));
            CHECK((ac * e - e * ac).norm() <= 1e-8 * scale);
            for (size_t j = 0; j < d.projectors.size(); ++j)
                if (i != j) CHECK((e * d.projectors[j]).norm() <= 1e-8);
            CHECK(numeric_rank(e) == d.spectrum.values[i].alg_mult);
            total += e;
        }
        CHECK((total - CMatrix::Identity(n, n)).norm() <= 1e-8);
    }
}

TEST_CASE("polynomial construction agrees with the outerproduct one") {
    SUBCASE("worked example") {
        const auto d = decompose(ex2_matrix());
        const auto poly = spectral_projector_poly(d.a, d.spectrum);
        CHECK(!poly.ill_conditioned);
        for (size_t i = 0; i < d.projectors.size(); ++i)
            CHECK((poly.projectors[i] - d.projectors[i]).norm() <=
                  1e-6 * std::max(d.projectors[i].norm(), 1.0));
    }
    SUBCASE("one by one") {
        IntMatrix c(1, 1);
        c(0, 0) = 7;
        const auto d = decompose(c);
        const auto poly = spectral_projector_poly(d.a, d.spectrum);
        CHECK(std::abs(poly.projectors[0](0, 0) - Complex(1.0)) < 1e-12);
    }
    SUBCASE("random corpus with reconstruction") {
        std::mt19937 rng(888);
        for (int trial = 0; trial < 15; ++trial) {
            const IntMatrix a = random_matrix(rng);
            const auto d = decompose(a);
            const auto poly = spectral_projector_poly(d.a, d.spectrum);
            if (poly.ill_conditioned) continue;
            CMatrix rebuilt = CMatrix::Zero(a.rows(), a.rows());
            for (size_t i = 0; i < poly.projectors.size(); ++i) {
                CHECK((poly.projectors[i] - d.projectors[i]).norm() <=
                      1e-6 * std::max(d.projectors[i].norm(), 1.0));
                rebuilt += d.spectrum.values[i].lambda * poly.projectors[i];
            }
            // Diagonalizable part reconstructs A when every index is 1.
            if (d.spectrum.max_index() == 1)
                CHECK((rebuilt - d.a).norm() <= 1e-8 * std::max(d.a.norm(), 1.0));
        }
    }
}

TEST_CASE("invalid projector bases are rejected") {
    const CMatrix a = CMatrix::Identity(2, 2);
    CMatrix v_r(2, 1), v_l(1, 2);
    v_r << Complex(1.0), Complex(0.0);
    v_l << Complex(0.0), Complex(1.0);  // orthogonal to v_r: V_L V_R singular
    CHECK_THROWS_AS(spectral_projector(a, Complex(1.0), v_r, v_l), std::invalid_argument);
}

TEST_CASE("power expansion evaluates to exact matrix powers") {
    SUBCASE("worked example structure") {
        const auto d = decompose(ex2_matrix());
        const auto cf = power_expansion(d);
        REQUIRE(cf.terms.size() == 2);
        REQUIRE(cf.terms[0].coefficients.size() == 2);
        // M_1 = (A - 2I) E_2 has first row (0, 1, 1/2, 1/4) scaled by... the
        // display divides by 2: (1/2)(A-2I)E_2 first row is (0, 1/2, 1/4, 1/8).
        const CMatrix m1 = cf.terms[0].coefficients[1];
        CHECK(std::abs(m1(0, 0)) < 1e-9);
        CHECK(std::abs(m1(0, 1) - Complex(1.0)) < 1e-9);
        CHECK(std::abs(m1(0, 2) - Complex(0.5)) < 1e-9);
        CHECK(std::abs(m1(0, 3) - Complex(0.25)) < 1e-9);
    }
    SUBCASE("nilpotent block") {
        IntMatrix a(2, 2);
        a(0, 1) = 1;
        const auto cf = power_expansion(decompose(a));
        REQUIRE(cf.terms.size() == 1);
        CHECK(max_abs_diff(cf.evaluate(1), a) < 1e-9);
        CHECK(cf.evaluate(2).norm() < 1e-9);
        CHECK(cf.evaluate(5).norm() < 1e-9);
    }
    SUBCASE("random corpus vs exact integer powers") {
        std::mt19937 rng(4096);
        for (int trial = 0; trial < 15; ++trial) {
            const IntMatrix a = random_matrix(rng);
            const auto cf = power_expansion(decompose(a));
            CHECK(max_abs_diff(cf.evaluate(0), IntMatrix::identity(a.rows())) < 1e-8);
            for (int n : {1, 2, 5, 9, 12}) {
                const IntMatrix exact = a.pow(unsigned(n));
                double ref = 1.0;
                for (int i = 0; i < a.rows(); ++i)
                    for (int j = 0; j < a.rows(); ++j)
                        ref = std::max(ref, std::abs(exact(i, j).convert_to<double>()));
                CHECK(max_abs_diff(cf.evaluate(n), exact) <= 1e-8 * ref);
            }
        }
    }
}

TEST_CASE("scalar closed form golden coefficients") {
    const auto sys = trim(compile(parse_regex("a*ba*b(a|b)*")));
    const ScalarClosedForm cf = structure_closed_form(sys);
    // f(m) = 1 * 2^m + (-1) * m * 1^m + (-1) * 1^m
    double c2 = 0, c1m = 0, c1 = 0;
    for (const auto& t : cf.terms) {
        if (std::abs(t.lambda - Complex(2.0)) < 1e-9) {
            REQUIRE(t.poly.size() >= 1);
            c2 = t.poly[0].real();
        } else if (std::abs(t.lambda - Complex(1.0)) < 1e-9) {
            REQUIRE(t.poly.size() >= 2);
            c1 = t.poly[0].real();
            c1m = t.poly[1].real();
        }
    }
    CHECK(std::abs(c2 - 1.0) <= 1e-9);
    CHECK(std::abs(c1m + 1.0) <= 1e-9);
    CHECK(std::abs(c1 + 1.0) <= 1e-9);
    for (int m = 0; m <= 30; ++m)
        CHECK(BigInt(cf.evaluate_rounded(m)) == structure_function(sys, m));
}

TEST_CASE("scalar closed form matches the oracle on random systems") {
    std::mt19937 rng(31337);
    SUBCASE("single self loop") {
        AutomatonSystem sys;
        sys.digraph = Digraph(1);
        sys.digraph.adj(0, 0) = 1;
        sys.initial = {1};
        sys.final = {1};
        const auto cf = structure_closed_form(sys);
        for (int m = 0; m <= 10; ++m) CHECK(cf.evaluate_rounded(m) == 1);
    }
    SUBCASE("random regex systems") {
        for (int trial = 0; trial < 12; ++trial) {
            const std::string expr = random_regex(rng);
            CAPTURE(expr);
            const auto sys = trim(compile(parse_regex(expr)));
            const auto cf = structure_closed_form(sys);
            for (int m = 0; m <= 20; ++m)
                CHECK(BigInt(cf.evaluate_rounded(m)) == structure_function(sys, m));
        }
    }
}

TEST_CASE("dominant term of the worked examples") {
    SUBCASE("defective dominant eigenvalue") {
        const auto d = decompose(ex2_matrix());
        const auto dom = dominant_term(d);
        CHECK(dom.rho == doctest::Approx(2.0));
        CHECK(dom.nu == 2);
        REQUIRE(dom.dominant_max_index.size() == 1);
        CHECK(d.spectrum.values[dom.dominant_max_index[0]].lambda == Complex(2.0));
        REQUIRE(dom.e_hat.size() == 1);
        CHECK(dom.e_hat_rank[0] == 1);
        // E-hat = (A/2 - I) E_2 has first row (0, 1/2, 1/4, 1/8), rest zero.
        const CMatrix expected = matrix_from({{0, 0.5, 0.25, 0.125}, {0, 0, 0, 0},
                                              {0, 0, 0, 0}, {0, 0, 0, 0}});
        CHECK(max_abs_diff(dom.e_hat[0], expected) <= 1e-9);
        // A^n / (C(n,1) 2^n) approaches E-hat at rate O(1/n): the residual
        // carries the projector part (E_2 + E_{-2}) / n.
        for (int n : {60, 600}) {
            const IntMatrix an = ex2_matrix().pow(unsigned(n));
            const double denom = double(n) * std::pow(2.0, double(n));
            CMatrix scaled(4, 4);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    scaled(i, j) = an(i, j).convert_to<double>() / denom;
            CHECK(max_abs_diff(scaled, dom.e_hat[0]) <= 2.0 / n);
        }
    }
    SUBCASE("two dominant eigenvalues of index one") {
        const auto d = decompose(ex3_matrix());
        const auto dom = dominant_term(d);
        CHECK(dom.rho == doctest::Approx(2.0));
        CHECK(dom.nu == 1);
        CHECK(dom.all_dominant.size() == 2);
    }
    SUBCASE("identity") {
        const auto dom = dominant_term(decompose(IntMatrix::identity(3)));
        CHECK(dom.rho == doctest::Approx(1.0));
        CHECK(dom.nu == 1);
        CHECK(max_abs_diff(dom.e_hat[0], CMatrix::Identity(3, 3)) < 1e-9);
    }
    SUBCASE("nilpotent rejected") {
        IntMatrix a(2, 2);
        a(0, 1) = 1;
        CHECK_THROWS_WITH_AS(dominant_term(decompose(a)), doctest::Contains("nilpotent"),
                             std::invalid_argument);
    }
}

TEST_CASE("dominant term convergence improves with n") {
    std::mt19937 rng(777);
    int done = 0;
    while (done < 8) {
        const IntMatrix a = random_matrix(rng, 5);
        const auto d = decompose(a);
        DominantTerm dom;
        try {
            dom = dominant_term(d);
        } catch (const std::invalid_argument&) {
            continue;
        }
        auto gap = [&](int n) {
            const IntMatrix an = a.pow(unsigned(n));
            const double denom = binomial_real(n, dom.nu - 1) *
                                 std::pow(dom.rho, double(n - dom.nu + 1));
            CMatrix target = CMatrix::Zero(a.rows(), a.rows());
            for (size_t k = 0; k < dom.e_hat.size(); ++k) {
                const Complex lam =
                    d.spectrum.values[dom.dominant_max_index[k]].lambda;
                target += std::pow(lam / dom.rho, double(n - dom.nu + 1)) * dom.e_hat[k];
            }
            CMatrix scaled(a.rows(), a.rows());
            for (int i = 0; i < a.rows(); ++i)
                for (int j = 0; j < a.rows(); ++j)
                    scaled(i, j) = an(i, j).convert_to<double>() / denom;
            return (scaled - target).norm();
        };
        // Subdominant ratio heuristic: the n = 40 gap should be small and not
        // larger than the n = 20 gap by any meaningful factor.
        const double g20 = gap(20), g40 = gap(40);
        CHECK(g40 <= g20 + 1e-9);
        ++done;
    }
}

TEST_CASE("eigenvector factorization") {
    SUBCASE("single pair for the worked example") {
        const auto d = decompose(ex2_matrix());
        const auto dom = dominant_term(d);
        const auto pairs = eigenvector_factorization(dom.e_hat[0], d.a, Complex(2.0));
        REQUIRE(pairs.size() == 1);
        // Right vector proportional to e_1, left to (0, 1, 1/2, 1/4).
        const CVector& r = pairs[0].right;
        const auto& l = pairs[0].left;
        for (int i = 1; i < 4; ++i) CHECK(std::abs(r(i)) < 1e-9);
        const Complex s = l(1);
        CHECK(std::abs(l(0)) < 1e-9);
        CHECK(std::abs(l(2) - 0.5 * s) < 1e-9);
        CHECK(std::abs(l(3) - 0.25 * s) < 1e-9);
        // Product of the pair rebuilds E-hat.
        CHECK((r * l - dom.e_hat[0]).norm() < 1e-8);
    }
    SUBCASE("identity splits into n coordinate pairs") {
        const auto d = decompose(IntMatrix::identity(3));
        const auto pairs = eigenvector_factorization(CMatrix::Identity(3, 3), d.a, Complex(1.0));
        CHECK(pairs.size() == 3);
        CMatrix sum = CMatrix::Zero(3, 3);
        for (const auto& p : pairs) sum += p.right * p.left;
        CHECK((sum - CMatrix::Identity(3, 3)).norm() < 1e-10);
    }
    SUBCASE("simple dominant eigenvalue reproduces its projector") {
        std::mt19937 rng(99);
        int done = 0;
        while (done < 6) {
            const IntMatrix a = random_matrix(rng, 4);
            const auto d = decompose(a);
            DominantTerm dom;
            try {
                dom = dominant_term(d);
            } catch (const std::invalid_argument&) {
                continue;
            }
            if (dom.nu != 1 || dom.dominant_max_index.size() != 1) continue;
            const size_t i = dom.dominant_max_index[0];
            if (d.spectrum.values[i].alg_mult != 1) continue;
            const auto pairs =
                eigenvector_factorization(dom.e_hat[0], d.a, d.spectrum.values[i].lambda);
            REQUIRE(pairs.size() == 1);
            CHECK((pairs[0].right * pairs[0].left - d.projectors[i]).norm() <= 1e-8);
            ++done;
        }
    }
}

TEST_CASE("jordan chevalley split") {
    SUBCASE("worked example") {
        const auto d = decompose(ex2_matrix());
        auto [ad, an] = jordan_chevalley_split(d);
        CHECK((ad + an - d.a).norm() < 1e-9);
        CHECK((ad * an - an * ad).norm() < 1e-8);
        CHECK((an * an).norm() < 1e-8);  // nu_max = 2
        // A_N = (A - 2I) E_2 + (A + 2I) E_{-2}
        const CMatrix expected = (d.a - 2.0 * CMatrix::Identity(4, 4)) * kE2 +
                                 (d.a + 2.0 * CMatrix::Identity(4, 4)) * kEm2;
        CHECK((an - expected).norm() < 1e-8);
    }
    SUBCASE("diagonalizable and nilpotent extremes") {
        const auto d1 = decompose(IntMatrix::identity(3));
        CHECK(d1.a_nilp.norm() < 1e-10);
        IntMatrix nil(2, 2);
        nil(0, 1) = 1;
        const auto d2 = decompose(nil);
        CHECK(d2.a_diag.norm() < 1e-10);
        CHECK(max_abs_diff(d2.a_nilp, nil) < 1e-10);
    }
}

TEST_CASE("kernel projector from the nonzero spectrum") {
    // prod_{lambda != 0} (I - (A/lambda)^{nu(0)})^{nu(lambda)} = E_0.
    std::mt19937 rng(13);
    int done = 0;
    while (done < 10) {
        const IntMatrix a = random_matrix(rng, 4);
        const auto d = decompose(a);
        int zero_at = -1, nu0 = 0;
        for (size_t i = 0; i < d.spectrum.values.size(); ++i)
            if (std::abs(d.spectrum.values[i].lambda) < 1e-9) {
                zero_at = int(i);
                nu0 = d.spectrum.values[i].index;
            }
        if (zero_at < 0 || d.spectrum.values.size() < 2) continue;
        const int n = a.rows();
        CMatrix prod = CMatrix::Identity(n, n);
        for (size_t i = 0; i < d.spectrum.values.size(); ++i) {
            if (int(i) == zero_at) continue;
            CMatrix ratio = d.a / d.spectrum.values[i].lambda;
            CMatrix rp = CMatrix::Identity(n, n);
            for (int k = 0; k < nu0; ++k) rp *= ratio;
            CMatrix factor = CMatrix::Identity(n, n) - rp;
            for (int k = 0; k < d.spectrum.values[i].index; ++k) prod *= factor;
        }
        CHECK((prod - d.projectors[zero_at]).norm() <= 1e-6);
        ++done;
    }
}

TEST_CASE("residue polynomials") {
    SUBCASE("worked example with negative dominant eigenvalue") {
        const IntMatrix a = ex2_matrix();
        const auto d = decompose(a);
        const auto rp = residue_polynomials(a, d);
        CHECK(rp.period == 2);
        // S_0 = (1/2)(A - 2I)E_2 x + E_2 + E_{-2}; S_1 same with - E_{-2}.
        const CMatrix ac = to_cmatrix(a);
        const CMatrix slope = 0.5 * (ac - 2.0 * CMatrix::Identity(4, 4)) * kE2;
        REQUIRE(rp.polynomials[0].size() == 2);
        CHECK((rp.polynomials[0][1] - slope).norm() < 1e-8);
        CHECK((rp.polynomials[0][0] - (kE2 + kEm2)).norm() < 1e-8);
        CHECK((rp.polynomials[1][1] - slope).norm() < 1e-8);
        CHECK((rp.polynomials[1][0] - (kE2 - kEm2)).norm() < 1e-8);
    }
    SUBCASE("convergence of (A/rho)^x against S_k") {
        const IntMatrix a = ex3_matrix();
        const auto d = decompose(a);
        const auto rp = residue_polynomials(a, d);
        CHECK(rp.period == 2);
        for (int k = 0; k < 2; ++k) {
            const long long x = 2 * 30 + k;
            const IntMatrix ax = a.pow((unsigned long long)x);
            const double denom = std::pow(2.0, double(x));
            double worst = 0.0;
            const CMatrix sk = rp.evaluate(k, x);
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j)
                    worst = std::max(worst, std::abs(ax(i, j).convert_to<double>() / denom -
                                                     sk(i, j).real()));
            CHECK(worst <= 1e-6);
        }
    }
    SUBCASE("primitive matrix has period one") {
        IntMatrix a(2, 2);
        a(0, 0) = 1; a(0, 1) = 1; a(1, 0) = 1; a(1, 1) = 1;
        const auto d = decompose(a);
        const auto rp = residue_polynomials(a, d);
        CHECK(rp.period == 1);
    }
    SUBCASE("negative entries rejected") {
        IntMatrix a(2, 2);
        a(0, 0) = -1;
        CHECK_THROWS_AS(residue_polynomials(a, decompose(a)), std::invalid_argument);
    }
}
