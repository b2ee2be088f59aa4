#ifndef WALKSPEC_ANALYZE_HPP
#define WALKSPEC_ANALYZE_HPP

#include "walkspec/io.hpp"
#include "walkspec/pseudoinverse.hpp"
#include "walkspec/symdyn.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace walkspec {

struct AnalysisReport {
    std::string input;  // descriptor of where the system came from
    AutomatonSystem system;
    SpectralDecomposition decomposition;
    ScalarClosedForm closed_form;
    std::optional<DominantTerm> dominant;         // absent when nilpotent
    std::optional<DominantStructure> structure;   // absent when nilpotent
    std::vector<double> growth;                   // c_k per residue, when incomparable
    double tol = kDefaultRankTol;
};

inline AnalysisReport run_analysis(const AutomatonSystem& sys, const std::string& descriptor,
                                   double tol = kDefaultRankTol) {
    AnalysisReport rep;
    rep.input = descriptor;
    rep.system = sys;
    rep.tol = tol;
    rep.decomposition = decompose(sys.digraph.adj, tol);
    rep.closed_form = scalar_closed_form(sys, power_expansion(rep.decomposition));
    try {
        rep.dominant = dominant_term(rep.decomposition, tol);
    } catch (const std::invalid_argument&) {
        return rep;  // nilpotent: the closed form is just the transient
    }
    rep.structure = dominant_structure(sys.digraph);
    if (rep.structure->incomparable) {
        const auto masks = all_class_masks(sys.digraph, *rep.structure);
        for (int k = 0; k < rep.structure->big_period; ++k)
            rep.growth.push_back(growth_coefficient(sys, *rep.structure, masks, k));
    }
    return rep;
}

inline Json spectrum_to_json(const Spectrum& s) {
    Json rows = Json::array();
    for (const auto& r : s.values)
        rows.push_back(Json{{"eigenvalue", Json{{"re", r.lambda.real()}, {"im", r.lambda.imag()}}},
                            {"algebraic_multiplicity", r.alg_mult},
                            {"index", r.index}});
    return rows;
}

inline Json report_to_json(const AnalysisReport& rep) {
    Json j;
    j["input"] = rep.input;
    j["tolerance"] = rep.tol;
    j["system"] = dfa_to_json(rep.system);
    j["spectrum"] = spectrum_to_json(rep.decomposition.spectrum);
    j["closed_form"] = scalar_closed_form_to_json(rep.closed_form);
    if (rep.dominant) {
        Json dt;
        dt["rho"] = rep.dominant->rho;
        dt["nu"] = rep.dominant->nu;
        Json ehats = Json::array();
        for (size_t k = 0; k < rep.dominant->e_hat.size(); ++k) {
            const size_t i = rep.dominant->dominant_max_index[k];
            const Complex lam = rep.decomposition.spectrum.values[i].lambda;
            ehats.push_back(Json{{"eigenvalue", Json{{"re", lam.real()}, {"im", lam.imag()}}},
                                 {"e_hat", matrix_to_json(rep.dominant->e_hat[k])}});
        }
        dt["dominant_terms"] = ehats;
        j["dominant"] = dt;
    }
    if (rep.structure) {
        Json st;
        st["rho"] = rep.structure->rho;
        st["period"] = rep.structure->big_period;
        st["incomparable"] = rep.structure->incomparable;
        Json comps = Json::array();
        for (const auto& dc : rep.structure->dominant) {
            Json c;
            c["vertices"] = std::vector<int>(dc.vertices.begin(), dc.vertices.end());
            c["period"] = dc.period;
            Json cls = Json::array();
            for (const auto& pc : dc.classes) cls.push_back(std::vector<int>(pc.begin(), pc.end()));
            c["classes"] = cls;
            comps.push_back(c);
        }
        st["dominant_components"] = comps;
        j["structure"] = st;
    }
    if (!rep.growth.empty()) j["growth_coefficients"] = rep.growth;
    return j;
}

inline std::string render_report(const AnalysisReport& rep) {
    std::ostringstream out;
    out << "input: " << rep.input << "\n";
    out << "states: " << rep.system.digraph.n << "\n";
    out << "spectrum (checked at tol " << rep.tol << "):\n";
    for (const auto& r : rep.decomposition.spectrum.values) {
        out << "  lambda = " << (r.lambda.real() == 0.0 ? 0.0 : r.lambda.real());
        if (r.lambda.imag() != 0.0) out << (r.lambda.imag() > 0 ? "+" : "") << r.lambda.imag() << "i";
        out << "  mult " << r.alg_mult << "  index " << r.index << "\n";
    }
    out << "closed form: f(m) = ";
    bool first = true;
    for (const auto& t : rep.closed_form.terms) {
        if (!first) out << " + ";
        first = false;
        out << "(";
        for (size_t k = 0; k < t.poly.size(); ++k) {
            if (k) out << " + ";
            out << t.poly[k].real();
            if (k == 1) out << "*m";
            if (k > 1) out << "*m^" << k;
        }
        out << ")*(" << t.lambda.real();
        if (t.lambda.imag() != 0.0) out << (t.lambda.imag() > 0 ? "+" : "") << t.lambda.imag() << "i";
        out << ")^m";
    }
    if (!rep.closed_form.transient.empty()) {
        out << " + transient[";
        for (size_t k = 0; k < rep.closed_form.transient.size(); ++k)
            out << (k ? ", " : "") << rep.closed_form.transient[k].real();
        out << "]";
    }
    out << "\n";
    if (rep.dominant)
        out << "dominant: rho = " << rep.dominant->rho << ", nu = " << rep.dominant->nu << "\n";
    else
        out << "dominant: none (nilpotent, all walks die out)\n";
    if (rep.structure) {
        out << "dominant components: " << rep.structure->dominant.size()
            << ", P = " << rep.structure->big_period
            << ", incomparable = " << (rep.structure->incomparable ? "yes" : "no") << "\n";
    }
    for (size_t k = 0; k < rep.growth.size(); ++k)
        out << "growth c_" << k << " = " << rep.growth[k]
            << "  (f(" << rep.growth.size() << "m+" << k << ") ~ c_" << k << " * rho^("
            << rep.growth.size() << "m+" << k << "))\n";
    return out.str();
}

// Self-validation: every module's invariant suite against one input system.
struct ValidationCheck {
    std::string name;
    bool pass = true;
    std::string detail;
};

struct ValidationSummary {
    std::vector<ValidationCheck> checks;
    bool pass = true;

    void add(const std::string& name, bool ok, const std::string& detail = "") {
        checks.push_back({name, ok, detail});
        if (!ok) pass = false;
    }
};

inline ValidationSummary validate_system(const AutomatonSystem& sys, int depth = 12,
                                         double tol = kDefaultRankTol) {
    ValidationSummary sum;
    const IntMatrix& a = sys.digraph.adj;
    const int n = a.rows();
    const CMatrix ac = to_cmatrix(a);
    const double scale = std::max(ac.norm(), 1.0);
    const auto d = decompose(a, tol);

    // Projector axioms: idempotent, mutually annihilating, resolving identity,
    // commuting with A; plus rank and nilpotency on each eigenspace.
    {
        double worst = 0.0;
        CMatrix total = CMatrix::Zero(n, n);
        for (size_t i = 0; i < d.projectors.size(); ++i) {
            const CMatrix& e = d.projectors[i];
            worst = std::max(worst, (e * e - e).norm());
            worst = std::max(worst, (ac * e - e * ac).norm() / scale);
            for (size_t j = 0; j < d.projectors.size(); ++j)
                if (i != j) worst = std::max(worst, (e * d.projectors[j]).norm());
            total += e;
        }
        worst = std::max(worst, (total - CMatrix::Identity(n, n)).norm());
        sum.add("projector axioms", worst <= 1e-6, "max residual " + std::to_string(worst));

        bool rank_ok = true;
        double nilp_worst = 0.0;
        for (size_t i = 0; i < d.projectors.size(); ++i) {
            const auto& r = d.spectrum.values[i];
            if (numeric_rank(d.projectors[i], tol) != r.alg_mult) rank_ok = false;
            CMatrix shifted = ac - r.lambda * CMatrix::Identity(n, n);
            CMatrix m = d.projectors[i];
            for (int k = 0; k < r.index; ++k) m = shifted * m;
            nilp_worst = std::max(nilp_worst, m.norm() / std::max(std::pow(scale, r.index), 1.0));
        }
        sum.add("projector rank = algebraic multiplicity", rank_ok);
        sum.add("(A - lambda I)^nu E_lambda = 0", nilp_worst <= 1e-6,
                "max residual " + std::to_string(nilp_worst));

        const auto poly = spectral_projector_poly(ac, d.spectrum);
        double agree = 0.0;
        for (size_t i = 0; i < d.projectors.size(); ++i)
            agree = std::max(agree, (poly.projectors[i] - d.projectors[i]).norm() /
                                        std::max(d.projectors[i].norm(), 1.0));
        sum.add("outerproduct vs polynomial projectors", poly.ill_conditioned || agree <= 1e-6,
                poly.ill_conditioned ? "polynomial route ill-conditioned, skipped"
                                     : "max relative gap " + std::to_string(agree));
    }

    // Oracle equivalence: rounded closed form equals the DP count.
    {
        const auto cf = scalar_closed_form(sys, power_expansion(d));
        bool ok = true;
        std::string detail;
        for (int m = 0; m <= depth; ++m) {
            const BigInt exact = count_walks(sys.digraph, sys.initial, sys.final, m);
            if (BigInt(cf.evaluate_rounded(m)) != exact) {
                ok = false;
                detail = "mismatch at m = " + std::to_string(m);
                break;
            }
        }
        sum.add("closed form matches walk oracle (m <= " + std::to_string(depth) + ")", ok, detail);
    }

    // Drazin axioms and the kernel projector identity I - A A^D = E_0.
    {
        const CMatrix ad = drazin(d);
        int nu0 = 0;
        CMatrix e0 = CMatrix::Zero(n, n);
        for (size_t i = 0; i < d.spectrum.values.size(); ++i)
            if (std::abs(d.spectrum.values[i].lambda) <= 1e-9) {
                nu0 = d.spectrum.values[i].index;
                e0 = d.projectors[i];
            }
        double worst = (ac * ad - ad * ac).norm() / scale;
        worst = std::max(worst, (ad * ac * ad - ad).norm() / std::max(ad.norm(), 1.0));
        CMatrix apow = CMatrix::Identity(n, n);
        for (int k = 0; k < nu0; ++k) apow *= ac;
        worst = std::max(worst, (apow * ac * ad - apow).norm() / std::max(apow.norm(), 1.0));
        sum.add("Drazin inverse axioms", worst <= 1e-6, "max residual " + std::to_string(worst));
        const double gap = (CMatrix::Identity(n, n) - ac * ad - e0).norm();
        sum.add("I - A A^D equals the eigenvalue-0 projector", gap <= 1e-6,
                "gap " + std::to_string(gap));
    }

    // Adjugate: spectral formula vs exact cofactor transpose.
    {
        const IntMatrix adj_exact = adjugate_exact(a);
        const CMatrix adj_spec = adjugate_spectral(d);
        double ref = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                ref = std::max(ref, std::abs(adj_exact(i, j).convert_to<double>()));
        double gap = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                gap = std::max(gap,
                               std::abs(adj_spec(i, j) - adj_exact(i, j).convert_to<double>()));
        sum.add("adjugate spectral formula vs exact cofactors", gap <= 1e-6 * std::max(ref, 1.0),
                "max entry gap " + std::to_string(gap));
    }

    // Periodic-class mask claims, when the hypotheses hold.
    try {
        const auto st = dominant_structure(sys.digraph);
        if (st.incomparable) {
            const auto masks = all_class_masks(sys.digraph, st);
            bool disjoint = true, nonneg = true;
            double eig_worst = 0.0, rot_worst = 0.0;
            for (size_t i = 0; i < masks.size(); ++i) {
                const int p = st.dominant[i].period;
                const CMatrix ap = to_cmatrix(power(sys.digraph, p).adj);
                const double target = std::pow(st.rho, p);
                for (int j = 0; j < p; ++j) {
                    const auto& mp = masks[i][j];
                    for (int j2 = 0; j2 < p; ++j2) {
                        if (j2 == j) continue;
                        for (int v : st.dominant[i].classes[j2])
                            if (mp.support.count(v)) disjoint = false;
                    }
                    for (int k = 0; k < n; ++k) {
                        if (mp.v_left(k).real() < -1e-10 || mp.v_right(k).real() < -1e-10)
                            nonneg = false;
                    }
                    eig_worst = std::max(eig_worst, (ap * mp.v_right - target * mp.v_right).norm());
                    eig_worst = std::max(
                        eig_worst, (mp.v_left.transpose() * ap - target * mp.v_left.transpose()).norm());
                    const auto& next = masks[i][(j + 1) % p];
                    rot_worst = std::max(
                        rot_worst, (mp.v_left.transpose() * ac - st.rho * next.v_left.transpose()).norm());
                }
            }
            sum.add("class disjointness P_{i,j} vs V_{i,j'}", disjoint);
            sum.add("masked pairs nonnegative", nonneg);
            sum.add("masked pairs are eigenvectors of A^p", eig_worst <= 1e-8,
                    "max residual " + std::to_string(eig_worst));
            sum.add("left rotation law v_L A = rho v_L'", rot_worst <= 1e-8,
                    "max residual " + std::to_string(rot_worst));

            // Growth convergence when the system touches the dominant part.
            std::vector<double> cs;
            for (int k = 0; k < st.big_period; ++k)
                cs.push_back(growth_coefficient(sys, st, masks, k));
            bool touched = false;
            for (double c : cs)
                if (c > 1e-12) touched = true;
            if (touched) {
                const int m = 20;
                double worst = 0.0;
                for (int k = 0; k < st.big_period; ++k) {
                    const long long len = (long long)st.big_period * m + k;
                    const BigInt f = count_walks(sys.digraph, sys.initial, sys.final,
                                                 (unsigned long long)len);
                    const double ratio =
                        f.convert_to<double>() / std::pow(st.rho, double(len));
                    worst = std::max(worst, std::abs(ratio - cs[k]));
                }
                sum.add("growth coefficient convergence at m = 20", worst <= 1e-6,
                        "max gap " + std::to_string(worst));
            }
        }
    } catch (const std::invalid_argument&) {
        // nilpotent input: the mask machinery does not apply
    }

    return sum;
}

}  // namespace walkspec

#endif
