#ifndef WALKSPEC_SYMDYN_HPP
#define WALKSPEC_SYMDYN_HPP

#include "walkspec/regex.hpp"
#include "walkspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <vector>

namespace walkspec {

inline IntMatrix submatrix(const IntMatrix& a, const VertexSet& s) {
    std::vector<int> idx(s.begin(), s.end());
    IntMatrix out(static_cast<int>(idx.size()), static_cast<int>(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i)
        for (size_t j = 0; j < idx.size(); ++j) out(static_cast<int>(i), static_cast<int>(j)) = a(idx[i] - 1, idx[j] - 1);
    return out;
}

// Spectral radius of one irreducible component, from its exact char poly.
inline double component_spectral_radius(const Digraph& d, const VertexSet& component) {
    const IntMatrix sub = submatrix(d.adj, component);
    double rho = 0.0;
    for (const auto& [lambda, mult] : eigenvalues(char_poly(sub))) rho = std::max(rho, std::abs(lambda));
    return rho;
}

struct DominantComponent {
    int component = 0;         // position in the condensation order
    VertexSet vertices;
    int period = 1;
    std::vector<VertexSet> classes;  // P_{i,1}..P_{i,p_i} stored 0-based
};

struct DominantStructure {
    double rho = 0.0;
    ComponentPartition partition;
    std::vector<DominantComponent> dominant;  // condensation order
    int big_period = 1;                       // P = lcm of the dominant periods
    bool incomparable = false;                // no walks between distinct dominant components
};

// Locate the components realizing the spectral radius, their periodic
// structure, and whether they are pairwise unreachable from each other.
inline DominantStructure dominant_structure(const Digraph& d) {
    DominantStructure st;
    st.partition = irreducible_components(d);

    std::vector<double> radii(st.partition.components.size(), 0.0);
    for (size_t c = 0; c < st.partition.components.size(); ++c)
        radii[c] = component_spectral_radius(d, st.partition.components[c]);
    st.rho = *std::max_element(radii.begin(), radii.end());
    if (st.rho <= 0.0) throw std::invalid_argument("dominant_structure: nilpotent digraph");

    for (size_t c = 0; c < st.partition.components.size(); ++c) {
        if (radii[c] < st.rho * (1.0 - kDominantTieTol)) continue;
        DominantComponent dc;
        dc.component = static_cast<int>(c);
        dc.vertices = st.partition.components[c];
        PeriodStructure ps = period(d, dc.vertices);
        dc.period = ps.period;
        dc.classes = ps.classes;
        st.dominant.push_back(std::move(dc));
    }

    st.big_period = 1;
    for (const auto& dc : st.dominant) st.big_period = std::lcm(st.big_period, dc.period);

    st.incomparable = true;
    for (size_t a = 0; a < st.dominant.size() && st.incomparable; ++a) {
        const VertexSet reached = reach_sets(d, st.dominant[a].vertices).reached;
        for (size_t b = 0; b < st.dominant.size(); ++b) {
            if (b == a) continue;
            for (int v : st.dominant[b].vertices)
                if (reached.count(v)) st.incomparable = false;
        }
    }
    return st;
}

struct MaskedEigenpair {
    int i = 0;                // dominant component position (0-based into structure.dominant)
    int j = 0;                // class position 0..p_i-1
    VertexSet support;        // V_{i,j}
    CMatrix a_mask;           // V_{i,j}-mask of A^{p_i}
    CVector v_left, v_right;  // rho^{p_i}-eigenpair, nonnegative real, v_L . v_R = 1
};

namespace detail {

// Deterministic power iteration on m, started from the indicator of s.
inline CVector power_iterate(const CMatrix& m, const VertexSet& s, double target) {
    const int n = static_cast<int>(m.rows());
    CVector v = CVector::Zero(n);
    for (int u : s) v(u - 1) = 1.0;
    v /= v.norm();
    for (int it = 0; it < 100000; ++it) {
        CVector next = m * v;
        const double nrm = next.norm();
        if (nrm == 0.0) throw std::runtime_error("power_iterate: vector annihilated");
        next /= nrm;
        if ((next - v).norm() < 1e-12) {
            v = next;
            break;
        }
        v = next;
    }
    // Residual sanity against the expected eigenvalue.
    if ((m * v - target * v).norm() > 1e-7 * std::max(1.0, target))
        throw std::runtime_error("power_iterate: did not converge to the expected eigenvalue");
    // Entries are nonnegative up to noise; rotate away any global phase.
    Complex phase(0.0, 0.0);
    for (int k = 0; k < n; ++k)
        if (std::abs(v(k)) > std::abs(phase)) phase = v(k);
    v /= (phase / std::abs(phase));
    for (int k = 0; k < n; ++k) v(k) = Complex(std::max(v(k).real(), 0.0), 0.0);
    return v;
}

}  // namespace detail

// One masked eigenpair per periodic class of dominant component i.
// V_{i,j} = vertices joined to P_{i,j} by a walk (either direction) in D^{p_i};
// the eigenpair lives on the V_{i,j}-mask of A^{p_i} at eigenvalue rho^{p_i}.
inline std::vector<MaskedEigenpair> class_masks(const Digraph& d, const DominantStructure& st,
                                                int i) {
    if (!st.incomparable)
        throw std::invalid_argument("class_masks: index > 1; use spectral module instead");
    if (i < 0 || i >= static_cast<int>(st.dominant.size()))
        throw std::invalid_argument("class_masks: not a dominant component index");
    const DominantComponent& dc = st.dominant[i];
    const Digraph dp = power(d, static_cast<unsigned long long>(dc.period));
    const double target = std::pow(st.rho, dc.period);

    std::vector<MaskedEigenpair> out;
    for (int j = 0; j < dc.period; ++j) {
        MaskedEigenpair pair;
        pair.i = i;
        pair.j = j;
        const ReachSets rs = reach_sets(dp, dc.classes[j]);
        for (int v : rs.reached) pair.support.insert(v);
        for (int v : rs.reaching) pair.support.insert(v);
        pair.a_mask = to_cmatrix(mask(dp.adj, pair.support));

        // All-ones start on V; the iteration finds the unique dominant pair of
        // the mask, supported on the reaching (right) / reached (left) side.
        pair.v_right = detail::power_iterate(pair.a_mask, pair.support, target);
        pair.v_left = detail::power_iterate(pair.a_mask.transpose(), pair.support, target);

        // Scale so v_L . v_R = 1 and the class restrictions have equal norm.
        const Complex dot = pair.v_left.transpose() * pair.v_right;
        if (std::abs(dot) < 1e-12) throw std::runtime_error("class_masks: degenerate pairing");
        double left_class = 0.0, right_class = 0.0;
        for (int v : dc.classes[j]) {
            left_class += std::norm(pair.v_left(v - 1));
            right_class += std::norm(pair.v_right(v - 1));
        }
        left_class = std::sqrt(left_class);
        right_class = std::sqrt(right_class);
        const double alpha = std::sqrt(right_class / (left_class * dot.real()));
        const double beta = alpha * left_class / right_class;
        pair.v_left *= alpha;
        pair.v_right *= beta;
        out.push_back(std::move(pair));
    }
    return out;
}

inline std::vector<std::vector<MaskedEigenpair>> all_class_masks(const Digraph& d,
                                                                 const DominantStructure& st) {
    std::vector<std::vector<MaskedEigenpair>> out;
    for (size_t i = 0; i < st.dominant.size(); ++i)
        out.push_back(class_masks(d, st, static_cast<int>(i)));
    return out;
}

// c_k = sum_i sum_j (v_I . v_R^{<i,j>}) (v_L^{<i,j+k mod p_i>} . v_F),
// the limit of f(Pm+k)/rho^{Pm+k}. Every summand is nonnegative.
inline double growth_coefficient(const AutomatonSystem& sys, const DominantStructure& st,
                                 const std::vector<std::vector<MaskedEigenpair>>& masks, int k) {
    if (!st.incomparable)
        throw std::invalid_argument("growth_coefficient: dominant components not incomparable");
    if (k < 0 || k >= st.big_period)
        throw std::invalid_argument("growth_coefficient: residue out of range");
    const int n = sys.digraph.n;
    CVector w_l = CVector::Zero(n), w_r = CVector::Zero(n);
    for (int v : sys.initial) w_l(v - 1) = 1.0;
    for (int v : sys.final) w_r(v - 1) = 1.0;

    double c = 0.0;
    for (size_t i = 0; i < masks.size(); ++i) {
        const int p = st.dominant[i].period;
        for (int j = 0; j < p; ++j) {
            const Complex in = w_l.transpose() * masks[i][j].v_right;
            const Complex out = masks[i][(j + k) % p].v_left.transpose() * w_r;
            c += (in * out).real();
        }
    }
    return c;
}

inline double growth_coefficient(const AutomatonSystem& sys, const DominantStructure& st, int k) {
    return growth_coefficient(sys, st, all_class_masks(sys.digraph, st), k);
}

struct SupportWitness {
    int vertex = 0;
    bool ok = false;
    std::vector<int> path;  // vertex -> ... -> witness (right) or witness -> ... -> vertex (left)
};

struct SupportReport {
    bool pass = true;
    std::vector<SupportWitness> witnesses;
};

namespace detail {

inline bool component_has_eigenvalue(const Digraph& d, const VertexSet& component,
                                     Complex lambda) {
    const IntPoly p = char_poly(submatrix(d.adj, component));
    const CPoly cp = to_cpoly(p);
    const double scale = cpoly_coeff_norm(cp) * std::pow(std::max(1.0, std::abs(lambda)),
                                                         double(poly_degree(p)));
    return std::abs(cpoly_eval(cp, lambda)) <= 1e-6 * std::max(scale, 1.0);
}

inline std::vector<int> bfs_path(const Digraph& d, int from, const std::vector<bool>& goal,
                                 bool forward) {
    std::vector<int> parent(d.n + 1, 0);
    std::vector<bool> seen(d.n + 1, false);
    std::queue<int> q;
    seen[from] = true;
    q.push(from);
    int hit = goal[from] ? from : 0;
    while (!q.empty() && hit == 0) {
        int u = q.front();
        q.pop();
        for (int w = 1; w <= d.n; ++w) {
            const BigInt& m = forward ? d.adj(u - 1, w - 1) : d.adj(w - 1, u - 1);
            if (m == 0 || seen[w]) continue;
            seen[w] = true;
            parent[w] = u;
            if (goal[w]) {
                hit = w;
                break;
            }
            q.push(w);
        }
    }
    if (hit == 0) return {};
    std::vector<int> path;
    for (int v = hit; v != 0; v = parent[v]) path.push_back(v);
    if (forward) std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace detail

// Support structure of a generalized eigenvector: every nonzero coordinate
// must see (right: downstream, left: upstream) a nonzero coordinate inside a
// component carrying the eigenvalue.
inline SupportReport support_reachability_check(const Digraph& d, const CVector& v,
                                                Complex lambda, bool right_side,
                                                double tol = 1e-8) {
    const ComponentPartition part = irreducible_components(d);
    std::vector<bool> component_carries(part.components.size(), false);
    for (size_t c = 0; c < part.components.size(); ++c)
        component_carries[c] = detail::component_has_eigenvalue(d, part.components[c], lambda);

    std::vector<bool> goal(d.n + 1, false);
    for (int w = 1; w <= d.n; ++w)
        if (std::abs(v(w - 1)) > tol && component_carries[part.vertex_to_component[w]])
            goal[w] = true;

    SupportReport rep;
    for (int u = 1; u <= d.n; ++u) {
        if (std::abs(v(u - 1)) <= tol) continue;
        SupportWitness w;
        w.vertex = u;
        w.path = detail::bfs_path(d, u, goal, right_side);
        w.ok = !w.path.empty();
        if (!w.ok) rep.pass = false;
        rep.witnesses.push_back(std::move(w));
    }
    return rep;
}

struct RestrictionReport {
    int component = -1;   // last component (condensation order) meeting the support
    CVector restriction;  // v on that component's vertices, sorted by id
    double residual = 0.0;
    bool pass = false;
};

// The last nonzero block of a right generalized lambda-eigenvector is itself a
// generalized lambda-eigenvector of that component's block, with index <= nu.
inline RestrictionReport component_restriction_check(const Digraph& d, const CVector& v,
                                                     Complex lambda, int nu,
                                                     double tol = 1e-8) {
    const ComponentPartition part = irreducible_components(d);
    RestrictionReport rep;
    for (int c = static_cast<int>(part.components.size()) - 1; c >= 0; --c) {
        double nrm = 0.0;
        for (int w : part.components[c]) nrm += std::norm(v(w - 1));
        if (std::sqrt(nrm) > tol) {
            rep.component = c;
            break;
        }
    }
    if (rep.component < 0) {
        rep.pass = true;  // zero vector: vacuous
        return rep;
    }
    const VertexSet& comp = part.components[rep.component];
    rep.restriction = CVector::Zero(static_cast<int>(comp.size()));
    int k = 0;
    for (int w : comp) rep.restriction(k++) = v(w - 1);
    CMatrix block = to_cmatrix(submatrix(d.adj, comp));
    CMatrix shifted = block - lambda * CMatrix::Identity(block.rows(), block.cols());
    CVector r = rep.restriction;
    for (int s = 0; s < nu; ++s) r = shifted * r;
    rep.residual = r.norm() / std::max(rep.restriction.norm(), 1e-300);
    rep.pass = rep.residual <= 1e-6;
    return rep;
}

}  // namespace walkspec

#endif
