#ifndef WALKSPEC_DIGRAPH_HPP
#define WALKSPEC_DIGRAPH_HPP

#include "walkspec/bigmath.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace walkspec {

using VertexSet = std::set<int>;  // 1-indexed vertex ids

// Multidigraph on vertices 1..n, stored densely: adj(i,j) is the multiplicity
// of arc (i+1, j+1).
struct Digraph {
    int n = 0;
    IntMatrix adj;

    Digraph() = default;
    explicit Digraph(int n_) : n(n_), adj(n_, n_) {
        if (n_ <= 0) throw std::invalid_argument("Digraph: vertex count must be positive");
    }
};

struct Arc {
    int u = 0, v = 0;
    BigInt mult = 1;
};

inline Digraph build_digraph(const std::vector<Arc>& arcs, int n) {
    Digraph d(n);
    for (const Arc& a : arcs) {
        if (a.u < 1 || a.u > n || a.v < 1 || a.v > n)
            throw std::invalid_argument("build_digraph: arc endpoint out of range");
        if (a.mult < 1) throw std::invalid_argument("build_digraph: multiplicity must be >= 1");
        d.adj(a.u - 1, a.v - 1) += a.mult;
    }
    return d;
}

inline Digraph build_digraph(const std::vector<std::pair<int, int>>& edges, int n) {
    std::vector<Arc> arcs;
    arcs.reserve(edges.size());
    for (auto [u, v] : edges) arcs.push_back({u, v, 1});
    return build_digraph(arcs, n);
}

inline const IntMatrix& adjacency_matrix(const Digraph& d) { return d.adj; }

inline void check_vertex_set(const Digraph& d, const VertexSet& s, const char* what) {
    for (int v : s)
        if (v < 1 || v > d.n) throw std::invalid_argument(std::string(what) + ": vertex out of range");
}

// Exact number of (S,T)-walks of length m by dynamic programming over arc
// multiplicities. This is the combinatorial oracle: no eigenstructure anywhere.
inline BigInt count_walks(const Digraph& d, const VertexSet& s, const VertexSet& t,
                          unsigned long long m) {
    check_vertex_set(d, s, "count_walks S");
    check_vertex_set(d, t, "count_walks T");
    std::vector<BigInt> cur(d.n, BigInt(0));
    for (int v : s) cur[v - 1] = 1;
    for (unsigned long long step = 0; step < m; ++step) {
        std::vector<BigInt> next(d.n, BigInt(0));
        for (int i = 0; i < d.n; ++i) {
            if (cur[i] == 0) continue;
            for (int j = 0; j < d.n; ++j)
                if (d.adj(i, j) != 0) next[j] += cur[i] * d.adj(i, j);
        }
        cur = std::move(next);
    }
    BigInt total = 0;
    for (int v : t) total += cur[v - 1];
    return total;
}

struct ComponentPartition {
    std::vector<VertexSet> components;      // topological order of the condensation
    std::vector<int> vertex_to_component;   // 1-indexed vertex -> component position
};

// SCCs in Frobenius normal form order. Among incomparable components the one
// containing the smallest vertex id comes first, so output is deterministic.
inline ComponentPartition irreducible_components(const Digraph& d) {
    const int n = d.n;
    // Tarjan, iterative.
    std::vector<int> low(n, -1), disc(n, -1), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    std::vector<std::vector<int>> sccs;
    int timer = 0;

    std::vector<std::vector<int>> succ(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (d.adj(i, j) != 0) succ[i].push_back(j);

    for (int root = 0; root < n; ++root) {
        if (disc[root] != -1) continue;
        std::vector<std::pair<int, size_t>> call{{root, 0}};
        while (!call.empty()) {
            auto& [v, it] = call.back();
            if (it == 0) {
                disc[v] = low[v] = timer++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            bool descended = false;
            while (it < succ[v].size()) {
                int w = succ[v][it++];
                if (disc[w] == -1) {
                    call.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], disc[w]);
            }
            if (descended) continue;
            if (low[v] == disc[v]) {
                std::vector<int> scc;
                while (true) {
                    int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = static_cast<int>(sccs.size());
                    scc.push_back(w);
                    if (w == v) break;
                }
                sccs.push_back(std::move(scc));
            }
            int finished = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[finished]);
        }
    }

    const int t = static_cast<int>(sccs.size());
    std::vector<std::set<int>> cond_succ(t);
    std::vector<int> indeg(t, 0);
    for (int i = 0; i < n; ++i)
        for (int j : succ[i])
            if (comp[i] != comp[j] && cond_succ[comp[i]].insert(comp[j]).second) ++indeg[comp[j]];

    std::vector<int> min_vertex(t, n);
    for (int c = 0; c < t; ++c)
        for (int v : sccs[c]) min_vertex[c] = std::min(min_vertex[c], v);

    // Kahn with a min-vertex priority queue for the deterministic tie-break.
    auto cmp = [&](int a, int b) { return min_vertex[a] > min_vertex[b]; };
    std::priority_queue<int, std::vector<int>, decltype(cmp)> ready(cmp);
    for (int c = 0; c < t; ++c)
        if (indeg[c] == 0) ready.push(c);

    ComponentPartition part;
    part.vertex_to_component.assign(n + 1, -1);
    while (!ready.empty()) {
        int c = ready.top();
        ready.pop();
        VertexSet vs;
        for (int v : sccs[c]) vs.insert(v + 1);
        const int pos = static_cast<int>(part.components.size());
        for (int v : vs) part.vertex_to_component[v] = pos;
        part.components.push_back(std::move(vs));
        for (int w : cond_succ[c])
            if (--indeg[w] == 0) ready.push(w);
    }
    return part;
}

struct PeriodStructure {
    int period = 0;
    std::vector<VertexSet> classes;  // P_0 .. P_{p-1}, arcs advance the index mod p
};

// Period = gcd of BFS level differences over all intra-component arcs,
// equivalently gcd of closed-walk lengths. Classes indexed so P_0 contains the
// smallest vertex id.
inline PeriodStructure period(const Digraph& d, const VertexSet& component) {
    check_vertex_set(d, component, "period");
    if (component.empty()) throw std::invalid_argument("period: empty component");
    bool has_arc = false;
    for (int u : component)
        for (int v : component)
            if (d.adj(u - 1, v - 1) != 0) has_arc = true;
    if (!has_arc) throw std::invalid_argument("period: aperiodicity undefined (no closed walk)");

    const int root = *component.begin();
    std::map<int, long long> level;
    level[root] = 0;
    std::queue<int> q;
    q.push(root);
    long long g = 0;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : component) {
            if (d.adj(u - 1, v - 1) == 0) continue;
            if (!level.count(v)) {
                level[v] = level[u] + 1;
                q.push(v);
            } else {
                g = std::gcd(g, level[u] + 1 - level[v]);
            }
        }
    }
    if (g == 0)
        throw std::invalid_argument("period: aperiodicity undefined (no closed walk)");
    const int p = static_cast<int>(g < 0 ? -g : g);

    PeriodStructure ps;
    ps.period = p;
    ps.classes.assign(p, {});
    // Residues relative to the smallest vertex id, so that it lands in P_0.
    const long long base = level[root];
    for (int v : component) {
        long long r = ((level[v] - base) % p + p) % p;
        ps.classes[static_cast<size_t>(r)].insert(v);
    }
    return ps;
}

// Digraph of A^r: arcs in bijection with length-r walks.
inline Digraph power(const Digraph& d, unsigned long long r) {
    if (r < 1) throw std::invalid_argument("power: r must be >= 1");
    Digraph out(d.n);
    out.adj = d.adj.pow(r);
    return out;
}

struct ReachSets {
    VertexSet reaching;  // {v : some (v,S)-walk}
    VertexSet reached;   // {v : some (S,v)-walk}
};

inline ReachSets reach_sets(const Digraph& d, const VertexSet& s) {
    check_vertex_set(d, s, "reach_sets");
    ReachSets rs;
    // Length-0 walks count, so S is in both sets.
    auto bfs = [&](bool forward) {
        std::vector<bool> seen(d.n + 1, false);
        std::queue<int> q;
        for (int v : s) {
            seen[v] = true;
            q.push(v);
        }
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int w = 1; w <= d.n; ++w) {
                const BigInt& m = forward ? d.adj(u - 1, w - 1) : d.adj(w - 1, u - 1);
                if (m != 0 && !seen[w]) {
                    seen[w] = true;
                    q.push(w);
                }
            }
        }
        VertexSet out;
        for (int v = 1; v <= d.n; ++v)
            if (seen[v]) out.insert(v);
        return out;
    };
    rs.reached = bfs(true);
    rs.reaching = bfs(false);
    return rs;
}

// S-mask: zero out every row and column outside S.
template <typename M>
inline M mask(const M& m, const VertexSet& s) {
    M out = m;
    for (int i = 0; i < out.rows(); ++i)
        for (int j = 0; j < out.cols(); ++j)
            if (!s.count(i + 1) || !s.count(j + 1)) out(i, j) = typename std::decay_t<decltype(out(i, j))>(0);
    return out;
}

}  // namespace walkspec

#endif
