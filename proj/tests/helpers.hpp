#ifndef TESTS_HELPERS_HPP
#define TESTS_HELPERS_HPP

#include "walkspec/analyze.hpp"

#include <random>
#include <set>
#include <string>
#include <vector>

namespace testutil {

using namespace walkspec;

inline IntMatrix make_matrix(const std::vector<std::vector<long long>>& rows) {
    IntMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) m(int(i), int(j)) = rows[i][j];
    return m;
}

// Paper example matrices.
inline IntMatrix ex1_matrix() {
    return make_matrix({{1, 1, 0}, {0, 1, 1}, {0, 0, 2}});
}
inline IntMatrix ex2_matrix() {
    return make_matrix({{2, 1, 1, 0}, {0, 2, 0, 0}, {0, 0, 0, 1}, {0, 0, 4, 0}});
}
inline IntMatrix ex3_matrix() {
    return make_matrix({{0, 1, 2, 0, 1}, {0, 2, 0, 0, 0}, {0, 0, 0, 2, 0}, {0, 0, 2, 0, 1},
                        {0, 0, 0, 0, 0}});
}

inline Digraph digraph_of(const IntMatrix& a) {
    Digraph d(a.rows());
    d.adj = a;
    return d;
}

inline AutomatonSystem ex1_system() {
    AutomatonSystem sys;
    sys.digraph = digraph_of(ex1_matrix());
    sys.initial = {1};
    sys.final = {3};
    return sys;
}

inline AutomatonSystem ex3_system() {
    AutomatonSystem sys;
    sys.digraph = digraph_of(ex3_matrix());
    sys.initial = {1};
    sys.final = {2, 3, 5};
    return sys;
}

inline IntMatrix random_matrix(std::mt19937& rng, int max_n = 6, int max_entry = 3) {
    std::uniform_int_distribution<int> size(1, max_n);
    std::uniform_int_distribution<int> entry(0, max_entry);
    const int n = size(rng);
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = entry(rng);
    return m;
}

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const CMatrix& a, const IntMatrix& b) {
    double worst = 0.0;
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j)
            worst = std::max(worst, std::abs(a(i, j) - b(i, j).convert_to<double>()));
    return worst;
}

// Independent regex word matcher working directly on the AST: the set of
// positions reachable after consuming a prefix. No automaton involved, so it
// cross-checks the whole compile pipeline.
inline std::set<size_t> ast_match_positions(const RegexNodePtr& node, const std::string& s,
                                            const std::set<size_t>& starts) {
    std::set<size_t> out;
    switch (node->kind) {
        case RegexNode::Kind::Literal:
            for (size_t p : starts)
                if (p < s.size() && s[p] == node->symbol) out.insert(p + 1);
            return out;
        case RegexNode::Kind::Concat: {
            std::set<size_t> cur = starts;
            for (const auto& child : node->children) cur = ast_match_positions(child, s, cur);
            return cur;
        }
        case RegexNode::Kind::Alternate:
            for (const auto& child : node->children)
                for (size_t p : ast_match_positions(child, s, starts)) out.insert(p);
            return out;
        case RegexNode::Kind::Star: {
            std::set<size_t> cur = starts;
            while (true) {
                std::set<size_t> next = ast_match_positions(node->children[0], s, cur);
                size_t before = cur.size();
                cur.insert(next.begin(), next.end());
                if (cur.size() == before) break;
            }
            return cur;
        }
    }
    return out;
}

inline bool ast_matches(const RegexAst& ast, const std::string& s) {
    return ast_match_positions(ast.root, s, {0}).count(s.size()) > 0;
}

// Brute-force count of length-m words in the language, by full enumeration.
inline long long brute_force_word_count(const RegexAst& ast, int m) {
    std::vector<char> alphabet(ast.alphabet.begin(), ast.alphabet.end());
    if (alphabet.empty()) return m == 0 && ast_matches(ast, "") ? 1 : 0;
    long long count = 0;
    std::string word(static_cast<size_t>(m), alphabet[0]);
    std::vector<size_t> idx(static_cast<size_t>(m), 0);
    while (true) {
        if (ast_matches(ast, word)) ++count;
        int pos = m - 1;
        while (pos >= 0) {
            if (++idx[pos] < alphabet.size()) {
                word[pos] = alphabet[idx[pos]];
                break;
            }
            idx[pos] = 0;
            word[pos] = alphabet[0];
            --pos;
        }
        if (pos < 0) break;
    }
    return count;
}

// Random regex over {a,b}, deterministic in the rng state.
inline std::string random_regex(std::mt19937& rng, int budget = 8) {
    std::uniform_int_distribution<int> kind(0, 9);
    std::uniform_int_distribution<int> letter(0, 1);
    if (budget <= 1) return std::string(1, char('a' + letter(rng)));
    switch (kind(rng)) {
        case 0:
        case 1:
        case 2: {  // concat
            const int left = 1 + int(rng() % unsigned(budget - 1));
            return random_regex(rng, left) + random_regex(rng, budget - left);
        }
        case 3:
        case 4: {  // alternation
            const int left = 1 + int(rng() % unsigned(budget - 1));
            return "(" + random_regex(rng, left) + "|" + random_regex(rng, budget - left) + ")";
        }
        case 5:
        case 6:  // star
            return "(" + random_regex(rng, budget - 1) + ")*";
        default:
            return std::string(1, char('a' + letter(rng)));
    }
}

inline Digraph random_digraph(std::mt19937& rng, int max_n = 6, int max_mult = 3) {
    std::uniform_int_distribution<int> size(1, max_n);
    const int n = size(rng);
    std::uniform_int_distribution<int> mult(0, max_mult);
    Digraph d(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int m = mult(rng);
            if (m > 1) d.adj(i, j) = m - 1;  // bias toward sparsity
        }
    return d;
}

}  // namespace testutil

#endif
