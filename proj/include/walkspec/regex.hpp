#ifndef WALKSPEC_REGEX_HPP
#define WALKSPEC_REGEX_HPP

#include "walkspec/digraph.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace walkspec {

// Grammar: alternation '|' < concatenation < '*', parentheses for grouping,
// literals are ASCII letters. '+', '?', classes and anchors are rejected.

struct RegexNode;
using RegexNodePtr = std::shared_ptr<const RegexNode>;

struct RegexNode {
    enum class Kind { Literal, Concat, Alternate, Star };
    Kind kind;
    char symbol = 0;                    // Literal
    std::vector<RegexNodePtr> children; // Concat/Alternate; Star has exactly one
};

struct RegexAst {
    RegexNodePtr root;
    std::set<char> alphabet;
};

class RegexSyntaxError : public std::invalid_argument {
public:
    RegexSyntaxError(const std::string& msg, size_t pos)
        : std::invalid_argument(msg + " at position " + std::to_string(pos)), position(pos) {}
    size_t position;
};

namespace detail {

class RegexParser {
public:
    explicit RegexParser(const std::string& s) : src_(s) {}

    RegexAst parse() {
        if (src_.empty()) throw RegexSyntaxError("empty expression", 0);
        RegexAst ast;
        ast.root = parse_alternation();
        if (pos_ != src_.size()) throw RegexSyntaxError("unexpected character", pos_);
        for (char c : src_)
            if (std::isalpha(static_cast<unsigned char>(c))) ast.alphabet.insert(c);
        return ast;
    }

private:
    RegexNodePtr parse_alternation() {
        std::vector<RegexNodePtr> branches{parse_concat()};
        while (peek() == '|') {
            ++pos_;
            branches.push_back(parse_concat());
        }
        if (branches.size() == 1) return branches[0];
        auto node = std::make_shared<RegexNode>();
        node->kind = RegexNode::Kind::Alternate;
        node->children = std::move(branches);
        return node;
    }

    RegexNodePtr parse_concat() {
        std::vector<RegexNodePtr> parts;
        while (true) {
            char c = peek();
            if (c == 0 || c == '|' || c == ')') break;
            parts.push_back(parse_postfix());
        }
        if (parts.empty()) throw RegexSyntaxError("expected a term", pos_);
        if (parts.size() == 1) return parts[0];
        auto node = std::make_shared<RegexNode>();
        node->kind = RegexNode::Kind::Concat;
        node->children = std::move(parts);
        return node;
    }

    RegexNodePtr parse_postfix() {
        RegexNodePtr base = parse_atom();
        while (peek() == '*') {
            ++pos_;
            auto node = std::make_shared<RegexNode>();
            node->kind = RegexNode::Kind::Star;
            node->children = {base};
            base = node;
        }
        return base;
    }

    RegexNodePtr parse_atom() {
        char c = peek();
        if (c == '(') {
            size_t open = pos_++;
            RegexNodePtr inner = parse_alternation();
            if (peek() != ')') throw RegexSyntaxError("unbalanced parenthesis", open);
            ++pos_;
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            ++pos_;
            auto node = std::make_shared<RegexNode>();
            node->kind = RegexNode::Kind::Literal;
            node->symbol = c;
            return node;
        }
        if (c == '*') throw RegexSyntaxError("'*' needs an operand", pos_);
        if (c == '+' || c == '?' || c == '[' || c == '^' || c == '$' || c == '.')
            throw RegexSyntaxError(std::string("unsupported operator '") + c + "'", pos_);
        throw RegexSyntaxError("expected a literal or group", pos_);
    }

    char peek() const { return pos_ < src_.size() ? src_[pos_] : 0; }

    const std::string& src_;
    size_t pos_ = 0;
};

// Thompson NFA: states 0..n-1, epsilon arcs, one accept state per fragment.
struct Nfa {
    struct Edge {
        int to;
        char symbol;  // 0 for epsilon
    };
    std::vector<std::vector<Edge>> edges;
    int start = 0;
    int accept = 0;

    int add_state() {
        edges.emplace_back();
        return static_cast<int>(edges.size()) - 1;
    }
};

inline std::pair<int, int> build_nfa(Nfa& nfa, const RegexNodePtr& node) {
    switch (node->kind) {
        case RegexNode::Kind::Literal: {
            int s = nfa.add_state(), t = nfa.add_state();
            nfa.edges[s].push_back({t, node->symbol});
            return {s, t};
        }
        case RegexNode::Kind::Concat: {
            auto [s, t] = build_nfa(nfa, node->children.front());
            for (size_t i = 1; i < node->children.size(); ++i) {
                auto [s2, t2] = build_nfa(nfa, node->children[i]);
                nfa.edges[t].push_back({s2, 0});
                t = t2;
            }
            return {s, t};
        }
        case RegexNode::Kind::Alternate: {
            int s = nfa.add_state(), t = nfa.add_state();
            for (const auto& child : node->children) {
                auto [cs, ct] = build_nfa(nfa, child);
                nfa.edges[s].push_back({cs, 0});
                nfa.edges[ct].push_back({t, 0});
            }
            return {s, t};
        }
        case RegexNode::Kind::Star: {
            int s = nfa.add_state(), t = nfa.add_state();
            auto [cs, ct] = build_nfa(nfa, node->children[0]);
            nfa.edges[s].push_back({cs, 0});
            nfa.edges[s].push_back({t, 0});
            nfa.edges[ct].push_back({cs, 0});
            nfa.edges[ct].push_back({t, 0});
            return {s, t};
        }
    }
    throw std::logic_error("build_nfa: unreachable");
}

// Epsilon closure by DFS; result sorted for canonical subset identity.
inline std::set<int> epsilon_closure(const Nfa& nfa, const std::set<int>& states) {
    std::set<int> closure = states;
    std::vector<int> work(states.begin(), states.end());
    while (!work.empty()) {
        int s = work.back();
        work.pop_back();
        for (const auto& e : nfa.edges[s])
            if (e.symbol == 0 && closure.insert(e.to).second) work.push_back(e.to);
    }
    return closure;
}

}  // namespace detail

inline RegexAst parse_regex(const std::string& expr) {
    return detail::RegexParser(expr).parse();
}

// Counting system (v_I, A, v_F): a digraph with 0/1 initial and final vectors.
// f(m) = v_I^T A^m v_F.
struct AutomatonSystem {
    Digraph digraph;
    VertexSet initial;
    VertexSet final;
};

// Thompson NFA -> subset construction. State numbering is subset-discovery
// order from the initial closure, so compilation is deterministic. The DFA is
// not minimized; only the f-values are contracted.
inline AutomatonSystem compile(const RegexAst& ast) {
    detail::Nfa nfa;
    auto [start, accept] = detail::build_nfa(nfa, ast.root);
    nfa.start = start;
    nfa.accept = accept;

    std::vector<char> alphabet(ast.alphabet.begin(), ast.alphabet.end());
    std::map<std::set<int>, int> subset_id;
    std::vector<std::set<int>> subsets;
    std::queue<int> work;

    auto intern = [&](const std::set<int>& closure) {
        auto it = subset_id.find(closure);
        if (it != subset_id.end()) return it->second;
        int id = static_cast<int>(subsets.size());
        subset_id.emplace(closure, id);
        subsets.push_back(closure);
        work.push(id);
        return id;
    };

    intern(detail::epsilon_closure(nfa, {nfa.start}));
    std::vector<std::vector<std::pair<int, int>>> dfa_arcs;  // state -> (target, symbol count)
    while (!work.empty()) {
        int id = work.front();
        work.pop();
        std::map<int, int> target_count;
        for (char sym : alphabet) {
            std::set<int> moved;
            for (int s : subsets[id])
                for (const auto& e : nfa.edges[s])
                    if (e.symbol == sym) moved.insert(e.to);
            if (moved.empty()) continue;
            int target = intern(detail::epsilon_closure(nfa, moved));
            ++target_count[target];
        }
        if (static_cast<int>(dfa_arcs.size()) <= id) dfa_arcs.resize(id + 1);
        for (auto [target, count] : target_count) dfa_arcs[id].push_back({target, count});
    }

    const int n = static_cast<int>(subsets.size());
    AutomatonSystem sys;
    sys.digraph = Digraph(n);
    for (int s = 0; s < static_cast<int>(dfa_arcs.size()); ++s)
        for (auto [target, count] : dfa_arcs[s]) sys.digraph.adj(s, target) = count;
    sys.initial.insert(1);
    for (int s = 0; s < n; ++s)
        if (subsets[s].count(nfa.accept)) sys.final.insert(s + 1);
    return sys;
}

inline AutomatonSystem zero_system() {
    AutomatonSystem sys;
    sys.digraph = Digraph(1);
    return sys;
}

// Restrict to states reached from I that also reach F; f(m) is unchanged.
// An empty result collapses to the 1-state zero system.
inline AutomatonSystem trim(const AutomatonSystem& sys) {
    if (sys.initial.empty() || sys.final.empty()) return zero_system();
    VertexSet from_initial = reach_sets(sys.digraph, sys.initial).reached;
    VertexSet to_final = reach_sets(sys.digraph, sys.final).reaching;
    std::vector<int> keep;
    for (int v : from_initial)
        if (to_final.count(v)) keep.push_back(v);
    if (keep.empty()) return zero_system();

    std::map<int, int> renum;
    for (size_t i = 0; i < keep.size(); ++i) renum[keep[i]] = static_cast<int>(i) + 1;
    AutomatonSystem out;
    out.digraph = Digraph(static_cast<int>(keep.size()));
    for (int u : keep)
        for (int v : keep) out.digraph.adj(renum[u] - 1, renum[v] - 1) = sys.digraph.adj(u - 1, v - 1);
    for (int v : sys.initial)
        if (renum.count(v)) out.initial.insert(renum[v]);
    for (int v : sys.final)
        if (renum.count(v)) out.final.insert(renum[v]);
    return out;
}

inline BigInt structure_function(const AutomatonSystem& sys, unsigned long long m) {
    return count_walks(sys.digraph, sys.initial, sys.final, m);
}

}  // namespace walkspec

#endif
