#include "helpers.hpp"

#include <doctest.h>

#include <random>

using namespace walkspec;
using namespace testutil;

TEST_CASE("parser accepts the supported grammar") {
    CHECK_NOTHROW(parse_regex("a"));
    CHECK_NOTHROW(parse_regex("ab|ba"));
    CHECK_NOTHROW(parse_regex("(a|b)*"));
    CHECK_NOTHROW(parse_regex("a**"));
    CHECK_NOTHROW(parse_regex("a*ba*b(a|b)*"));
    const RegexAst ast = parse_regex("(ab|c)*d");
    CHECK(ast.alphabet == std::set<char>{'a', 'b', 'c', 'd'});
}

TEST_CASE("parser rejects malformed and unsupported input") {
    CHECK_THROWS_AS(parse_regex(""), RegexSyntaxError);
    CHECK_THROWS_AS(parse_regex("(ab"), RegexSyntaxError);
    CHECK_THROWS_AS(parse_regex("ab)"), RegexSyntaxError);
    CHECK_THROWS_AS(parse_regex("*a"), RegexSyntaxError);
    CHECK_THROWS_AS(parse_regex("a|"), RegexSyntaxError);
    CHECK_THROWS_AS(parse_regex("a+"), RegexSyntaxError);
    CHECK_THROWS_AS(parse_regex("a?"), RegexSyntaxError);
    CHECK_THROWS_AS(parse_regex("[ab]"), RegexSyntaxError);
    CHECK_THROWS_AS(parse_regex("a.b"), RegexSyntaxError);
    CHECK_THROWS_AS(parse_regex("^a$"), RegexSyntaxError);
    try {
        parse_regex("ab+c");
    } catch (const RegexSyntaxError& e) {
        CHECK(e.position == 2);
    }
}

TEST_CASE("precedence: alternation below concatenation below star") {
    // ab|c* means (ab)|(c*): matches "ab", "", "c", "cc" but not "ac".
    const RegexAst ast = parse_regex("ab|c*");
    CHECK(ast_matches(ast, "ab"));
    CHECK(ast_matches(ast, ""));
    CHECK(ast_matches(ast, "ccc"));
    CHECK(!ast_matches(ast, "ac"));
    CHECK(!ast_matches(ast, "abc"));
}

TEST_CASE("compiled system counts words of the language") {
    const AutomatonSystem sys = compile(parse_regex("a*ba*b(a|b)*"));
    for (int m = 0; m <= 14; ++m)
        CHECK(structure_function(sys, m) == (BigInt(1) << m) - m - 1);
}

TEST_CASE("empty word handling: f(0) = 1 iff an initial state is final") {
    CHECK(structure_function(compile(parse_regex("a*")), 0) == 1);
    CHECK(structure_function(compile(parse_regex("a")), 0) == 0);
    CHECK(structure_function(compile(parse_regex("a|b*")), 0) == 1);
}

TEST_CASE("arc multiplicity counts symbols per state pair") {
    // The DFA has one transition per symbol; each row of the adjacency
    // matrix sums to the alphabet size, parallel symbols merged into mult.
    const AutomatonSystem sys = compile(parse_regex("(a|b)*"));
    for (int i = 0; i < sys.digraph.n; ++i) {
        BigInt row = 0;
        for (int j = 0; j < sys.digraph.n; ++j) row += sys.digraph.adj(i, j);
        CHECK(row == 2);
    }
    for (int m = 0; m <= 10; ++m) CHECK(structure_function(sys, m) == BigInt(1) << m);
    // Same row-sum invariant on a two-letter language with a sink pattern.
    const AutomatonSystem t = compile(parse_regex("a*ba*b(a|b)*"));
    for (int i = 0; i < t.digraph.n; ++i) {
        BigInt row = 0;
        for (int j = 0; j < t.digraph.n; ++j) row += t.digraph.adj(i, j);
        CHECK(row == 2);
    }
}

TEST_CASE("compile agrees with the brute-force word enumerator") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 30; ++trial) {
        const std::string expr = random_regex(rng);
        CAPTURE(expr);
        const RegexAst ast = parse_regex(expr);
        const AutomatonSystem sys = compile(ast);
        for (int m = 0; m <= 7; ++m)
            CHECK(structure_function(sys, m) == brute_force_word_count(ast, m));
    }
}

TEST_CASE("trim preserves the structure function") {
    std::mt19937 rng(606);
    for (int trial = 0; trial < 20; ++trial) {
        const AutomatonSystem sys = compile(parse_regex(random_regex(rng)));
        const AutomatonSystem trimmed = trim(sys);
        CHECK(trimmed.digraph.n <= sys.digraph.n);
        for (int m = 0; m <= 8; ++m)
            CHECK(structure_function(trimmed, m) == structure_function(sys, m));
        // Trimmed: every state reached from I and reaching F.
        const VertexSet from_i = reach_sets(trimmed.digraph, trimmed.initial).reached;
        const VertexSet to_f = reach_sets(trimmed.digraph, trimmed.final).reaching;
        if (!trimmed.initial.empty())
            for (int v = 1; v <= trimmed.digraph.n; ++v) {
                CHECK(from_i.count(v) == 1);
                CHECK(to_f.count(v) == 1);
            }
    }
}

TEST_CASE("trim collapses dead systems to the zero system") {
    AutomatonSystem sys;
    sys.digraph = Digraph(3);
    sys.digraph.adj(0, 1) = 1;  // 1 -> 2; state 3 unreachable
    sys.initial = {1};
    sys.final = {3};
    const AutomatonSystem z = trim(sys);
    CHECK(z.digraph.n == 1);
    CHECK(z.final.empty());
    for (int m = 0; m <= 5; ++m) CHECK(structure_function(z, m) == 0);
}
