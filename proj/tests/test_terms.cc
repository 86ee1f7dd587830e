#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hh"
#include "ttw/builtins.hh"
#include "ttw/dag.hh"
#include "ttw/tree.hh"

using namespace ttw;

TEST_CASE("parse_term golden") {
    const auto& abc = builtins::abc();
    CHECK(parse_term("c", abc) == leaf("c"));
    CHECK(parse_term("a(b(c),c)", abc) == node("a", {node("b", {leaf("c")}), leaf("c")}));
    CHECK(tree_text(parse_term("a(b(c),c)", abc)) == "a(b(c),c)");

    CHECK_THROWS_AS(parse_term("a(b,c)", abc), ParseError);   // b has arity 1
    CHECK_THROWS_AS(parse_term("d", abc), ParseError);        // unknown letter
    CHECK_THROWS_AS(parse_term("a(c,c", abc), ParseError);    // unterminated
    CHECK_THROWS_AS(parse_term("a(c,c))", abc), ParseError);  // trailing input
    CHECK_THROWS_AS(parse_term("x1", abc), ParseError);       // params not allowed here
}

TEST_CASE("alphabet invariants") {
    CHECK_THROWS_AS((RankedAlphabet{{"a", 2}, {"a", 1}}), ValidationError);
    CHECK_THROWS_AS((RankedAlphabet{{"x1", 0}}), ValidationError);   // reserved
    CHECK_THROWS_AS((RankedAlphabet{{"a b", 0}}), ValidationError);  // whitespace
    CHECK_THROWS_AS((RankedAlphabet{{"a(", 0}}), ValidationError);
    RankedAlphabet a{{"e", 0}};
    auto neutral_nonnullary = [] {
        RankedAlphabet b{{"f", 1}};
        b.mark_neutral("f");
    };
    CHECK_THROWS_AS(neutral_nonnullary(), ValidationError);
    a.mark_neutral("e");
    CHECK(a.is_neutral("e"));
}

TEST_CASE("tree_size golden") {
    const auto& abc = builtins::abc();
    CHECK(tree_size(leaf("c")) == 1);
    // the quadratic example's displayed output for n = 2
    Tree t = parse_term("a(b(b(c)),a(b(c),c))", abc);
    CHECK(tree_size(t) == 8);
}

TEST_CASE("yield golden and homomorphism") {
    RankedAlphabet a{{"a", 2}, {"c", 0}, {"d", 0}, {"eps", 0}};
    a.mark_neutral("eps");
    CHECK(yield_of(leaf("eps"), a).empty());
    Tree t = parse_term("a(c,a(d,eps))", a);
    Word expected;
    oracle::naive_yield(t, a, expected);
    CHECK(word_text(expected) == "cd");
    CHECK(yield_of(t, a) == expected);

    // yield(a(t1,t2)) = yield(t1) . yield(t2) on enumerated trees
    for (const Tree& u : enumerate_trees(a, 6)) {
        Word whole = yield_of(u, a);
        if (u.label != "a") continue;
        Word glued = yield_of(u.children[0], a);
        Word rhs = yield_of(u.children[1], a);
        glued.insert(glued.end(), rhs.begin(), rhs.end());
        CHECK(whole == glued);
    }
}

TEST_CASE("string codecs") {
    const auto& u = builtins::unary_ab();
    RankedAlphabet abac{{"a", 1}, {"b", 1}, {"c", 1}, {"eps", 0}};

    CHECK(encode_string({}, u) == leaf("eps"));
    CHECK(decode_string(leaf("eps"), u).empty());

    // the unary-tree encoding of "abac"
    Tree t = encode_string(word_from_chars("abac"), abac);
    CHECK(tree_text(t) == "a(b(a(c(eps))))");
    CHECK(word_text(decode_string(t, abac)) == "abac");

    // decode rejects non-chains and chains not ending in the marker
    CHECK_THROWS_AS(decode_string(parse_term("a(b(c),c)", builtins::abc()), builtins::abc()),
                    ValidationError);
    RankedAlphabet two_ends{{"a", 1}, {"e1", 0}, {"e2", 0}};
    CHECK_THROWS_AS(decode_string(leaf("e1"), two_ends), ValidationError);
    CHECK_THROWS_AS(encode_string(word_from_chars("az"), u), ValidationError);
    CHECK_THROWS_AS(encode_string({}, builtins::abc()), ValidationError);

    // round trips both ways on all strings up to length 8
    for (const Word& w : enumerate_words({"a", "b"}, 8))
        CHECK(decode_string(encode_string(w, u), u) == w);
}

TEST_CASE("enumerate_trees is complete, duplicate-free and canonically ordered") {
    RankedAlphabet only_c{{"c", 0}};
    auto single = enumerate_trees(only_c, 2);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == leaf("c"));

    RankedAlphabet bc{{"b", 1}, {"c", 0}};
    auto chains = enumerate_trees(bc, 3);
    REQUIRE(chains.size() == 3);
    CHECK(tree_text(chains[0]) == "c");
    CHECK(tree_text(chains[1]) == "b(c)");
    CHECK(tree_text(chains[2]) == "b(b(c))");

    const auto& abc = builtins::abc();
    auto trees = enumerate_trees(abc, 4);
    // brute-force recursive count: 1 + 1 + 2 + 4
    CHECK(oracle::count_trees_upto(abc, 4) == 8);
    REQUIRE(trees.size() == 8);
    std::vector<std::string> got;
    for (const auto& t : trees) got.push_back(tree_text(t));
    // by node count, then preorder-lexicographic in declaration order a<b<c
    std::vector<std::string> expected{"c",         "b(c)",      "a(c,c)",    "b(b(c))",
                                      "a(b(c),c)", "a(c,b(c))", "b(a(c,c))", "b(b(b(c)))"};
    CHECK(got == expected);

    // no duplicates, full agreement with the brute-force count at size 7
    auto seven = enumerate_trees(abc, 7);
    CHECK(seven.size() == oracle::count_trees_upto(abc, 7));
    std::set<std::string> uniq;
    for (const auto& t : seven) uniq.insert(tree_text(t));
    CHECK(uniq.size() == seven.size());

    CHECK_THROWS_AS(enumerate_trees((RankedAlphabet{{"b", 1}}), 3), ValidationError);
}

TEST_CASE("word enumeration is by length, then lexicographic") {
    auto words = enumerate_words({"a", "b"}, 2);
    std::vector<std::string> got;
    for (const auto& w : words) got.push_back(word_text(w));
    CHECK(got == std::vector<std::string>{"", "a", "b", "aa", "ab", "ba", "bb"});
    CHECK(enumerate_words({"a", "b", "c"}, 8).size() == 9841);  // (3^9-1)/2
}

TEST_CASE("substitute and normalize") {
    const auto& abc = builtins::abc();
    auto ctx = [&](int arity, const std::string& body) {
        return Context{arity, parse_term(body, abc, true)};
    };

    // identity context composed with anything is that thing
    Context id = ctx(1, "x1");
    Context dup = ctx(1, "a(x1,x1)");
    std::vector<Context> args{dup};
    CHECK(substitute(id, args, 1) == dup);

    // concatenation as composition
    RankedAlphabet unary{{"a", 1}, {"b", 1}, {"c", 1}, {"e", 0}};
    Context f{1, parse_term("a(b(x1))", unary, true)};
    Context g{1, parse_term("a(c(x1))", unary, true)};
    std::vector<Context> gs{g};
    CHECK(tree_text(substitute(f, gs, 1).body) == "a(b(a(c(x1))))");

    // ground argument, naive replacement oracle
    Context spread = ctx(1, "a(x1,x1)");
    Context ground = ctx(0, "b(c)");
    std::vector<Context> grounds{ground};
    Tree expected = oracle::naive_substitute(spread.body, {ground.body});
    CHECK(tree_text(expected) == "a(b(c),b(c))");
    CHECK(substitute(spread, grounds, 0).body == expected);

    // arity errors and normalization
    CHECK_THROWS_AS(substitute(spread, std::vector<Context>{}, 0), ValidationError);
    CHECK(normalize(ctx(5, "a(x2,c)")).arity == 2);
    CHECK(normalize(ctx(3, "c")).arity == 0);
    CHECK_THROWS_AS(validate_context(ctx(0, "x1"), abc), ValidationError);

    // associativity on unary contexts: f.(g.h) = (f.g).h
    std::vector<Context> pool{ctx(1, "x1"), ctx(1, "a(x1,c)"), ctx(1, "b(x1)"),
                              ctx(1, "a(b(x1),x1)")};
    for (const auto& fa : pool)
        for (const auto& gb : pool)
            for (const auto& hc : pool) {
                std::vector<Context> h1{hc};
                std::vector<Context> g1{gb};
                Context gh = substitute(gb, h1, 1);
                std::vector<Context> gh1{gh};
                Context left = substitute(fa, gh1, 1);
                Context fg = substitute(fa, g1, 1);
                Context right = substitute(fg, h1, 1);
                CHECK(left == right);
            }
}

TEST_CASE("term dags: unfold, stats, text format") {
    // already a tree: unfold is the identity
    Tree t = parse_term("a(b(c),c)", builtins::abc());
    TermDag plain = dag_of_tree(t);
    CHECK(unfold(plain) == t);
    CHECK(dag_stats(plain).node_count == 4);
    CHECK(dag_stats(plain).edge_count == 3);

    // the five-node shared dag: a over (b over b(c)) and (a over b(c), c)
    TermDag shared;
    shared.nodes = {
        {"a", {1, 2}},  // 0 root
        {"b", {3}},     // 1
        {"a", {3, 4}},  // 2
        {"b", {4}},     // 3
        {"c", {}},      // 4
    };
    shared.root = 0;
    CHECK(dag_stats(shared).node_count == 5);
    CHECK(dag_stats(shared).edge_count == 6);
    Tree unfolded = unfold(shared);
    CHECK(tree_text(unfolded) == "a(b(b(c)),a(b(c),c))");
    CHECK(unfolded == oracle::naive_unfold(shared));

    // diamond: both children point at the same b(c)
    TermDag diamond;
    diamond.nodes = {{"a", {1, 1}}, {"b", {2}}, {"c", {}}};
    diamond.root = 0;
    CHECK(tree_text(unfold(diamond)) == "a(b(c),b(c))");
    CHECK(unfold(diamond) == oracle::naive_unfold(diamond));

    // text format round trip
    std::string text = dag_text(shared);
    TermDag reparsed = parse_dag(text);
    CHECK(dag_text(reparsed) == text);
    CHECK(unfold(reparsed) == unfolded);

    // cycles and unreachable nodes are rejected
    TermDag cyclic;
    cyclic.nodes = {{"b", {1}}, {"b", {0}}};
    cyclic.root = 0;
    CHECK_THROWS_AS(validate_dag(cyclic), ValidationError);
    TermDag orphan;
    orphan.nodes = {{"c", {}}, {"c", {}}};
    orphan.root = 0;
    CHECK_THROWS_AS(validate_dag(orphan), ValidationError);

    // unfold preserves yield computed by in-order traversal with multiplicity
    RankedAlphabet alpha = builtins::abc();
    Word direct = yield_of(unfolded, alpha);
    Word via_dag;
    auto scan = [&](auto&& self, size_t id) -> void {
        if (shared.nodes[id].children.empty()) {
            via_dag.push_back(shared.nodes[id].label);
            return;
        }
        for (size_t c : shared.nodes[id].children) self(self, c);
    };
    scan(scan, shared.root);
    CHECK(direct == via_dag);
}

TEST_CASE("tree index paths") {
    TreeIndex idx(parse_term("a(b(c),c)", builtins::abc()));
    REQUIRE(idx.size() == 4);
    CHECK(idx.path(0) == "/");
    CHECK(idx[0].label == "a");
    CHECK(idx.path(1) == "/1");
    CHECK(idx.path(2) == "/1/1");
    CHECK(idx.path(3) == "/2");
    CHECK(idx.subtree(1) == parse_term("b(c)", builtins::abc()));
}
