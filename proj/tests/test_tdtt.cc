#include <catch2/catch_amalgamated.hpp>

#include "oracles.hh"
#include "ttw/builtins.hh"
#include "ttw/fuzz.hh"
#include "ttw/tdtt.hh"

using namespace ttw;

namespace {

Tree T(const std::string& text) { return parse_term(text, builtins::abc()); }

std::optional<OutValue> topdown_or_undef(const TopDownTT& tt, const Tree& t,
                                         const RunOptions& opts = {}) {
    try {
        return run_topdown(tt, t, opts);
    } catch (const UndefinedTransition&) {
        return std::nullopt;
    }
}

}  // namespace

TEST_CASE("conditional swap rewriting golden") {
    const TopDownTT& tt = builtins::cond_swap();
    CHECK(std::get<Tree>(run_topdown(tt, T("a(b(c),c)"))) == T("a(c,b(c))"));
    CHECK(std::get<Tree>(run_topdown(tt, T("b(a(b(c),c))"))) == T("b(a(b(c),c))"));
}

TEST_CASE("conditional swap bottom-up registers golden") {
    const TopDownTT& tt = builtins::cond_swap();

    BottomUpRun r1 = run_bottomup(tt, T("a(b(c),c)"));
    CHECK(std::get<Tree>(*r1.reg(0, "q0")) == T("a(c,b(c))"));
    CHECK(std::get<Tree>(*r1.reg(0, "q1")) == T("a(b(c),c)"));

    BottomUpRun r2 = run_bottomup(tt, T("b(a(b(c),c))"));
    CHECK(std::get<Tree>(*r2.reg(0, "q0")) == T("b(a(b(c),c))"));
    CHECK(std::get<Tree>(*r2.reg(0, "q1")) == T("b(a(b(c),c))"));
}

TEST_CASE("b-replacement with lookahead golden") {
    const TopDownTT& tt = builtins::b_replace();
    CHECK(std::get<Tree>(run_topdown(tt, T("b(c)"))) == T("a(c,c)"));
    // a b above keeps its subtree when that subtree still contains a b
    CHECK(std::get<Tree>(run_topdown(tt, T("b(b(c))"))) == T("b(a(c,c))"));
}

TEST_CASE("postfix string output golden") {
    const TopDownTT& tt = builtins::postfix();
    // independent oracle: naive recursive interpreter
    auto expected = oracle::naive_run_str(tt, "q", T("a(b(c),c)"));
    REQUIRE(expected);
    CHECK(word_text(*expected) == "cbca");
    CHECK(std::get<Word>(run_topdown(tt, T("a(b(c),c)"))) == *expected);
}

TEST_CASE("check_wellformed diagnostics") {
    CHECK(check_wellformed(builtins::cond_swap()).empty());
    CHECK(check_wellformed(builtins::b_replace()).empty());

    // specific beats wildcard: ok
    TopDownTT tt = builtins::b_replace();
    tt.rules.push_back({"q", "b", all_wildcards(1), TreeRhs::call("q", 1)});
    CHECK(check_wellformed(tt).empty());

    // duplicate pattern with a different right-hand side: caught
    TopDownTT dup = builtins::b_replace();
    dup.rules.push_back(
        {"q", "b", {std::optional<std::string>{"r+"}}, TreeRhs::call("q", 1)});
    CHECK_FALSE(check_wellformed(dup).empty());

    // unknown states, bad child indices, arity mismatches
    TopDownTT bad = builtins::cond_swap();
    bad.rules.push_back({"q9", "c", {}, TreeRhs::out("c")});
    CHECK_FALSE(check_wellformed(bad).empty());
    bad = builtins::cond_swap();
    bad.rules[0].rhs = TreeRhs::call("q0", 3);
    CHECK_FALSE(check_wellformed(bad).empty());
    bad = builtins::cond_swap();
    bad.rules[0].rhs = TreeRhs::out("b", {});
    CHECK_FALSE(check_wellformed(bad).empty());

    // pattern without a lookahead automaton
    bad = builtins::cond_swap();
    bad.rules[1].pattern = {std::optional<std::string>{"r+"}};
    CHECK_FALSE(check_wellformed(bad).empty());

    // incomparable patterns: (r+,_) vs (_,r+) both match (r+,r+)
    TopDownTT amb = builtins::b_replace();
    amb.rules.push_back({"q", "a",
                         {std::optional<std::string>{"r+"}, std::nullopt},
                         TreeRhs::call("q", 1)});
    amb.rules.push_back({"q", "a",
                         {std::nullopt, std::optional<std::string>{"r+"}},
                         TreeRhs::call("q", 2)});
    CHECK_FALSE(check_wellformed(amb).empty());
}

TEST_CASE("undefined transitions carry state, letter and path") {
    TopDownTT tt = builtins::cond_swap();
    tt.rules.erase(tt.rules.begin() + 5);  // drop q1<c>
    try {
        run_topdown(tt, T("a(b(c),c)"));
        FAIL("expected UndefinedTransition");
    } catch (const UndefinedTransition& e) {
        CHECK(e.state == "q1");
        CHECK(e.letter == "c");
        CHECK(e.path == "/1/1");
    }
}

TEST_CASE("partiality: bottom-up registers go undefined exactly where needed") {
    // qx has no rule at c; the output can still be defined when qx is not
    // demanded
    TopDownTT tt;
    tt.input = builtins::abc();
    tt.output = builtins::abc();
    tt.states = {"q0", "qx"};
    tt.initial = "q0";
    tt.rules = {
        {"q0", "a", all_wildcards(2), TreeRhs::out("c")},
        {"q0", "b", all_wildcards(1), TreeRhs::call("qx", 1)},
        {"q0", "c", all_wildcards(0), TreeRhs::out("c")},
        {"qx", "a", all_wildcards(2), TreeRhs::out("c")},
        {"qx", "b", all_wildcards(1), TreeRhs::call("qx", 1)},
    };
    ensure_wellformed(tt);

    BottomUpRun run = run_bottomup(tt, T("a(b(c),c)"));
    CHECK_FALSE(run.reg(2, "qx"));                      // the c under b: no rule
    CHECK(run.output());                                // q0 never demands qx here
    CHECK(std::get<Tree>(*run.output()) == leaf("c"));

    CHECK_FALSE(topdown_or_undef(tt, T("b(c)")));       // demanded now: undefined
    BottomUpRun r2 = run_bottomup(tt, T("b(c)"));
    CHECK_FALSE(r2.output());
}

TEST_CASE("top-down and bottom-up agree on all small inputs") {
    for (const auto* tt : {&builtins::cond_swap(), &builtins::b_replace(),
                           &builtins::identity_tdtt(), &builtins::postfix()}) {
        for (const Tree& t : enumerate_trees(tt->input, 8)) {
            auto top = topdown_or_undef(*tt, t);
            BottomUpRun bu = run_bottomup(*tt, t);
            REQUIRE(top.has_value() == bu.output().has_value());
            if (top) CHECK(*top == *bu.output());
        }
    }
}

TEST_CASE("every root register equals a top-down run started from that state") {
    for (const auto* base : {&builtins::cond_swap(), &builtins::b_replace()}) {
        for (const Tree& t : enumerate_trees(base->input, 6)) {
            BottomUpRun bu = run_bottomup(*base, t);
            for (const auto& q : base->states) {
                TopDownTT from_q = *base;
                from_q.initial = q;
                auto top = topdown_or_undef(from_q, t);
                const auto& reg = bu.reg(0, q);
                REQUIRE(top.has_value() == reg.has_value());
                if (top) CHECK(*top == *reg);
            }
        }
    }
}

TEST_CASE("rewriting is confluent under randomized redex choice") {
    for (const auto* tt : {&builtins::cond_swap(), &builtins::b_replace(), &builtins::postfix()}) {
        for (const Tree& t : enumerate_trees(tt->input, 5)) {
            OutValue reference = run_topdown(*tt, t);
            for (uint64_t seed = 1; seed <= 5; ++seed) {
                RunOptions opts;
                opts.strategy = RewriteStrategy::randomized;
                opts.strategy_seed = seed;
                CHECK(run_topdown(*tt, t, opts) == reference);
            }
        }
    }
}

TEST_CASE("register machine: structure and figure configurations") {
    RegisterMachine m = to_register_machine(builtins::b_replace());
    CHECK(m.states == std::vector<std::string>{"r+", "r-"});
    CHECK(m.registers == std::vector<std::string>{"q"});
    CHECK(m.output_register == "q");

    RmRun run = run_register_machine(m, T("b(c)"));
    // leaf c: state r-, X = c; root: state r+, X = a(c,c)
    CHECK(m.states[run.machine_states[1]] == "r-");
    CHECK(std::get<Tree>(*run.table[1][0]) == leaf("c"));
    CHECK(m.states[run.machine_states[0]] == "r+");
    CHECK(std::get<Tree>(*run.table[0][0]) == T("a(c,c)"));

    // lookahead-free source: one dummy state, registers q0 q1
    RegisterMachine swap = to_register_machine(builtins::cond_swap());
    CHECK(swap.states == std::vector<std::string>{"_"});
    CHECK(swap.registers == std::vector<std::string>{"q0", "q1"});
}

TEST_CASE("register machine agrees with the source on all trees up to 7 nodes") {
    for (const auto* tt : {&builtins::cond_swap(), &builtins::b_replace(), &builtins::postfix(),
                           &builtins::unary_mark()}) {
        RegisterMachine m = to_register_machine(*tt);
        ensure_wellformed(m);
        for (const Tree& t : enumerate_trees(tt->input, 7)) {
            auto top = topdown_or_undef(*tt, t);
            RmRun run = run_register_machine(m, t);
            REQUIRE(top.has_value() == run.output().has_value());
            if (top) CHECK(*top == *run.output());
            if (tt->lookahead) CHECK(run.root_state(m) == run_dbta(*tt->lookahead, t));
        }
    }
}

TEST_CASE("string mode over unary input behaves as a sequential transducer") {
    const TopDownTT& tt = builtins::unary_identity();
    for (const Word& w : enumerate_words({"a", "b"}, 6)) {
        Tree chain = encode_string(w, tt.input);
        CHECK(std::get<Word>(run_topdown(tt, chain)) == w);
    }
}

TEST_CASE("run_topdown agrees with the naive recursion oracle on random models") {
    Rng rng(2024);
    size_t tried = 0;
    for (size_t attempt = 0; tried < 25 && attempt < 200; ++attempt) {
        ModelShape shape;
        shape.with_lookahead = attempt % 2 == 0;
        shape.string_output = attempt % 4 >= 2;
        TopDownTT tt = random_tdtt(rng, shape);
        if (!check_wellformed(tt).empty()) continue;
        ++tried;
        for (const Tree& t : enumerate_trees(tt.input, 5)) {
            auto got = topdown_or_undef(tt, t, RunOptions{EvalLimits{100'000}});
            if (tt.string_output) {
                auto expected = oracle::naive_run_str(tt, tt.initial, t);
                REQUIRE(got.has_value() == expected.has_value());
                if (got) CHECK(std::get<Word>(*got) == *expected);
            } else {
                auto expected = oracle::naive_run_tree(tt, tt.initial, t);
                REQUIRE(got.has_value() == expected.has_value());
                if (got) CHECK(std::get<Tree>(*got) == *expected);
            }
        }
    }
    CHECK(tried == 25);
}

TEST_CASE("evaluation budget stops exponential blowups") {
    // q<b(t)> -> a(q<t>,q<t>) doubles per level; a long chain overflows a
    // small budget but not a large one
    TopDownTT tt;
    tt.input = RankedAlphabet{{"b", 1}, {"c", 0}};
    tt.output = builtins::abc();
    tt.states = {"q"};
    tt.initial = "q";
    tt.rules = {
        {"q", "b", all_wildcards(1),
         TreeRhs::out("a", {TreeRhs::call("q", 1), TreeRhs::call("q", 1)})},
        {"q", "c", all_wildcards(0), TreeRhs::out("c")},
    };
    ensure_wellformed(tt);
    Tree chain = leaf("c");
    for (int i = 0; i < 20; ++i) chain = node("b", {std::move(chain)});
    RunOptions tight;
    tight.limits = EvalLimits{1000};
    CHECK_THROWS_AS(run_topdown(tt, chain, tight), ResourceExhausted);
    RunOptions roomy;
    roomy.limits = EvalLimits{4'000'000};
    CHECK(tree_size(std::get<Tree>(run_topdown(tt, chain, roomy))) == (1u << 21) - 1);
}
