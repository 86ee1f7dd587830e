#include <catch2/catch_amalgamated.hpp>

#include "oracles.hh"
#include "ttw/builtins.hh"
#include "ttw/sst.hh"

using namespace ttw;

TEST_CASE("reverse and identity ssts") {
    // right-to-left reading makes X := X.sigma produce the reverse
    CHECK(word_text(run_sst(builtins::reverse_sst(), word_from_chars("abc"))) == "cba");
    for (const Word& w : enumerate_words({"a", "b", "c"}, 6)) {
        Word reversed(w.rbegin(), w.rend());
        CHECK(run_sst(builtins::reverse_sst(), w) == reversed);
        CHECK(run_sst(builtins::identity_sst(), w) == w);
    }
}

TEST_CASE("updates are simultaneous, not sequential") {
    // X := Y, Y := X swaps; sequential evaluation would duplicate instead
    const Sst& s = builtins::swap_sst();
    Word one = run_sst(s, word_from_chars("a"));
    CHECK(word_text(one) == "ba");  // swapped from init X=a, Y=b
    Word two = run_sst(s, word_from_chars("aa"));
    CHECK(word_text(two) == "ab");  // swapped twice
}

TEST_CASE("remark sst matches the formula on all strings up to length 10") {
    const Sst& s = builtins::remark_sst();
    CHECK(word_text(run_sst(s, word_from_chars("aa"))) == "aa");
    CHECK(word_text(run_sst(s, word_from_chars("abab"))) == "abbb");
    for (const Word& w : enumerate_words({"a", "b"}, 10))
        CHECK(run_sst(s, w) == oracle::remark_formula(w));
    CHECK(is_copyless(s).empty());
}

TEST_CASE("copyless check") {
    CHECK(is_copyless(builtins::reverse_sst()).empty());

    // X := X.X is flagged at its transition
    auto violations = is_copyless(builtins::doubling_sst());
    REQUIRE_FALSE(violations.empty());
    CHECK(violations[0].register_name == "X");
    CHECK(violations[0].where == "transition s0,a");

    // an output expression reading a register twice is flagged too
    Sst s = builtins::reverse_sst();
    s.output["s0"] = {SstItem::reg("X"), SstItem::reg("X")};
    auto out_violations = is_copyless(s);
    REQUIRE_FALSE(out_violations.empty());
    CHECK(out_violations[0].where == "output s0");
}

TEST_CASE("doubling sst output length is 2^n") {
    const Sst& s = builtins::doubling_sst();
    for (size_t n = 0; n <= 12; ++n) {
        Word w(n, "a");
        CHECK(run_sst(s, w).size() == (size_t{1} << n));
    }
}

TEST_CASE("missing output expression raises OutputUndefined") {
    Sst s = builtins::reverse_sst();
    s.output.clear();
    CHECK_THROWS_AS(run_sst(s, word_from_chars("a")), OutputUndefined);
}

TEST_CASE("wellformedness diagnostics") {
    CHECK(check_wellformed(builtins::remark_sst()).empty());

    Sst s = builtins::reverse_sst();
    s.update.erase({"s0", "a"});
    CHECK_FALSE(check_wellformed(s).empty());  // not total

    s = builtins::reverse_sst();
    s.update[{"s0", "a"}].updates[0]->push_back(SstItem::reg("Z"));
    CHECK_FALSE(check_wellformed(s).empty());  // unknown register

    s = builtins::reverse_sst();
    s.output["s9"] = {SstItem::reg("X")};
    CHECK_FALSE(check_wellformed(s).empty());  // unknown state
}

TEST_CASE("tdtts_unary_to_sst: structure and agreement") {
    // lookahead states become sst states
    const TopDownTT& mark = builtins::unary_mark();
    Sst s = tdtts_unary_to_sst(mark);
    CHECK(s.states == std::vector<std::string>{"r+", "r-"});
    CHECK(s.registers == std::vector<std::string>{"q"});

    for (const Word& w : enumerate_words({"a", "b"}, 8)) {
        Word via_tt = std::get<Word>(run_topdown(mark, encode_string(w, mark.input)));
        CHECK(run_sst(s, w) == via_tt);
    }

    // identity stays the identity
    Sst id = tdtts_unary_to_sst(builtins::unary_identity());
    for (const Word& w : enumerate_words({"a", "b"}, 8))
        CHECK(run_sst(id, w) == w);

    // the unary postfix machine over {b:1, c:0}
    Sst pf = tdtts_unary_to_sst(builtins::unary_postfix());
    for (const Word& w : enumerate_words({"b"}, 8)) {
        Word via_tt =
            std::get<Word>(run_topdown(builtins::unary_postfix(),
                                       encode_string(w, builtins::unary_postfix().input)));
        CHECK(run_sst(pf, w) == via_tt);
    }

    // non-unary input alphabets are rejected
    CHECK_THROWS_AS(tdtts_unary_to_sst(builtins::postfix()), ValidationError);
}

TEST_CASE("tdtts_unary_to_sst carries partiality over as poisoned registers") {
    TopDownTT tt = builtins::unary_identity();
    // drop the rule for b: outputs become undefined whenever the input has a b
    tt.rules.erase(tt.rules.begin() + 1);
    ensure_wellformed(tt);
    Sst s = tdtts_unary_to_sst(tt);
    for (const Word& w : enumerate_words({"a", "b"}, 5)) {
        bool has_b = false;
        for (const auto& sym : w) has_b = has_b || sym == "b";
        if (has_b)
            CHECK_THROWS_AS(run_sst(s, w), OutputUndefined);
        else
            CHECK(run_sst(s, w) == w);
    }
}
