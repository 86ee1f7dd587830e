#include <catch2/catch_amalgamated.hpp>

#include "oracles.hh"
#include "ttw/builtins.hh"
#include "ttw/dbta.hh"

using namespace ttw;

TEST_CASE("contains-b automaton matches the figure") {
    const Dbta& a = builtins::contains_b();
    CHECK(a.states == std::vector<std::string>{"r+", "r-"});

    CHECK(run_dbta(a, leaf("c")) == "r-");
    CHECK(run_dbta(a, parse_term("b(c)", builtins::abc())) == "r+");
    // applying the transition table bottom-up by hand: a(c,c) has no b
    CHECK(run_dbta(a, parse_term("a(c,c)", builtins::abc())) == "r-");
}

TEST_CASE("check_total") {
    const Dbta& a = builtins::contains_b();
    CHECK(check_total(a).empty());

    Dbta partial = a;
    partial.delta.erase({"a", {"r+", "r+"}});
    auto missing = check_total(partial);
    REQUIRE(missing.size() == 1);
    CHECK(missing[0].letter == "a");
    CHECK(missing[0].child_states == std::vector<std::string>{"r+", "r+"});
    CHECK_THROWS_AS(ensure_total(partial), ValidationError);

    Dbta trivial;
    trivial.alphabet = builtins::abc();
    trivial.states = {"r"};
    for (const auto& [name, arity] : trivial.alphabet.letters())
        trivial.delta[{name, std::vector<std::string>(static_cast<size_t>(arity), "r")}] = "r";
    CHECK(check_total(trivial).empty());
}

TEST_CASE("run is structural recursion through delta") {
    const Dbta& a = builtins::contains_b();
    for (const Tree& t : enumerate_trees(builtins::abc(), 8)) {
        std::vector<std::string> kid_states;
        for (const auto& c : t.children) kid_states.push_back(run_dbta(a, c));
        CHECK(run_dbta(a, t) == a.delta.at({t.label, kid_states}));
        // brute-force scan: r+ iff some node is labeled b
        bool has_b = false;
        auto scan = [&](auto&& self, const Tree& u) -> void {
            if (u.label == "b") has_b = true;
            for (const auto& c : u.children) self(self, c);
        };
        scan(scan, t);
        CHECK(run_dbta(a, t) == (has_b ? "r+" : "r-"));
        CHECK(run_dbta(a, t) == oracle::la_run(a, t));
    }
}

TEST_CASE("annotate_states agrees with per-subtree runs") {
    const Dbta& a = builtins::contains_b();
    Tree t = parse_term("a(b(c),a(c,c))", builtins::abc());
    TreeIndex idx(t);
    auto states = annotate_states(a, idx);
    for (size_t i = 0; i < idx.size(); ++i)
        CHECK(a.states[states[i]] == run_dbta(a, idx.subtree(i)));
}
