// Acceptance suite: one checked criterion per section, one PASS/FAIL line
// each, nonzero exit when anything fails. Everything runs from fixed seeds
// and finishes in seconds.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

#include "oracles.hh"
#include "ttw/builtins.hh"
#include "ttw/fuzz.hh"
#include "ttw/mtt.hh"
#include "ttw/pipeline.hh"
#include "ttw/sharing.hh"
#include "ttw/sst.hh"
#include "ttw/tdtt.hh"

using namespace ttw;

namespace {

struct Harness {
    int failures = 0;
    std::vector<std::string> notes;

    void criterion(int number, const std::string& title, const std::function<bool()>& body) {
        auto start = std::chrono::steady_clock::now();
        bool ok = false;
        std::string error;
        try {
            ok = body();
        } catch (const std::exception& e) {
            error = e.what();
        }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
        std::printf("[%s] criterion %2d: %s (%lld ms)\n", ok ? "PASS" : "FAIL", number,
                    title.c_str(), static_cast<long long>(ms));
        for (const auto& n : notes) std::printf("         %s\n", n.c_str());
        notes.clear();
        if (!error.empty()) std::printf("         exception: %s\n", error.c_str());
        if (!ok) ++failures;
    }

    bool expect(bool cond, const std::string& what) {
        if (!cond) notes.push_back("failed: " + what);
        return cond;
    }
};

Tree T(const std::string& text) { return parse_term(text, builtins::abc()); }

std::optional<OutValue> topdown_or_undef(const TopDownTT& tt, const Tree& t) {
    try {
        return run_topdown(tt, t);
    } catch (const UndefinedTransition&) {
        return std::nullopt;
    }
}

std::optional<Context> open_or_undef(const MacroTT& m, const std::string& q, const Tree& t,
                                     const EvalLimits& limits = {}) {
    try {
        return run_oi_open(m, q, t, limits);
    } catch (const UndefinedTransition&) {
        return std::nullopt;
    }
}

}  // namespace

int main() {
    Harness h;

    // 1. conditional swap: rewriting goldens and the register figures
    h.criterion(1, "conditional swap goldens and root registers", [&] {
        const TopDownTT& tt = builtins::cond_swap();
        bool ok = true;
        ok &= h.expect(std::get<Tree>(run_topdown(tt, T("a(b(c),c)"))) == T("a(c,b(c))"),
                       "a(b(c),c) -> a(c,b(c))");
        ok &= h.expect(std::get<Tree>(run_topdown(tt, T("b(a(b(c),c))"))) == T("b(a(b(c),c))"),
                       "b(a(b(c),c)) is fixed");
        BottomUpRun r1 = run_bottomup(tt, T("a(b(c),c)"));
        ok &= h.expect(std::get<Tree>(*r1.reg(0, "q0")) == T("a(c,b(c))"), "X0 at a(b(c),c)");
        ok &= h.expect(std::get<Tree>(*r1.reg(0, "q1")) == T("a(b(c),c)"), "X1 at a(b(c),c)");
        BottomUpRun r2 = run_bottomup(tt, T("b(a(b(c),c))"));
        ok &= h.expect(std::get<Tree>(*r2.reg(0, "q0")) == T("b(a(b(c),c))"), "X0 at b-root");
        ok &= h.expect(std::get<Tree>(*r2.reg(0, "q1")) == T("b(a(b(c),c))"), "X1 at b-root");
        return ok;
    });

    // 2. b-replacement with contains-b lookahead
    h.criterion(2, "b-replacement golden and lookahead states", [&] {
        const TopDownTT& tt = builtins::b_replace();
        bool ok = true;
        ok &= h.expect(std::get<Tree>(run_topdown(tt, T("b(c)"))) == T("a(c,c)"),
                       "b(c) -> a(c,c)");
        ok &= h.expect(run_dbta(builtins::contains_b(), leaf("c")) == "r-", "c is r-");
        ok &= h.expect(run_dbta(builtins::contains_b(), T("b(c)")) == "r+", "b(c) is r+");
        return ok;
    });

    // 3. register machines equal their sources (builtins + 100 fuzzed)
    h.criterion(3, "register machine equivalence on builtins and 100 fuzzed tdtts", [&] {
        bool ok = true;
        size_t expected_inputs = oracle::count_trees_upto(builtins::abc(), 7);
        for (const auto& name : builtins::tdtt_names()) {
            const TopDownTT& tt = *builtins::find_tdtt(name);
            EquivVerdict v =
                check_equiv(Pipeline::of(tt), Pipeline::of(to_register_machine(tt)), 7);
            ok &= h.expect(v.pass, "builtin " + name);
            if (tt.input == builtins::abc())
                ok &= h.expect(v.inputs_tested == expected_inputs,
                               "enumeration count vs brute force for " + name);
        }
        FuzzOptions opt;
        opt.kind = "tdtt";
        opt.seed = 1;
        opt.count = 100;
        opt.max_size = 7;
        FuzzResult r = fuzz(opt);
        ok &= h.expect(r.models == 100, "100 fuzzed models checked");
        ok &= h.expect(r.failures == 0, "zero fuzz failures");
        h.notes.push_back("fuzz: ok=" + std::to_string(r.ok) +
                          " skip=" + std::to_string(r.skipped) +
                          " rejected=" + std::to_string(r.rejected));
        return ok;
    });

    // 4. open evaluation goldens
    h.criterion(4, "open evaluation of the squaring mtt", [&] {
        const MacroTT& m = builtins::squaring_mtt();
        bool ok = true;
        ok &= h.expect(run_oi_open(m, "q1", T("a(c,c)")) ==
                           (Context{1, parse_term("a(a(x1,x1),a(x1,x1))", m.output, true)}),
                       "q1<a(c,c)>(x)");
        ok &= h.expect(run_oi_open(m, "q1", leaf("c")) ==
                           (Context{1, parse_term("a(x1,x1)", m.output, true)}),
                       "q1<c>(x)");
        return ok;
    });

    // 5. lookahead elimination
    h.criterion(5, "lookahead elimination: builtin + 50 fuzzed mtts + random trees", [&] {
        bool ok = true;
        const MacroTT& m = builtins::b_replace_mtt();
        LookaheadElimination elim = eliminate_lookahead(m);
        EquivVerdict v = check_equiv(Pipeline::of(m), Pipeline::of(elim.mtt), 7);
        ok &= h.expect(v.pass, "b-replacement mtt");
        const Dbta& la = *m.lookahead;
        for (const Tree& t : enumerate_trees(m.input, 7)) {
            size_t idx = state_index(la, run_dbta(la, t));
            Context expected{static_cast<int>(la.states.size()),
                             leaf("x" + std::to_string(idx + 1))};
            if (!(run_oi_open(elim.mtt, elim.selector, t) == expected)) {
                ok = h.expect(false, "selector contract at " + tree_text(t));
                break;
            }
        }
        FuzzOptions opt;
        opt.kind = "mtt";
        opt.seed = 2;
        opt.count = 50;
        opt.max_size = 7;
        opt.random_tree_checks = 200;
        opt.random_tree_size = 30;
        FuzzResult r = fuzz(opt);
        ok &= h.expect(r.models == 50, "50 fuzzed lookahead mtts checked");
        ok &= h.expect(r.failures == 0, "zero fuzz failures");
        h.notes.push_back("fuzz: ok=" + std::to_string(r.ok) +
                          " skip=" + std::to_string(r.skipped) +
                          " rejected=" + std::to_string(r.rejected));
        return ok;
    });

    // 6. postfix golden against the naive interpreter + codec round trips
    h.criterion(6, "postfix golden and string codec round trips", [&] {
        bool ok = true;
        auto expected = oracle::naive_run_str(builtins::postfix(), "q", T("a(b(c),c)"));
        ok &= h.expect(expected && word_text(*expected) == "cbca", "oracle gives cbca");
        ok &= h.expect(std::get<Word>(run_topdown(builtins::postfix(), T("a(b(c),c)"))) ==
                           *expected,
                       "postfix agrees with the oracle");
        RankedAlphabet u{{"a", 1}, {"b", 1}, {"c", 1}, {"eps", 0}};
        for (const Word& w : enumerate_words({"a", "b", "c"}, 8)) {
            if (decode_string(encode_string(w, u), u) != w) {
                ok = h.expect(false, "round trip at " + word_text(w));
                break;
            }
        }
        return ok;
    });

    // 7. the two string-output conversions
    h.criterion(7, "tdtts<->mtt conversions agree with their sources", [&] {
        bool ok = true;
        for (const auto& name : builtins::tdtt_names()) {
            const TopDownTT& tt = *builtins::find_tdtt(name);
            if (!tt.string_output) continue;
            // trees up to 7 nodes; string inputs up to length 8 (chains of 9)
            size_t bound = tt.input.end_marker() ? 9 : 7;
            MacroTT m = tdtts_to_mtt_unary(tt);
            Pipeline right{{Stage{m}, Stage{DecodeStage{m.output}}}};
            EquivVerdict v = check_equiv(Pipeline::of(tt), right, bound);
            ok &= h.expect(v.pass, "tdtts-to-mtt for " + name);
            // and back again
            TopDownTT back = mtt_unary_to_tdtts(m);
            EquivVerdict w = check_equiv(Pipeline::of(tt), Pipeline::of(back), bound);
            ok &= h.expect(w.pass, "round trip for " + name);
        }
        {
            const MacroTT& m = builtins::reverse_mtt();
            TopDownTT back = mtt_unary_to_tdtts(m);
            Pipeline left{{Stage{m}, Stage{DecodeStage{m.output}}}};
            EquivVerdict v = check_equiv(left, Pipeline::of(back), 9);
            ok &= h.expect(v.pass, "mtt-to-tdtts for reverse-mtt");
        }
        // unary-context shape for every state of every unary-output machine
        for (const MacroTT* m : {&builtins::reverse_mtt()}) {
            for (const Tree& t : enumerate_trees(m->input, 8)) {
                for (const auto& [q, arity] : m->states) {
                    auto open = open_or_undef(*m, q, t);
                    if (open && !is_unary_chain(*open, m->output)) {
                        ok = h.expect(false, "chain shape for " + q + " at " + tree_text(t));
                    }
                }
            }
        }
        return ok;
    });

    // 8. the Remark function
    h.criterion(8, "remark sst matches its formula and is copyless", [&] {
        bool ok = true;
        const Sst& s = builtins::remark_sst();
        for (const Word& w : enumerate_words({"a", "b"}, 10)) {
            if (run_sst(s, w) != oracle::remark_formula(w)) {
                ok = h.expect(false, "formula at " + word_text(w));
                break;
            }
        }
        ok &= h.expect(is_copyless(s).empty(), "copyless");
        return ok;
    });

    // 9. quadratic growth and sharing
    h.criterion(9, "quadratic example: sizes, dags and growth ratios", [&] {
        bool ok = true;
        const TopDownTT& tt = builtins::quadratic();
        GrowthReport report = growth_report(tt, builtins::quadratic_input, 1, 100);
        for (const GrowthRow& row : report.rows) {
            size_t n = row.n;
            size_t closed = n * (n + 1) / 2 + 2 * n + 1;
            size_t summed = 1;
            for (size_t k = 1; k <= n; ++k) summed += k + 2;
            if (closed != summed || row.tree_size != closed) {
                ok = h.expect(false, "closed form at n=" + std::to_string(n));
                break;
            }
        }
        TermDag memo = run_shared(tt, builtins::quadratic_input(2));
        TermDag small = dedup(memo);
        ok &= h.expect(memo.nodes.size() == 6, "memoized dag has 6 nodes");
        ok &= h.expect(small.nodes.size() == 5, "deduplicated dag has 5 nodes");
        ok &= h.expect(dag_stats(small).edge_count == 6, "deduplicated dag has 6 edges");
        for (size_t n = 0; n <= 50; ++n) {
            Tree input = builtins::quadratic_input(n);
            if (unfold(run_shared(tt, input)) != std::get<Tree>(run_topdown(tt, input))) {
                ok = h.expect(false, "unfold(run_shared) at n=" + std::to_string(n));
                break;
            }
        }
        for (const auto& name : builtins::tdtt_names()) {
            const TopDownTT& any = *builtins::find_tdtt(name);
            if (any.string_output) continue;
            for (const Tree& t : enumerate_trees(any.input, 7)) {
                auto direct = topdown_or_undef(any, t);
                std::optional<Tree> shared;
                try {
                    shared = unfold(run_shared(any, t));
                } catch (const UndefinedTransition&) {
                }
                if (direct.has_value() != shared.has_value() ||
                    (direct && std::get<Tree>(*direct) != *shared)) {
                    ok = h.expect(false, "shared vs direct for " + name);
                    break;
                }
            }
        }
        double dedup_ratio = double(report.rows[49].dag_dedup_nodes) /
                             double(report.rows[24].dag_dedup_nodes);
        double tree_ratio =
            double(report.rows[49].tree_size) / double(report.rows[24].tree_size);
        ok &= h.expect(dedup_ratio >= 1.8 && dedup_ratio <= 2.2, "dedup node ratio in [1.8,2.2]");
        ok &= h.expect(tree_ratio >= 3.5 && tree_ratio <= 4.5, "tree size ratio in [3.5,4.5]");
        return ok;
    });

    // 10. the duality checks under partiality
    h.criterion(10, "top-down/bottom-up duality on builtins and 100 fuzzed models", [&] {
        bool ok = true;
        for (const auto& name : builtins::tdtt_names()) {
            const TopDownTT& tt = *builtins::find_tdtt(name);
            for (const Tree& t : enumerate_trees(tt.input, 7)) {
                auto top = topdown_or_undef(tt, t);
                BottomUpRun bu = run_bottomup(tt, t);
                if (top.has_value() != bu.output().has_value() ||
                    (top && !(*top == *bu.output()))) {
                    ok = h.expect(false, "tdtt duality for " + name);
                    break;
                }
            }
        }
        for (const auto& name : builtins::mtt_names()) {
            const MacroTT& m = *builtins::find_mtt(name);
            for (const Tree& t : enumerate_trees(m.input, 7)) {
                MttBottomUpRun bu = run_bottomup(m, t);
                for (const auto& [q, arity] : m.states) {
                    auto open = open_or_undef(m, q, t);
                    const auto& reg = bu.reg(0, q);
                    if (open.has_value() != reg.has_value() || (open && !(*open == *reg))) {
                        ok = h.expect(false, "mtt duality for " + name + " state " + q);
                        break;
                    }
                }
            }
        }
        // 50 tdtt + 50 mtt fuzzed models; the duality checks run inside fuzz
        FuzzOptions opt;
        opt.kind = "tdtt";
        opt.seed = 3;
        opt.count = 50;
        opt.max_size = 7;
        FuzzResult rt = fuzz(opt);
        opt.kind = "mtt";
        opt.seed = 4;
        FuzzResult rm = fuzz(opt);
        ok &= h.expect(rt.models + rm.models == 100, "100 fuzzed models");
        ok &= h.expect(rt.failures == 0 && rm.failures == 0, "zero fuzz failures");
        h.notes.push_back("fuzz: tdtt ok=" + std::to_string(rt.ok) + " skip=" +
                          std::to_string(rt.skipped) + ", mtt ok=" + std::to_string(rm.ok) +
                          " skip=" + std::to_string(rm.skipped));
        return ok;
    });

    // 11. copyful growth witness
    h.criterion(11, "doubling sst outputs have length 2^n", [&] {
        bool ok = true;
        const Sst& s = builtins::doubling_sst();
        auto copyless = is_copyless(s);
        ok &= h.expect(!copyless.empty(), "doubling sst is copyful");
        for (size_t n = 0; n <= 12; ++n) {
            Word w(n, "a");
            if (run_sst(s, w).size() != (size_t{1} << n)) {
                ok = h.expect(false, "length at n=" + std::to_string(n));
                break;
            }
        }
        return ok;
    });

    if (h.failures == 0) {
        std::printf("acceptance: all 11 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", h.failures);
    return 1;
}
