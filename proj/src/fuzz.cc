#include "ttw/fuzz.hh"

#include <sstream>

#include "ttw/builtins.hh"
#include "ttw/pipeline.hh"
#include "ttw/sharing.hh"
#include "ttw/text.hh"

namespace ttw {

uint64_t child_seed(uint64_t master, uint64_t index) {
    // splitmix64 over master xor index
    uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

Dbta random_dbta(Rng& rng, const RankedAlphabet& alphabet) {
    Dbta a;
    a.alphabet = alphabet;
    a.states = {"r0", "r1"};
    for (const auto& [letter, arity] : alphabet.letters()) {
        std::vector<std::string> v(static_cast<size_t>(arity));
        auto go = [&](auto&& self, size_t i) -> void {
            if (i == v.size()) {
                a.delta[{letter, v}] = a.states[rng.below(2)];
                return;
            }
            for (const auto& s : a.states) {
                v[i] = s;
                self(self, i + 1);
            }
        };
        go(go, 0);
    }
    return a;
}

TreeRhs random_tree_rhs(Rng& rng, const RankedAlphabet& output,
                        const std::vector<std::string>& states, int input_arity, size_t depth) {
    bool can_call = input_arity >= 1;
    if (depth >= 3) {
        auto nullary = output.nullary_letters();
        size_t options = nullary.size() + (can_call ? 1 : 0);
        size_t pick = rng.below(options);
        if (pick < nullary.size()) return TreeRhs::out(nullary[pick]);
        return TreeRhs::call(states[rng.below(states.size())],
                             static_cast<int>(rng.below(static_cast<size_t>(input_arity))) + 1);
    }
    if (can_call && rng.chance(0.4))
        return TreeRhs::call(states[rng.below(states.size())],
                             static_cast<int>(rng.below(static_cast<size_t>(input_arity))) + 1);
    const auto& [letter, arity] = output.letters()[rng.below(output.size())];
    std::vector<TreeRhs> kids;
    for (int i = 0; i < arity; ++i)
        kids.push_back(random_tree_rhs(rng, output, states, input_arity, depth + 1));
    return TreeRhs::out(letter, std::move(kids));
}

StrRhs random_str_rhs(Rng& rng, const std::vector<Sym>& symbols,
                      const std::vector<std::string>& states, int input_arity) {
    StrRhs items;
    size_t len = rng.below(5);
    for (size_t i = 0; i < len; ++i) {
        if (input_arity >= 1 && rng.chance(0.5))
            items.push_back(StrItem::call(states[rng.below(states.size())],
                                          static_cast<int>(rng.below(static_cast<size_t>(input_arity))) + 1));
        else
            items.push_back(StrItem::lit(symbols[rng.below(symbols.size())]));
    }
    return items;
}

MttRhs random_mtt_rhs(Rng& rng, const RankedAlphabet& output,
                      const std::vector<std::pair<std::string, int>>& states, int rule_arity,
                      int input_arity, size_t depth) {
    bool can_call = input_arity >= 1;
    bool can_param = rule_arity >= 1;
    if (depth >= 3) {
        // leaves: nullary letters, parameters, calls to 0-ary states
        auto nullary = output.nullary_letters();
        std::vector<size_t> zero_states;
        for (size_t i = 0; i < states.size(); ++i)
            if (states[i].second == 0) zero_states.push_back(i);
        size_t options = nullary.size() + (can_param ? 1 : 0) +
                         ((can_call && !zero_states.empty()) ? 1 : 0);
        size_t pick = rng.below(options);
        if (pick < nullary.size()) return MttRhs::out(nullary[pick]);
        pick -= nullary.size();
        if (can_param && pick == 0)
            return MttRhs::par(static_cast<int>(rng.below(static_cast<size_t>(rule_arity))) + 1);
        size_t qi = zero_states[rng.below(zero_states.size())];
        return MttRhs::call(states[qi].first,
                            static_cast<int>(rng.below(static_cast<size_t>(input_arity))) + 1, {});
    }
    if (can_param && rng.chance(0.2))
        return MttRhs::par(static_cast<int>(rng.below(static_cast<size_t>(rule_arity))) + 1);
    if (can_call && rng.chance(0.4)) {
        const auto& [q, q_arity] = states[rng.below(states.size())];
        std::vector<MttRhs> args;
        for (int i = 0; i < q_arity; ++i)
            args.push_back(random_mtt_rhs(rng, output, states, rule_arity, input_arity, depth + 1));
        return MttRhs::call(q, static_cast<int>(rng.below(static_cast<size_t>(input_arity))) + 1,
                            std::move(args));
    }
    const auto& [letter, arity] = output.letters()[rng.below(output.size())];
    std::vector<MttRhs> kids;
    for (int i = 0; i < arity; ++i)
        kids.push_back(random_mtt_rhs(rng, output, states, rule_arity, input_arity, depth + 1));
    return MttRhs::out(letter, std::move(kids));
}

// rule patterns are drawn fully concrete, all-wildcard, or (rarely) mixed;
// mixed pairs can be incomparable, in which case the model fails the
// well-formedness check and the driver redraws it
template <typename Rule, typename MakeRule>
void generate_rules(Rng& rng, const RankedAlphabet& input, const std::optional<Dbta>& la,
                    const std::vector<std::string>& state_names, double present_p,
                    std::vector<Rule>& rules, MakeRule&& make_rule) {
    for (const auto& q : state_names) {
        for (const auto& [letter, arity_int] : input.letters()) {
            const size_t k = static_cast<size_t>(arity_int);
            if (!la || k == 0) {
                if (rng.chance(present_p)) rules.push_back(make_rule(q, letter, all_wildcards(k)));
                continue;
            }
            auto mixed_pattern = [&] {
                LaPattern p;
                for (size_t i = 0; i < k; ++i) {
                    if (rng.chance(0.5))
                        p.emplace_back(la->states[rng.below(la->states.size())]);
                    else
                        p.emplace_back(std::nullopt);
                }
                return p;
            };
            if (rng.chance(0.25)) {
                // one catch-all rule, occasionally refined by a concrete one
                if (rng.chance(present_p)) rules.push_back(make_rule(q, letter, all_wildcards(k)));
                if (rng.chance(0.3)) {
                    LaPattern p;
                    for (size_t i = 0; i < k; ++i)
                        p.emplace_back(la->states[rng.below(la->states.size())]);
                    rules.push_back(make_rule(q, letter, std::move(p)));
                }
                continue;
            }
            std::vector<std::string> v(k);
            auto go = [&](auto&& self, size_t i) -> void {
                if (i == k) {
                    if (rng.chance(present_p)) {
                        LaPattern p;
                        for (const auto& s : v) p.emplace_back(s);
                        rules.push_back(make_rule(q, letter, std::move(p)));
                    }
                    return;
                }
                for (const auto& s : la->states) {
                    v[i] = s;
                    self(self, i + 1);
                }
            };
            go(go, 0);
            if (k >= 2 && rng.chance(0.12)) {
                rules.push_back(make_rule(q, letter, mixed_pattern()));
                if (rng.chance(0.3)) rules.push_back(make_rule(q, letter, mixed_pattern()));
            }
        }
    }
}

}  // namespace

TopDownTT random_tdtt(Rng& rng, const ModelShape& shape, double present_p) {
    TopDownTT tt;
    tt.input = shape.unary_input ? builtins::unary_ab() : builtins::abc();
    tt.string_output = shape.string_output;
    if (shape.string_output)
        tt.output_symbols = {"a", "b", "c"};
    else
        tt.output = builtins::abc();
    tt.states = {"q0", "q1"};
    tt.initial = "q0";
    if (shape.with_lookahead) tt.lookahead = random_dbta(rng, tt.input);

    generate_rules(rng, tt.input, tt.lookahead, tt.states, present_p, tt.rules,
                   [&](const std::string& q, const std::string& letter, LaPattern p) {
                       TdttRule r;
                       r.state = q;
                       r.letter = letter;
                       r.pattern = std::move(p);
                       int arity = tt.input.arity(letter);
                       if (tt.string_output)
                           r.rhs = random_str_rhs(rng, tt.output_symbols, tt.states, arity);
                       else
                           r.rhs = random_tree_rhs(rng, tt.output, tt.states, arity, 0);
                       return r;
                   });
    return tt;
}

MacroTT random_mtt(Rng& rng, const ModelShape& shape, double present_p) {
    MacroTT m;
    m.input = builtins::abc();
    m.output = shape.unary_output ? builtins::unary_ab() : builtins::abc();
    m.states = {{"q0", 0}, {"q1", 1}, {"q2", 2}};
    m.initial = "q0";
    if (shape.with_lookahead) m.lookahead = random_dbta(rng, m.input);

    std::vector<std::string> names;
    for (const auto& [q, a] : m.states) names.push_back(q);
    generate_rules(rng, m.input, m.lookahead, names, present_p, m.rules,
                   [&](const std::string& q, const std::string& letter, LaPattern p) {
                       MttRule r;
                       r.state = q;
                       r.letter = letter;
                       r.pattern = std::move(p);
                       r.rhs = random_mtt_rhs(rng, m.output, m.states, m.state_arity(q),
                                              m.input.arity(letter), 0);
                       return r;
                   });
    return m;
}

Sst random_sst(Rng& rng) {
    Sst s;
    s.input_symbols = {"a", "b"};
    s.output_symbols = {"a", "b"};
    s.states = {"s0", "s1"};
    s.initial = "s0";
    s.registers = {"X", "Y"};
    auto random_expr = [&](size_t max_len) {
        SstExpr e;
        size_t len = rng.below(max_len + 1);
        for (size_t i = 0; i < len; ++i) {
            if (rng.chance(0.5))
                e.push_back(SstItem::reg(s.registers[rng.below(s.registers.size())]));
            else
                e.push_back(SstItem::lit(s.output_symbols[rng.below(s.output_symbols.size())]));
        }
        return e;
    };
    for (size_t i = 0; i < s.registers.size(); ++i) {
        Word w;
        size_t len = rng.below(3);
        for (size_t j = 0; j < len; ++j)
            w.push_back(s.output_symbols[rng.below(s.output_symbols.size())]);
        s.init.push_back(std::move(w));
    }
    for (const auto& st : s.states) {
        for (const auto& sym : s.input_symbols) {
            SstTransition tr;
            tr.next = s.states[rng.below(s.states.size())];
            for (size_t i = 0; i < s.registers.size(); ++i) {
                if (rng.chance(0.08))
                    tr.updates.push_back(std::nullopt);
                else
                    tr.updates.push_back(random_expr(3));
            }
            s.update.emplace(std::make_pair(st, sym), std::move(tr));
        }
    }
    for (const auto& st : s.states)
        if (rng.chance(0.85)) s.output[st] = random_expr(3);
    return s;
}

Tree random_tree(Rng& rng, const RankedAlphabet& alphabet, size_t max_nodes) {
    if (max_nodes < 1) throw ValidationError("max_nodes must be >= 1");
    auto gen = [&](auto&& self, size_t budget) -> Tree {
        std::vector<size_t> feasible;
        for (size_t i = 0; i < alphabet.size(); ++i) {
            size_t arity = static_cast<size_t>(alphabet.letters()[i].second);
            if (1 + arity <= budget) feasible.push_back(i);
        }
        const auto& [letter, arity_int] = alphabet.letters()[feasible[rng.below(feasible.size())]];
        size_t k = static_cast<size_t>(arity_int);
        std::vector<Tree> kids;
        if (k > 0) {
            size_t spare = budget - 1 - k;
            std::vector<size_t> budgets(k, 1);
            for (size_t i = 0; i < k; ++i) {
                size_t extra = rng.below(spare + 1);
                budgets[i] += extra;
                spare -= extra;
            }
            for (size_t i = 0; i < k; ++i) kids.push_back(self(self, budgets[i]));
        }
        return Tree{letter, std::move(kids)};
    };
    return gen(gen, max_nodes);
}

namespace {

struct CheckOutcome {
    bool skipped = false;
    bool failed = false;
    std::string detail;  // failure description or skip reason
    std::vector<std::string> checks;
};

std::optional<Value> run_or_undefined(const Pipeline& p, const Value& input,
                                      const EvalLimits& limits) {
    try {
        return run_pipeline(p, input, limits);
    } catch (const UndefinedTransition&) {
        return std::nullopt;
    } catch (const OutputUndefined&) {
        return std::nullopt;
    }
}

std::string show(const std::optional<Value>& v) {
    return v ? value_text(*v) : std::string("undefined");
}

/// Compares two pipelines on explicit inputs; fills outcome on mismatch.
bool diff_inputs(const Pipeline& left, const Pipeline& right, const std::vector<Value>& inputs,
                 const EvalLimits& limits, const std::string& check, CheckOutcome& outcome) {
    for (const Value& input : inputs) {
        std::optional<Value> lv = run_or_undefined(left, input, limits);
        std::optional<Value> rv = run_or_undefined(right, input, limits);
        bool same = (lv.has_value() == rv.has_value()) && (!lv || *lv == *rv);
        if (!same) {
            outcome.failed = true;
            outcome.detail = check + " counterexample input=" + value_text(input) +
                             " left=" + show(lv) + " right=" + show(rv);
            return false;
        }
    }
    outcome.checks.push_back(check);
    return true;
}

void check_tdtt(const TopDownTT& tt, const FuzzOptions& opt, CheckOutcome& outcome) {
    std::vector<Value> inputs = enumerate_inputs(IoKind::tree(tt.input), opt.max_size);

    // duality: rewriting vs bottom-up registers, value and definedness
    for (const Value& input : inputs) {
        const Tree& t = std::get<Tree>(input);
        std::optional<OutValue> top;
        try {
            top = run_topdown(tt, t, RunOptions{opt.limits});
        } catch (const UndefinedTransition&) {
        }
        BottomUpRun bu = run_bottomup(tt, t, opt.limits);
        const auto& reg = bu.output();
        bool same = (top.has_value() == reg.has_value()) && (!top || *top == *reg);
        if (!same) {
            outcome.failed = true;
            outcome.detail = "bottom-up counterexample input=" + tree_text(t);
            return;
        }
    }
    outcome.checks.push_back("bottom-up");

    // register machine agreement, including the state component
    RegisterMachine rm = to_register_machine(tt);
    for (const Value& input : inputs) {
        const Tree& t = std::get<Tree>(input);
        RmRun run = run_register_machine(rm, t, opt.limits);
        std::optional<OutValue> top;
        try {
            top = run_topdown(tt, t, RunOptions{opt.limits});
        } catch (const UndefinedTransition&) {
        }
        const auto& out = run.output();
        bool same = (top.has_value() == out.has_value()) && (!top || *top == *out);
        if (same && tt.lookahead) same = run.root_state(rm) == run_dbta(*tt.lookahead, t);
        if (!same) {
            outcome.failed = true;
            outcome.detail = "register-machine counterexample input=" + tree_text(t);
            return;
        }
    }
    outcome.checks.push_back("register-machine");

    if (!tt.string_output) {
        // shared evaluation: unfold(run_shared) = run_topdown where defined
        for (const Value& input : inputs) {
            const Tree& t = std::get<Tree>(input);
            std::optional<OutValue> top;
            try {
                top = run_topdown(tt, t, RunOptions{opt.limits});
            } catch (const UndefinedTransition&) {
            }
            std::optional<Tree> shared;
            try {
                shared = unfold(run_shared(tt, t, opt.limits), opt.limits);
            } catch (const UndefinedTransition&) {
            }
            bool same = (top.has_value() == shared.has_value()) &&
                        (!top || std::get<Tree>(*top) == *shared);
            if (!same) {
                outcome.failed = true;
                outcome.detail = "shared counterexample input=" + tree_text(t);
                return;
            }
        }
        outcome.checks.push_back("shared");
    } else {
        // unary output chains: compare through the mtt conversion
        MacroTT m = tdtts_to_mtt_unary(tt);
        Pipeline left = Pipeline::of(tt);
        Pipeline right{{Stage{m}, Stage{DecodeStage{m.output}}}};
        if (!diff_inputs(left, right, inputs, opt.limits, "tdtts-to-mtt", outcome)) return;

        // and back: the composed round trip preserves the function
        TopDownTT back = mtt_unary_to_tdtts(m);
        if (!diff_inputs(left, Pipeline::of(back), inputs, opt.limits, "round-trip", outcome))
            return;

        if (tt.input.end_marker()) {
            Sst s = tdtts_unary_to_sst(tt);
            Pipeline sst_side{{Stage{EncodeStage{tt.input}}, Stage{tt}}};
            std::vector<Value> words =
                enumerate_inputs(IoKind::str(s.input_symbols), opt.max_size);
            if (!diff_inputs(Pipeline::of(s), sst_side, words, opt.limits, "tdtts-to-sst",
                             outcome))
                return;
        }
    }
}

void check_mtt(const MacroTT& m, const FuzzOptions& opt, uint64_t model_seed,
               CheckOutcome& outcome) {
    std::vector<Value> inputs = enumerate_inputs(IoKind::tree(m.input), opt.max_size);

    // duality: demand-driven open evaluation vs eager bottom-up registers,
    // for every state at the root
    for (const Value& input : inputs) {
        const Tree& t = std::get<Tree>(input);
        MttBottomUpRun bu = run_bottomup(m, t, opt.limits);
        for (const auto& [q, arity] : m.states) {
            std::optional<Context> open;
            try {
                open = run_oi_open(m, q, t, opt.limits);
            } catch (const UndefinedTransition&) {
            }
            const auto& reg = bu.reg(0, q);
            bool same = (open.has_value() == reg.has_value()) && (!open || *open == *reg);
            if (!same) {
                outcome.failed = true;
                outcome.detail = "bottom-up counterexample state=" + q +
                                 " input=" + tree_text(t);
                return;
            }
        }
    }
    outcome.checks.push_back("bottom-up");

    // literal leftmost-outermost stepper agrees on small inputs
    for (const Value& input : inputs) {
        const Tree& t = std::get<Tree>(input);
        if (tree_size(t) > 4) break;
        std::optional<Context> open, stepped;
        try {
            open = run_oi_open(m, m.initial, t, opt.limits);
        } catch (const UndefinedTransition&) {
        }
        try {
            stepped = oi_rewrite(m, m.initial, t, opt.limits).normal_form;
        } catch (const UndefinedTransition&) {
        }
        bool same = (open.has_value() == stepped.has_value()) && (!open || *open == *stepped);
        if (!same) {
            outcome.failed = true;
            outcome.detail = "oi-rewrite counterexample input=" + tree_text(t);
            return;
        }
    }
    outcome.checks.push_back("oi-rewrite");

    if (m.lookahead) {
        LookaheadElimination elim = eliminate_lookahead(m);
        if (!diff_inputs(Pipeline::of(m), Pipeline::of(elim.mtt), inputs, opt.limits,
                         "eliminate-lookahead", outcome))
            return;

        // selector contract: value of sel on t is the projection context
        // picking the lookahead state's declaration index
        const size_t n = m.lookahead->states.size();
        for (const Value& input : inputs) {
            const Tree& t = std::get<Tree>(input);
            size_t i = state_index(*m.lookahead, run_dbta(*m.lookahead, t));
            Context expected{static_cast<int>(n), leaf("x" + std::to_string(i + 1))};
            Context got = run_oi_open(elim.mtt, elim.selector, t, opt.limits);
            if (!(got == expected)) {
                outcome.failed = true;
                outcome.detail = "selector counterexample input=" + tree_text(t);
                return;
            }
        }
        outcome.checks.push_back("selector");

        if (opt.random_tree_checks > 0) {
            Rng tree_rng(child_seed(model_seed, 0x7EE5));
            std::vector<Value> random_inputs;
            for (size_t i = 0; i < opt.random_tree_checks; ++i)
                random_inputs.emplace_back(random_tree(tree_rng, m.input, opt.random_tree_size));
            if (!diff_inputs(Pipeline::of(m), Pipeline::of(elim.mtt), random_inputs, opt.limits,
                             "eliminate-lookahead-random", outcome))
                return;
        }
    }

    if (m.output.end_marker()) {
        TopDownTT tt = mtt_unary_to_tdtts(m);
        Pipeline left{{Stage{m}, Stage{DecodeStage{m.output}}}};
        if (!diff_inputs(left, Pipeline::of(tt), inputs, opt.limits, "mtt-to-tdtts", outcome))
            return;
    }
}

void check_sst(const Sst& s, const FuzzOptions& opt, CheckOutcome& outcome) {
    std::vector<Value> words = enumerate_inputs(IoKind::str(s.input_symbols), opt.max_size);
    for (const Value& input : words) {
        const Word& w = std::get<Word>(input);
        std::optional<Word> a, b;
        try {
            a = run_sst(s, w, opt.limits);
        } catch (const OutputUndefined&) {
        }
        try {
            b = run_sst(s, w, opt.limits);
        } catch (const OutputUndefined&) {
        }
        if (a != b) {
            outcome.failed = true;
            outcome.detail = "sst rerun mismatch input=" + word_text(w);
            return;
        }
    }
    outcome.checks.push_back("rerun");
    is_copyless(s);  // must not throw; result is irrelevant here
    outcome.checks.push_back("copyless-check");
}

}  // namespace

FuzzResult fuzz(const FuzzOptions& options) {
    if (options.kind != "tdtt" && options.kind != "mtt" && options.kind != "sst")
        throw ValidationError("fuzz kind must be tdtt, mtt or sst");
    FuzzResult result;
    std::ostringstream out;
    out << "fuzz kind=" << options.kind << " seed=" << options.seed
        << " count=" << options.count << " max-size=" << options.max_size << "\n";

    const size_t max_attempts = options.count * 50 + 50;
    size_t attempt = 0;
    while (result.models < options.count && attempt < max_attempts) {
        uint64_t seed = child_seed(options.seed, attempt);
        Rng rng(seed);
        AnyMachine machine{TopDownTT{}};
        try {
            if (options.kind == "tdtt") {
                ModelShape shape;
                shape.with_lookahead = attempt % 2 == 0;
                shape.string_output = attempt % 4 >= 2;
                shape.unary_input = attempt % 4 == 3;
                TopDownTT tt = random_tdtt(rng, shape);
                ensure_wellformed(tt);
                machine = std::move(tt);
            } else if (options.kind == "mtt") {
                ModelShape shape;
                shape.with_lookahead = true;
                shape.unary_output = attempt % 3 == 2;
                MacroTT m = random_mtt(rng, shape);
                ensure_wellformed(m);
                machine = std::move(m);
            } else {
                Sst s = random_sst(rng);
                ensure_wellformed(s);
                machine = std::move(s);
            }
        } catch (const ValidationError&) {
            ++result.rejected;
            ++attempt;
            continue;
        }

        size_t model_index = result.models;
        ++result.models;
        CheckOutcome outcome;
        try {
            if (std::holds_alternative<TopDownTT>(machine))
                check_tdtt(std::get<TopDownTT>(machine), options, outcome);
            else if (std::holds_alternative<MacroTT>(machine))
                check_mtt(std::get<MacroTT>(machine), options, seed, outcome);
            else
                check_sst(std::get<Sst>(machine), options, outcome);
        } catch (const ResourceExhausted&) {
            outcome.skipped = true;
            outcome.detail = "resource-budget";
        }

        out << "model " << model_index << " seed=" << options.seed << ":" << attempt << " ";
        if (outcome.skipped) {
            ++result.skipped;
            out << "SKIP " << outcome.detail << "\n";
        } else if (outcome.failed) {
            ++result.failures;
            out << "FAIL " << outcome.detail << "\n";
            out << print_machine(machine);
        } else {
            ++result.ok;
            out << "ok (checks:";
            for (const auto& c : outcome.checks) out << " " << c;
            out << ")\n";
        }
        ++attempt;
    }
    out << "summary models=" << result.models << " ok=" << result.ok << " skip=" << result.skipped
        << " fail=" << result.failures << " rejected-malformed=" << result.rejected << "\n";
    result.report = out.str();
    return result;
}

}  // namespace ttw
