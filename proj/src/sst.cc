#include "ttw/sst.hh"

#include <algorithm>
#include <set>

namespace ttw {

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

void check_expr(const Sst& s, const SstExpr& e, std::vector<Diagnostic>& out,
                const std::string& where) {
    for (const auto& item : e) {
        if (item.is_reg) {
            if (!contains(s.registers, item.text))
                out.push_back({where + ": unknown register '" + item.text + "'"});
        } else if (!contains(s.output_symbols, item.text)) {
            out.push_back({where + ": unknown output symbol '" + item.text + "'"});
        }
    }
}

}  // namespace

std::vector<Diagnostic> check_wellformed(const Sst& s) {
    std::vector<Diagnostic> out;
    if (s.states.empty()) out.push_back({"sst has no states"});
    if (s.registers.empty()) out.push_back({"sst has no registers"});
    if (!contains(s.states, s.initial))
        out.push_back({"initial state '" + s.initial + "' not declared"});
    if (s.init.size() != s.registers.size())
        out.push_back({"init list does not cover every register"});
    for (const auto& iv : s.init) {
        if (!iv) continue;
        for (const auto& sym : *iv)
            if (!contains(s.output_symbols, sym))
                out.push_back({"init value uses unknown output symbol '" + sym + "'"});
    }
    // update must be total over states x input symbols
    for (const auto& st : s.states) {
        for (const auto& sym : s.input_symbols) {
            auto it = s.update.find({st, sym});
            if (it == s.update.end()) {
                out.push_back({"missing transition on " + st + "," + sym});
                continue;
            }
            const SstTransition& tr = it->second;
            if (!contains(s.states, tr.next))
                out.push_back({"transition " + st + "," + sym + " targets unknown state '" +
                               tr.next + "'"});
            if (tr.updates.size() != s.registers.size()) {
                out.push_back({"transition " + st + "," + sym + " does not update every register"});
                continue;
            }
            for (size_t i = 0; i < tr.updates.size(); ++i)
                if (tr.updates[i])
                    check_expr(s, *tr.updates[i], out, "transition " + st + "," + sym);
        }
    }
    for (const auto& [key, tr] : s.update)
        if (!contains(s.states, key.first) || !contains(s.input_symbols, key.second))
            out.push_back({"transition on undeclared state or symbol " + key.first + "," +
                           key.second});
    for (const auto& [st, expr] : s.output) {
        if (!contains(s.states, st))
            out.push_back({"output expression for unknown state '" + st + "'"});
        check_expr(s, expr, out, "output " + st);
    }
    return out;
}

void ensure_wellformed(const Sst& s) {
    auto diags = check_wellformed(s);
    if (diags.empty()) return;
    std::string msg = "sst is not well-formed:";
    for (const auto& d : diags) msg += "\n  " + d.message;
    throw ValidationError(msg);
}

namespace {

size_t register_index(const Sst& s, const std::string& name) {
    return static_cast<size_t>(
        std::find(s.registers.begin(), s.registers.end(), name) - s.registers.begin());
}

std::optional<Word> eval_expr(const Sst& s, const SstExpr& e,
                              const std::vector<std::optional<Word>>& regs, Budget& budget,
                              std::string* undefined_reg) {
    Word out;
    for (const auto& item : e) {
        if (item.is_reg) {
            const auto& r = regs[register_index(s, item.text)];
            if (!r) {
                if (undefined_reg) *undefined_reg = item.text;
                return std::nullopt;
            }
            budget.charge(r->size());
            out.insert(out.end(), r->begin(), r->end());
        } else {
            budget.charge();
            out.push_back(item.text);
        }
    }
    return out;
}

}  // namespace

SstRun trace_sst(const Sst& s, const Word& w, const EvalLimits& limits) {
    ensure_wellformed(s);
    for (const auto& sym : w)
        if (std::find(s.input_symbols.begin(), s.input_symbols.end(), sym) ==
            s.input_symbols.end())
            throw ValidationError("input symbol '" + sym + "' not declared");
    Budget budget(limits);
    SstRun run;
    std::string state = s.initial;
    std::vector<std::optional<Word>> regs = s.init;
    run.state_trace.push_back(state);
    run.register_trace.push_back(regs);
    // right to left
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        const SstTransition& tr = s.update.at({state, *it});
        std::vector<std::optional<Word>> next(s.registers.size());
        for (size_t i = 0; i < s.registers.size(); ++i) {
            if (!tr.updates[i]) continue;  // poisoned
            next[i] = eval_expr(s, *tr.updates[i], regs, budget, nullptr);
        }
        regs = std::move(next);
        state = tr.next;
        run.state_trace.push_back(state);
        run.register_trace.push_back(regs);
    }
    run.final_state = state;
    auto oit = s.output.find(state);
    if (oit == s.output.end()) {
        run.undefined_reason = "no output expression";
        return run;
    }
    std::string bad_reg;
    auto value = eval_expr(s, oit->second, regs, budget, &bad_reg);
    if (!value) {
        run.undefined_reason = "register " + bad_reg + " is undefined";
        return run;
    }
    run.result = std::move(*value);
    return run;
}

Word run_sst(const Sst& s, const Word& w, const EvalLimits& limits) {
    SstRun run = trace_sst(s, w, limits);
    if (!run.result) throw OutputUndefined(run.final_state, run.undefined_reason);
    return *run.result;
}

std::vector<CopylessViolation> is_copyless(const Sst& s) {
    std::vector<CopylessViolation> out;
    for (const auto& [key, tr] : s.update) {
        std::set<std::string> used;
        for (const auto& u : tr.updates) {
            if (!u) continue;
            for (const auto& item : *u) {
                if (!item.is_reg) continue;
                if (!used.insert(item.text).second)
                    out.push_back({"transition " + key.first + "," + key.second, item.text});
            }
        }
    }
    for (const auto& [st, expr] : s.output) {
        std::set<std::string> used;
        for (const auto& item : expr) {
            if (!item.is_reg) continue;
            if (!used.insert(item.text).second) out.push_back({"output " + st, item.text});
        }
    }
    return out;
}

Sst tdtts_unary_to_sst(const TopDownTT& tt) {
    ensure_wellformed(tt);
    if (!tt.string_output)
        throw ValidationError("tdtts_unary_to_sst needs a string-output transducer");
    auto end = tt.input.end_marker();
    if (!end)
        throw ValidationError(
            "tdtts_unary_to_sst requires a unary input alphabet with exactly one end marker");

    Sst s;
    s.input_symbols = tt.input.unary_letters();
    s.output_symbols = tt.output_symbols;
    s.states = tt.lookahead ? tt.lookahead->states : std::vector<std::string>{"_"};
    s.registers = tt.states;

    auto find_rule = [&](const std::string& q, const std::string& letter,
                         const std::vector<std::string>& child_states) -> const TdttRule* {
        std::vector<size_t> candidates;
        for (size_t i = 0; i < tt.rules.size(); ++i)
            if (tt.rules[i].state == q && tt.rules[i].letter == letter) candidates.push_back(i);
        auto pick = most_specific(candidates, child_states,
                                  [&](size_t i) -> const LaPattern& { return tt.rules[i].pattern; });
        return pick ? &tt.rules[*pick] : nullptr;
    };

    // initial configuration comes from the end-marker rules (leaf: no calls)
    s.initial = tt.lookahead ? tt.lookahead->delta.at({*end, {}}) : "_";
    s.init.resize(tt.states.size());
    for (size_t qi = 0; qi < tt.states.size(); ++qi) {
        const TdttRule* rule = find_rule(tt.states[qi], *end, {});
        if (!rule) continue;
        Word value;
        for (const auto& item : std::get<StrRhs>(rule->rhs)) value.push_back(item.symbol);
        s.init[qi] = std::move(value);
    }

    for (const auto& st : s.states) {
        for (const auto& sym : s.input_symbols) {
            SstTransition tr;
            tr.next = tt.lookahead ? tt.lookahead->delta.at({sym, {st}}) : "_";
            tr.updates.resize(tt.states.size());
            for (size_t qi = 0; qi < tt.states.size(); ++qi) {
                const TdttRule* rule = find_rule(tt.states[qi], sym, {st});
                if (!rule) continue;
                SstExpr expr;
                for (const auto& item : std::get<StrRhs>(rule->rhs))
                    expr.push_back(item.is_call ? SstItem::reg(item.state)
                                                : SstItem::lit(item.symbol));
                tr.updates[qi] = std::move(expr);
            }
            s.update.emplace(std::make_pair(st, sym), std::move(tr));
        }
    }
    for (const auto& st : s.states) s.output[st] = {SstItem::reg(tt.initial)};
    ensure_wellformed(s);
    return s;
}

}  // namespace ttw
