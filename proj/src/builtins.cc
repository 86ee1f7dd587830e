#include "ttw/builtins.hh"

namespace ttw {
namespace builtins {

namespace {

TreeRhs O(std::string letter, std::vector<TreeRhs> kids = {}) {
    return TreeRhs::out(std::move(letter), std::move(kids));
}
TreeRhs C(std::string state, int child) { return TreeRhs::call(std::move(state), child); }

MttRhs mo(std::string letter, std::vector<MttRhs> kids = {}) {
    return MttRhs::out(std::move(letter), std::move(kids));
}
MttRhs mc(std::string state, int child, std::vector<MttRhs> args = {}) {
    return MttRhs::call(std::move(state), child, std::move(args));
}
MttRhs mx(int j) { return MttRhs::par(j); }

StrRhs seq(std::vector<StrItem> items) { return items; }

SstExpr se(std::vector<SstItem> items) { return items; }

}  // namespace

const RankedAlphabet& abc() {
    static const RankedAlphabet alphabet{{"a", 2}, {"b", 1}, {"c", 0}};
    return alphabet;
}

const RankedAlphabet& unary_ab() {
    static const RankedAlphabet alphabet{{"a", 1}, {"b", 1}, {"eps", 0}};
    return alphabet;
}

Dbta contains_letter(const RankedAlphabet& alphabet, const std::string& letter) {
    Dbta a;
    a.alphabet = alphabet;
    a.states = {"r+", "r-"};
    for (const auto& [name, arity] : alphabet.letters()) {
        std::vector<std::string> v(static_cast<size_t>(arity), "r-");
        // iterate every child-state vector
        auto go = [&](auto&& self, size_t i) -> void {
            if (i == v.size()) {
                bool hit = (name == letter);
                for (const auto& s : v) hit = hit || (s == "r+");
                a.delta[{name, v}] = hit ? "r+" : "r-";
                return;
            }
            for (const char* s : {"r+", "r-"}) {
                v[i] = s;
                self(self, i + 1);
            }
        };
        go(go, 0);
    }
    return a;
}

const Dbta& contains_b() {
    static const Dbta a = contains_letter(abc(), "b");
    return a;
}

const TopDownTT& cond_swap() {
    static const TopDownTT tt = [] {
        TopDownTT t;
        t.input = abc();
        t.output = abc();
        t.states = {"q0", "q1"};
        t.initial = "q0";
        t.rules = {
            {"q0", "a", all_wildcards(2), O("a", {C("q0", 2), C("q0", 1)})},
            {"q0", "b", all_wildcards(1), O("b", {C("q1", 1)})},
            {"q0", "c", all_wildcards(0), O("c")},
            {"q1", "a", all_wildcards(2), O("a", {C("q1", 1), C("q1", 2)})},
            {"q1", "b", all_wildcards(1), O("b", {C("q1", 1)})},
            {"q1", "c", all_wildcards(0), O("c")},
        };
        ensure_wellformed(t);
        return t;
    }();
    return tt;
}

const TopDownTT& identity_tdtt() {
    static const TopDownTT tt = [] {
        TopDownTT t;
        t.input = abc();
        t.output = abc();
        t.states = {"q"};
        t.initial = "q";
        t.rules = {
            {"q", "a", all_wildcards(2), O("a", {C("q", 1), C("q", 2)})},
            {"q", "b", all_wildcards(1), O("b", {C("q", 1)})},
            {"q", "c", all_wildcards(0), O("c")},
        };
        ensure_wellformed(t);
        return t;
    }();
    return tt;
}

const TopDownTT& b_replace() {
    static const TopDownTT tt = [] {
        TopDownTT t;
        t.input = abc();
        t.output = abc();
        t.states = {"q"};
        t.initial = "q";
        t.lookahead = contains_b();
        t.rules = {
            {"q", "b", {std::optional<std::string>{"r+"}}, O("b", {C("q", 1)})},
            {"q", "b", {std::optional<std::string>{"r-"}}, O("a", {C("q", 1), C("q", 1)})},
            {"q", "a", all_wildcards(2), O("a", {C("q", 1), C("q", 2)})},
            {"q", "c", all_wildcards(0), O("c")},
        };
        ensure_wellformed(t);
        return t;
    }();
    return tt;
}

const TopDownTT& postfix() {
    static const TopDownTT tt = [] {
        TopDownTT t;
        t.input = abc();
        t.string_output = true;
        t.output_symbols = {"a", "b", "c"};
        t.states = {"q"};
        t.initial = "q";
        t.rules = {
            {"q", "a", all_wildcards(2),
             seq({StrItem::call("q", 1), StrItem::call("q", 2), StrItem::lit("a")})},
            {"q", "b", all_wildcards(1), seq({StrItem::call("q", 1), StrItem::lit("b")})},
            {"q", "c", all_wildcards(0), seq({StrItem::lit("c")})},
        };
        ensure_wellformed(t);
        return t;
    }();
    return tt;
}

const TopDownTT& quadratic() {
    static const TopDownTT tt = [] {
        TopDownTT t;
        t.input = RankedAlphabet{{"S", 1}, {"0", 0}};
        t.output = abc();
        t.states = {"q0", "q1"};
        t.initial = "q0";
        t.rules = {
            {"q0", "S", all_wildcards(1), O("a", {C("q1", 1), C("q0", 1)})},
            {"q0", "0", all_wildcards(0), O("c")},
            {"q1", "S", all_wildcards(1), O("b", {C("q1", 1)})},
            {"q1", "0", all_wildcards(0), O("b", {O("c")})},
        };
        ensure_wellformed(t);
        return t;
    }();
    return tt;
}

Tree quadratic_input(size_t n) {
    Tree t = leaf("0");
    for (size_t i = 0; i < n; ++i) t = node("S", {std::move(t)});
    return t;
}

const TopDownTT& unary_postfix() {
    static const TopDownTT tt = [] {
        TopDownTT t;
        t.input = RankedAlphabet{{"b", 1}, {"c", 0}};
        t.string_output = true;
        t.output_symbols = {"b", "c"};
        t.states = {"q"};
        t.initial = "q";
        t.rules = {
            {"q", "b", all_wildcards(1), seq({StrItem::call("q", 1), StrItem::lit("b")})},
            {"q", "c", all_wildcards(0), seq({StrItem::lit("c")})},
        };
        ensure_wellformed(t);
        return t;
    }();
    return tt;
}

const TopDownTT& unary_identity() {
    static const TopDownTT tt = [] {
        TopDownTT t;
        t.input = unary_ab();
        t.string_output = true;
        t.output_symbols = {"a", "b"};
        t.states = {"q"};
        t.initial = "q";
        t.rules = {
            {"q", "a", all_wildcards(1), seq({StrItem::lit("a"), StrItem::call("q", 1)})},
            {"q", "b", all_wildcards(1), seq({StrItem::lit("b"), StrItem::call("q", 1)})},
            {"q", "eps", all_wildcards(0), seq({})},
        };
        ensure_wellformed(t);
        return t;
    }();
    return tt;
}

const TopDownTT& unary_mark() {
    static const TopDownTT tt = [] {
        TopDownTT t;
        t.input = unary_ab();
        t.string_output = true;
        t.output_symbols = {"a", "b"};
        t.states = {"q"};
        t.initial = "q";
        t.lookahead = contains_letter(unary_ab(), "b");
        t.rules = {
            // an a survives only when some b still follows it
            {"q", "a", {std::optional<std::string>{"r+"}},
             seq({StrItem::lit("a"), StrItem::call("q", 1)})},
            {"q", "a", {std::optional<std::string>{"r-"}}, seq({StrItem::call("q", 1)})},
            {"q", "b", all_wildcards(1), seq({StrItem::lit("b"), StrItem::call("q", 1)})},
            {"q", "eps", all_wildcards(0), seq({})},
        };
        ensure_wellformed(t);
        return t;
    }();
    return tt;
}

const MacroTT& b_replace_mtt() {
    static const MacroTT m = [] {
        MacroTT t;
        t.input = abc();
        t.output = abc();
        t.states = {{"q", 0}};
        t.initial = "q";
        t.lookahead = contains_b();
        t.rules = {
            {"q", "b", {std::optional<std::string>{"r+"}}, mo("b", {mc("q", 1)})},
            {"q", "b", {std::optional<std::string>{"r-"}}, mo("a", {mc("q", 1), mc("q", 1)})},
            {"q", "a", all_wildcards(2), mo("a", {mc("q", 1), mc("q", 2)})},
            {"q", "c", all_wildcards(0), mo("c")},
        };
        ensure_wellformed(t);
        return t;
    }();
    return m;
}

const MacroTT& reverse_mtt() {
    static const MacroTT m = [] {
        MacroTT t;
        t.input = unary_ab();
        t.output = unary_ab();
        t.states = {{"q0", 0}, {"q", 1}};
        t.initial = "q0";
        t.rules = {
            {"q0", "a", all_wildcards(1), mc("q", 1, {mo("a", {mo("eps")})})},
            {"q0", "b", all_wildcards(1), mc("q", 1, {mo("b", {mo("eps")})})},
            {"q0", "eps", all_wildcards(0), mo("eps")},
            {"q", "a", all_wildcards(1), mc("q", 1, {mo("a", {mx(1)})})},
            {"q", "b", all_wildcards(1), mc("q", 1, {mo("b", {mx(1)})})},
            {"q", "eps", all_wildcards(0), mx(1)},
        };
        ensure_wellformed(t);
        return t;
    }();
    return m;
}

const MacroTT& identity_mtt() {
    static const MacroTT m = [] {
        MacroTT t;
        t.input = abc();
        t.output = abc();
        t.states = {{"q", 0}};
        t.initial = "q";
        t.rules = {
            {"q", "a", all_wildcards(2), mo("a", {mc("q", 1), mc("q", 2)})},
            {"q", "b", all_wildcards(1), mo("b", {mc("q", 1)})},
            {"q", "c", all_wildcards(0), mo("c")},
        };
        ensure_wellformed(t);
        return t;
    }();
    return m;
}

const MacroTT& squaring_mtt() {
    static const MacroTT m = [] {
        MacroTT t;
        t.input = abc();
        t.output = abc();
        t.states = {{"q0", 0}, {"q1", 1}};
        t.initial = "q0";
        t.rules = {
            {"q0", "a", all_wildcards(2), mc("q1", 1, {mo("b", {mc("q0", 2)})})},
            {"q0", "b", all_wildcards(1), mo("b", {mc("q0", 1)})},
            {"q0", "c", all_wildcards(0), mo("c")},
            {"q1", "a", all_wildcards(2), mc("q1", 2, {mc("q1", 2, {mx(1)})})},
            {"q1", "b", all_wildcards(1), mc("q1", 1, {mx(1)})},
            {"q1", "c", all_wildcards(0), mo("a", {mx(1), mx(1)})},
        };
        ensure_wellformed(t);
        return t;
    }();
    return m;
}

const Sst& reverse_sst() {
    static const Sst s = [] {
        Sst t;
        t.input_symbols = {"a", "b", "c"};
        t.output_symbols = {"a", "b", "c"};
        t.states = {"s0"};
        t.initial = "s0";
        t.registers = {"X"};
        t.init = {Word{}};
        for (const auto& sym : t.input_symbols)
            t.update[{"s0", sym}] =
                SstTransition{"s0", {se({SstItem::reg("X"), SstItem::lit(sym)})}};
        t.output["s0"] = se({SstItem::reg("X")});
        ensure_wellformed(t);
        return t;
    }();
    return s;
}

const Sst& identity_sst() {
    static const Sst s = [] {
        Sst t;
        t.input_symbols = {"a", "b", "c"};
        t.output_symbols = {"a", "b", "c"};
        t.states = {"s0"};
        t.initial = "s0";
        t.registers = {"X"};
        t.init = {Word{}};
        for (const auto& sym : t.input_symbols)
            t.update[{"s0", sym}] =
                SstTransition{"s0", {se({SstItem::lit(sym), SstItem::reg("X")})}};
        t.output["s0"] = se({SstItem::reg("X")});
        ensure_wellformed(t);
        return t;
    }();
    return s;
}

const Sst& remark_sst() {
    static const Sst s = [] {
        Sst t;
        t.input_symbols = {"a", "b"};
        t.output_symbols = {"a", "b"};
        t.states = {"s0", "s1"};  // s0: no b consumed yet, s1: some b consumed
        t.initial = "s0";
        t.registers = {"R", "S", "T"};
        t.init = {Word{}, Word{}, Word{}};
        // R: the a-run right of the reading head up to the next b;
        // S: that run shadowed as b's; T: b-block covering everything from
        // the leftmost b consumed so far (inclusive) to the end.
        auto on_a = SstTransition{
            "",
            {se({SstItem::lit("a"), SstItem::reg("R")}),
             se({SstItem::lit("b"), SstItem::reg("S")}), se({SstItem::reg("T")})}};
        on_a.next = "s0";
        t.update[{"s0", "a"}] = on_a;
        on_a.next = "s1";
        t.update[{"s1", "a"}] = on_a;
        auto on_b = SstTransition{
            "s1",
            {se({}), se({}),
             se({SstItem::lit("b"), SstItem::reg("S"), SstItem::reg("T")})}};
        t.update[{"s0", "b"}] = on_b;
        t.update[{"s1", "b"}] = on_b;
        t.output["s0"] = se({SstItem::reg("R")});
        t.output["s1"] = se({SstItem::reg("R"), SstItem::reg("T")});
        ensure_wellformed(t);
        return t;
    }();
    return s;
}

const Sst& doubling_sst() {
    static const Sst s = [] {
        Sst t;
        t.input_symbols = {"a"};
        t.output_symbols = {"a"};
        t.states = {"s0"};
        t.initial = "s0";
        t.registers = {"X"};
        t.init = {Word{"a"}};
        t.update[{"s0", "a"}] = SstTransition{"s0", {se({SstItem::reg("X"), SstItem::reg("X")})}};
        t.output["s0"] = se({SstItem::reg("X")});
        ensure_wellformed(t);
        return t;
    }();
    return s;
}

const Sst& swap_sst() {
    static const Sst s = [] {
        Sst t;
        t.input_symbols = {"a"};
        t.output_symbols = {"a", "b"};
        t.states = {"s0"};
        t.initial = "s0";
        t.registers = {"X", "Y"};
        t.init = {Word{"a"}, Word{"b"}};
        t.update[{"s0", "a"}] =
            SstTransition{"s0", {se({SstItem::reg("Y")}), se({SstItem::reg("X")})}};
        t.output["s0"] = se({SstItem::reg("X"), SstItem::reg("Y")});
        ensure_wellformed(t);
        return t;
    }();
    return s;
}

std::vector<std::string> tdtt_names() {
    return {"cond-swap", "identity", "b-replace", "postfix", "quadratic",
            "unary-postfix", "unary-identity", "unary-mark"};
}

std::vector<std::string> mtt_names() {
    return {"b-replace-mtt", "reverse-mtt", "identity-mtt", "squaring-mtt"};
}

std::vector<std::string> sst_names() {
    return {"reverse-sst", "identity-sst", "remark", "doubling", "swap-sst"};
}

const TopDownTT* find_tdtt(const std::string& name) {
    if (name == "cond-swap") return &cond_swap();
    if (name == "identity") return &identity_tdtt();
    if (name == "b-replace") return &b_replace();
    if (name == "postfix") return &postfix();
    if (name == "quadratic") return &quadratic();
    if (name == "unary-postfix") return &unary_postfix();
    if (name == "unary-identity") return &unary_identity();
    if (name == "unary-mark") return &unary_mark();
    return nullptr;
}

const MacroTT* find_mtt(const std::string& name) {
    if (name == "b-replace-mtt") return &b_replace_mtt();
    if (name == "reverse-mtt") return &reverse_mtt();
    if (name == "identity-mtt") return &identity_mtt();
    if (name == "squaring-mtt") return &squaring_mtt();
    return nullptr;
}

const Sst* find_sst(const std::string& name) {
    if (name == "reverse-sst") return &reverse_sst();
    if (name == "identity-sst") return &identity_sst();
    if (name == "remark") return &remark_sst();
    if (name == "doubling") return &doubling_sst();
    if (name == "swap-sst") return &swap_sst();
    return nullptr;
}

}  // namespace builtins
}  // namespace ttw
