#include "ttw/mtt.hh"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace ttw {

MttRhs MttRhs::out(std::string letter, std::vector<MttRhs> kids) {
    MttRhs r;
    r.kind = Kind::output;
    r.label = std::move(letter);
    r.children = std::move(kids);
    return r;
}

MttRhs MttRhs::par(int index) {
    MttRhs r;
    r.kind = Kind::param;
    r.param = index;
    return r;
}

MttRhs MttRhs::call(std::string state, int child, std::vector<MttRhs> args) {
    MttRhs r;
    r.kind = Kind::call;
    r.state = std::move(state);
    r.child = child;
    r.children = std::move(args);
    return r;
}

int MacroTT::state_arity(const std::string& name) const {
    for (const auto& [s, a] : states)
        if (s == name) return a;
    throw ValidationError("unknown mtt state '" + name + "'");
}

bool MacroTT::has_state(const std::string& name) const {
    for (const auto& [s, a] : states)
        if (s == name) return true;
    return false;
}

namespace {

void check_mtt_rhs(const MacroTT& m, const MttRhs& rhs, int input_arity, int rule_arity,
                   std::vector<Diagnostic>& out, const std::string& where) {
    switch (rhs.kind) {
        case MttRhs::Kind::output:
            if (!m.output.has(rhs.label)) {
                out.push_back({where + ": unknown output letter '" + rhs.label + "'"});
                return;
            }
            if (m.output.arity(rhs.label) != static_cast<int>(rhs.children.size()))
                out.push_back({where + ": output letter '" + rhs.label + "' arity mismatch"});
            break;
        case MttRhs::Kind::param:
            if (rhs.param < 1 || rhs.param > rule_arity)
                out.push_back({where + ": parameter x" + std::to_string(rhs.param) +
                               " out of range 1.." + std::to_string(rule_arity)});
            return;
        case MttRhs::Kind::call: {
            if (!m.has_state(rhs.state)) {
                out.push_back({where + ": call to unknown state '" + rhs.state + "'"});
                return;
            }
            if (rhs.child < 1 || rhs.child > input_arity)
                out.push_back({where + ": call child index " + std::to_string(rhs.child) +
                               " out of range 1.." + std::to_string(input_arity)});
            if (m.state_arity(rhs.state) != static_cast<int>(rhs.children.size()))
                out.push_back({where + ": call to '" + rhs.state + "' passes " +
                               std::to_string(rhs.children.size()) + " arguments, state arity is " +
                               std::to_string(m.state_arity(rhs.state))});
            break;
        }
    }
    for (const auto& c : rhs.children)
        check_mtt_rhs(m, c, input_arity, rule_arity, out, where);
}

std::string rule_place(const MttRule& r) {
    return "rule " + r.state + "<" + r.letter + pattern_text(r.pattern) + ">";
}

using MttRuleGroups = std::map<std::pair<std::string, std::string>, std::vector<size_t>>;

MttRuleGroups group_rules(const std::vector<MttRule>& rules) {
    MttRuleGroups groups;
    for (size_t i = 0; i < rules.size(); ++i)
        groups[{rules[i].state, rules[i].letter}].push_back(i);
    return groups;
}

template <typename F>
void for_each_state_vector(const std::vector<std::string>& states, size_t k, F&& f) {
    std::vector<std::string> v(k);
    auto go = [&](auto&& self, size_t i) -> void {
        if (i == k) {
            f(v);
            return;
        }
        for (const auto& s : states) {
            v[i] = s;
            self(self, i + 1);
        }
    };
    go(go, 0);
}

}  // namespace

std::vector<Diagnostic> check_wellformed(const MacroTT& m) {
    std::vector<Diagnostic> out;
    if (m.states.empty()) out.push_back({"transducer has no states"});
    std::set<std::string> seen_states;
    for (const auto& [s, arity] : m.states) {
        try {
            RankedAlphabet::validate_name(s);
        } catch (const ValidationError& e) {
            out.push_back({std::string("bad state name: ") + e.what()});
        }
        if (arity < 0) out.push_back({"state '" + s + "' has negative arity"});
        if (!seen_states.insert(s).second) out.push_back({"duplicate state '" + s + "'"});
    }
    if (!m.has_state(m.initial))
        out.push_back({"initial state '" + m.initial + "' not declared"});
    else if (m.state_arity(m.initial) != 0)
        out.push_back({"initial state '" + m.initial + "' must have arity 0"});
    if (m.lookahead) {
        if (m.lookahead->alphabet != m.input)
            out.push_back({"lookahead automaton alphabet differs from the input alphabet"});
        try {
            ensure_total(*m.lookahead);
        } catch (const ValidationError& e) {
            out.push_back({e.what()});
        }
    }
    std::set<std::string> seen_keys;
    for (const auto& r : m.rules) {
        const std::string where = rule_place(r);
        if (!m.has_state(r.state)) {
            out.push_back({where + ": unknown state"});
            continue;
        }
        if (!m.input.has(r.letter)) {
            out.push_back({where + ": unknown input letter"});
            continue;
        }
        int arity = m.input.arity(r.letter);
        if (static_cast<int>(r.pattern.size()) != arity) {
            out.push_back({where + ": pattern length differs from letter arity"});
            continue;
        }
        for (const auto& e : r.pattern) {
            if (!e) continue;
            if (!m.lookahead)
                out.push_back({where + ": lookahead pattern without a lookahead automaton"});
            else if (std::find(m.lookahead->states.begin(), m.lookahead->states.end(), *e) ==
                     m.lookahead->states.end())
                out.push_back({where + ": unknown lookahead state '" + *e + "'"});
        }
        check_mtt_rhs(m, r.rhs, arity, m.state_arity(r.state), out, where);
        std::string key = r.state + "\x1f" + r.letter + "\x1f" + pattern_text(r.pattern);
        if (!seen_keys.insert(key).second)
            out.push_back({where + ": duplicate rule for the same state, letter and pattern"});
    }
    if (out.empty()) {
        auto groups = group_rules(m.rules);
        for (const auto& [key, indices] : groups) {
            int arity = m.input.arity(key.second);
            auto pattern_of = [&](size_t i) -> const LaPattern& { return m.rules[i].pattern; };
            if (!m.lookahead) {
                if (indices.size() > 1)
                    out.push_back({"rules for " + key.first + "<" + key.second +
                                   "> are duplicated (no lookahead to tell them apart)"});
                continue;
            }
            for_each_state_vector(m.lookahead->states, static_cast<size_t>(arity),
                                  [&](const std::vector<std::string>& v) {
                                      try {
                                          most_specific(indices, v, pattern_of);
                                      } catch (const ValidationError& e) {
                                          out.push_back({"rules for " + key.first + "<" +
                                                         key.second + ">: " + e.what()});
                                      }
                                  });
        }
    }
    return out;
}

void ensure_wellformed(const MacroTT& m) {
    auto diags = check_wellformed(m);
    if (diags.empty()) return;
    std::string msg = "macro tree transducer is not well-formed:";
    for (const auto& d : diags) msg += "\n  " + d.message;
    throw ValidationError(msg);
}

MacroTT mtt_of_tdtt(const TopDownTT& tt) {
    ensure_wellformed(tt);
    if (tt.string_output)
        throw ValidationError("string-output transducers lift via tdtts_to_mtt_unary instead");
    MacroTT m;
    m.input = tt.input;
    m.output = tt.output;
    for (const auto& q : tt.states) m.states.emplace_back(q, 0);
    m.initial = tt.initial;
    m.lookahead = tt.lookahead;
    for (const auto& r : tt.rules) {
        auto lift = [&](auto&& self, const TreeRhs& n) -> MttRhs {
            if (n.kind == TreeRhs::Kind::call) return MttRhs::call(n.state, n.child, {});
            std::vector<MttRhs> kids;
            kids.reserve(n.children.size());
            for (const auto& c : n.children) kids.push_back(self(self, c));
            return MttRhs::out(n.label, std::move(kids));
        };
        m.rules.push_back({r.state, r.letter, r.pattern, lift(lift, std::get<TreeRhs>(r.rhs))});
    }
    return m;
}

namespace {

struct MttRunContext {
    const MacroTT& m;
    TreeIndex idx;
    std::optional<std::vector<size_t>> la;
    MttRuleGroups groups;
    std::map<std::string, size_t> state_index;

    MttRunContext(const MacroTT& m, const Tree& t) : m(m), idx(t), groups(group_rules(m.rules)) {
        validate_tree(t, m.input);
        if (m.lookahead) la = annotate_states(*m.lookahead, idx);
        for (size_t i = 0; i < m.states.size(); ++i) state_index[m.states[i].first] = i;
    }

    std::vector<std::string> child_la_names(size_t node) const {
        const auto& kids = idx[node].children;
        std::vector<std::string> names(kids.size());
        if (la)
            for (size_t i = 0; i < kids.size(); ++i)
                names[i] = m.lookahead->states[(*la)[kids[i]]];
        else
            for (auto& n : names) n = "_";
        return names;
    }

    const MttRule* find_rule(const std::string& q, size_t node) const {
        auto it = groups.find({q, idx[node].label});
        if (it == groups.end()) return nullptr;
        auto names = child_la_names(node);
        auto pick = most_specific(it->second, names,
                                  [&](size_t i) -> const LaPattern& { return m.rules[i].pattern; });
        return pick ? &m.rules[*pick] : nullptr;
    }

    [[noreturn]] void fail_undefined(const std::string& q, size_t node) const {
        std::vector<std::string> la_names;
        if (la) la_names = child_la_names(node);
        throw UndefinedTransition(q, idx[node].label, la_names, idx.path(node));
    }
};

Tree param_leaf(int j) { return leaf("x" + std::to_string(j)); }

// contexts can grow hyper-exponentially thin (chains that double under
// composition); structural recursion on them must bail out before the call
// stack does, and well before the node budget would
constexpr size_t kMaxValueDepth = 16384;

void check_depth(size_t depth) {
    if (depth > kMaxValueDepth)
        throw ResourceExhausted("context depth limit exceeded");
}

/// Demand-driven memoized open evaluation. Arguments of a call are only
/// evaluated when the callee's context actually uses the parameter, which is
/// the outermost (call-by-name) convention.
struct OpenEval {
    const MttRunContext& cx;
    Budget& budget;
    std::map<std::pair<size_t, size_t>, std::optional<Context>> memo;  // (state, node)
    std::optional<std::pair<std::string, size_t>> failure;             // first missing rule

    const std::optional<Context>& eval(size_t qi, size_t node) {
        auto key = std::make_pair(qi, node);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        const auto& [qname, arity] = cx.m.states[qi];
        const MttRule* rule = cx.find_rule(qname, node);
        std::optional<Context> result;
        if (rule) {
            auto body = eval_rhs(rule->rhs, node);
            if (body) result = Context{arity, std::move(*body)};
        } else if (!failure) {
            failure = {qname, node};
        }
        return memo.emplace(key, std::move(result)).first->second;
    }

    std::optional<Tree> eval_rhs(const MttRhs& rhs, size_t node, size_t depth = 0) {
        check_depth(depth);
        switch (rhs.kind) {
            case MttRhs::Kind::param:
                budget.charge();
                return param_leaf(rhs.param);
            case MttRhs::Kind::output: {
                std::vector<Tree> kids;
                kids.reserve(rhs.children.size());
                for (const auto& c : rhs.children) {
                    auto sub = eval_rhs(c, node, depth + 1);
                    if (!sub) return std::nullopt;
                    kids.push_back(std::move(*sub));
                }
                budget.charge();
                return Tree{rhs.label, std::move(kids)};
            }
            case MttRhs::Kind::call: {
                size_t child = cx.idx[node].children[static_cast<size_t>(rhs.child - 1)];
                const auto& callee = eval(cx.state_index.at(rhs.state), child);
                if (!callee) return std::nullopt;
                std::vector<std::optional<std::optional<Tree>>> cache(rhs.children.size());
                auto arg_of = [&](int j) -> const std::optional<Tree>& {
                    auto& slot = cache[static_cast<size_t>(j - 1)];
                    if (!slot) slot = eval_rhs(rhs.children[static_cast<size_t>(j - 1)], node, depth + 1);
                    return *slot;
                };
                return subst(callee->body, arg_of, depth + 1);
            }
        }
        return std::nullopt;  // unreachable
    }

    template <typename ArgOf>
    std::optional<Tree> subst(const Tree& body, ArgOf&& arg_of, size_t depth) {
        check_depth(depth);
        if (auto j = param_index(body.label)) {
            const std::optional<Tree>& a = arg_of(*j);
            if (!a) return std::nullopt;
            size_t size = 0, max_depth = 0;
            measure(*a, size, max_depth, 0);
            check_depth(depth + max_depth);
            budget.charge(size);
            return *a;
        }
        budget.charge();
        std::vector<Tree> kids;
        kids.reserve(body.children.size());
        for (const auto& c : body.children) {
            auto sub = subst(c, arg_of, depth + 1);
            if (!sub) return std::nullopt;
            kids.push_back(std::move(*sub));
        }
        return Tree{body.label, std::move(kids)};
    }

    // size and depth in one guarded pass
    static void measure(const Tree& t, size_t& size, size_t& max_depth, size_t depth) {
        check_depth(depth);
        ++size;
        if (depth > max_depth) max_depth = depth;
        for (const auto& c : t.children) measure(c, size, max_depth, depth + 1);
    }
};

}  // namespace

Context run_oi_open(const MacroTT& m, const std::string& state, const Tree& t,
                    const EvalLimits& limits) {
    MttRunContext cx(m, t);
    Budget budget(limits);
    OpenEval ev{cx, budget, {}, {}};
    auto it = cx.state_index.find(state);
    if (it == cx.state_index.end()) throw ValidationError("unknown mtt state '" + state + "'");
    const auto& result = ev.eval(it->second, 0);
    if (!result) {
        // ev.failure holds the first demanded (state, node) with no rule
        if (ev.failure) cx.fail_undefined(ev.failure->first, ev.failure->second);
        cx.fail_undefined(state, 0);
    }
    return *result;
}

Tree run_oi(const MacroTT& m, const Tree& t, const EvalLimits& limits) {
    return run_oi_open(m, m.initial, t, limits).body;
}

const std::optional<Context>& MttBottomUpRun::reg(size_t node, const std::string& state) const {
    auto it = std::find(states.begin(), states.end(), state);
    if (it == states.end()) throw ValidationError("unknown register '" + state + "'");
    return table[node][static_cast<size_t>(it - states.begin())];
}

MttBottomUpRun run_bottomup(const MacroTT& m, const Tree& t, const EvalLimits& limits) {
    MttRunContext cx(m, t);
    Budget budget(limits);
    MttBottomUpRun run;
    for (const auto& [s, a] : m.states) run.states.push_back(s);
    run.la_states = cx.la;
    run.initial_index = cx.state_index.at(m.initial);
    run.table.assign(cx.idx.size(), {});

    // eager rule-body evaluation against the children's register rows:
    // arguments are computed up front, but an undefined argument only poisons
    // the result when the callee's context uses that parameter
    std::function<std::optional<Tree>(const MttRhs&, size_t, size_t)> eval_rhs =
        [&](const MttRhs& rhs, size_t node, size_t depth) -> std::optional<Tree> {
        check_depth(depth);
        switch (rhs.kind) {
            case MttRhs::Kind::param:
                budget.charge();
                return param_leaf(rhs.param);
            case MttRhs::Kind::output: {
                std::vector<Tree> kids;
                kids.reserve(rhs.children.size());
                for (const auto& c : rhs.children) {
                    auto sub = eval_rhs(c, node, depth + 1);
                    if (!sub) return std::nullopt;
                    kids.push_back(std::move(*sub));
                }
                budget.charge();
                return Tree{rhs.label, std::move(kids)};
            }
            case MttRhs::Kind::call: {
                size_t child = cx.idx[node].children[static_cast<size_t>(rhs.child - 1)];
                const auto& callee = run.table[child][cx.state_index.at(rhs.state)];
                std::vector<std::optional<Tree>> args;
                args.reserve(rhs.children.size());
                for (const auto& a : rhs.children) args.push_back(eval_rhs(a, node, depth + 1));
                if (!callee) return std::nullopt;
                std::function<std::optional<Tree>(const Tree&, size_t)> sub =
                    [&](const Tree& body, size_t d) -> std::optional<Tree> {
                    check_depth(d);
                    if (auto j = param_index(body.label)) {
                        const auto& a = args[static_cast<size_t>(*j - 1)];
                        if (!a) return std::nullopt;
                        size_t size = 0, max_depth = 0;
                        OpenEval::measure(*a, size, max_depth, 0);
                        check_depth(d + max_depth);
                        budget.charge(size);
                        return *a;
                    }
                    budget.charge();
                    std::vector<Tree> kids;
                    kids.reserve(body.children.size());
                    for (const auto& c : body.children) {
                        auto s = sub(c, d + 1);
                        if (!s) return std::nullopt;
                        kids.push_back(std::move(*s));
                    }
                    return Tree{body.label, std::move(kids)};
                };
                return sub(callee->body, depth + 1);
            }
        }
        return std::nullopt;  // unreachable
    };

    for (size_t i = cx.idx.size(); i > 0; --i) {
        size_t node = i - 1;
        auto& row = run.table[node];
        row.resize(m.states.size());
        for (size_t qi = 0; qi < m.states.size(); ++qi) {
            const MttRule* rule = cx.find_rule(m.states[qi].first, node);
            if (!rule) continue;
            auto body = eval_rhs(rule->rhs, node, 0);
            if (body) row[qi] = Context{m.states[qi].second, std::move(*body)};
        }
    }
    return run;
}

namespace {

/// Expression arena for the literal stepper: output letters, parameters and
/// calls on input nodes with argument expressions.
struct OiExpr {
    enum class K : uint8_t { out, param, call };
    K kind = K::out;
    std::string label;
    std::vector<size_t> kids;  // out children / call arguments
    int param = 0;
    std::string state;
    size_t input_node = 0;
};

struct OiStepper {
    const MttRunContext& cx;
    Budget budget;
    std::vector<OiExpr> nodes;
    size_t root = 0;

    size_t add(OiExpr e) {
        budget.charge();
        nodes.push_back(std::move(e));
        return nodes.size() - 1;
    }

    size_t copy_of(size_t id, size_t depth = 0) {
        check_depth(depth);
        OiExpr e = nodes[id];
        std::vector<size_t> kids;
        kids.reserve(e.kids.size());
        for (size_t c : e.kids) kids.push_back(copy_of(c, depth + 1));
        e.kids = std::move(kids);
        return add(std::move(e));
    }

    // leftmost-outermost call site: first call in preorder
    std::optional<size_t> find_redex(size_t id) const {
        if (nodes[id].kind == OiExpr::K::call) return id;
        for (size_t c : nodes[id].kids)
            if (auto r = find_redex(c)) return r;
        return std::nullopt;
    }

    size_t instantiate(const MttRhs& rhs, size_t input_node, const std::vector<size_t>& args) {
        switch (rhs.kind) {
            case MttRhs::Kind::param:
                // call-by-name: splice the argument expression unevaluated
                return copy_of(args[static_cast<size_t>(rhs.param - 1)]);
            case MttRhs::Kind::output: {
                size_t id = add(OiExpr{OiExpr::K::out, rhs.label, {}, 0, {}, 0});
                for (const auto& c : rhs.children) {
                    size_t cid = instantiate(c, input_node, args);
                    nodes[id].kids.push_back(cid);
                }
                return id;
            }
            case MttRhs::Kind::call: {
                size_t callee = cx.idx[input_node].children[static_cast<size_t>(rhs.child - 1)];
                size_t id = add(OiExpr{OiExpr::K::call, {}, {}, 0, rhs.state, callee});
                for (const auto& c : rhs.children) {
                    size_t cid = instantiate(c, input_node, args);
                    nodes[id].kids.push_back(cid);
                }
                return id;
            }
        }
        return 0;  // unreachable
    }

    void step(size_t id) {
        const std::string state = nodes[id].state;
        const size_t input_node = nodes[id].input_node;
        const std::vector<size_t> args = nodes[id].kids;
        const MttRule* rule = cx.find_rule(state, input_node);
        if (!rule) cx.fail_undefined(state, input_node);
        size_t repl = instantiate(rule->rhs, input_node, args);
        nodes[id] = nodes[repl];
    }

    std::string render(size_t id) const {
        const OiExpr& e = nodes[id];
        switch (e.kind) {
            case OiExpr::K::param:
                return "x" + std::to_string(e.param);
            case OiExpr::K::out: {
                std::string s = e.label;
                if (!e.kids.empty()) {
                    s += "(";
                    for (size_t i = 0; i < e.kids.size(); ++i) {
                        if (i) s += ",";
                        s += render(e.kids[i]);
                    }
                    s += ")";
                }
                return s;
            }
            case OiExpr::K::call: {
                std::string s = e.state + "<" + tree_text(cx.idx.subtree(e.input_node)) + ">";
                if (!e.kids.empty()) {
                    s += "(";
                    for (size_t i = 0; i < e.kids.size(); ++i) {
                        if (i) s += ",";
                        s += render(e.kids[i]);
                    }
                    s += ")";
                }
                return s;
            }
        }
        return {};
    }

    Tree read(size_t id) const {
        const OiExpr& e = nodes[id];
        if (e.kind == OiExpr::K::param) return param_leaf(e.param);
        std::vector<Tree> kids;
        kids.reserve(e.kids.size());
        for (size_t c : e.kids) kids.push_back(read(c));
        return Tree{e.label, std::move(kids)};
    }
};

}  // namespace

OiTrace oi_rewrite(const MacroTT& m, const std::string& state, const Tree& t,
                   const EvalLimits& limits, bool keep_steps) {
    ensure_wellformed(m);
    MttRunContext cx(m, t);
    OiStepper st{cx, Budget(limits), {}, 0};
    int arity = m.state_arity(state);
    OiExpr start{OiExpr::K::call, {}, {}, 0, state, 0};
    st.root = st.add(std::move(start));
    for (int j = 1; j <= arity; ++j) {
        size_t pid = st.add(OiExpr{OiExpr::K::param, {}, {}, j, {}, 0});
        st.nodes[st.root].kids.push_back(pid);
    }
    OiTrace trace;
    if (keep_steps) trace.steps.push_back(st.render(st.root));
    while (auto redex = st.find_redex(st.root)) {
        st.step(*redex);
        if (keep_steps) trace.steps.push_back(st.render(st.root));
    }
    trace.normal_form = Context{arity, st.read(st.root)};
    return trace;
}

namespace {

std::string fresh_name(const std::string& base, const MacroTT& m) {
    std::string name = base;
    int i = 0;
    while (m.has_state(name)) name = base + std::to_string(++i);
    return name;
}

}  // namespace

LookaheadElimination eliminate_lookahead(const MacroTT& m) {
    ensure_wellformed(m);
    if (!m.lookahead) return {m, {}, {}};
    const Dbta& la = *m.lookahead;
    const size_t n = la.states.size();

    LookaheadElimination result;
    const std::string sel = fresh_name("sel", m);
    const std::string sink = fresh_name("sink", m);
    MacroTT& out = result.mtt;
    out.input = m.input;
    out.output = m.output;
    out.states = m.states;
    out.states.emplace_back(sel, static_cast<int>(n));
    out.initial = m.initial;

    bool sink_used = false;
    auto groups = group_rules(m.rules);

    for (const auto& [letter, arity_int] : m.input.letters()) {
        const size_t k = static_cast<size_t>(arity_int);

        // selector: Church-encodes the lookahead run. The tower inspects the
        // children left to right; its leaves project the parameter indexed by
        // the automaton's transition on the assumed child states.
        std::vector<std::string> prefix;
        auto sel_tower = [&](auto&& self) -> MttRhs {
            if (prefix.size() == k) {
                size_t target = state_index(la, la.delta.at({letter, prefix}));
                return MttRhs::par(static_cast<int>(target) + 1);
            }
            std::vector<MttRhs> branches;
            branches.reserve(n);
            int child = static_cast<int>(prefix.size()) + 1;
            for (const auto& r : la.states) {
                prefix.push_back(r);
                branches.push_back(self(self));
                prefix.pop_back();
            }
            return MttRhs::call(sel, child, std::move(branches));
        };
        out.rules.push_back({sel, letter, all_wildcards(k), sel_tower(sel_tower)});

        for (const auto& [q, q_arity] : m.states) {
            auto git = groups.find({q, letter});
            if (git == groups.end()) continue;
            const auto& indices = git->second;
            auto pattern_of = [&](size_t i) -> const LaPattern& { return m.rules[i].pattern; };
            auto tower = [&](auto&& self) -> MttRhs {
                if (prefix.size() == k) {
                    auto pick = most_specific(indices, prefix, pattern_of);
                    if (!pick) {
                        sink_used = true;
                        return MttRhs::call(sink, 1, {});
                    }
                    return m.rules[*pick].rhs;
                }
                std::vector<MttRhs> branches;
                branches.reserve(n);
                int child = static_cast<int>(prefix.size()) + 1;
                for (const auto& r : la.states) {
                    prefix.push_back(r);
                    branches.push_back(self(self));
                    prefix.pop_back();
                }
                return MttRhs::call(sel, child, std::move(branches));
            };
            out.rules.push_back({q, letter, all_wildcards(k), tower(tower)});
        }
    }
    if (sink_used) out.states.emplace_back(sink, 0);

    result.selector = sel;
    result.sink = sink_used ? sink : std::string{};
    ensure_wellformed(out);
    return result;
}

namespace {

MttRhs fold_chain(const StrRhs& seq, MttRhs tail) {
    MttRhs acc = std::move(tail);
    for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
        if (it->is_call)
            acc = MttRhs::call(it->state, it->child, {std::move(acc)});
        else
            acc = MttRhs::out(it->symbol, {std::move(acc)});
    }
    return acc;
}

}  // namespace

MacroTT tdtts_to_mtt_unary(const TopDownTT& tt, const std::string& end_marker) {
    ensure_wellformed(tt);
    if (!tt.string_output)
        throw ValidationError("tdtts_to_mtt_unary needs a string-output transducer");
    MacroTT m;
    m.input = tt.input;
    std::string end = end_marker;
    while (std::find(tt.output_symbols.begin(), tt.output_symbols.end(), end) !=
           tt.output_symbols.end())
        end += "_";
    for (const auto& sym : tt.output_symbols) m.output.add_letter(sym, 1);
    m.output.add_letter(end, 0);

    std::string main = "main";
    while (std::find(tt.states.begin(), tt.states.end(), main) != tt.states.end()) main += "_";
    for (const auto& q : tt.states) m.states.emplace_back(q, 1);
    m.states.emplace_back(main, 0);
    m.initial = main;
    m.lookahead = tt.lookahead;

    for (const auto& rule : tt.rules) {
        const StrRhs& seq = std::get<StrRhs>(rule.rhs);
        m.rules.push_back({rule.state, rule.letter, rule.pattern, fold_chain(seq, MttRhs::par(1))});
        if (rule.state == tt.initial)
            m.rules.push_back(
                {main, rule.letter, rule.pattern, fold_chain(seq, MttRhs::out(end))});
    }
    ensure_wellformed(m);
    return m;
}

namespace {

// tail kind encoding: -1 undefined, 0 ground (chain ends in the end marker),
// j >= 1 the chain ends in parameter x_j
using TailMap = std::vector<int>;

struct TailAnalysis {
    const MacroTT& m;
    std::string end;
    std::map<std::string, size_t> state_index;
    MttRuleGroups groups;

    explicit TailAnalysis(const MacroTT& m, std::string end_marker)
        : m(m), end(std::move(end_marker)), groups(group_rules(m.rules)) {
        for (size_t i = 0; i < m.states.size(); ++i) state_index[m.states[i].first] = i;
    }

    int tail_of(const MttRhs& rhs, const std::vector<const TailMap*>& child_maps) const {
        switch (rhs.kind) {
            case MttRhs::Kind::param:
                return rhs.param;
            case MttRhs::Kind::output:
                if (rhs.label == end) return 0;
                return tail_of(rhs.children[0], child_maps);
            case MttRhs::Kind::call: {
                int t = (*child_maps[static_cast<size_t>(rhs.child - 1)])
                            [state_index.at(rhs.state)];
                if (t <= 0) return t;
                return tail_of(rhs.children[static_cast<size_t>(t - 1)], child_maps);
            }
        }
        return -1;  // unreachable
    }

    TailMap transition(const std::string& letter, const std::vector<const TailMap*>& child_maps) const {
        TailMap out(m.states.size(), -1);
        for (size_t qi = 0; qi < m.states.size(); ++qi) {
            auto it = groups.find({m.states[qi].first, letter});
            if (it == groups.end()) continue;
            // lookahead was eliminated, so each (state, letter) has at most one rule
            out[qi] = tail_of(m.rules[it->second.front()].rhs, child_maps);
        }
        return out;
    }
};

}  // namespace

TopDownTT mtt_unary_to_tdtts(const MacroTT& m_in) {
    ensure_wellformed(m_in);
    auto end = m_in.output.end_marker();
    if (!end)
        throw ValidationError(
            "mtt_unary_to_tdtts requires unary output letters plus exactly one end marker");
    const MacroTT m = m_in.lookahead ? eliminate_lookahead(m_in).mtt : m_in;

    TailAnalysis ta(m, *end);

    // fixpoint over reachable tail maps
    std::map<TailMap, size_t> ids;
    std::vector<TailMap> maps;
    auto intern = [&](const TailMap& tm) -> bool {
        if (ids.count(tm)) return false;
        ids.emplace(tm, maps.size());
        maps.push_back(tm);
        return true;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [letter, arity_int] : m.input.letters()) {
            const size_t k = static_cast<size_t>(arity_int);
            size_t known = maps.size();
            if (k > 0 && known == 0) continue;
            std::vector<size_t> tuple(k, 0);
            auto go = [&](auto&& self, size_t i) -> void {
                if (i == k) {
                    std::vector<const TailMap*> child_maps;
                    child_maps.reserve(k);
                    for (size_t j : tuple) child_maps.push_back(&maps[j]);
                    if (intern(ta.transition(letter, child_maps))) changed = true;
                    return;
                }
                for (size_t j = 0; j < known; ++j) {
                    tuple[i] = j;
                    self(self, i + 1);
                }
            };
            go(go, 0);
        }
    }
    if (maps.empty())
        throw ValidationError("input alphabet has no nullary letter; no tail maps are reachable");

    Dbta la;
    la.alphabet = m.input;
    for (size_t i = 0; i < maps.size(); ++i) la.states.push_back("m" + std::to_string(i));
    for (const auto& [letter, arity_int] : m.input.letters()) {
        const size_t k = static_cast<size_t>(arity_int);
        std::vector<size_t> tuple(k, 0);
        auto go = [&](auto&& self, size_t i) -> void {
            if (i == k) {
                std::vector<const TailMap*> child_maps;
                std::vector<std::string> names;
                for (size_t j : tuple) {
                    child_maps.push_back(&maps[j]);
                    names.push_back(la.states[j]);
                }
                la.delta[{letter, names}] = la.states[ids.at(ta.transition(letter, child_maps))];
                return;
            }
            for (size_t j = 0; j < maps.size(); ++j) {
                tuple[i] = j;
                self(self, i + 1);
            }
        };
        go(go, 0);
    }

    TopDownTT tt;
    tt.input = m.input;
    tt.string_output = true;
    tt.output_symbols = m.output.unary_letters();
    for (const auto& [q, a] : m.states) tt.states.push_back(q);
    tt.initial = m.initial;
    tt.lookahead = la;

    // flatten a rule body into literals and calls, following the chain
    // through call arguments as dictated by the children's tail maps
    auto flatten = [&](auto&& self, const MttRhs& rhs,
                       const std::vector<const TailMap*>& child_maps, StrRhs& out) -> void {
        switch (rhs.kind) {
            case MttRhs::Kind::param:
                return;  // the chain continues in the caller
            case MttRhs::Kind::output:
                if (rhs.label == *end) return;
                out.push_back(StrItem::lit(rhs.label));
                self(self, rhs.children[0], child_maps, out);
                return;
            case MttRhs::Kind::call: {
                out.push_back(StrItem::call(rhs.state, rhs.child));
                int t = (*child_maps[static_cast<size_t>(rhs.child - 1)])
                            [ta.state_index.at(rhs.state)];
                if (t >= 1) self(self, rhs.children[static_cast<size_t>(t - 1)], child_maps, out);
                return;  // ground or undefined: the chain stops here
            }
        }
    };

    for (const auto& rule : m.rules) {
        const size_t k = static_cast<size_t>(m.input.arity(rule.letter));
        std::vector<size_t> tuple(k, 0);
        auto go = [&](auto&& self, size_t i) -> void {
            if (i == k) {
                std::vector<const TailMap*> child_maps;
                LaPattern pattern;
                for (size_t j : tuple) {
                    child_maps.push_back(&maps[j]);
                    pattern.push_back(la.states[j]);
                }
                StrRhs body;
                flatten(flatten, rule.rhs, child_maps, body);
                tt.rules.push_back({rule.state, rule.letter, std::move(pattern), std::move(body)});
                return;
            }
            for (size_t j = 0; j < maps.size(); ++j) {
                tuple[i] = j;
                self(self, i + 1);
            }
        };
        go(go, 0);
    }
    ensure_wellformed(tt);
    return tt;
}

bool is_unary_chain(const Context& c, const RankedAlphabet& output) {
    auto end = output.end_marker();
    if (!end) return false;
    const Tree* cur = &c.body;
    while (true) {
        if (param_index(cur->label)) return cur->children.empty();
        if (cur->label == *end) return cur->children.empty();
        if (!output.has(cur->label) || output.arity(cur->label) != 1 ||
            cur->children.size() != 1)
            return false;
        cur = &cur->children[0];
    }
}

}  // namespace ttw

