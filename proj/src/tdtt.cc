#include "ttw/tdtt.hh"

#include <algorithm>
#include <deque>
#include <random>
#include <set>

namespace ttw {

TreeRhs TreeRhs::out(std::string letter, std::vector<TreeRhs> kids) {
    TreeRhs r;
    r.kind = Kind::output;
    r.label = std::move(letter);
    r.children = std::move(kids);
    return r;
}

TreeRhs TreeRhs::call(std::string state, int child) {
    TreeRhs r;
    r.kind = Kind::call;
    r.state = std::move(state);
    r.child = child;
    return r;
}

std::string out_value_text(const OutValue& v) {
    if (std::holds_alternative<Tree>(v)) return tree_text(std::get<Tree>(v));
    return "\"" + word_text(std::get<Word>(v)) + "\"";
}

namespace {

bool has_state(const std::vector<std::string>& states, const std::string& s) {
    return std::find(states.begin(), states.end(), s) != states.end();
}

void check_tree_rhs(const TopDownTT& tt, const TreeRhs& rhs, int arity,
                    std::vector<Diagnostic>& out, const std::string& where) {
    if (rhs.kind == TreeRhs::Kind::call) {
        if (!has_state(tt.states, rhs.state))
            out.push_back({where + ": call to unknown state '" + rhs.state + "'"});
        if (rhs.child < 1 || rhs.child > arity)
            out.push_back({where + ": call child index " + std::to_string(rhs.child) +
                           " out of range 1.." + std::to_string(arity)});
        return;
    }
    if (!tt.output.has(rhs.label)) {
        out.push_back({where + ": unknown output letter '" + rhs.label + "'"});
        return;
    }
    if (tt.output.arity(rhs.label) != static_cast<int>(rhs.children.size()))
        out.push_back({where + ": output letter '" + rhs.label + "' arity mismatch"});
    for (const auto& c : rhs.children) check_tree_rhs(tt, c, arity, out, where);
}

void check_str_rhs(const TopDownTT& tt, const StrRhs& rhs, int arity,
                   std::vector<Diagnostic>& out, const std::string& where) {
    for (const auto& item : rhs) {
        if (item.is_call) {
            if (!has_state(tt.states, item.state))
                out.push_back({where + ": call to unknown state '" + item.state + "'"});
            if (item.child < 1 || item.child > arity)
                out.push_back({where + ": call child index " + std::to_string(item.child) +
                               " out of range 1.." + std::to_string(arity)});
        } else if (std::find(tt.output_symbols.begin(), tt.output_symbols.end(), item.symbol) ==
                   tt.output_symbols.end()) {
            out.push_back({where + ": unknown output symbol '" + item.symbol + "'"});
        }
    }
}

std::string rule_place(const TdttRule& r) {
    return "rule " + r.state + "<" + r.letter + pattern_text(r.pattern) + ">";
}

// rule indices grouped by (state, letter)
using RuleGroups = std::map<std::pair<std::string, std::string>, std::vector<size_t>>;

RuleGroups group_rules(const std::vector<TdttRule>& rules) {
    RuleGroups groups;
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

std::vector<Diagnostic> check_wellformed(const TopDownTT& tt) {
    std::vector<Diagnostic> out;
    if (tt.states.empty()) out.push_back({"transducer has no states"});
    for (const auto& s : tt.states) {
        try {
            RankedAlphabet::validate_name(s);
        } catch (const ValidationError& e) {
            out.push_back({std::string("bad state name: ") + e.what()});
        }
    }
    if (!has_state(tt.states, tt.initial))
        out.push_back({"initial state '" + tt.initial + "' not declared"});
    if (tt.string_output && tt.output_symbols.empty())
        out.push_back({"string-output transducer declares no output symbols"});
    if (tt.lookahead) {
        if (tt.lookahead->alphabet != tt.input)
            out.push_back({"lookahead automaton alphabet differs from the input alphabet"});
        try {
            ensure_total(*tt.lookahead);
        } catch (const ValidationError& e) {
            out.push_back({e.what()});
        }
        if (has_state(tt.lookahead->states, "_"))
            out.push_back({"lookahead state may not be named '_'"});
    }

    std::set<std::string> seen_keys;
    for (const auto& r : tt.rules) {
        const std::string where = rule_place(r);
        if (!has_state(tt.states, r.state))
            out.push_back({where + ": unknown state"});
        if (!tt.input.has(r.letter)) {
            out.push_back({where + ": unknown input letter"});
            continue;
        }
        int arity = tt.input.arity(r.letter);
        if (static_cast<int>(r.pattern.size()) != arity) {
            out.push_back({where + ": pattern length differs from letter arity"});
            continue;
        }
        for (const auto& e : r.pattern) {
            if (!e) continue;
            if (!tt.lookahead)
                out.push_back({where + ": lookahead pattern without a lookahead automaton"});
            else if (!has_state(tt.lookahead->states, *e))
                out.push_back({where + ": unknown lookahead state '" + *e + "'"});
        }
        if (tt.string_output != std::holds_alternative<StrRhs>(r.rhs)) {
            out.push_back({where + ": rule body mode differs from the output mode"});
            continue;
        }
        if (tt.string_output)
            check_str_rhs(tt, std::get<StrRhs>(r.rhs), arity, out, where);
        else
            check_tree_rhs(tt, std::get<TreeRhs>(r.rhs), arity, out, where);
        std::string key = r.state + "\x1f" + r.letter + "\x1f" + pattern_text(r.pattern);
        if (!seen_keys.insert(key).second)
            out.push_back({where + ": duplicate rule for the same state, letter and pattern"});
    }

    // determinism: applicable rules must form a specificity chain for every
    // concrete lookahead vector
    if (out.empty()) {
        auto groups = group_rules(tt.rules);
        for (const auto& [key, indices] : groups) {
            int arity = tt.input.arity(key.second);
            auto pattern_of = [&](size_t i) -> const LaPattern& { return tt.rules[i].pattern; };
            if (!tt.lookahead) {
                if (indices.size() > 1)
                    out.push_back({"rules for " + key.first + "<" + key.second +
                                   "> are duplicated (no lookahead to tell them apart)"});
                continue;
            }
            for_each_state_vector(tt.lookahead->states, static_cast<size_t>(arity),
                                  [&](const std::vector<std::string>& v) {
                                      try {
                                          most_specific(indices, v, pattern_of);
                                      } catch (const ValidationError& e) {
                                          out.push_back({"rules for " + key.first + "<" + key.second +
                                                         ">: " + e.what()});
                                      }
                                  });
        }
    }
    return out;
}

void ensure_wellformed(const TopDownTT& tt) {
    auto diags = check_wellformed(tt);
    if (diags.empty()) return;
    std::string msg = "transducer is not well-formed:";
    for (const auto& d : diags) msg += "\n  " + d.message;
    throw ValidationError(msg);
}

namespace {

/// Shared context for one run: indexed input, lookahead annotation, grouped
/// rules.
struct RunContext {
    const TopDownTT& tt;
    TreeIndex idx;
    std::optional<std::vector<size_t>> la;  // per input node, index into lookahead states
    RuleGroups groups;

    RunContext(const TopDownTT& tt, const Tree& t) : tt(tt), idx(t), groups(group_rules(tt.rules)) {
        validate_tree(t, tt.input);
        if (tt.lookahead) la = annotate_states(*tt.lookahead, idx);
    }

    std::vector<std::string> child_la_names(size_t node) const {
        const auto& kids = idx[node].children;
        std::vector<std::string> names(kids.size());
        if (la)
            for (size_t i = 0; i < kids.size(); ++i)
                names[i] = tt.lookahead->states[(*la)[kids[i]]];
        else
            for (auto& n : names) n = "_";
        return names;
    }

    /// Most specific rule for state q at input node `node`, or null.
    const TdttRule* find_rule(const std::string& q, size_t node) const {
        auto it = groups.find({q, idx[node].label});
        if (it == groups.end()) return nullptr;
        auto names = child_la_names(node);
        auto pick = most_specific(it->second, names,
                                  [&](size_t i) -> const LaPattern& { return tt.rules[i].pattern; });
        return pick ? &tt.rules[*pick] : nullptr;
    }

    [[noreturn]] void fail_undefined(const std::string& q, size_t node) const {
        std::vector<std::string> la_names;
        if (la) la_names = child_la_names(node);
        throw UndefinedTransition(q, idx[node].label, la_names, idx.path(node));
    }
};

/// Mutable expression arena for the rewriting engine. Node 0 is the root.
struct Rewriter {
    enum class K : uint8_t { out, lit, seq, call };
    struct Node {
        K kind;
        std::string label;          // out letter / lit symbol
        std::vector<size_t> kids;   // out, seq
        std::string state;          // call
        size_t input_node = 0;      // call
    };

    const RunContext& cx;
    Budget budget;
    std::vector<Node> nodes;
    std::deque<size_t> pending;  // call sites not yet rewritten

    Rewriter(const RunContext& cx, const EvalLimits& limits) : cx(cx), budget(limits) {}

    size_t add(Node n) {
        budget.charge();
        nodes.push_back(std::move(n));
        return nodes.size() - 1;
    }

    /// Writes the instantiated body over an existing node id, so the call
    /// site's id survives the rewrite and ids held elsewhere stay valid.
    void instantiate_into(size_t target, const TreeRhs& rhs, size_t input_node) {
        if (rhs.kind == TreeRhs::Kind::call) {
            size_t callee = cx.idx[input_node].children[static_cast<size_t>(rhs.child - 1)];
            nodes[target] = Node{K::call, {}, {}, rhs.state, callee};
            pending.push_back(target);
            return;
        }
        nodes[target] = Node{K::out, rhs.label, {}, {}, 0};
        for (const auto& c : rhs.children) {
            size_t cid = add(Node{});
            instantiate_into(cid, c, input_node);
            nodes[target].kids.push_back(cid);
        }
    }

    void instantiate_into(size_t target, const StrRhs& rhs, size_t input_node) {
        nodes[target] = Node{K::seq, {}, {}, {}, 0};
        for (const auto& item : rhs) {
            size_t cid = add(Node{});
            if (item.is_call) {
                size_t callee = cx.idx[input_node].children[static_cast<size_t>(item.child - 1)];
                nodes[cid] = Node{K::call, {}, {}, item.state, callee};
                pending.push_back(cid);
            } else {
                nodes[cid] = Node{K::lit, item.symbol, {}, {}, 0};
            }
            nodes[target].kids.push_back(cid);
        }
    }

    /// Rewrites one call site in place.
    void step(size_t id) {
        const std::string state = nodes[id].state;
        const size_t input_node = nodes[id].input_node;
        const TdttRule* rule = cx.find_rule(state, input_node);
        if (!rule) cx.fail_undefined(state, input_node);
        if (std::holds_alternative<TreeRhs>(rule->rhs))
            instantiate_into(id, std::get<TreeRhs>(rule->rhs), input_node);
        else
            instantiate_into(id, std::get<StrRhs>(rule->rhs), input_node);
    }

    void run(size_t root_call, RewriteStrategy strategy, uint64_t seed) {
        pending.push_back(root_call);
        std::mt19937_64 rng(seed);
        while (!pending.empty()) {
            size_t id;
            if (strategy == RewriteStrategy::randomized) {
                size_t pick = static_cast<size_t>(rng() % pending.size());
                id = pending[pick];
                pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(pick));
            } else {
                id = pending.front();
                pending.pop_front();
            }
            step(id);
        }
    }

    Tree read_tree(size_t id) const {
        const Node& n = nodes[id];
        std::vector<Tree> kids;
        kids.reserve(n.kids.size());
        for (size_t c : n.kids) kids.push_back(read_tree(c));
        return Tree{n.label, std::move(kids)};
    }

    void read_word(size_t id, Word& out) const {
        const Node& n = nodes[id];
        if (n.kind == K::lit) {
            out.push_back(n.label);
            return;
        }
        for (size_t c : n.kids) read_word(c, out);
    }
};

}  // namespace

OutValue run_topdown(const TopDownTT& tt, const Tree& t, const RunOptions& opts) {
    RunContext cx(tt, t);
    Rewriter rw(cx, opts.limits);
    size_t root = rw.add(Rewriter::Node{Rewriter::K::call, {}, {}, tt.initial, 0});
    rw.run(root, opts.strategy, opts.strategy_seed);
    if (tt.string_output) {
        Word w;
        rw.read_word(root, w);
        return w;
    }
    return rw.read_tree(root);
}

namespace {

/// Evaluates a rule body over already-computed child values. `lookup` maps
/// (child position 0-based, state-or-register name) to an optional value.
template <typename Lookup>
std::optional<OutValue> eval_tree_rhs(const TreeRhs& rhs, Lookup&& lookup, Budget& budget) {
    if (rhs.kind == TreeRhs::Kind::call) {
        const std::optional<OutValue>* v = lookup(static_cast<size_t>(rhs.child - 1), rhs.state);
        if (!v || !*v) return std::nullopt;
        return **v;
    }
    budget.charge();
    std::vector<Tree> kids;
    kids.reserve(rhs.children.size());
    for (const auto& c : rhs.children) {
        auto sub = eval_tree_rhs(c, lookup, budget);
        if (!sub) return std::nullopt;
        kids.push_back(std::move(std::get<Tree>(*sub)));
    }
    return OutValue{Tree{rhs.label, std::move(kids)}};
}

template <typename Lookup>
std::optional<OutValue> eval_str_rhs(const StrRhs& rhs, Lookup&& lookup, Budget& budget) {
    Word out;
    for (const auto& item : rhs) {
        if (item.is_call) {
            const std::optional<OutValue>* v = lookup(static_cast<size_t>(item.child - 1), item.state);
            if (!v || !*v) return std::nullopt;
            const Word& w = std::get<Word>(**v);
            budget.charge(w.size());
            out.insert(out.end(), w.begin(), w.end());
        } else {
            budget.charge();
            out.push_back(item.symbol);
        }
    }
    return OutValue{std::move(out)};
}

template <typename Lookup>
std::optional<OutValue> eval_rhs(const TdttRhs& rhs, Lookup&& lookup, Budget& budget) {
    if (std::holds_alternative<TreeRhs>(rhs))
        return eval_tree_rhs(std::get<TreeRhs>(rhs), lookup, budget);
    return eval_str_rhs(std::get<StrRhs>(rhs), lookup, budget);
}

}  // namespace

const std::optional<OutValue>& BottomUpRun::reg(size_t node, const std::string& state) const {
    auto it = std::find(states.begin(), states.end(), state);
    if (it == states.end()) throw ValidationError("unknown register '" + state + "'");
    return table[node][static_cast<size_t>(it - states.begin())];
}

BottomUpRun run_bottomup(const TopDownTT& tt, const Tree& t, const EvalLimits& limits) {
    RunContext cx(tt, t);
    Budget budget(limits);
    BottomUpRun run;
    run.states = tt.states;
    run.la_states = cx.la;
    run.initial_index = static_cast<size_t>(
        std::find(tt.states.begin(), tt.states.end(), tt.initial) - tt.states.begin());
    run.table.assign(cx.idx.size(), {});
    for (size_t i = cx.idx.size(); i > 0; --i) {
        size_t node = i - 1;
        const auto& kids = cx.idx[node].children;
        auto lookup = [&](size_t child_pos, const std::string& q) -> const std::optional<OutValue>* {
            size_t child = kids[child_pos];
            auto it = std::find(run.states.begin(), run.states.end(), q);
            if (it == run.states.end()) return nullptr;
            return &run.table[child][static_cast<size_t>(it - run.states.begin())];
        };
        auto& row = run.table[node];
        row.resize(tt.states.size());
        for (size_t qi = 0; qi < tt.states.size(); ++qi) {
            const TdttRule* rule = cx.find_rule(tt.states[qi], node);
            if (!rule) continue;  // stays nullopt
            row[qi] = eval_rhs(rule->rhs, lookup, budget);
        }
    }
    return run;
}

RegisterMachine to_register_machine(const TopDownTT& tt) {
    ensure_wellformed(tt);
    RegisterMachine m;
    m.input = tt.input;
    m.string_output = tt.string_output;
    m.output = tt.output;
    m.output_symbols = tt.output_symbols;
    m.states = tt.lookahead ? tt.lookahead->states : std::vector<std::string>{"_"};
    m.registers = tt.states;
    m.output_register = tt.initial;

    auto groups = group_rules(tt.rules);
    for (const auto& [letter, arity] : tt.input.letters()) {
        for_each_state_vector(m.states, static_cast<size_t>(arity),
                              [&](const std::vector<std::string>& v) {
            RmTransition tr;
            if (tt.lookahead) {
                tr.next_state = tt.lookahead->delta.at({letter, v});
            } else {
                tr.next_state = "_";
            }
            tr.updates.resize(tt.states.size());
            for (size_t qi = 0; qi < tt.states.size(); ++qi) {
                auto it = groups.find({tt.states[qi], letter});
                if (it == groups.end()) continue;
                auto pick = most_specific(it->second, v, [&](size_t i) -> const LaPattern& {
                    return tt.rules[i].pattern;
                });
                if (!pick) continue;
                tr.updates[qi] = RegUpdate{tt.rules[*pick].rhs};
            }
            m.delta.emplace(std::make_pair(letter, v), std::move(tr));
        });
    }
    return m;
}

void ensure_wellformed(const RegisterMachine& m) {
    if (m.states.empty()) throw ValidationError("register machine has no states");
    if (m.registers.empty()) throw ValidationError("register machine has no registers");
    if (std::find(m.registers.begin(), m.registers.end(), m.output_register) == m.registers.end())
        throw ValidationError("output register '" + m.output_register + "' not declared");
    for (const auto& [letter, arity] : m.input.letters()) {
        for_each_state_vector(m.states, static_cast<size_t>(arity),
                              [&](const std::vector<std::string>& v) {
            auto it = m.delta.find({letter, v});
            if (it == m.delta.end())
                throw ValidationError("register machine transition missing for letter '" + letter +
                                      "'");
            const RmTransition& tr = it->second;
            if (std::find(m.states.begin(), m.states.end(), tr.next_state) == m.states.end())
                throw ValidationError("register machine references unknown state '" +
                                      tr.next_state + "'");
            if (tr.updates.size() != m.registers.size())
                throw ValidationError("register machine update count mismatch at letter '" +
                                      letter + "'");
        });
    }
}

RmRun run_register_machine(const RegisterMachine& m, const Tree& t, const EvalLimits& limits) {
    validate_tree(t, m.input);
    TreeIndex idx(t);
    Budget budget(limits);
    RmRun run;
    run.registers = m.registers;
    run.machine_states.assign(idx.size(), 0);
    run.table.assign(idx.size(), {});
    run.output_index = static_cast<size_t>(
        std::find(m.registers.begin(), m.registers.end(), m.output_register) - m.registers.begin());
    for (size_t i = idx.size(); i > 0; --i) {
        size_t node = i - 1;
        const auto& kids = idx[node].children;
        std::vector<std::string> kid_states;
        kid_states.reserve(kids.size());
        for (size_t c : kids) kid_states.push_back(m.states[run.machine_states[c]]);
        auto it = m.delta.find({idx[node].label, kid_states});
        if (it == m.delta.end())
            throw ValidationError("register machine transition missing for letter '" +
                                  idx[node].label + "'");
        const RmTransition& tr = it->second;
        run.machine_states[node] = static_cast<size_t>(
            std::find(m.states.begin(), m.states.end(), tr.next_state) - m.states.begin());
        auto lookup = [&](size_t child_pos, const std::string& reg) -> const std::optional<OutValue>* {
            size_t child = kids[child_pos];
            auto rit = std::find(m.registers.begin(), m.registers.end(), reg);
            if (rit == m.registers.end()) return nullptr;
            return &run.table[child][static_cast<size_t>(rit - m.registers.begin())];
        };
        auto& row = run.table[node];
        row.resize(m.registers.size());
        for (size_t ri = 0; ri < m.registers.size(); ++ri) {
            if (!tr.updates[ri]) continue;
            row[ri] = eval_rhs(tr.updates[ri]->expr, lookup, budget);
        }
    }
    return run;
}

}  // namespace ttw
