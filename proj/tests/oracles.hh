// Independent reference implementations used as test oracles. These must
// stay decoupled from the library's evaluation engines: plain structural
// recursion, no memoization, no shared rule-matching machinery beyond the
// data types themselves.

#ifndef TTW_TESTS_ORACLES_HH
#define TTW_TESTS_ORACLES_HH

#include <optional>
#include <string>
#include <vector>

#include "ttw/dag.hh"
#include "ttw/dbta.hh"
#include "ttw/sst.hh"
#include "ttw/tdtt.hh"
#include "ttw/tree.hh"

namespace oracle {

using namespace ttw;

// bottom-up automaton run by direct recursion
inline std::string la_run(const Dbta& a, const Tree& t) {
    std::vector<std::string> kids;
    for (const auto& c : t.children) kids.push_back(la_run(a, c));
    return a.delta.at({t.label, kids});
}

// number of trees with exactly `nodes` nodes, by brute-force recursion over
// letters and child size splits
inline size_t count_trees(const RankedAlphabet& alphabet, size_t nodes) {
    if (nodes == 0) return 0;
    size_t total = 0;
    for (const auto& [name, arity] : alphabet.letters()) {
        size_t k = static_cast<size_t>(arity);
        if (k == 0) {
            if (nodes == 1) ++total;
            continue;
        }
        if (nodes < k + 1) continue;
        // split nodes-1 into k positive parts
        std::vector<size_t> parts(k, 1);
        auto rec = [&](auto&& self, size_t pos, size_t left) -> size_t {
            if (pos == k - 1) {
                parts[pos] = left;
                size_t prod = 1;
                for (size_t p : parts) prod *= count_trees(alphabet, p);
                return prod;
            }
            size_t sum = 0;
            for (size_t take = 1; take + (k - pos - 1) <= left; ++take) {
                parts[pos] = take;
                sum += self(self, pos + 1, left - take);
            }
            return sum;
        };
        total += rec(rec, 0, nodes - 1);
    }
    return total;
}

inline size_t count_trees_upto(const RankedAlphabet& alphabet, size_t max_nodes) {
    size_t total = 0;
    for (size_t s = 1; s <= max_nodes; ++s) total += count_trees(alphabet, s);
    return total;
}

// naive top-down transducer evaluation: direct structural recursion with
// first-match-by-specificity rule selection recomputed from scratch
inline const TdttRule* naive_find_rule(const TopDownTT& tt, const std::string& q, const Tree& t) {
    std::vector<std::string> kid_la;
    if (tt.lookahead)
        for (const auto& c : t.children) kid_la.push_back(la_run(*tt.lookahead, c));
    else
        kid_la.assign(t.children.size(), "_");
    const TdttRule* best = nullptr;
    auto concrete_count = [](const LaPattern& p) {
        size_t n = 0;
        for (const auto& e : p) n += e.has_value();
        return n;
    };
    for (const auto& r : tt.rules) {
        if (r.state != q || r.letter != t.label) continue;
        bool match = true;
        for (size_t i = 0; i < r.pattern.size(); ++i)
            if (r.pattern[i] && *r.pattern[i] != kid_la[i]) match = false;
        if (!match) continue;
        if (!best || concrete_count(r.pattern) > concrete_count(best->pattern)) best = &r;
    }
    return best;
}

inline std::optional<Tree> naive_run_tree(const TopDownTT& tt, const std::string& q, const Tree& t);

inline std::optional<Tree> naive_eval_tree_rhs(const TopDownTT& tt, const TreeRhs& rhs,
                                               const Tree& t) {
    if (rhs.kind == TreeRhs::Kind::call)
        return naive_run_tree(tt, rhs.state, t.children[static_cast<size_t>(rhs.child - 1)]);
    std::vector<Tree> kids;
    for (const auto& c : rhs.children) {
        auto sub = naive_eval_tree_rhs(tt, c, t);
        if (!sub) return std::nullopt;
        kids.push_back(std::move(*sub));
    }
    return Tree{rhs.label, std::move(kids)};
}

inline std::optional<Tree> naive_run_tree(const TopDownTT& tt, const std::string& q,
                                          const Tree& t) {
    const TdttRule* rule = naive_find_rule(tt, q, t);
    if (!rule) return std::nullopt;
    return naive_eval_tree_rhs(tt, std::get<TreeRhs>(rule->rhs), t);
}

inline std::optional<Word> naive_run_str(const TopDownTT& tt, const std::string& q, const Tree& t) {
    const TdttRule* rule = naive_find_rule(tt, q, t);
    if (!rule) return std::nullopt;
    Word out;
    for (const auto& item : std::get<StrRhs>(rule->rhs)) {
        if (!item.is_call) {
            out.push_back(item.symbol);
            continue;
        }
        auto sub = naive_run_str(tt, item.state, t.children[static_cast<size_t>(item.child - 1)]);
        if (!sub) return std::nullopt;
        out.insert(out.end(), sub->begin(), sub->end());
    }
    return out;
}

// naive context substitution by recursive replacement
inline Tree naive_substitute(const Tree& body, const std::vector<Tree>& args) {
    if (auto j = param_index(body.label)) return args[static_cast<size_t>(*j - 1)];
    std::vector<Tree> kids;
    for (const auto& c : body.children) kids.push_back(naive_substitute(c, args));
    return Tree{body.label, std::move(kids)};
}

// recursive expansion of a term dag
inline Tree naive_unfold(const TermDag& d, size_t id) {
    std::vector<Tree> kids;
    for (size_t c : d.nodes[id].children) kids.push_back(naive_unfold(d, c));
    return Tree{d.nodes[id].label, std::move(kids)};
}
inline Tree naive_unfold(const TermDag& d) { return naive_unfold(d, d.root); }

// left-to-right leaf scan
inline void naive_yield(const Tree& t, const RankedAlphabet& a, Word& out) {
    if (t.children.empty()) {
        if (!a.is_neutral(t.label)) out.push_back(t.label);
        return;
    }
    for (const auto& c : t.children) naive_yield(c, a, out);
}

// the Remark function: a^n stays, a^n b w becomes a^n b b^|w|
inline Word remark_formula(const Word& w) {
    size_t first_b = w.size();
    for (size_t i = 0; i < w.size(); ++i)
        if (w[i] == "b") {
            first_b = i;
            break;
        }
    if (first_b == w.size()) return w;
    Word out(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(first_b));
    out.push_back("b");
    for (size_t i = first_b + 1; i < w.size(); ++i) out.push_back("b");
    return out;
}

}  // namespace oracle

#endif  // TTW_TESTS_ORACLES_HH
