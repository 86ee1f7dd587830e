#include "ttw/sharing.hh"

#include <chrono>
#include <map>
#include <sstream>

#include "ttw/dbta.hh"
#include "ttw/rules.hh"

namespace ttw {

namespace {

struct SharedEval {
    const TopDownTT& tt;
    TreeIndex idx;
    std::optional<std::vector<size_t>> la;
    std::map<std::pair<std::string, std::string>, std::vector<size_t>> groups;
    Budget budget;
    TermDag dag;
    std::map<std::pair<size_t, size_t>, size_t> memo;  // (state index, input node) -> dag node

    SharedEval(const TopDownTT& tt, const Tree& t, const EvalLimits& limits)
        : tt(tt), idx(t), budget(limits) {
        validate_tree(t, tt.input);
        if (tt.lookahead) la = annotate_states(*tt.lookahead, idx);
        for (size_t i = 0; i < tt.rules.size(); ++i)
            groups[{tt.rules[i].state, tt.rules[i].letter}].push_back(i);
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

    size_t eval(size_t qi, size_t node) {
        auto key = std::make_pair(qi, node);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        const std::string& q = tt.states[qi];
        auto git = groups.find({q, idx[node].label});
        const TdttRule* rule = nullptr;
        if (git != groups.end()) {
            auto names = child_la_names(node);
            auto pick = most_specific(git->second, names, [&](size_t i) -> const LaPattern& {
                return tt.rules[i].pattern;
            });
            if (pick) rule = &tt.rules[*pick];
        }
        if (!rule) {
            std::vector<std::string> la_names;
            if (la) la_names = child_la_names(node);
            throw UndefinedTransition(q, idx[node].label, la_names, idx.path(node));
        }
        size_t result = build(std::get<TreeRhs>(rule->rhs), node);
        memo.emplace(key, result);
        return result;
    }

    size_t build(const TreeRhs& rhs, size_t input_node) {
        if (rhs.kind == TreeRhs::Kind::call) {
            size_t callee = idx[input_node].children[static_cast<size_t>(rhs.child - 1)];
            size_t qi = 0;
            while (tt.states[qi] != rhs.state) ++qi;
            return eval(qi, callee);
        }
        std::vector<size_t> kids;
        kids.reserve(rhs.children.size());
        for (const auto& c : rhs.children) kids.push_back(build(c, input_node));
        budget.charge();
        dag.nodes.push_back(TermDag::Node{rhs.label, std::move(kids)});
        return dag.nodes.size() - 1;
    }
};

}  // namespace

namespace {

size_t tree_rhs_size(const TreeRhs& rhs) {
    if (rhs.kind == TreeRhs::Kind::call) return 0;
    size_t n = 1;
    for (const auto& c : rhs.children) n += tree_rhs_size(c);
    return n;
}

}  // namespace

TermDag run_shared(const TopDownTT& tt, const Tree& t, const EvalLimits& limits) {
    ensure_wellformed(tt);
    if (tt.string_output)
        throw ValidationError("run_shared is defined for tree-output transducers only");
    SharedEval ev(tt, t, limits);
    size_t initial_index = 0;
    while (ev.tt.states[initial_index] != tt.initial) ++initial_index;
    ev.dag.root = ev.eval(initial_index, 0);
    validate_dag(ev.dag, tt.output);
    // linear bound for a fixed machine: each demanded (state, node) pair
    // contributes at most one rule body skeleton
    size_t max_rhs = 1;
    for (const auto& r : tt.rules)
        max_rhs = std::max(max_rhs, tree_rhs_size(std::get<TreeRhs>(r.rhs)));
    if (ev.dag.nodes.size() > tt.states.size() * ev.idx.size() * max_rhs)
        throw Error("internal: shared evaluation exceeded its node bound");
    return std::move(ev.dag);
}

TermDag dedup(const TermDag& d) {
    validate_dag(d);
    // canonical ids bottom-up: children first, then merge equal
    // (label, child ids) pairs
    std::vector<size_t> canon(d.nodes.size(), SIZE_MAX);
    std::map<std::pair<std::string, std::vector<size_t>>, size_t> interned;
    TermDag out;
    // postorder over the dag
    std::vector<std::pair<size_t, size_t>> stack{{d.root, 0}};
    std::vector<bool> visiting(d.nodes.size(), false);
    visiting[d.root] = true;
    while (!stack.empty()) {
        auto& [id, next] = stack.back();
        const auto& node = d.nodes[id];
        if (next < node.children.size()) {
            size_t child = node.children[next++];
            if (canon[child] == SIZE_MAX && !visiting[child]) {
                visiting[child] = true;
                stack.emplace_back(child, 0);
            }
            continue;
        }
        if (canon[id] == SIZE_MAX) {
            std::vector<size_t> kids;
            kids.reserve(node.children.size());
            for (size_t c : node.children) kids.push_back(canon[c]);
            auto key = std::make_pair(node.label, kids);
            auto it = interned.find(key);
            if (it != interned.end()) {
                canon[id] = it->second;
            } else {
                canon[id] = out.nodes.size();
                interned.emplace(std::move(key), out.nodes.size());
                out.nodes.push_back(TermDag::Node{node.label, std::move(kids)});
            }
        }
        stack.pop_back();
    }
    out.root = canon[d.root];
    return out;
}

GrowthReport growth_report(const TopDownTT& tt, const std::function<Tree(size_t)>& family,
                           size_t n_from, size_t n_to, const EvalLimits& limits) {
    GrowthReport report;
    for (size_t n = n_from; n <= n_to; ++n) {
        Tree input = family(n);
        auto start = std::chrono::steady_clock::now();
        TermDag memo_dag = run_shared(tt, input, limits);
        auto stop = std::chrono::steady_clock::now();
        TermDag dedup_dag = dedup(memo_dag);
        GrowthRow row;
        row.n = n;
        row.input_size = tree_size(input);
        row.tree_size = ttw::tree_size(unfold(memo_dag, limits));
        row.dag_memo_nodes = memo_dag.nodes.size();
        row.dag_dedup_nodes = dedup_dag.nodes.size();
        row.micros =
            std::chrono::duration_cast<std::chrono::microseconds>(stop - start).count();
        report.rows.push_back(row);
    }
    return report;
}

std::string growth_csv(const GrowthReport& report) {
    std::ostringstream out;
    out << "n,input_size,tree_size,dag_memo_nodes,dag_dedup_nodes,micros\n";
    for (const auto& r : report.rows)
        out << r.n << "," << r.input_size << "," << r.tree_size << "," << r.dag_memo_nodes << ","
            << r.dag_dedup_nodes << "," << r.micros << "\n";
    return out.str();
}

}  // namespace ttw
