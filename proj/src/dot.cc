#include "ttw/dot.hh"

#include <sstream>

namespace ttw {

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

std::string dot_of_tree(const Tree& t) {
    TreeIndex idx(t);
    std::ostringstream out;
    out << "digraph tree {\n";
    for (size_t i = 0; i < idx.size(); ++i)
        out << "  n" << i << " [label=\"" << dot_escape(idx[i].label) << "\"];\n";
    for (size_t i = 0; i < idx.size(); ++i) {
        const auto& kids = idx[i].children;
        for (size_t j = 0; j < kids.size(); ++j)
            out << "  n" << i << " -> n" << kids[j] << " [label=\"" << (j + 1) << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

std::string dot_of_dag(const TermDag& d) {
    validate_dag(d);
    std::ostringstream out;
    out << "digraph dag {\n";
    for (size_t i = 0; i < d.nodes.size(); ++i)
        out << "  n" << i << " [label=\"" << dot_escape(d.nodes[i].label) << "\"];\n";
    out << "  root -> n" << d.root << " [style=dotted];\n  root [shape=point];\n";
    for (size_t i = 0; i < d.nodes.size(); ++i) {
        const auto& kids = d.nodes[i].children;
        for (size_t j = 0; j < kids.size(); ++j)
            out << "  n" << i << " -> n" << kids[j] << " [label=\"" << (j + 1) << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

std::string dot_of_dbta(const Dbta& a) {
    std::ostringstream out;
    out << "digraph dbta {\n";
    for (size_t i = 0; i < a.states.size(); ++i)
        out << "  s" << i << " [label=\"" << dot_escape(a.states[i]) << "\",shape=circle];\n";
    size_t t = 0;
    for (const auto& [key, to] : a.delta) {
        std::string label = key.first;
        out << "  t" << t << " [label=\"" << dot_escape(key.first) << "\",shape=box];\n";
        for (size_t j = 0; j < key.second.size(); ++j)
            out << "  s" << state_index(a, key.second[j]) << " -> t" << t << " [label=\"" << (j + 1)
                << "\"];\n";
        out << "  t" << t << " -> s" << state_index(a, to) << ";\n";
        ++t;
    }
    out << "}\n";
    return out.str();
}

std::string dot_of_bottomup_run(const TopDownTT& tt, const Tree& t, const EvalLimits& limits) {
    BottomUpRun run = run_bottomup(tt, t, limits);
    TreeIndex idx(t);
    std::ostringstream out;
    out << "digraph run {\n  node [shape=record];\n";
    for (size_t i = 0; i < idx.size(); ++i) {
        std::string label = dot_escape(idx[i].label);
        if (run.la_states)
            label += " | state = " + dot_escape(tt.lookahead->states[(*run.la_states)[i]]);
        for (size_t qi = 0; qi < run.states.size(); ++qi) {
            const auto& v = run.table[i][qi];
            label += " | " + dot_escape(run.states[qi]) + " = " +
                     (v ? dot_escape(out_value_text(*v)) : std::string("undef"));
        }
        out << "  n" << i << " [label=\"{" << label << "}\"];\n";
    }
    for (size_t i = 0; i < idx.size(); ++i) {
        const auto& kids = idx[i].children;
        for (size_t j = 0; j < kids.size(); ++j)
            out << "  n" << i << " -> n" << kids[j] << " [label=\"" << (j + 1) << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace ttw
