#include "ttw/dag.hh"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace ttw {

namespace {

// 0 = unvisited, 1 = on stack, 2 = done
void check_acyclic_reachable(const TermDag& d, std::vector<int>& mark) {
    std::vector<std::pair<size_t, size_t>> stack;  // (node, next child index)
    stack.emplace_back(d.root, 0);
    mark[d.root] = 1;
    while (!stack.empty()) {
        auto& [id, next] = stack.back();
        if (next == d.nodes[id].children.size()) {
            mark[id] = 2;
            stack.pop_back();
            continue;
        }
        size_t child = d.nodes[id].children[next++];
        if (child >= d.nodes.size())
            throw ValidationError("dag node " + std::to_string(id) + " references missing node " +
                                  std::to_string(child));
        if (mark[child] == 1)
            throw ValidationError("dag contains a cycle through node " + std::to_string(child));
        if (mark[child] == 0) {
            mark[child] = 1;
            stack.emplace_back(child, 0);
        }
    }
}

}  // namespace

void validate_dag(const TermDag& d) {
    if (d.nodes.empty()) throw ValidationError("dag has no nodes");
    if (d.root >= d.nodes.size()) throw ValidationError("dag root id out of range");
    std::vector<int> mark(d.nodes.size(), 0);
    check_acyclic_reachable(d, mark);
    for (size_t i = 0; i < d.nodes.size(); ++i)
        if (mark[i] == 0)
            throw ValidationError("dag node " + std::to_string(i) + " unreachable from root");
}

void validate_dag(const TermDag& d, const RankedAlphabet& alphabet) {
    validate_dag(d);
    for (const auto& n : d.nodes) {
        if (!alphabet.has(n.label)) throw ValidationError("unknown letter '" + n.label + "'");
        if (alphabet.arity(n.label) != static_cast<int>(n.children.size()))
            throw ValidationError("arity mismatch at dag node labeled '" + n.label + "'");
    }
}

namespace {

Tree unfold_rec(const TermDag& d, size_t id, Budget& budget) {
    budget.charge();
    const auto& n = d.nodes[id];
    std::vector<Tree> children;
    children.reserve(n.children.size());
    for (size_t c : n.children) children.push_back(unfold_rec(d, c, budget));
    return Tree{n.label, std::move(children)};
}

}  // namespace

Tree unfold(const TermDag& d, const EvalLimits& limits) {
    validate_dag(d);
    Budget budget(limits);
    return unfold_rec(d, d.root, budget);
}

DagStats dag_stats(const TermDag& d) {
    DagStats s;
    s.node_count = d.nodes.size();
    for (const auto& n : d.nodes) s.edge_count += n.children.size();
    return s;
}

TermDag dag_of_tree(const Tree& t) {
    TermDag d;
    auto go = [&](auto&& self, const Tree& sub) -> size_t {
        size_t id = d.nodes.size();
        d.nodes.push_back(TermDag::Node{sub.label, {}});
        std::vector<size_t> kids;  // recursion reallocates d.nodes
        kids.reserve(sub.children.size());
        for (const auto& c : sub.children) kids.push_back(self(self, c));
        d.nodes[id].children = std::move(kids);
        return id;
    };
    d.root = go(go, t);
    return d;
}

std::string dag_text(const TermDag& d) {
    validate_dag(d);
    // renumber in a topological order (parents before children), Kahn-style
    std::vector<size_t> indeg(d.nodes.size(), 0);
    for (const auto& n : d.nodes)
        for (size_t c : n.children) ++indeg[c];
    std::vector<size_t> order;
    std::vector<size_t> renumber(d.nodes.size(), SIZE_MAX);
    std::vector<size_t> ready{d.root};
    size_t head = 0;
    while (head < ready.size()) {
        size_t id = ready[head++];
        renumber[id] = order.size();
        order.push_back(id);
        for (size_t c : d.nodes[id].children)
            if (--indeg[c] == 0) ready.push_back(c);
    }
    std::ostringstream out;
    for (size_t new_id = 0; new_id < order.size(); ++new_id) {
        const auto& n = d.nodes[order[new_id]];
        out << new_id << ": " << n.label;
        if (!n.children.empty()) {
            out << "(";
            for (size_t i = 0; i < n.children.size(); ++i) {
                if (i) out << ",";
                out << renumber[n.children[i]];
            }
            out << ")";
        }
        out << "\n";
    }
    out << "root: " << renumber[d.root] << "\n";
    return out.str();
}

TermDag parse_dag(std::string_view text) {
    std::map<size_t, TermDag::Node> nodes;
    std::optional<size_t> root;
    size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    auto fail = [&](const std::string& msg, size_t col = 1) -> void {
        throw ParseError(msg, line_no, col);
    };
    while (std::getline(in, line)) {
        ++line_no;
        size_t pos = 0;
        auto skip_ws = [&] {
            while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
        };
        skip_ws();
        if (pos == line.size() || line[pos] == '#') continue;
        auto read_int = [&]() -> size_t {
            skip_ws();
            size_t start = pos;
            while (pos < line.size() && std::isdigit(static_cast<unsigned char>(line[pos]))) ++pos;
            if (pos == start) fail("expected a decimal id", pos + 1);
            return std::stoull(line.substr(start, pos - start));
        };
        auto expect = [&](char c) {
            skip_ws();
            if (pos >= line.size() || line[pos] != c)
                fail(std::string("expected '") + c + "'", pos + 1);
            ++pos;
        };
        // `root: id` or `id: label(...)`
        skip_ws();
        if (line.compare(pos, 4, "root") == 0 &&
            (pos + 4 == line.size() || !std::isalnum(static_cast<unsigned char>(line[pos + 4])))) {
            pos += 4;
            expect(':');
            if (root) fail("duplicate root line");
            root = read_int();
            continue;
        }
        size_t id = read_int();
        expect(':');
        skip_ws();
        size_t start = pos;
        static const std::string stop = "(),<>|.{};=:'\"#";
        while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos])) &&
               stop.find(line[pos]) == std::string::npos)
            ++pos;
        if (pos == start) fail("expected a letter name", pos + 1);
        TermDag::Node node{line.substr(start, pos - start), {}};
        skip_ws();
        if (pos < line.size() && line[pos] == '(') {
            ++pos;
            while (true) {
                node.children.push_back(read_int());
                skip_ws();
                if (pos >= line.size()) fail("unterminated child list", pos + 1);
                if (line[pos] == ',') { ++pos; continue; }
                if (line[pos] == ')') { ++pos; break; }
                fail("expected ',' or ')'", pos + 1);
            }
        }
        skip_ws();
        if (pos != line.size() && line[pos] != '#') fail("trailing input", pos + 1);
        if (!nodes.emplace(id, std::move(node)).second)
            fail("duplicate node id " + std::to_string(id));
    }
    if (!root) throw ParseError("missing root line", line_no, 1);
    // remap sparse ids onto dense indices
    std::map<size_t, size_t> dense;
    TermDag d;
    for (const auto& [id, n] : nodes) {
        dense[id] = d.nodes.size();
        d.nodes.push_back(n);
    }
    for (auto& n : d.nodes)
        for (auto& c : n.children) {
            auto it = dense.find(c);
            if (it == dense.end())
                throw ValidationError("dag references undeclared node id " + std::to_string(c));
            c = it->second;
        }
    auto it = dense.find(*root);
    if (it == dense.end()) throw ValidationError("root id not declared");
    d.root = it->second;
    validate_dag(d);
    return d;
}

}  // namespace ttw
