#ifndef TTW_DAG_HH
#define TTW_DAG_HH

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ttw/error.hh"
#include "ttw/tree.hh"

namespace ttw {

/// A rooted term graph: shared representation of a tree. Node ids index the
/// nodes vector; the child relation must be acyclic and every node reachable
/// from the root.
struct TermDag {
    struct Node {
        std::string label;
        std::vector<size_t> children;

        bool operator==(const Node&) const = default;
    };

    std::vector<Node> nodes;
    size_t root = 0;
};

struct DagStats {
    size_t node_count = 0;
    size_t edge_count = 0;
};

/// Ids in range, acyclic, all nodes reachable; with an alphabet, labels and
/// arities are checked too.
void validate_dag(const TermDag& d);
void validate_dag(const TermDag& d, const RankedAlphabet& alphabet);

/// Recursively expands sharing. Output size may be exponential in dag size;
/// the budget guards against runaway expansion. Cyclic inputs are rejected
/// by validate_dag, which this calls first.
Tree unfold(const TermDag& d, const EvalLimits& limits = {});

DagStats dag_stats(const TermDag& d);

/// A dag with no sharing at all: one dag node per tree node.
TermDag dag_of_tree(const Tree& t);

/// Text format: one line per node, `id: label(id,...)` or `id: label`,
/// then `root: id`. Printing renumbers ids in topological (preorder) order.
std::string dag_text(const TermDag& d);
TermDag parse_dag(std::string_view text);

}  // namespace ttw

#endif  // TTW_DAG_HH
