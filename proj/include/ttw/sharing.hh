#ifndef TTW_SHARING_HH
#define TTW_SHARING_HH

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ttw/dag.hh"
#include "ttw/tdtt.hh"
#include "ttw/tree.hh"

namespace ttw {

/// Evaluates a tree-output top-down transducer into a term dag, memoizing on
/// (state, input node): each demanded pair contributes one copy of its rule
/// body skeleton. unfold(result) equals run_topdown on the same input.
TermDag run_shared(const TopDownTT& tt, const Tree& t, const EvalLimits& limits = {});

/// Merges structurally identical subdags by canonical bottom-up numbering.
/// The result is minimal among dags with the same unfold; idempotent.
TermDag dedup(const TermDag& d);

struct GrowthRow {
    size_t n = 0;
    size_t input_size = 0;
    size_t tree_size = 0;
    size_t dag_memo_nodes = 0;
    size_t dag_dedup_nodes = 0;
    int64_t micros = 0;
};

struct GrowthReport {
    std::vector<GrowthRow> rows;
};

/// One row per n in [n_from, n_to]: input size, output tree size, memoized
/// and deduplicated dag node counts, and the shared-evaluation time.
GrowthReport growth_report(const TopDownTT& tt, const std::function<Tree(size_t)>& family,
                           size_t n_from, size_t n_to, const EvalLimits& limits = {});

/// CSV with header n,input_size,tree_size,dag_memo_nodes,dag_dedup_nodes,micros
std::string growth_csv(const GrowthReport& report);

}  // namespace ttw

#endif  // TTW_SHARING_HH
