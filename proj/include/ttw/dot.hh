#ifndef TTW_DOT_HH
#define TTW_DOT_HH

#include <string>

#include "ttw/dag.hh"
#include "ttw/dbta.hh"
#include "ttw/tdtt.hh"
#include "ttw/tree.hh"

namespace ttw {

/// DOT digraphs with deterministic node numbering. Child order is carried by
/// edge labels 1..k.
std::string dot_of_tree(const Tree& t);
std::string dot_of_dag(const TermDag& d);
std::string dot_of_dbta(const Dbta& a);

/// The input tree annotated per node with the bottom-up run's configuration
/// (lookahead state and register values), like the register figures.
std::string dot_of_bottomup_run(const TopDownTT& tt, const Tree& t,
                                const EvalLimits& limits = {});

}  // namespace ttw

#endif  // TTW_DOT_HH
