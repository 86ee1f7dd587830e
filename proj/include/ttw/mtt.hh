#ifndef TTW_MTT_HH
#define TTW_MTT_HH

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttw/alphabet.hh"
#include "ttw/dbta.hh"
#include "ttw/error.hh"
#include "ttw/rules.hh"
#include "ttw/tdtt.hh"
#include "ttw/tree.hh"

namespace ttw {

/// Rule body of a macro tree transducer: output letters over bodies,
/// parameters of the rule's own state, and parameterized calls on children.
struct MttRhs {
    enum class Kind { output, param, call };
    Kind kind = Kind::output;
    std::string label;             // output letter
    std::vector<MttRhs> children;  // output children / call arguments
    int param = 0;                 // 1-based (Kind::param)
    std::string state;             // callee (Kind::call)
    int child = 0;                 // 1-based input child (Kind::call)

    bool operator==(const MttRhs&) const = default;

    static MttRhs out(std::string letter, std::vector<MttRhs> kids = {});
    static MttRhs par(int index);
    static MttRhs call(std::string state, int child, std::vector<MttRhs> args = {});
};

struct MttRule {
    std::string state;
    std::string letter;
    LaPattern pattern;
    MttRhs rhs;
};

/// Deterministic macro tree transducer. States carry a parameter arity; a
/// state's value on a subtree is a context with that many holes.
struct MacroTT {
    RankedAlphabet input;
    RankedAlphabet output;
    std::vector<std::pair<std::string, int>> states;  // (name, arity), declaration order
    std::string initial;                              // must have arity 0
    std::optional<Dbta> lookahead;
    std::vector<MttRule> rules;

    int state_arity(const std::string& name) const;
    bool has_state(const std::string& name) const;
};

std::vector<Diagnostic> check_wellformed(const MacroTT& m);
void ensure_wellformed(const MacroTT& m);

/// A tree-output top-down transducer is the special case where every state
/// has arity 0; lifting makes the mtt-only operations available to it.
MacroTT mtt_of_tdtt(const TopDownTT& tt);

/// Closed run: outermost (call-by-name) normal form of initial<t>.
Tree run_oi(const MacroTT& m, const Tree& t, const EvalLimits& limits = {});

/// Open run: normal form of q<t>(x1,...,xn) with formal parameters.
Context run_oi_open(const MacroTT& m, const std::string& state, const Tree& t,
                    const EvalLimits& limits = {});

/// Bottom-up register semantics: for every node and state, the context the
/// open run would produce, or the undefined marker.
struct MttBottomUpRun {
    std::vector<std::string> states;
    std::vector<std::vector<std::optional<Context>>> table;  // [node][state]
    std::optional<std::vector<size_t>> la_states;
    size_t initial_index = 0;

    const std::optional<Context>& reg(size_t node, const std::string& state) const;
    const std::optional<Context>& output() const { return table[0][initial_index]; }
};

MttBottomUpRun run_bottomup(const MacroTT& m, const Tree& t, const EvalLimits& limits = {});

/// Literal leftmost-outermost rewriting of q<t>(x1..xn), one call at a time.
/// Exponentially slower than run_oi_open on repeated calls; used as the
/// reference interpreter in tests and for small traces.
struct OiTrace {
    std::vector<std::string> steps;  // rendered expression after each rewrite
    Context normal_form;
};
OiTrace oi_rewrite(const MacroTT& m, const std::string& state, const Tree& t,
                   const EvalLimits& limits = {}, bool keep_steps = false);

/// Replaces regular lookahead by a fresh selector state whose value on t is
/// the projection context picking run_dbta(t)'s index, plus per-rule dispatch
/// towers. The result has no lookahead and computes the same partial function.
struct LookaheadElimination {
    MacroTT mtt;
    std::string selector;  // name of the fresh selector state
    std::string sink;      // rule-less state used for unmatched lookahead vectors
};
LookaheadElimination eliminate_lookahead(const MacroTT& m);

/// String-output top-down transducer -> macro tree transducer over unary
/// output letters; concatenation becomes substitution nesting. Lookahead is
/// carried over verbatim. The fresh arity-0 initial state closes the chain
/// with the end marker.
MacroTT tdtts_to_mtt_unary(const TopDownTT& tt, const std::string& end_marker = "eps");

/// Unary-output macro tree transducer -> string-output top-down transducer
/// with a "tail map" lookahead automaton. Rejects output alphabets that are
/// not unary letters plus one end marker.
TopDownTT mtt_unary_to_tdtts(const MacroTT& m);

/// True iff the body is a chain of unary letters ending in one parameter or
/// in the end marker: the shape every unary-output MTT register has.
bool is_unary_chain(const Context& c, const RankedAlphabet& output);

}  // namespace ttw

#endif  // TTW_MTT_HH
