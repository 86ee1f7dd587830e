#ifndef TTW_TDTT_HH
#define TTW_TDTT_HH

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ttw/alphabet.hh"
#include "ttw/dbta.hh"
#include "ttw/error.hh"
#include "ttw/rules.hh"
#include "ttw/tree.hh"

namespace ttw {

/// Right-hand side of a tree-mode rule: an output term whose leaves may be
/// state calls on input children (1-based).
struct TreeRhs {
    enum class Kind { output, call };
    Kind kind = Kind::output;
    std::string label;            // output letter (Kind::output)
    std::vector<TreeRhs> children;
    std::string state;            // called state (Kind::call)
    int child = 0;                // called child, 1-based (Kind::call)

    bool operator==(const TreeRhs&) const = default;

    static TreeRhs out(std::string letter, std::vector<TreeRhs> kids = {});
    static TreeRhs call(std::string state, int child);
};

/// One item of a string-mode rule body: a literal output symbol or a call.
struct StrItem {
    bool is_call = false;
    Sym symbol;          // literal (is_call == false)
    std::string state;   // called state
    int child = 0;       // 1-based

    bool operator==(const StrItem&) const = default;

    static StrItem lit(Sym s) { return StrItem{false, std::move(s), {}, 0}; }
    static StrItem call(std::string state, int child) {
        return StrItem{true, {}, std::move(state), child};
    }
};
using StrRhs = std::vector<StrItem>;

using TdttRhs = std::variant<TreeRhs, StrRhs>;

struct TdttRule {
    std::string state;
    std::string letter;
    LaPattern pattern;  // one entry per child; all wildcards when no lookahead
    TdttRhs rhs;
};

/// Deterministic top-down tree transducer with optional regular lookahead.
/// Output is either trees over `output` or strings over `output_symbols`.
struct TopDownTT {
    RankedAlphabet input;
    bool string_output = false;
    RankedAlphabet output;             // tree mode
    std::vector<Sym> output_symbols;   // string mode, declaration order
    std::vector<std::string> states;
    std::string initial;
    std::optional<Dbta> lookahead;
    std::vector<TdttRule> rules;
};

struct Diagnostic {
    std::string message;
};

/// All structural invariants: known names, arities, pattern shape, and
/// determinism (for every state, letter and concrete lookahead vector the
/// applicable rules form a specificity chain).
std::vector<Diagnostic> check_wellformed(const TopDownTT& tt);
void ensure_wellformed(const TopDownTT& tt);

/// A transduction result: tree or word depending on the machine's mode.
using OutValue = std::variant<Tree, Word>;

std::string out_value_text(const OutValue& v);

enum class RewriteStrategy : uint8_t { leftmost_outermost, randomized };

struct RunOptions {
    EvalLimits limits{};
    RewriteStrategy strategy = RewriteStrategy::leftmost_outermost;
    uint64_t strategy_seed = 0;  // randomized redex choice only
};

/// Normal form of initial<t> under rule rewriting. Partial: throws
/// UndefinedTransition where no rule matches.
OutValue run_topdown(const TopDownTT& tt, const Tree& t, const RunOptions& opts = {});

/// Bottom-up register semantics: one pass, every state's value at every node,
/// with an undefined marker instead of failures.
struct BottomUpRun {
    std::vector<std::string> states;                               // register order
    std::vector<std::vector<std::optional<OutValue>>> table;      // [node][state]
    std::optional<std::vector<size_t>> la_states;                 // [node], when lookahead present
    size_t initial_index = 0;

    const std::optional<OutValue>& reg(size_t node, const std::string& state) const;
    /// Value of the initial-state register at the root.
    const std::optional<OutValue>& output() const { return table[0][initial_index]; }
};

BottomUpRun run_bottomup(const TopDownTT& tt, const Tree& t, const EvalLimits& limits = {});

/// Update expression of a register machine: same shape as rule bodies but
/// calls denote a child's register instead of a state on a subtree.
struct RegUpdate {
    // reuse the rule body types; `state` holds the register name and
    // `child` the 1-based child whose register is read
    TdttRhs expr;
};

struct RmTransition {
    std::string next_state;
    std::vector<std::optional<RegUpdate>> updates;  // per register; nullopt = undefined
};

/// The lookahead-free bottom-up machine equivalent to a TopDownTT: states
/// are the lookahead states (or one dummy state "_"), registers are the
/// transducer's states.
struct RegisterMachine {
    RankedAlphabet input;
    bool string_output = false;
    RankedAlphabet output;
    std::vector<Sym> output_symbols;
    std::vector<std::string> states;
    std::vector<std::string> registers;
    std::string output_register;
    std::map<std::pair<std::string, std::vector<std::string>>, RmTransition> delta;
};

RegisterMachine to_register_machine(const TopDownTT& tt);

void ensure_wellformed(const RegisterMachine& m);

struct RmRun {
    std::vector<std::string> registers;
    std::vector<size_t> machine_states;                        // [node] index into m.states
    std::vector<std::vector<std::optional<OutValue>>> table;   // [node][register]
    size_t output_index = 0;

    const std::string& root_state(const RegisterMachine& m) const {
        return m.states[machine_states[0]];
    }
    const std::optional<OutValue>& output() const { return table[0][output_index]; }
};

RmRun run_register_machine(const RegisterMachine& m, const Tree& t, const EvalLimits& limits = {});

}  // namespace ttw

#endif  // TTW_TDTT_HH
