#ifndef TTW_SST_HH
#define TTW_SST_HH

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ttw/error.hh"
#include "ttw/tdtt.hh"
#include "ttw/tree.hh"

namespace ttw {

/// Concatenation of output-symbol literals and register reads.
struct SstItem {
    bool is_reg = false;
    std::string text;  // symbol or register name

    bool operator==(const SstItem&) const = default;

    static SstItem lit(Sym s) { return SstItem{false, std::move(s)}; }
    static SstItem reg(std::string r) { return SstItem{true, std::move(r)}; }
};
using SstExpr = std::vector<SstItem>;

struct SstTransition {
    std::string next;
    // per register, in declaration order; nullopt poisons the register
    std::vector<std::optional<SstExpr>> updates;
};

/// Streaming string transducer that reads its input from right to left,
/// starting at the end-of-string position. Register updates within one
/// transition are simultaneous: every expression reads pre-transition
/// values. Copyful by default; is_copyless checks the syntactic restriction.
struct Sst {
    std::vector<Sym> input_symbols;
    std::vector<Sym> output_symbols;
    std::vector<std::string> states;
    std::string initial;  // state at the end marker, before any input symbol
    std::vector<std::string> registers;
    std::vector<std::optional<Word>> init;  // per register, literal values only
    std::map<std::pair<std::string, Sym>, SstTransition> update;
    std::map<std::string, SstExpr> output;  // per final state; absent = undefined
};

std::vector<Diagnostic> check_wellformed(const Sst& s);
void ensure_wellformed(const Sst& s);

/// Consumes w from its rightmost symbol to its leftmost and evaluates the
/// final state's output expression. Throws OutputUndefined when the final
/// state has no output expression or the expression reads a poisoned
/// register.
Word run_sst(const Sst& s, const Word& w, const EvalLimits& limits = {});

/// Full configuration trace, mostly for tests and debugging: states and
/// register contents after each consumed symbol (right to left).
struct SstRun {
    std::vector<std::string> state_trace;                        // size |w|+1, initial first
    std::vector<std::vector<std::optional<Word>>> register_trace;  // same indexing
    std::string final_state;
    std::optional<Word> result;  // nullopt when the output is undefined
    std::string undefined_reason;
};
SstRun trace_sst(const Sst& s, const Word& w, const EvalLimits& limits = {});

struct CopylessViolation {
    std::string where;     // "transition s,a" or "output s"
    std::string register_name;
};

/// True copyless check: within each transition every register is read at
/// most once across all update expressions, and each output expression reads
/// every register at most once.
std::vector<CopylessViolation> is_copyless(const Sst& s);

/// String-output top-down transducer over unary input -> SST. Machine states
/// are the lookahead states (or "_"), registers are the transducer states;
/// partiality carries over as poisoned registers.
Sst tdtts_unary_to_sst(const TopDownTT& tt);

}  // namespace ttw

#endif  // TTW_SST_HH
