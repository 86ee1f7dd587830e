#ifndef TTW_PIPELINE_HH
#define TTW_PIPELINE_HH

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ttw/mtt.hh"
#include "ttw/sst.hh"
#include "ttw/tdtt.hh"
#include "ttw/tree.hh"

namespace ttw {

/// What a stage consumes or produces: trees over an alphabet or strings over
/// a symbol set.
struct IoKind {
    bool is_string = false;
    RankedAlphabet alphabet;     // tree kind
    std::vector<Sym> symbols;    // string kind

    static IoKind tree(RankedAlphabet a) { return {false, std::move(a), {}}; }
    static IoKind str(std::vector<Sym> syms) { return {true, {}, std::move(syms)}; }

    std::string describe() const;
};

/// A tdtt stage evaluated through run_shared + unfold instead of rewriting.
struct SharedStage {
    TopDownTT tt;
};

/// Adapters: string <-> unary tree codecs and yield.
struct EncodeStage {
    RankedAlphabet alphabet;  // unary-shaped target alphabet
};
struct DecodeStage {
    RankedAlphabet alphabet;
};
struct YieldStage {
    RankedAlphabet alphabet;  // neutral letters of this alphabet are erased
};

using Stage = std::variant<TopDownTT, SharedStage, MacroTT, Sst, RegisterMachine, EncodeStage,
                           DecodeStage, YieldStage>;

IoKind stage_input(const Stage& s);
IoKind stage_output(const Stage& s);
std::string stage_name(const Stage& s);

/// Ordered stages with compatible interfaces. Compatibility: kinds match and
/// every value the upstream stage can produce is readable downstream
/// (letters with equal arities, symbols included).
class Pipeline {
  public:
    Pipeline() = default;
    explicit Pipeline(std::vector<Stage> stages);

    static Pipeline of(Stage s);

    const std::vector<Stage>& stages() const { return stages_; }
    bool empty() const { return stages_.empty(); }

    /// Empty pipelines have no kinds of their own (identity).
    std::optional<IoKind> input_kind() const;
    std::optional<IoKind> output_kind() const;

  private:
    std::vector<Stage> stages_;
};

using Value = std::variant<Tree, Word>;

std::string value_text(const Value& v);

/// Left-to-right application. Stage failures are rethrown with the stage
/// index prefixed; UndefinedTransition/OutputUndefined mean the composite
/// function is undefined on this input.
Value run_pipeline(const Pipeline& p, const Value& input, const EvalLimits& limits = {});

struct Counterexample {
    Value input;
    std::optional<Value> left;   // nullopt = undefined
    std::optional<Value> right;
    std::string left_error;
    std::string right_error;
};

struct EquivVerdict {
    bool pass = true;
    size_t inputs_tested = 0;
    std::optional<Counterexample> counterexample;
};

/// Compares outputs and definedness on every input of size (trees: node
/// count, strings: length) at most `bound`, in canonical enumeration order.
/// ResourceExhausted is not treated as undefined; it propagates.
EquivVerdict check_equiv(const Pipeline& left, const Pipeline& right, size_t bound,
                         const EvalLimits& limits = {});

/// All inputs check_equiv would enumerate for this kind and bound.
std::vector<Value> enumerate_inputs(const IoKind& kind, size_t bound);

}  // namespace ttw

#endif  // TTW_PIPELINE_HH
