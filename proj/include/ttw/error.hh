#ifndef TTW_ERROR_HH
#define TTW_ERROR_HH

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ttw {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed concrete syntax. Positions are 1-based.
struct ParseError : Error {
    ParseError(const std::string& msg, size_t line, size_t col)
        : Error("parse error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          line(line), col(col) {}
    size_t line;
    size_t col;
};

/// A machine or term violates a structural invariant.
struct ValidationError : Error {
    using Error::Error;
};

/// Raised by the partial run functions when no rule matches.
/// `path` addresses the input node (slash-separated 1-based child steps, "/" for the root).
struct UndefinedTransition : Error {
    UndefinedTransition(std::string state, std::string letter,
                        std::vector<std::string> lookahead, std::string path)
        : Error("undefined transition: state " + state + ", letter " + letter +
                (lookahead.empty() ? std::string{}
                                   : ", lookahead (" + join(lookahead) + ")") +
                " at input node " + path),
          state(std::move(state)), letter(std::move(letter)),
          lookahead(std::move(lookahead)), path(std::move(path)) {}

    std::string state;
    std::string letter;
    std::vector<std::string> lookahead;
    std::string path;

  private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (size_t i = 0; i < v.size(); ++i) { if (i) s += ","; s += v[i]; }
        return s;
    }
};

/// An SST finished in a state without an output expression, or the output
/// expression touched a poisoned register.
struct OutputUndefined : Error {
    explicit OutputUndefined(std::string final_state, const std::string& why)
        : Error("output undefined in final state " + final_state + ": " + why),
          final_state(std::move(final_state)) {}
    std::string final_state;
};

/// Evaluation exceeded its node budget. Distinct from UndefinedTransition:
/// it means "too big to compute here", never "the function is undefined".
struct ResourceExhausted : Error {
    using Error::Error;
};

struct EvalLimits {
    size_t node_budget = 8'000'000;
};

class Budget {
  public:
    Budget() = default;
    explicit Budget(const EvalLimits& limits) : left_(limits.node_budget) {}
    void charge(size_t n = 1) {
        if (n > left_) throw ResourceExhausted("evaluation budget exceeded");
        left_ -= n;
    }

  private:
    size_t left_ = EvalLimits{}.node_budget;
};

}  // namespace ttw

#endif  // TTW_ERROR_HH
