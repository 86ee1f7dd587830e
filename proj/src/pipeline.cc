#include "ttw/pipeline.hh"

#include <algorithm>

#include "ttw/sharing.hh"

namespace ttw {

std::string IoKind::describe() const {
    if (is_string) {
        std::string s = "strings over {";
        for (size_t i = 0; i < symbols.size(); ++i) {
            if (i) s += ",";
            s += symbols[i];
        }
        return s + "}";
    }
    std::string s = "trees over {";
    bool first = true;
    for (const auto& [name, arity] : alphabet.letters()) {
        if (!first) s += ",";
        first = false;
        s += name + ":" + std::to_string(arity);
    }
    return s + "}";
}

IoKind stage_input(const Stage& s) {
    return std::visit(
        [](const auto& st) -> IoKind {
            using T = std::decay_t<decltype(st)>;
            if constexpr (std::is_same_v<T, TopDownTT>) return IoKind::tree(st.input);
            else if constexpr (std::is_same_v<T, SharedStage>) return IoKind::tree(st.tt.input);
            else if constexpr (std::is_same_v<T, MacroTT>) return IoKind::tree(st.input);
            else if constexpr (std::is_same_v<T, Sst>) return IoKind::str(st.input_symbols);
            else if constexpr (std::is_same_v<T, RegisterMachine>) return IoKind::tree(st.input);
            else if constexpr (std::is_same_v<T, EncodeStage>)
                return IoKind::str(st.alphabet.unary_letters());
            else if constexpr (std::is_same_v<T, DecodeStage>) return IoKind::tree(st.alphabet);
            else return IoKind::tree(st.alphabet);  // YieldStage
        },
        s);
}

IoKind stage_output(const Stage& s) {
    return std::visit(
        [](const auto& st) -> IoKind {
            using T = std::decay_t<decltype(st)>;
            if constexpr (std::is_same_v<T, TopDownTT>) {
                return st.string_output ? IoKind::str(st.output_symbols) : IoKind::tree(st.output);
            } else if constexpr (std::is_same_v<T, SharedStage>) {
                return IoKind::tree(st.tt.output);
            } else if constexpr (std::is_same_v<T, MacroTT>) {
                return IoKind::tree(st.output);
            } else if constexpr (std::is_same_v<T, Sst>) {
                return IoKind::str(st.output_symbols);
            } else if constexpr (std::is_same_v<T, RegisterMachine>) {
                return st.string_output ? IoKind::str(st.output_symbols) : IoKind::tree(st.output);
            } else if constexpr (std::is_same_v<T, EncodeStage>) {
                return IoKind::tree(st.alphabet);
            } else if constexpr (std::is_same_v<T, DecodeStage>) {
                return IoKind::str(st.alphabet.unary_letters());
            } else {  // YieldStage: every non-neutral nullary letter can appear
                std::vector<Sym> syms;
                for (const auto& [name, arity] : st.alphabet.letters())
                    if (arity == 0 && !st.alphabet.is_neutral(name)) syms.push_back(name);
                return IoKind::str(syms);
            }
        },
        s);
}

std::string stage_name(const Stage& s) {
    return std::visit(
        [](const auto& st) -> std::string {
            using T = std::decay_t<decltype(st)>;
            if constexpr (std::is_same_v<T, TopDownTT>) return "tdtt";
            else if constexpr (std::is_same_v<T, SharedStage>) return "tdtt(shared)";
            else if constexpr (std::is_same_v<T, MacroTT>) return "mtt";
            else if constexpr (std::is_same_v<T, Sst>) return "sst";
            else if constexpr (std::is_same_v<T, RegisterMachine>) return "regmachine";
            else if constexpr (std::is_same_v<T, EncodeStage>) return "encode";
            else if constexpr (std::is_same_v<T, DecodeStage>) return "decode";
            else return "yield";
        },
        s);
}

namespace {

bool compatible(const IoKind& produced, const IoKind& consumed) {
    if (produced.is_string != consumed.is_string) return false;
    if (produced.is_string) {
        for (const auto& sym : produced.symbols)
            if (std::find(consumed.symbols.begin(), consumed.symbols.end(), sym) ==
                consumed.symbols.end())
                return false;
        return true;
    }
    for (const auto& [name, arity] : produced.alphabet.letters())
        if (!consumed.alphabet.has(name) || consumed.alphabet.arity(name) != arity) return false;
    return true;
}

}  // namespace

Pipeline::Pipeline(std::vector<Stage> stages) : stages_(std::move(stages)) {
    for (size_t i = 0; i + 1 < stages_.size(); ++i) {
        IoKind produced = stage_output(stages_[i]);
        IoKind consumed = stage_input(stages_[i + 1]);
        if (!compatible(produced, consumed))
            throw ValidationError("pipeline stage " + std::to_string(i + 1) + " (" +
                                  stage_name(stages_[i]) + ") produces " + produced.describe() +
                                  " but stage " + std::to_string(i + 2) + " (" +
                                  stage_name(stages_[i + 1]) + ") consumes " + consumed.describe());
    }
}

Pipeline Pipeline::of(Stage s) { return Pipeline(std::vector<Stage>{std::move(s)}); }

std::optional<IoKind> Pipeline::input_kind() const {
    if (stages_.empty()) return std::nullopt;
    return stage_input(stages_.front());
}

std::optional<IoKind> Pipeline::output_kind() const {
    if (stages_.empty()) return std::nullopt;
    return stage_output(stages_.back());
}

std::string value_text(const Value& v) {
    if (std::holds_alternative<Tree>(v)) return tree_text(std::get<Tree>(v));
    return "\"" + word_text(std::get<Word>(v)) + "\"";
}

namespace {

Value run_stage(const Stage& s, const Value& input, const EvalLimits& limits) {
    return std::visit(
        [&](const auto& st) -> Value {
            using T = std::decay_t<decltype(st)>;
            if constexpr (std::is_same_v<T, TopDownTT>) {
                OutValue v = run_topdown(st, std::get<Tree>(input), RunOptions{limits});
                if (std::holds_alternative<Tree>(v)) return std::get<Tree>(v);
                return std::get<Word>(v);
            } else if constexpr (std::is_same_v<T, SharedStage>) {
                return unfold(run_shared(st.tt, std::get<Tree>(input), limits), limits);
            } else if constexpr (std::is_same_v<T, MacroTT>) {
                return run_oi(st, std::get<Tree>(input), limits);
            } else if constexpr (std::is_same_v<T, Sst>) {
                return run_sst(st, std::get<Word>(input), limits);
            } else if constexpr (std::is_same_v<T, RegisterMachine>) {
                RmRun run = run_register_machine(st, std::get<Tree>(input), limits);
                const auto& out = run.output();
                if (!out)
                    throw UndefinedTransition(st.output_register, "", {},
                                              "/ (register machine output undefined)");
                if (std::holds_alternative<Tree>(*out)) return std::get<Tree>(*out);
                return std::get<Word>(*out);
            } else if constexpr (std::is_same_v<T, EncodeStage>) {
                return encode_string(std::get<Word>(input), st.alphabet);
            } else if constexpr (std::is_same_v<T, DecodeStage>) {
                return decode_string(std::get<Tree>(input), st.alphabet);
            } else {  // YieldStage
                return yield_of(std::get<Tree>(input), st.alphabet);
            }
        },
        s);
}

}  // namespace

Value run_pipeline(const Pipeline& p, const Value& input, const EvalLimits& limits) {
    Value v = input;
    size_t index = 0;
    for (const auto& s : p.stages()) {
        ++index;
        if (std::holds_alternative<Tree>(v) != !stage_input(s).is_string)
            throw ValidationError("pipeline stage " + std::to_string(index) +
                                  " received the wrong kind of value");
        try {
            v = run_stage(s, v, limits);
        } catch (const UndefinedTransition&) {
            throw;
        } catch (const OutputUndefined&) {
            throw;
        } catch (const ResourceExhausted&) {
            throw;
        } catch (const Error& e) {
            throw ValidationError("pipeline stage " + std::to_string(index) + " (" +
                                  stage_name(s) + "): " + e.what());
        }
    }
    return v;
}

std::vector<Value> enumerate_inputs(const IoKind& kind, size_t bound) {
    std::vector<Value> inputs;
    if (kind.is_string) {
        for (auto& w : enumerate_words(kind.symbols, bound)) inputs.emplace_back(std::move(w));
    } else {
        for (auto& t : enumerate_trees(kind.alphabet, bound)) inputs.emplace_back(std::move(t));
    }
    return inputs;
}

EquivVerdict check_equiv(const Pipeline& left, const Pipeline& right, size_t bound,
                         const EvalLimits& limits) {
    auto lk = left.input_kind();
    auto rk = right.input_kind();
    if (!lk && !rk)
        throw ValidationError("cannot compare two empty pipelines: no input kind to enumerate");
    const IoKind& kind = lk ? *lk : *rk;
    if (lk && rk) {
        if (lk->is_string != rk->is_string)
            throw ValidationError("input kinds differ: " + lk->describe() + " vs " +
                                  rk->describe());
        auto lo = left.output_kind();
        auto ro = right.output_kind();
        if (lo && ro && lo->is_string != ro->is_string)
            throw ValidationError("output kinds differ: " + lo->describe() + " vs " +
                                  ro->describe());
    }

    if (lk && rk) {
        if (!lk->is_string && lk->alphabet != rk->alphabet)
            throw ValidationError("input alphabets differ: " + lk->describe() + " vs " +
                                  rk->describe());
        if (lk->is_string) {
            auto sorted = [](std::vector<Sym> v) {
                std::sort(v.begin(), v.end());
                return v;
            };
            if (sorted(lk->symbols) != sorted(rk->symbols))
                throw ValidationError("input symbol sets differ: " + lk->describe() + " vs " +
                                      rk->describe());
        }
    }

    EquivVerdict verdict;
    for (const Value& input : enumerate_inputs(kind, bound)) {
        std::optional<Value> lv, rv;
        std::string le, re;
        try {
            lv = run_pipeline(left, input, limits);
        } catch (const UndefinedTransition& e) {
            le = e.what();
        } catch (const OutputUndefined& e) {
            le = e.what();
        }
        try {
            rv = run_pipeline(right, input, limits);
        } catch (const UndefinedTransition& e) {
            re = e.what();
        } catch (const OutputUndefined& e) {
            re = e.what();
        }
        ++verdict.inputs_tested;
        bool same = (lv.has_value() == rv.has_value()) && (!lv || *lv == *rv);
        if (!same) {
            verdict.pass = false;
            verdict.counterexample = Counterexample{input, lv, rv, le, re};
            return verdict;
        }
    }
    return verdict;
}

}  // namespace ttw
