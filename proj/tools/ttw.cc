// Command-line front end for the tree transducer workbench: run machines and
// pipelines, convert between models, check equivalences on small inputs,
// fuzz with random models, and emit DOT/CSV.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ttw/builtins.hh"
#include "ttw/mtt.hh"
#include "ttw/dot.hh"
#include "ttw/fuzz.hh"
#include "ttw/pipeline.hh"
#include "ttw/sharing.hh"
#include "ttw/text.hh"

namespace {

using namespace ttw;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

std::string slurp(const std::string& path) {
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open file '" + path + "' for writing");
    out << text;
}

/// `builtin:NAME` or a file path; also the adapter pseudo-stages
/// `@encode`, `@decode`, `@yield` (alphabets inferred from neighbours).
struct StageSpec {
    enum class K { machine, encode, decode, yield } kind = K::machine;
    AnyMachine machine{TopDownTT{}};
};

StageSpec load_stage(const std::string& spec) {
    StageSpec s;
    if (spec == "@encode") {
        s.kind = StageSpec::K::encode;
        return s;
    }
    if (spec == "@decode") {
        s.kind = StageSpec::K::decode;
        return s;
    }
    if (spec == "@yield") {
        s.kind = StageSpec::K::yield;
        return s;
    }
    if (spec.rfind("builtin:", 0) == 0) {
        std::string name = spec.substr(8);
        if (const TopDownTT* tt = builtins::find_tdtt(name)) {
            s.machine = *tt;
            return s;
        }
        if (const MacroTT* m = builtins::find_mtt(name)) {
            s.machine = *m;
            return s;
        }
        if (const Sst* m = builtins::find_sst(name)) {
            s.machine = *m;
            return s;
        }
        throw ValidationError("unknown builtin '" + name + "'");
    }
    s.machine = parse_machine(slurp(spec));
    return s;
}

Stage machine_stage(const AnyMachine& m) {
    if (std::holds_alternative<TopDownTT>(m)) return std::get<TopDownTT>(m);
    if (std::holds_alternative<MacroTT>(m)) return std::get<MacroTT>(m);
    if (std::holds_alternative<Sst>(m)) return std::get<Sst>(m);
    return std::get<RegisterMachine>(m);
}

/// Resolves adapter alphabets from the neighbouring machine stages.
Pipeline assemble(const std::vector<StageSpec>& specs) {
    std::vector<Stage> stages(specs.size(), Stage{TopDownTT{}});
    std::vector<bool> placed(specs.size(), false);
    for (size_t i = 0; i < specs.size(); ++i) {
        if (specs[i].kind != StageSpec::K::machine) continue;
        stages[i] = machine_stage(specs[i].machine);
        placed[i] = true;
    }
    for (size_t i = 0; i < specs.size(); ++i) {
        if (placed[i]) continue;
        auto neighbour_kind = [&](size_t j, bool want_input) -> std::optional<IoKind> {
            if (j >= specs.size() || !placed[j]) return std::nullopt;
            return want_input ? stage_input(stages[j]) : stage_output(stages[j]);
        };
        std::optional<IoKind> before = i > 0 ? neighbour_kind(i - 1, false) : std::nullopt;
        std::optional<IoKind> after = neighbour_kind(i + 1, true);
        auto tree_alphabet = [&]() -> RankedAlphabet {
            if (after && !after->is_string) return after->alphabet;
            if (before && !before->is_string) return before->alphabet;
            throw ValidationError("cannot infer the adapter alphabet; put the adapter next to a machine stage");
        };
        switch (specs[i].kind) {
            case StageSpec::K::encode:
                stages[i] = EncodeStage{tree_alphabet()};
                break;
            case StageSpec::K::decode: {
                RankedAlphabet a = before && !before->is_string ? before->alphabet : tree_alphabet();
                stages[i] = DecodeStage{a};
                break;
            }
            case StageSpec::K::yield: {
                if (!before || before->is_string)
                    throw ValidationError("@yield needs a tree-producing stage before it");
                RankedAlphabet a = before->alphabet;
                // erase the end marker of unary-shaped alphabets, so that
                // decode and yield agree on codec alphabets
                if (auto end = a.end_marker())
                    if (!a.is_neutral(*end)) a.mark_neutral(*end);
                stages[i] = YieldStage{a};
                break;
            }
            case StageSpec::K::machine:
                break;
        }
        placed[i] = true;
    }
    return Pipeline{std::move(stages)};
}

Value parse_input_value(const Pipeline& p, const std::string& term, const std::string& str,
                        bool have_term) {
    auto kind = p.input_kind();
    if (!kind) throw ValidationError("empty pipeline: provide at least one stage");
    if (have_term) {
        if (kind->is_string)
            throw ValidationError("this pipeline consumes strings; use -s");
        return parse_term(term, kind->alphabet);
    }
    Word w = word_from_chars(str);
    if (!kind->is_string) {
        // encode over the unary input alphabet
        return encode_string(w, kind->alphabet);
    }
    return w;
}

int cmd_run(const std::vector<std::string>& stage_specs, const std::string& term,
            const std::string& str, bool have_term, bool shared, bool bottom_up,
            uint64_t budget) {
    std::vector<StageSpec> specs;
    for (const auto& s : stage_specs) specs.push_back(load_stage(s));
    EvalLimits limits{budget};

    if (bottom_up) {
        if (specs.size() != 1 || specs[0].kind != StageSpec::K::machine)
            throw ValidationError("--bottom-up takes exactly one machine");
        const AnyMachine& m = specs[0].machine;
        if (std::holds_alternative<TopDownTT>(m)) {
            const auto& tt = std::get<TopDownTT>(m);
            Tree t = std::get<Tree>(parse_input_value(Pipeline::of(tt), term, str, have_term));
            BottomUpRun run = run_bottomup(tt, t, limits);
            if (run.la_states)
                std::cout << "state: " << tt.lookahead->states[(*run.la_states)[0]] << "\n";
            for (size_t qi = 0; qi < run.states.size(); ++qi) {
                const auto& v = run.table[0][qi];
                std::cout << run.states[qi] << " = " << (v ? out_value_text(*v) : "undef")
                          << "\n";
            }
            return run.output() ? kExitPass : kExitFail;
        }
        if (std::holds_alternative<MacroTT>(m)) {
            const auto& mtt = std::get<MacroTT>(m);
            Tree t = std::get<Tree>(parse_input_value(Pipeline::of(mtt), term, str, have_term));
            MttBottomUpRun run = run_bottomup(mtt, t, limits);
            if (run.la_states)
                std::cout << "state: " << mtt.lookahead->states[(*run.la_states)[0]] << "\n";
            for (size_t qi = 0; qi < run.states.size(); ++qi) {
                const auto& v = run.table[0][qi];
                std::cout << run.states[qi] << " = " << (v ? context_text(*v) : "undef") << "\n";
            }
            return run.output() ? kExitPass : kExitFail;
        }
        if (std::holds_alternative<RegisterMachine>(m)) {
            const auto& rm = std::get<RegisterMachine>(m);
            Tree t = std::get<Tree>(parse_input_value(Pipeline::of(rm), term, str, have_term));
            RmRun run = run_register_machine(rm, t, limits);
            std::cout << "state: " << run.root_state(rm) << "\n";
            for (size_t ri = 0; ri < run.registers.size(); ++ri) {
                const auto& v = run.table[0][ri];
                std::cout << run.registers[ri] << " = " << (v ? out_value_text(*v) : "undef")
                          << "\n";
            }
            return run.output() ? kExitPass : kExitFail;
        }
        throw ValidationError("--bottom-up applies to tdtt, mtt or regmachine inputs");
    }

    if (shared) {
        if (specs.size() != 1 || specs[0].kind != StageSpec::K::machine ||
            !std::holds_alternative<TopDownTT>(specs[0].machine))
            throw ValidationError("--shared takes exactly one tree-output tdtt");
        const auto& tt = std::get<TopDownTT>(specs[0].machine);
        Tree t = std::get<Tree>(parse_input_value(Pipeline::of(tt), term, str, have_term));
        std::cout << dag_text(run_shared(tt, t, limits));
        return kExitPass;
    }

    Pipeline p = assemble(specs);
    Value out = run_pipeline(p, parse_input_value(p, term, str, have_term), limits);
    if (std::holds_alternative<Tree>(out))
        std::cout << tree_text(std::get<Tree>(out)) << "\n";
    else
        std::cout << word_text(std::get<Word>(out)) << "\n";
    return kExitPass;
}

int cmd_convert(const std::string& file, const std::string& kind, const std::string& out_path) {
    StageSpec spec = load_stage(file);
    if (spec.kind != StageSpec::K::machine)
        throw ValidationError("convert needs a machine definition");
    const AnyMachine& m = spec.machine;
    std::string text;
    if (kind == "to-register-machine") {
        text = print_register_machine(to_register_machine(std::get<TopDownTT>(m)));
    } else if (kind == "eliminate-lookahead") {
        MacroTT source = std::holds_alternative<TopDownTT>(m)
                             ? mtt_of_tdtt(std::get<TopDownTT>(m))
                             : std::get<MacroTT>(m);
        text = print_mtt(eliminate_lookahead(source).mtt);
    } else if (kind == "tdtts-to-mtt") {
        text = print_mtt(tdtts_to_mtt_unary(std::get<TopDownTT>(m)));
    } else if (kind == "mtt-to-tdtts") {
        text = print_tdtt(mtt_unary_to_tdtts(std::get<MacroTT>(m)));
    } else if (kind == "tdtts-to-sst") {
        text = print_sst(tdtts_unary_to_sst(std::get<TopDownTT>(m)));
    } else {
        throw ValidationError("unknown conversion");
    }
    emit(out_path, text);
    return kExitPass;
}

int cmd_check_equiv(const std::string& left_spec, const std::string& right_spec, size_t bound,
                    uint64_t budget) {
    Pipeline left = assemble({load_stage(left_spec)});
    Pipeline right = assemble({load_stage(right_spec)});
    // allow comparing string-valued machines with tree-valued unary machines
    auto lo = left.output_kind();
    auto ro = right.output_kind();
    auto add_decode = [](Pipeline p) {
        auto kind = p.output_kind();
        std::vector<Stage> stages = p.stages();
        stages.push_back(DecodeStage{kind->alphabet});
        return Pipeline{std::move(stages)};
    };
    if (lo && ro && !lo->is_string && ro->is_string && lo->alphabet.end_marker())
        left = add_decode(left);
    else if (lo && ro && lo->is_string && !ro->is_string && ro->alphabet.end_marker())
        right = add_decode(right);
    // string-consuming vs tree-consuming unary machines: decode the unary
    // chains in front of the string-consuming side, so both enumerate trees
    auto li = left.input_kind();
    auto ri = right.input_kind();
    auto add_front_decode = [](Pipeline p, const RankedAlphabet& a) {
        std::vector<Stage> stages{Stage{DecodeStage{a}}};
        for (const auto& s : p.stages()) stages.push_back(s);
        return Pipeline{std::move(stages)};
    };
    if (li && ri && li->is_string && !ri->is_string && ri->alphabet.end_marker())
        left = add_front_decode(left, ri->alphabet);
    else if (li && ri && !li->is_string && ri->is_string && li->alphabet.end_marker())
        right = add_front_decode(right, li->alphabet);

    EquivVerdict v = check_equiv(left, right, bound, EvalLimits{budget});
    if (v.pass) {
        std::cout << "pass: " << v.inputs_tested << " inputs agree\n";
        return kExitPass;
    }
    const auto& ce = *v.counterexample;
    std::cout << "counterexample after " << v.inputs_tested
              << " inputs\n  input: " << value_text(ce.input) << "\n  left:  "
              << (ce.left ? value_text(*ce.left) : "undefined (" + ce.left_error + ")")
              << "\n  right: "
              << (ce.right ? value_text(*ce.right) : "undefined (" + ce.right_error + ")") << "\n";
    return kExitFail;
}

int cmd_fuzz(const std::string& kind, uint64_t seed, size_t count, size_t max_size,
             uint64_t budget) {
    FuzzOptions opt;
    opt.kind = kind;
    opt.seed = seed;
    opt.count = count;
    opt.max_size = max_size;
    opt.limits = EvalLimits{budget};
    FuzzResult r = fuzz(opt);
    std::cout << r.report;
    return r.failures == 0 ? kExitPass : kExitFail;
}

int cmd_stats(const std::string& example, size_t n_from, size_t n_to, const std::string& csv) {
    if (example != "quadratic") throw ValidationError("unknown stats example '" + example + "'");
    GrowthReport report =
        growth_report(builtins::quadratic(), builtins::quadratic_input, n_from, n_to);
    emit(csv, growth_csv(report));
    return kExitPass;
}

int cmd_dot(const std::string& file, const std::string& term, const std::string& dag_path,
            bool shared, bool dedup_flag, bool lookahead_flag, bool trace, uint64_t budget) {
    EvalLimits limits{budget};
    if (!dag_path.empty()) {
        TermDag d = parse_dag(slurp(dag_path));
        if (dedup_flag) d = dedup(d);
        std::cout << dot_of_dag(d);
        return kExitPass;
    }
    if (file.empty()) throw ValidationError("dot needs -t (machine) or -d (dag file)");
    StageSpec spec = load_stage(file);
    if (spec.kind != StageSpec::K::machine) throw ValidationError("dot needs a machine");
    if (std::holds_alternative<Sst>(spec.machine))
        throw ValidationError("dot does not apply to ssts");

    if (lookahead_flag) {
        const Dbta* la = nullptr;
        if (std::holds_alternative<TopDownTT>(spec.machine)) {
            const auto& tt = std::get<TopDownTT>(spec.machine);
            if (tt.lookahead) la = &*tt.lookahead;
        } else if (std::holds_alternative<MacroTT>(spec.machine)) {
            const auto& m = std::get<MacroTT>(spec.machine);
            if (m.lookahead) la = &*m.lookahead;
        }
        if (!la) throw ValidationError("the machine has no lookahead automaton");
        std::cout << dot_of_dbta(*la);
        return kExitPass;
    }

    if (!std::holds_alternative<TopDownTT>(spec.machine))
        throw ValidationError("dot --shared/--trace need a tdtt");
    const auto& tt = std::get<TopDownTT>(spec.machine);
    Tree t = parse_term(term, tt.input);
    if (trace) {
        std::cout << dot_of_bottomup_run(tt, t, limits);
        return kExitPass;
    }
    if (shared) {
        TermDag d = run_shared(tt, t, limits);
        if (dedup_flag) d = dedup(d);
        std::cout << dot_of_dag(d);
        return kExitPass;
    }
    OutValue out = run_topdown(tt, t, RunOptions{limits});
    if (!std::holds_alternative<Tree>(out))
        throw ValidationError("dot renders tree outputs; this machine outputs strings");
    std::cout << dot_of_tree(std::get<Tree>(out));
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic tree transducer workbench"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run a machine or pipeline on one input");
    std::vector<std::string> run_stages;
    std::string run_term, run_str;
    bool run_shared_flag = false, run_bottom_up = false;
    uint64_t budget = EvalLimits{}.node_budget;
    run->add_option("-t,--transducer", run_stages,
                    "definition file, builtin:NAME, or @encode/@decode/@yield (repeatable)")
        ->required();
    auto* term_opt = run->add_option("-i,--input", run_term, "input term");
    run->add_option("-s,--string", run_str, "input string (split into one-char symbols)")
        ->excludes(term_opt);
    run->add_flag("--shared", run_shared_flag, "evaluate shared; print the term dag");
    run->add_flag("--bottom-up", run_bottom_up, "print the root registers of the bottom-up run");
    run->add_option("--budget", budget, "evaluation node budget");

    // convert
    auto* convert = app.add_subcommand("convert", "convert between machine models");
    std::string conv_file, conv_out = "-";
    convert->add_option("-t,--transducer", conv_file, "definition file or builtin:NAME")
        ->required();
    bool c_rm = false, c_el = false, c_t2m = false, c_m2t = false, c_t2s = false;
    convert->add_flag("--to-register-machine", c_rm, "tdtt -> bottom-up register machine");
    convert->add_flag("--eliminate-lookahead", c_el, "mtt -> mtt without lookahead");
    convert->add_flag("--tdtts-to-mtt", c_t2m, "string-output tdtt -> unary-output mtt");
    convert->add_flag("--mtt-to-tdtts", c_m2t, "unary-output mtt -> string-output tdtt");
    convert->add_flag("--tdtts-to-sst", c_t2s, "unary-input string-output tdtt -> sst");
    convert->add_option("-o,--output", conv_out, "output file ('-' = stdout)");

    // check-equiv
    auto* ce = app.add_subcommand("check-equiv", "compare two machines on all small inputs");
    std::string ce_left, ce_right;
    size_t ce_bound = 6;
    ce->add_option("left", ce_left, "definition file or builtin:NAME")->required();
    ce->add_option("right", ce_right, "definition file or builtin:NAME")->required();
    ce->add_option("--max-size", ce_bound, "max tree nodes / string length");
    ce->add_option("--budget", budget, "evaluation node budget");

    // fuzz
    auto* fz = app.add_subcommand("fuzz", "differential testing with random models");
    std::string fz_kind = "tdtt";
    uint64_t fz_seed = 0;
    size_t fz_count = 10, fz_max = 6;
    fz->add_option("--kind", fz_kind, "tdtt | mtt | sst")->required();
    fz->add_option("--seed", fz_seed, "master seed")->required();
    fz->add_option("--count", fz_count, "number of checked models");
    fz->add_option("--max-size", fz_max, "differential bound");
    fz->add_option("--budget", budget, "evaluation node budget per run");

    // stats
    auto* st = app.add_subcommand("stats", "growth measurements of a built-in family");
    std::string st_example = "quadratic", st_csv = "-";
    size_t st_from = 1, st_to = 10;
    st->add_option("--example", st_example, "family name (quadratic)");
    st->add_option("--n-from", st_from, "first n");
    st->add_option("--n-to", st_to, "last n");
    st->add_option("--csv", st_csv, "CSV output file ('-' = stdout)");

    // dot
    auto* dt = app.add_subcommand("dot", "DOT export of outputs, dags and automata");
    std::string dt_file, dt_term, dt_dag;
    bool dt_shared = false, dt_dedup = false, dt_la = false, dt_trace = false;
    dt->add_option("-t,--transducer", dt_file, "definition file or builtin:NAME");
    dt->add_option("-i,--input", dt_term, "input term");
    dt->add_option("-d,--dag", dt_dag, "dag text file ('-' = stdin)");
    dt->add_flag("--shared", dt_shared, "export the shared run's dag");
    dt->add_flag("--dedup", dt_dedup, "structurally deduplicate the dag first");
    dt->add_flag("--lookahead", dt_la, "export the machine's lookahead automaton");
    dt->add_flag("--trace", dt_trace, "export the bottom-up run trace");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (run->parsed())
            return cmd_run(run_stages, run_term, run_str, term_opt->count() > 0, run_shared_flag,
                           run_bottom_up, budget);
        if (convert->parsed()) {
            int picked = int(c_rm) + int(c_el) + int(c_t2m) + int(c_m2t) + int(c_t2s);
            if (picked != 1)
                throw ValidationError("choose exactly one conversion flag");
            std::string kind = c_rm    ? "to-register-machine"
                               : c_el  ? "eliminate-lookahead"
                               : c_t2m ? "tdtts-to-mtt"
                               : c_m2t ? "mtt-to-tdtts"
                                       : "tdtts-to-sst";
            return cmd_convert(conv_file, kind, conv_out);
        }
        if (ce->parsed()) return cmd_check_equiv(ce_left, ce_right, ce_bound, budget);
        if (fz->parsed()) return cmd_fuzz(fz_kind, fz_seed, fz_count, fz_max, budget);
        if (st->parsed()) return cmd_stats(st_example, st_from, st_to, st_csv);
        if (dt->parsed())
            return cmd_dot(dt_file, dt_term, dt_dag, dt_shared, dt_dedup, dt_la, dt_trace, budget);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UndefinedTransition& e) {
        std::cerr << "undefined: " << e.what() << "\n";
        return kExitFail;
    } catch (const OutputUndefined& e) {
        std::cerr << "undefined: " << e.what() << "\n";
        return kExitFail;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    } catch (const std::bad_variant_access&) {
        std::cerr << "error: the machine kind does not fit this operation\n";
        return kExitUsage;
    }
    return kExitUsage;
}
