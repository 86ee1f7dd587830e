#include "ttw/text.hh"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace ttw {

namespace {

// ---------------------------------------------------------------- lexing

enum class Tok : uint8_t {
    name, quoted, dquoted, arrow,
    lbrace, rbrace, lparen, rparen, langle, rangle,
    comma, semi, colon, dot, pipe, eq,
    end
};

struct Token {
    Tok kind;
    std::string text;
    size_t line, col;
};

class Lexer {
  public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }
    Token next() {
        Token t = tok_;
        advance();
        return t;
    }
    bool at(Tok k) const { return tok_.kind == k; }
    bool at_name(std::string_view s) const { return tok_.kind == Tok::name && tok_.text == s; }

    Token expect(Tok k, const std::string& what) {
        if (tok_.kind != k) fail("expected " + what);
        return next();
    }
    std::string expect_name(const std::string& what) { return expect(Tok::name, what).text; }
    void expect_keyword(const std::string& kw) {
        if (!at_name(kw)) fail("expected '" + kw + "'");
        next();
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + (tok_.kind == Tok::end ? " (at end of input)"
                                                      : " (found '" + tok_.text + "')"),
                         tok_.line, tok_.col);
    }

  private:
    std::string_view text_;
    size_t pos_ = 0, line_ = 1, col_ = 1;
    Token tok_{Tok::end, "", 1, 1};

    static bool name_char(char c) {
        static const std::string stop = "(),<>|.{};=:'\"#";
        return !std::isspace(static_cast<unsigned char>(c)) && stop.find(c) == std::string::npos;
    }

    char cur() const { return text_[pos_]; }
    bool eof() const { return pos_ >= text_.size(); }

    void bump() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_ws_and_comments() {
        while (!eof()) {
            if (std::isspace(static_cast<unsigned char>(cur()))) {
                bump();
            } else if (cur() == '#') {
                while (!eof() && cur() != '\n') bump();
            } else {
                break;
            }
        }
    }

    void advance() {
        skip_ws_and_comments();
        tok_.line = line_;
        tok_.col = col_;
        if (eof()) {
            tok_ = {Tok::end, "", line_, col_};
            return;
        }
        char c = cur();
        auto single = [&](Tok k) {
            tok_ = {k, std::string(1, c), line_, col_};
            bump();
        };
        switch (c) {
            case '{': single(Tok::lbrace); return;
            case '}': single(Tok::rbrace); return;
            case '(': single(Tok::lparen); return;
            case ')': single(Tok::rparen); return;
            case '<': single(Tok::langle); return;
            case '>': single(Tok::rangle); return;
            case ',': single(Tok::comma); return;
            case ';': single(Tok::semi); return;
            case ':': single(Tok::colon); return;
            case '.': single(Tok::dot); return;
            case '|': single(Tok::pipe); return;
            case '=': single(Tok::eq); return;
            case '\'': {
                size_t l = line_, cl = col_;
                bump();
                std::string s;
                while (!eof() && cur() != '\'') {
                    s += cur();
                    bump();
                }
                if (eof()) throw ParseError("unterminated ' quote", l, cl);
                bump();
                tok_ = {Tok::quoted, std::move(s), l, cl};
                return;
            }
            case '"': {
                size_t l = line_, cl = col_;
                bump();
                std::string s;
                while (!eof() && cur() != '"') {
                    s += cur();
                    bump();
                }
                if (eof()) throw ParseError("unterminated \" quote", l, cl);
                bump();
                tok_ = {Tok::dquoted, std::move(s), l, cl};
                return;
            }
            default: break;
        }
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            tok_ = {Tok::arrow, "->", line_, col_};
            bump();
            bump();
            return;
        }
        if (!name_char(c)) throw ParseError("unexpected character", line_, col_);
        std::string s;
        size_t l = line_, cl = col_;
        while (!eof() && name_char(cur())) {
            // stop before an arrow so q0->x lexes as q0, ->, x
            if (cur() == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') break;
            s += cur();
            bump();
        }
        tok_ = {Tok::name, std::move(s), l, cl};
    }
};

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

// ------------------------------------------------------------- rule AST

struct RhsNode {
    enum class K { letter, param, call };
    K kind = K::letter;
    std::string name;               // letter or callee state
    int param = 0;                  // x index
    int child = 0;                  // call target t index
    std::vector<RhsNode> children;  // letter children or call arguments
};

struct StrAstItem {
    bool is_call = false;
    std::string text;  // symbol literal
    std::string state;
    int child = 0;
};

struct RuleAst {
    std::string state;
    std::string letter;
    LaPattern pattern;
    int lhs_params = 0;       // number of x_i on the left-hand side
    bool has_param_list = false;
    bool string_rhs = false;
    std::vector<StrAstItem> str;
    RhsNode tree;
};

struct Sections {
    RankedAlphabet input;
    bool have_input = false;
    bool string_output = false;
    RankedAlphabet output;
    std::vector<Sym> output_symbols;
    bool have_output = false;
    std::vector<std::pair<std::string, int>> states;
    bool arity_syntax = false;
    bool have_states = false;
    std::string initial;
    bool have_initial = false;
    std::optional<Dbta> lookahead;
    std::vector<RuleAst> rules;
    bool mtt_syntax = false;
};

// ------------------------------------------------------------- parser

class Parser {
  public:
    explicit Parser(std::string_view text) : lx_(text) {}

    AnyMachine parse() {
        if (lx_.at_name("sst")) {
            lx_.next();
            lx_.expect(Tok::lbrace, "'{'");
            Sst s = parse_sst_body();
            lx_.expect(Tok::rbrace, "'}'");
            finish();
            return s;
        }
        if (lx_.at_name("regmachine")) {
            lx_.next();
            lx_.expect(Tok::lbrace, "'{'");
            RegisterMachine m = parse_rm_body();
            lx_.expect(Tok::rbrace, "'}'");
            finish();
            return m;
        }
        bool wrapped = false;
        bool force_mtt = false, force_tdtt = false;
        if (lx_.at_name("tdtt") || lx_.at_name("mtt")) {
            force_mtt = lx_.at_name("mtt");
            force_tdtt = !force_mtt;
            lx_.next();
            lx_.expect(Tok::lbrace, "'{'");
            wrapped = true;
        }
        Sections s = parse_sections();
        if (wrapped) lx_.expect(Tok::rbrace, "'}'");
        finish();
        bool is_mtt = force_mtt || (!force_tdtt && (s.mtt_syntax || s.arity_syntax));
        if (is_mtt && s.string_output)
            lx_.fail("an mtt cannot have string output; use a tdtt with string rules");
        if (is_mtt) return lower_mtt(s);
        return lower_tdtt(s);
    }

  private:
    Lexer lx_;

    void finish() {
        if (!lx_.at(Tok::end)) lx_.fail("trailing input after the definition");
    }

    // ---- shared pieces

    RankedAlphabet parse_ranked_set() {
        RankedAlphabet a;
        lx_.expect(Tok::lbrace, "'{'");
        while (!lx_.at(Tok::rbrace)) {
            std::string name = lx_.expect_name("a letter name");
            lx_.expect(Tok::colon, "':'");
            std::string arity = lx_.expect_name("an arity");
            if (!all_digits(arity)) lx_.fail("arity must be a number");
            a.add_letter(name, std::stoi(arity));
            if (lx_.at(Tok::comma)) lx_.next();
        }
        lx_.next();
        return a;
    }

    std::vector<Sym> parse_symbol_set() {
        std::vector<Sym> syms;
        lx_.expect(Tok::lbrace, "'{'");
        while (!lx_.at(Tok::rbrace)) {
            std::string name = lx_.expect_name("a symbol");
            RankedAlphabet::validate_name(name);
            if (std::find(syms.begin(), syms.end(), name) != syms.end())
                lx_.fail("duplicate symbol '" + name + "'");
            syms.push_back(name);
            if (lx_.at(Tok::comma)) lx_.next();
        }
        lx_.next();
        return syms;
    }

    Dbta parse_lookahead(const RankedAlphabet& input) {
        Dbta a;
        a.alphabet = input;
        lx_.expect(Tok::lbrace, "'{'");
        lx_.expect_keyword("states");
        while (!lx_.at(Tok::semi)) {
            std::string s = lx_.expect_name("a lookahead state");
            RankedAlphabet::validate_name(s);
            a.states.push_back(s);
        }
        lx_.next();
        while (!lx_.at(Tok::rbrace)) {
            lx_.expect_keyword("delta");
            std::string letter = lx_.expect_name("a letter");
            std::vector<std::string> kids;
            if (lx_.at(Tok::lparen)) {
                lx_.next();
                while (!lx_.at(Tok::rparen)) {
                    kids.push_back(lx_.expect_name("a state"));
                    if (lx_.at(Tok::comma)) lx_.next();
                }
                lx_.next();
            }
            lx_.expect(Tok::arrow, "'->'");
            std::string to = lx_.expect_name("a state");
            if (!a.delta.emplace(std::make_pair(letter, kids), to).second)
                lx_.fail("duplicate lookahead transition for " + letter);
            lx_.expect(Tok::semi, "';'");
        }
        lx_.next();
        return a;
    }

    // ---- tdtt/mtt sections

    Sections parse_sections() {
        Sections s;
        while (lx_.at(Tok::name)) {
            const std::string section = lx_.peek().text;
            if (section == "input") {
                lx_.next();
                s.input = parse_ranked_set();
                s.have_input = true;
            } else if (section == "output") {
                lx_.next();
                if (lx_.at_name("string")) {
                    lx_.next();
                    s.string_output = true;
                    s.output_symbols = parse_symbol_set();
                } else {
                    s.output = parse_ranked_set();
                }
                s.have_output = true;
            } else if (section == "states") {
                lx_.next();
                lx_.expect(Tok::lbrace, "'{'");
                while (!lx_.at(Tok::rbrace)) {
                    std::string name = lx_.expect_name("a state name");
                    int arity = 0;
                    if (lx_.at(Tok::colon)) {
                        lx_.next();
                        std::string n = lx_.expect_name("an arity");
                        if (!all_digits(n)) lx_.fail("state arity must be a number");
                        arity = std::stoi(n);
                        s.arity_syntax = true;
                    }
                    s.states.emplace_back(name, arity);
                    if (lx_.at(Tok::comma)) lx_.next();
                }
                lx_.next();
                s.have_states = true;
            } else if (section == "initial") {
                lx_.next();
                s.initial = lx_.expect_name("a state name");
                if (lx_.at(Tok::semi)) lx_.next();
                s.have_initial = true;
            } else if (section == "lookahead") {
                lx_.next();
                if (!s.have_input) lx_.fail("lookahead section requires the input section first");
                s.lookahead = parse_lookahead(s.input);
            } else if (section == "rules") {
                lx_.next();
                if (!s.have_output) lx_.fail("rules section requires the output section first");
                parse_rules(s);
            } else {
                break;
            }
        }
        if (!s.have_input) lx_.fail("missing input section");
        if (!s.have_output) lx_.fail("missing output section");
        if (!s.have_states) lx_.fail("missing states section");
        if (!s.have_initial) lx_.fail("missing initial section");
        return s;
    }

    void parse_rules(Sections& s) {
        lx_.expect(Tok::lbrace, "'{'");
        while (!lx_.at(Tok::rbrace)) {
            RuleAst r;
            r.state = lx_.expect_name("a state name");
            lx_.expect(Tok::langle, "'<'");
            r.letter = lx_.expect_name("an input letter");
            if (lx_.at(Tok::lparen)) {
                lx_.next();
                int pos = 1;
                while (!lx_.at(Tok::rparen)) {
                    std::string var = lx_.expect_name("child variable t" + std::to_string(pos));
                    if (var != "t" + std::to_string(pos))
                        lx_.fail("child variables must be t1, t2, ... in order");
                    if (lx_.at(Tok::pipe)) {
                        lx_.next();
                        std::string la = lx_.expect_name("a lookahead state or _");
                        r.pattern.push_back(la == "_" ? std::nullopt
                                                      : std::optional<std::string>{la});
                    } else {
                        r.pattern.push_back(std::nullopt);
                    }
                    ++pos;
                    if (lx_.at(Tok::comma)) lx_.next();
                }
                lx_.next();
            }
            if (lx_.at(Tok::rangle)) {
                lx_.next();
            } else {
                lx_.fail("expected '>'");
            }
            if (lx_.at(Tok::lparen)) {
                r.has_param_list = true;
                s.mtt_syntax = true;
                lx_.next();
                int expect_idx = 1;
                while (!lx_.at(Tok::rparen)) {
                    std::string p = lx_.expect_name("parameter x" + std::to_string(expect_idx));
                    if (p != "x" + std::to_string(expect_idx))
                        lx_.fail("parameters must be x1, x2, ... in order");
                    ++expect_idx;
                    if (lx_.at(Tok::comma)) lx_.next();
                }
                lx_.next();
                r.lhs_params = expect_idx - 1;
            }
            lx_.expect(Tok::arrow, "'->'");
            if (s.string_output) {
                r.string_rhs = true;
                r.str = parse_str_rhs();
            } else {
                r.tree = parse_term_rhs(s);
            }
            lx_.expect(Tok::semi, "';'");
            s.rules.push_back(std::move(r));
        }
        lx_.next();
    }

    std::vector<StrAstItem> parse_str_rhs() {
        std::vector<StrAstItem> items;
        while (true) {
            if (lx_.at(Tok::quoted)) {
                std::string sym = lx_.next().text;
                if (!sym.empty()) items.push_back({false, sym, {}, 0});
                // '' contributes nothing: the empty string
            } else {
                std::string state = lx_.expect_name("a call or quoted symbol");
                lx_.expect(Tok::langle, "'<'");
                std::string var = lx_.expect_name("a child variable");
                if (var.size() < 2 || var[0] != 't' || !all_digits(var.substr(1)))
                    lx_.fail("expected child variable tN");
                lx_.expect(Tok::rangle, "'>'");
                items.push_back({true, {}, state, std::stoi(var.substr(1))});
            }
            if (lx_.at(Tok::dot)) {
                lx_.next();
                continue;
            }
            break;
        }
        return items;
    }

    RhsNode parse_term_rhs(Sections& s) {
        std::string name = lx_.expect_name("an output letter, parameter or call");
        if (auto j = param_index(name)) {
            s.mtt_syntax = true;
            RhsNode n;
            n.kind = RhsNode::K::param;
            n.param = *j;
            return n;
        }
        if (lx_.at(Tok::langle)) {
            lx_.next();
            std::string var = lx_.expect_name("a child variable");
            if (var.size() < 2 || var[0] != 't' || !all_digits(var.substr(1)))
                lx_.fail("expected child variable tN");
            lx_.expect(Tok::rangle, "'>'");
            RhsNode n;
            n.kind = RhsNode::K::call;
            n.name = name;
            n.child = std::stoi(var.substr(1));
            if (lx_.at(Tok::lparen)) {
                s.mtt_syntax = true;
                lx_.next();
                while (!lx_.at(Tok::rparen)) {
                    n.children.push_back(parse_term_rhs(s));
                    if (lx_.at(Tok::comma)) lx_.next();
                }
                lx_.next();
            }
            return n;
        }
        RhsNode n;
        n.kind = RhsNode::K::letter;
        n.name = name;
        if (lx_.at(Tok::lparen)) {
            lx_.next();
            while (!lx_.at(Tok::rparen)) {
                n.children.push_back(parse_term_rhs(s));
                if (lx_.at(Tok::comma)) lx_.next();
            }
            lx_.next();
        }
        return n;
    }

    // ---- lowering

    static TreeRhs lower_tree_rhs(const RhsNode& n) {
        if (n.kind == RhsNode::K::param)
            throw ValidationError("parameters are not allowed in tdtt rules");
        if (n.kind == RhsNode::K::call) {
            if (!n.children.empty())
                throw ValidationError("tdtt calls take no arguments");
            return TreeRhs::call(n.name, n.child);
        }
        std::vector<TreeRhs> kids;
        kids.reserve(n.children.size());
        for (const auto& c : n.children) kids.push_back(lower_tree_rhs(c));
        return TreeRhs::out(n.name, std::move(kids));
    }

    static MttRhs lower_mtt_rhs(const RhsNode& n) {
        switch (n.kind) {
            case RhsNode::K::param:
                return MttRhs::par(n.param);
            case RhsNode::K::call: {
                std::vector<MttRhs> args;
                args.reserve(n.children.size());
                for (const auto& c : n.children) args.push_back(lower_mtt_rhs(c));
                return MttRhs::call(n.name, n.child, std::move(args));
            }
            case RhsNode::K::letter: {
                std::vector<MttRhs> kids;
                kids.reserve(n.children.size());
                for (const auto& c : n.children) kids.push_back(lower_mtt_rhs(c));
                return MttRhs::out(n.name, std::move(kids));
            }
        }
        throw ValidationError("unreachable");
    }

    TopDownTT lower_tdtt(const Sections& s) {
        TopDownTT tt;
        tt.input = s.input;
        tt.string_output = s.string_output;
        tt.output = s.output;
        tt.output_symbols = s.output_symbols;
        for (const auto& [name, arity] : s.states) {
            if (arity != 0)
                throw ValidationError("tdtt state '" + name + "' cannot carry parameters");
            tt.states.push_back(name);
        }
        tt.initial = s.initial;
        tt.lookahead = s.lookahead;
        for (const auto& r : s.rules) {
            if (r.has_param_list)
                throw ValidationError("tdtt rules cannot bind parameters");
            TdttRule rule;
            rule.state = r.state;
            rule.letter = r.letter;
            rule.pattern = r.pattern;
            if (r.string_rhs) {
                StrRhs body;
                for (const auto& item : r.str)
                    body.push_back(item.is_call ? StrItem::call(item.state, item.child)
                                                : StrItem::lit(item.text));
                rule.rhs = std::move(body);
            } else {
                rule.rhs = lower_tree_rhs(r.tree);
            }
            tt.rules.push_back(std::move(rule));
        }
        ensure_wellformed(tt);
        return tt;
    }

    MacroTT lower_mtt(const Sections& s) {
        MacroTT m;
        m.input = s.input;
        m.output = s.output;
        m.states = s.states;
        m.initial = s.initial;
        m.lookahead = s.lookahead;
        for (const auto& r : s.rules) {
            MttRule rule;
            rule.state = r.state;
            rule.letter = r.letter;
            rule.pattern = r.pattern;
            if (r.has_param_list && m.has_state(r.state) &&
                m.state_arity(r.state) != r.lhs_params)
                throw ValidationError("rule for '" + r.state + "' binds " +
                                      std::to_string(r.lhs_params) + " parameters, state arity is " +
                                      std::to_string(m.state_arity(r.state)));
            rule.rhs = lower_mtt_rhs(r.tree);
            m.rules.push_back(std::move(rule));
        }
        ensure_wellformed(m);
        return m;
    }

    // ---- sst

    Sst parse_sst_body() {
        Sst s;
        bool have_input = false, have_output = false, have_states = false, have_initial = false,
             have_registers = false;
        auto resolve_expr = [&](const std::vector<Token>& toks) -> SstExpr {
            SstExpr e;
            for (const auto& t : toks) {
                if (t.kind == Tok::dquoted) {
                    for (char c : t.text) {
                        std::string sym(1, c);
                        if (std::find(s.output_symbols.begin(), s.output_symbols.end(), sym) ==
                            s.output_symbols.end())
                            throw ParseError("character '" + sym + "' is not an output symbol",
                                             t.line, t.col);
                        e.push_back(SstItem::lit(sym));
                    }
                    continue;
                }
                bool is_reg = std::find(s.registers.begin(), s.registers.end(), t.text) !=
                              s.registers.end();
                bool is_sym = std::find(s.output_symbols.begin(), s.output_symbols.end(),
                                        t.text) != s.output_symbols.end();
                if (is_reg && is_sym)
                    throw ParseError("'" + t.text + "' is both a register and an output symbol",
                                     t.line, t.col);
                if (is_reg)
                    e.push_back(SstItem::reg(t.text));
                else if (is_sym)
                    e.push_back(SstItem::lit(t.text));
                else
                    throw ParseError("'" + t.text + "' is neither a register nor an output symbol",
                                     t.line, t.col);
            }
            return e;
        };
        // expression token list: NAME or DQUOTED separated by '.'
        auto read_expr_tokens = [&]() -> std::optional<std::vector<Token>> {
            if (lx_.at_name("undef")) {
                lx_.next();
                return std::nullopt;
            }
            std::vector<Token> toks;
            while (lx_.at(Tok::name) || lx_.at(Tok::dquoted)) {
                toks.push_back(lx_.next());
                if (lx_.at(Tok::dot))
                    lx_.next();
                else
                    break;
            }
            return toks;
        };

        while (!lx_.at(Tok::rbrace)) {
            std::string section = lx_.expect_name("an sst section");
            if (section == "input") {
                s.input_symbols = parse_symbol_set();
                have_input = true;
            } else if (section == "output" && lx_.at(Tok::lbrace)) {
                s.output_symbols = parse_symbol_set();
                have_output = true;
            } else if (section == "output") {
                // `output state = expr;` — the final output expression
                std::string st = lx_.expect_name("a state");
                lx_.expect(Tok::eq, "'='");
                if (lx_.at_name("undef")) {
                    lx_.next();  // equivalent to omitting the entry
                } else {
                    auto toks = read_expr_tokens();
                    s.output[st] = toks ? resolve_expr(*toks) : SstExpr{};
                }
            } else if (section == "states") {
                for (const auto& [n, a] : parse_ranked_or_plain_states()) {
                    if (a != 0) lx_.fail("sst states carry no arity");
                    s.states.push_back(n);
                }
                have_states = true;
            } else if (section == "initial") {
                s.initial = lx_.expect_name("a state");
                have_initial = true;
            } else if (section == "registers") {
                s.registers = parse_symbol_set();
                have_registers = true;
            } else if (section == "init") {
                if (!have_registers || !have_output)
                    lx_.fail("init requires registers and output sections first");
                s.init.assign(s.registers.size(), std::nullopt);
                while (true) {
                    std::string reg = lx_.expect_name("a register");
                    auto it = std::find(s.registers.begin(), s.registers.end(), reg);
                    if (it == s.registers.end()) lx_.fail("unknown register '" + reg + "'");
                    lx_.expect(Tok::eq, "'='");
                    auto toks = read_expr_tokens();
                    if (toks) {
                        SstExpr e = resolve_expr(*toks);
                        Word w;
                        for (const auto& item : e) {
                            if (item.is_reg) lx_.fail("init values may mention no registers");
                            w.push_back(item.text);
                        }
                        s.init[static_cast<size_t>(it - s.registers.begin())] = std::move(w);
                    }
                    if (lx_.at(Tok::comma)) {
                        lx_.next();
                        continue;
                    }
                    break;
                }
            } else if (section == "on") {
                if (!have_registers || !have_states)
                    lx_.fail("transitions require states and registers sections first");
                std::string from = lx_.expect_name("a state");
                lx_.expect(Tok::comma, "','");
                std::string sym = lx_.expect_name("an input symbol");
                lx_.expect(Tok::arrow, "'->'");
                SstTransition tr;
                tr.next = lx_.expect_name("a state");
                tr.updates.assign(s.registers.size(), SstExpr{});  // default: keep empty
                // default for unlisted registers is the identity R = R
                for (size_t i = 0; i < s.registers.size(); ++i)
                    tr.updates[i] = SstExpr{SstItem::reg(s.registers[i])};
                if (lx_.at_name("with")) {
                    lx_.next();
                    while (true) {
                        std::string reg = lx_.expect_name("a register");
                        auto it = std::find(s.registers.begin(), s.registers.end(), reg);
                        if (it == s.registers.end()) lx_.fail("unknown register '" + reg + "'");
                        lx_.expect(Tok::eq, "'='");
                        auto toks = read_expr_tokens();
                        size_t ri = static_cast<size_t>(it - s.registers.begin());
                        if (toks)
                            tr.updates[ri] = resolve_expr(*toks);
                        else
                            tr.updates[ri] = std::nullopt;
                        if (lx_.at(Tok::comma)) {
                            lx_.next();
                            continue;
                        }
                        break;
                    }
                }
                if (!s.update.emplace(std::make_pair(from, sym), std::move(tr)).second)
                    lx_.fail("duplicate transition on " + from + "," + sym);
            } else {
                lx_.fail("unknown sst section '" + section + "'");
            }
            if (lx_.at(Tok::semi)) lx_.next();
        }
        if (!have_input || !have_output || !have_states || !have_initial || !have_registers)
            lx_.fail("sst is missing a required section");
        if (s.init.empty()) s.init.assign(s.registers.size(), Word{});
        ensure_wellformed(s);
        return s;
    }

    std::vector<std::pair<std::string, int>> parse_ranked_or_plain_states() {
        std::vector<std::pair<std::string, int>> out;
        lx_.expect(Tok::lbrace, "'{'");
        while (!lx_.at(Tok::rbrace)) {
            std::string name = lx_.expect_name("a name");
            int arity = 0;
            if (lx_.at(Tok::colon)) {
                lx_.next();
                std::string n = lx_.expect_name("an arity");
                if (!all_digits(n)) lx_.fail("arity must be a number");
                arity = std::stoi(n);
            }
            out.emplace_back(name, arity);
            if (lx_.at(Tok::comma)) lx_.next();
        }
        lx_.next();
        return out;
    }

    // ---- register machine

    RegisterMachine parse_rm_body() {
        RegisterMachine m;
        bool have_input = false, have_output = false, have_states = false, have_registers = false,
             have_outreg = false;
        while (!lx_.at(Tok::rbrace)) {
            std::string section = lx_.expect_name("a regmachine section");
            if (section == "input") {
                m.input = parse_ranked_set();
                have_input = true;
            } else if (section == "output") {
                if (lx_.at_name("string")) {
                    lx_.next();
                    m.string_output = true;
                    m.output_symbols = parse_symbol_set();
                } else {
                    m.output = parse_ranked_set();
                }
                have_output = true;
            } else if (section == "states") {
                m.states = parse_symbol_set_allow_underscore();
                have_states = true;
            } else if (section == "registers") {
                m.registers = parse_symbol_set();
                have_registers = true;
            } else if (section == "output-register") {
                m.output_register = lx_.expect_name("a register");
                have_outreg = true;
            } else if (section == "on") {
                if (!have_states || !have_registers || !have_output)
                    lx_.fail("transitions require states, registers and output sections first");
                std::string letter = lx_.expect_name("an input letter");
                std::vector<std::string> kid_states;
                if (lx_.at(Tok::lparen)) {
                    lx_.next();
                    while (!lx_.at(Tok::rparen)) {
                        kid_states.push_back(lx_.expect_name("a state"));
                        if (lx_.at(Tok::comma)) lx_.next();
                    }
                    lx_.next();
                }
                lx_.expect(Tok::arrow, "'->'");
                RmTransition tr;
                tr.next_state = lx_.expect_name("a state");
                tr.updates.assign(m.registers.size(), std::nullopt);
                if (lx_.at_name("with")) {
                    lx_.next();
                    while (true) {
                        std::string reg = lx_.expect_name("a register");
                        auto it = std::find(m.registers.begin(), m.registers.end(), reg);
                        if (it == m.registers.end()) lx_.fail("unknown register '" + reg + "'");
                        lx_.expect(Tok::eq, "'='");
                        size_t ri = static_cast<size_t>(it - m.registers.begin());
                        if (lx_.at_name("undef")) {
                            lx_.next();
                        } else if (m.string_output) {
                            tr.updates[ri] = RegUpdate{parse_rm_str_expr()};
                        } else {
                            tr.updates[ri] = RegUpdate{parse_rm_tree_expr()};
                        }
                        if (lx_.at(Tok::comma)) {
                            lx_.next();
                            continue;
                        }
                        break;
                    }
                }
                if (!m.delta.emplace(std::make_pair(letter, kid_states), std::move(tr)).second)
                    lx_.fail("duplicate transition for " + letter);
            } else {
                lx_.fail("unknown regmachine section '" + section + "'");
            }
            if (lx_.at(Tok::semi)) lx_.next();
        }
        if (!have_input || !have_output || !have_states || !have_registers || !have_outreg)
            lx_.fail("regmachine is missing a required section");
        ensure_wellformed(m);
        return m;
    }

    // child register reference INT '.' NAME, or output letter term
    TdttRhs parse_rm_tree_expr() { return TdttRhs{parse_rm_tree_node()}; }

    TreeRhs parse_rm_tree_node() {
        std::string name = lx_.expect_name("a letter or child register reference");
        if (all_digits(name) && lx_.at(Tok::dot)) {
            lx_.next();
            std::string reg = lx_.expect_name("a register");
            return TreeRhs::call(reg, std::stoi(name));
        }
        TreeRhs n = TreeRhs::out(name);
        if (lx_.at(Tok::lparen)) {
            lx_.next();
            while (!lx_.at(Tok::rparen)) {
                n.children.push_back(parse_rm_tree_node());
                if (lx_.at(Tok::comma)) lx_.next();
            }
            lx_.next();
        }
        return n;
    }

    TdttRhs parse_rm_str_expr() {
        StrRhs items;
        while (true) {
            if (lx_.at(Tok::quoted)) {
                std::string sym = lx_.next().text;
                if (!sym.empty()) items.push_back(StrItem::lit(sym));
            } else {
                std::string idx = lx_.expect_name("a child register reference or quoted symbol");
                if (!all_digits(idx)) lx_.fail("expected a child index");
                lx_.expect(Tok::dot, "'.'");
                std::string reg = lx_.expect_name("a register");
                items.push_back(StrItem::call(reg, std::stoi(idx)));
            }
            if (lx_.at(Tok::dot)) {
                lx_.next();
                continue;
            }
            break;
        }
        return TdttRhs{items};
    }

    std::vector<std::string> parse_symbol_set_allow_underscore() {
        std::vector<std::string> syms;
        lx_.expect(Tok::lbrace, "'{'");
        while (!lx_.at(Tok::rbrace)) {
            std::string name = lx_.expect_name("a name");
            if (name != "_") RankedAlphabet::validate_name(name);
            syms.push_back(name);
            if (lx_.at(Tok::comma)) lx_.next();
        }
        lx_.next();
        return syms;
    }
};

// ------------------------------------------------------------- printing

void print_ranked_set(std::ostringstream& out, const RankedAlphabet& a) {
    out << "{";
    bool first = true;
    for (const auto& [name, arity] : a.letters()) {
        if (!first) out << ",";
        first = false;
        out << name << ":" << arity;
    }
    out << "}";
}

void print_symbol_set(std::ostringstream& out, const std::vector<std::string>& syms) {
    out << "{";
    for (size_t i = 0; i < syms.size(); ++i) {
        if (i) out << ",";
        out << syms[i];
    }
    out << "}";
}

void print_lookahead(std::ostringstream& out, const Dbta& a, const std::string& indent) {
    out << "lookahead {\n" << indent << "  states";
    for (const auto& s : a.states) out << " " << s;
    out << ";\n";
    for (const auto& [key, to] : a.delta) {
        out << indent << "  delta " << key.first;
        if (!key.second.empty()) {
            out << "(";
            for (size_t i = 0; i < key.second.size(); ++i) {
                if (i) out << ",";
                out << key.second[i];
            }
            out << ")";
        }
        out << " -> " << to << ";\n";
    }
    out << indent << "}\n";
}

void print_lhs(std::ostringstream& out, const std::string& state, const std::string& letter,
               const LaPattern& pattern, int params) {
    out << state << "<" << letter;
    if (!pattern.empty()) {
        bool any_concrete = false;
        for (const auto& e : pattern) any_concrete = any_concrete || e.has_value();
        out << "(";
        for (size_t i = 0; i < pattern.size(); ++i) {
            if (i) out << ",";
            out << "t" << (i + 1);
            if (any_concrete) out << "|" << (pattern[i] ? *pattern[i] : "_");
        }
        out << ")";
    }
    out << ">";
    if (params > 0) {
        out << "(";
        for (int j = 1; j <= params; ++j) {
            if (j > 1) out << ",";
            out << "x" << j;
        }
        out << ")";
    }
}

void print_tree_rhs(std::ostringstream& out, const TreeRhs& rhs) {
    if (rhs.kind == TreeRhs::Kind::call) {
        out << rhs.state << "<t" << rhs.child << ">";
        return;
    }
    out << rhs.label;
    if (!rhs.children.empty()) {
        out << "(";
        for (size_t i = 0; i < rhs.children.size(); ++i) {
            if (i) out << ",";
            print_tree_rhs(out, rhs.children[i]);
        }
        out << ")";
    }
}

void print_str_rhs(std::ostringstream& out, const StrRhs& rhs) {
    if (rhs.empty()) {
        out << "''";
        return;
    }
    for (size_t i = 0; i < rhs.size(); ++i) {
        if (i) out << " . ";
        if (rhs[i].is_call)
            out << rhs[i].state << "<t" << rhs[i].child << ">";
        else
            out << "'" << rhs[i].symbol << "'";
    }
}

void print_mtt_rhs(std::ostringstream& out, const MttRhs& rhs) {
    switch (rhs.kind) {
        case MttRhs::Kind::param:
            out << "x" << rhs.param;
            return;
        case MttRhs::Kind::call:
            out << rhs.state << "<t" << rhs.child << ">";
            if (!rhs.children.empty()) {
                out << "(";
                for (size_t i = 0; i < rhs.children.size(); ++i) {
                    if (i) out << ",";
                    print_mtt_rhs(out, rhs.children[i]);
                }
                out << ")";
            }
            return;
        case MttRhs::Kind::output:
            out << rhs.label;
            if (!rhs.children.empty()) {
                out << "(";
                for (size_t i = 0; i < rhs.children.size(); ++i) {
                    if (i) out << ",";
                    print_mtt_rhs(out, rhs.children[i]);
                }
                out << ")";
            }
            return;
    }
}

}  // namespace

std::string print_tdtt(const TopDownTT& tt) {
    std::ostringstream out;
    out << "tdtt {\n  input ";
    print_ranked_set(out, tt.input);
    out << "\n  output ";
    if (tt.string_output) {
        out << "string ";
        print_symbol_set(out, tt.output_symbols);
    } else {
        print_ranked_set(out, tt.output);
    }
    out << "\n  states {";
    for (size_t i = 0; i < tt.states.size(); ++i) {
        if (i) out << ",";
        out << tt.states[i];
    }
    out << "}\n  initial " << tt.initial << ";\n";
    if (tt.lookahead) {
        out << "  ";
        print_lookahead(out, *tt.lookahead, "  ");
    }
    out << "  rules {\n";
    for (const auto& r : tt.rules) {
        out << "    ";
        print_lhs(out, r.state, r.letter, r.pattern, 0);
        out << " -> ";
        if (tt.string_output)
            print_str_rhs(out, std::get<StrRhs>(r.rhs));
        else
            print_tree_rhs(out, std::get<TreeRhs>(r.rhs));
        out << ";\n";
    }
    out << "  }\n}\n";
    return out.str();
}

std::string print_mtt(const MacroTT& m) {
    std::ostringstream out;
    out << "mtt {\n  input ";
    print_ranked_set(out, m.input);
    out << "\n  output ";
    print_ranked_set(out, m.output);
    out << "\n  states {";
    for (size_t i = 0; i < m.states.size(); ++i) {
        if (i) out << ",";
        out << m.states[i].first << ":" << m.states[i].second;
    }
    out << "}\n  initial " << m.initial << ";\n";
    if (m.lookahead) {
        out << "  ";
        print_lookahead(out, *m.lookahead, "  ");
    }
    out << "  rules {\n";
    for (const auto& r : m.rules) {
        out << "    ";
        print_lhs(out, r.state, r.letter, r.pattern, m.state_arity(r.state));
        out << " -> ";
        print_mtt_rhs(out, r.rhs);
        out << ";\n";
    }
    out << "  }\n}\n";
    return out.str();
}

std::string print_sst(const Sst& s) {
    std::ostringstream out;
    out << "sst {\n  input ";
    print_symbol_set(out, s.input_symbols);
    out << ";\n  output ";
    print_symbol_set(out, s.output_symbols);
    out << ";\n  states ";
    print_symbol_set(out, s.states);
    out << ";\n  initial " << s.initial << ";\n  registers ";
    print_symbol_set(out, s.registers);
    out << ";\n  init ";
    for (size_t i = 0; i < s.registers.size(); ++i) {
        if (i) out << ", ";
        out << s.registers[i] << "=";
        if (!s.init[i]) {
            out << "undef";
        } else {
            out << "\"";
            for (const auto& sym : *s.init[i]) out << sym;
            out << "\"";
        }
    }
    out << ";\n";
    for (const auto& [key, tr] : s.update) {
        out << "  on " << key.first << "," << key.second << " -> " << tr.next << " with ";
        for (size_t i = 0; i < s.registers.size(); ++i) {
            if (i) out << ", ";
            out << s.registers[i] << "=";
            if (!tr.updates[i]) {
                out << "undef";
            } else if (tr.updates[i]->empty()) {
                out << "\"\"";
            } else {
                for (size_t j = 0; j < tr.updates[i]->size(); ++j) {
                    if (j) out << ".";
                    out << (*tr.updates[i])[j].text;
                }
            }
        }
        out << ";\n";
    }
    for (const auto& [st, expr] : s.output) {
        out << "  output " << st << " = ";
        if (expr.empty()) {
            out << "\"\"";
        } else {
            for (size_t j = 0; j < expr.size(); ++j) {
                if (j) out << ".";
                out << expr[j].text;
            }
        }
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

std::string print_register_machine(const RegisterMachine& m) {
    std::ostringstream out;
    out << "regmachine {\n  input ";
    print_ranked_set(out, m.input);
    out << ";\n  output ";
    if (m.string_output) {
        out << "string ";
        print_symbol_set(out, m.output_symbols);
    } else {
        print_ranked_set(out, m.output);
    }
    out << ";\n  states ";
    print_symbol_set(out, m.states);
    out << ";\n  registers ";
    print_symbol_set(out, m.registers);
    out << ";\n  output-register " << m.output_register << ";\n";
    std::ostringstream body;
    for (const auto& [key, tr] : m.delta) {
        body << "  on " << key.first;
        if (!key.second.empty()) {
            body << "(";
            for (size_t i = 0; i < key.second.size(); ++i) {
                if (i) body << ",";
                body << key.second[i];
            }
            body << ")";
        }
        body << " -> " << tr.next_state << " with ";
        for (size_t i = 0; i < m.registers.size(); ++i) {
            if (i) body << ", ";
            body << m.registers[i] << " = ";
            if (!tr.updates[i]) {
                body << "undef";
                continue;
            }
            if (m.string_output) {
                const StrRhs& items = std::get<StrRhs>(tr.updates[i]->expr);
                if (items.empty()) {
                    body << "''";
                } else {
                    for (size_t j = 0; j < items.size(); ++j) {
                        if (j) body << " . ";
                        if (items[j].is_call)
                            body << items[j].child << "." << items[j].state;
                        else
                            body << "'" << items[j].symbol << "'";
                    }
                }
            } else {
                auto print_node = [&](auto&& self, const TreeRhs& n) -> void {
                    if (n.kind == TreeRhs::Kind::call) {
                        body << n.child << "." << n.state;
                        return;
                    }
                    body << n.label;
                    if (!n.children.empty()) {
                        body << "(";
                        for (size_t j = 0; j < n.children.size(); ++j) {
                            if (j) body << ",";
                            self(self, n.children[j]);
                        }
                        body << ")";
                    }
                };
                print_node(print_node, std::get<TreeRhs>(tr.updates[i]->expr));
            }
        }
        body << ";\n";
    }
    out << body.str() << "}\n";
    return out.str();
}

AnyMachine parse_machine(std::string_view text) { return Parser(text).parse(); }

std::string print_machine(const AnyMachine& m) {
    if (std::holds_alternative<TopDownTT>(m)) return print_tdtt(std::get<TopDownTT>(m));
    if (std::holds_alternative<MacroTT>(m)) return print_mtt(std::get<MacroTT>(m));
    if (std::holds_alternative<Sst>(m)) return print_sst(std::get<Sst>(m));
    return print_register_machine(std::get<RegisterMachine>(m));
}

TopDownTT parse_tdtt(std::string_view text) {
    AnyMachine m = parse_machine(text);
    if (!std::holds_alternative<TopDownTT>(m))
        throw ValidationError("definition does not describe a top-down tree transducer");
    return std::get<TopDownTT>(m);
}

MacroTT parse_mtt(std::string_view text) {
    AnyMachine m = parse_machine(text);
    if (std::holds_alternative<TopDownTT>(m)) {
        // a tree-output tdtt is an mtt whose states all have arity 0
        const TopDownTT& tt = std::get<TopDownTT>(m);
        if (!tt.string_output) return mtt_of_tdtt(tt);
    }
    if (!std::holds_alternative<MacroTT>(m))
        throw ValidationError("definition does not describe a macro tree transducer");
    return std::get<MacroTT>(m);
}

Sst parse_sst(std::string_view text) {
    AnyMachine m = parse_machine(text);
    if (!std::holds_alternative<Sst>(m))
        throw ValidationError("definition does not describe an sst");
    return std::get<Sst>(m);
}

RegisterMachine parse_register_machine(std::string_view text) {
    AnyMachine m = parse_machine(text);
    if (!std::holds_alternative<RegisterMachine>(m))
        throw ValidationError("definition does not describe a register machine");
    return std::get<RegisterMachine>(m);
}

}  // namespace ttw
