#include "ttw/tree.hh"

#include <algorithm>
#include <cctype>

#include "ttw/error.hh"

namespace ttw {

std::string word_text(const Word& w) {
    std::string s;
    for (const auto& sym : w) s += sym;
    return s;
}

Word word_from_chars(std::string_view s) {
    Word w;
    w.reserve(s.size());
    for (char c : s) w.emplace_back(1, c);
    return w;
}

Tree leaf(std::string label) { return Tree{std::move(label), {}}; }

Tree node(std::string label, std::vector<Tree> children) {
    return Tree{std::move(label), std::move(children)};
}

size_t tree_size(const Tree& t) {
    size_t n = 1;
    for (const auto& c : t.children) n += tree_size(c);
    return n;
}

size_t tree_depth(const Tree& t) {
    size_t d = 0;
    for (const auto& c : t.children) d = std::max(d, tree_depth(c));
    return d + 1;
}

std::optional<int> param_index(const std::string& label) {
    if (label.size() < 2 || label[0] != 'x') return std::nullopt;
    int value = 0;
    for (size_t i = 1; i < label.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(label[i]))) return std::nullopt;
        value = value * 10 + (label[i] - '0');
        if (value > 1'000'000) throw ValidationError("parameter index out of range: " + label);
    }
    return value;
}

static void tree_text_rec(const Tree& t, std::string& out) {
    out += t.label;
    if (!t.children.empty()) {
        out += '(';
        for (size_t i = 0; i < t.children.size(); ++i) {
            if (i) out += ',';
            tree_text_rec(t.children[i], out);
        }
        out += ')';
    }
}

std::string tree_text(const Tree& t) {
    std::string out;
    tree_text_rec(t, out);
    return out;
}

namespace {

/// Minimal recursive-descent reader for the whitespace-free term syntax.
/// Whitespace between tokens is tolerated on input.
class TermReader {
  public:
    TermReader(std::string_view text, const RankedAlphabet& alphabet, bool allow_params)
        : text_(text), alphabet_(alphabet), allow_params_(allow_params) {}

    Tree read() {
        Tree t = term();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input after term");
        return t;
    }

  private:
    std::string_view text_;
    const RankedAlphabet& alphabet_;
    bool allow_params_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        size_t line = 1, col = 1;
        for (size_t i = 0; i < pos_ && i < text_.size(); ++i) {
            if (text_[i] == '\n') { ++line; col = 1; } else ++col;
        }
        throw ParseError(msg, line, col);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    static bool name_char(char c) {
        static const std::string stop = "(),<>|.{};=:'\"#";
        return !std::isspace(static_cast<unsigned char>(c)) && stop.find(c) == std::string::npos;
    }

    std::string name() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < text_.size() && name_char(text_[pos_])) ++pos_;
        if (pos_ == start) fail("expected a letter name");
        return std::string(text_.substr(start, pos_ - start));
    }

    Tree term() {
        std::string label = name();
        if (auto idx = param_index(label)) {
            if (!allow_params_) fail("parameter " + label + " not allowed here");
            if (*idx < 1) fail("parameter index must be positive: " + label);
            return leaf(std::move(label));
        }
        if (!alphabet_.has(label)) fail("unknown letter '" + label + "'");
        int arity = alphabet_.arity(label);
        std::vector<Tree> children;
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            ++pos_;
            while (true) {
                children.push_back(term());
                skip_ws();
                if (pos_ >= text_.size()) fail("unterminated argument list");
                if (text_[pos_] == ',') { ++pos_; continue; }
                if (text_[pos_] == ')') { ++pos_; break; }
                fail("expected ',' or ')'");
            }
        }
        if (static_cast<int>(children.size()) != arity)
            fail("letter '" + label + "' has arity " + std::to_string(arity) + " but " +
                 std::to_string(children.size()) + " arguments were given");
        return Tree{std::move(label), std::move(children)};
    }
};

}  // namespace

Tree parse_term(std::string_view text, const RankedAlphabet& alphabet, bool allow_params) {
    return TermReader(text, alphabet, allow_params).read();
}

void validate_tree(const Tree& t, const RankedAlphabet& alphabet, bool allow_params) {
    if (auto idx = param_index(t.label)) {
        if (!allow_params)
            throw ValidationError("parameter leaf " + t.label + " not allowed here");
        if (*idx < 1 || !t.children.empty())
            throw ValidationError("malformed parameter leaf " + t.label);
        return;
    }
    if (!alphabet.has(t.label)) throw ValidationError("unknown letter '" + t.label + "'");
    if (alphabet.arity(t.label) != static_cast<int>(t.children.size()))
        throw ValidationError("arity mismatch at letter '" + t.label + "'");
    for (const auto& c : t.children) validate_tree(c, alphabet, allow_params);
}

static void yield_rec(const Tree& t, const RankedAlphabet& alphabet, Word& out) {
    if (t.children.empty()) {
        if (!alphabet.is_neutral(t.label)) out.push_back(t.label);
        return;
    }
    for (const auto& c : t.children) yield_rec(c, alphabet, out);
}

Word yield_of(const Tree& t, const RankedAlphabet& alphabet) {
    Word out;
    yield_rec(t, alphabet, out);
    return out;
}

Tree encode_string(const Word& w, const RankedAlphabet& alphabet) {
    auto marker = alphabet.end_marker();
    if (!marker)
        throw ValidationError("encode_string needs a unary-shaped alphabet with one nullary end marker");
    Tree t = leaf(*marker);
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        if (!alphabet.has(*it) || alphabet.arity(*it) != 1)
            throw ValidationError("symbol '" + *it + "' is not a unary letter of the alphabet");
        t = node(*it, {std::move(t)});
    }
    return t;
}

Word decode_string(const Tree& t, const RankedAlphabet& alphabet) {
    auto marker = alphabet.end_marker();
    if (!marker)
        throw ValidationError("decode_string needs a unary-shaped alphabet with one nullary end marker");
    Word out;
    const Tree* cur = &t;
    while (true) {
        if (cur->children.empty()) {
            if (cur->label != *marker)
                throw ValidationError("chain does not end in the end marker '" + *marker +
                                      "' (found '" + cur->label + "')");
            return out;
        }
        if (cur->children.size() != 1)
            throw ValidationError("not a unary chain: letter '" + cur->label + "' has " +
                                  std::to_string(cur->children.size()) + " children");
        out.push_back(cur->label);
        cur = &cur->children[0];
    }
}

namespace {

void preorder_key(const Tree& t, const RankedAlphabet& alphabet, std::vector<size_t>& key) {
    key.push_back(alphabet.index_of(t.label));
    for (const auto& c : t.children) preorder_key(c, alphabet, key);
}

// by_size[s] holds all trees with exactly s nodes; smaller classes are
// complete before class s is filled.
void fill_size_class(const RankedAlphabet& alphabet, size_t s,
                     std::vector<std::vector<Tree>>& by_size) {
    auto& out = by_size[s];
    for (const auto& [name, arity] : alphabet.letters()) {
        const size_t k = static_cast<size_t>(arity);
        if (k == 0) {
            if (s == 1) out.push_back(leaf(name));
            continue;
        }
        if (s < k + 1) continue;
        std::vector<Tree> children;
        auto go = [&](auto&& self, size_t i, size_t remaining) -> void {
            if (i == k) {
                if (remaining == 0) out.push_back(node(name, children));
                return;
            }
            size_t reserved = k - i - 1;  // later children take one node each at least
            for (size_t sz = 1; sz + reserved <= remaining; ++sz) {
                for (const Tree& t : by_size[sz]) {
                    children.push_back(t);
                    self(self, i + 1, remaining - sz);
                    children.pop_back();
                }
            }
        };
        go(go, 0, s - 1);
    }
}

}  // namespace

std::vector<Tree> enumerate_trees(const RankedAlphabet& alphabet, size_t max_nodes) {
    if (max_nodes < 1) throw ValidationError("max_nodes must be >= 1");
    if (alphabet.nullary_letters().empty())
        throw ValidationError("alphabet has no nullary letter; no finite trees exist");
    std::vector<std::vector<Tree>> by_size(max_nodes + 1);
    for (size_t s = 1; s <= max_nodes; ++s) fill_size_class(alphabet, s, by_size);

    std::vector<Tree> out;
    std::vector<size_t> key_a, key_b;
    for (size_t s = 1; s <= max_nodes; ++s) {
        auto& cls = by_size[s];
        std::sort(cls.begin(), cls.end(), [&](const Tree& a, const Tree& b) {
            key_a.clear(); key_b.clear();
            preorder_key(a, alphabet, key_a);
            preorder_key(b, alphabet, key_b);
            return key_a < key_b;
        });
        for (auto& t : cls) out.push_back(std::move(t));
    }
    return out;
}

std::vector<Word> enumerate_words(const std::vector<Sym>& symbols, size_t max_len) {
    std::vector<Word> out;
    out.push_back({});
    size_t level_start = 0;
    for (size_t len = 1; len <= max_len; ++len) {
        size_t level_end = out.size();
        for (size_t i = level_start; i < level_end; ++i) {
            for (const auto& sym : symbols) {
                Word w = out[i];
                w.push_back(sym);
                out.push_back(std::move(w));
            }
        }
        level_start = level_end;
    }
    return out;
}

void validate_context(const Context& c, const RankedAlphabet& alphabet) {
    if (c.arity < 0) throw ValidationError("negative context arity");
    validate_tree(c.body, alphabet, /*allow_params=*/true);
    // every parameter index within 1..arity
    std::vector<const Tree*> stack{&c.body};
    while (!stack.empty()) {
        const Tree* t = stack.back();
        stack.pop_back();
        if (auto idx = param_index(t->label)) {
            if (*idx < 1 || *idx > c.arity)
                throw ValidationError("parameter " + t->label + " exceeds context arity " +
                                      std::to_string(c.arity));
        }
        for (const auto& ch : t->children) stack.push_back(&ch);
    }
}

static Tree substitute_rec(const Tree& body, std::span<const Context> args) {
    if (auto idx = param_index(body.label)) {
        return args[static_cast<size_t>(*idx - 1)].body;
    }
    std::vector<Tree> children;
    children.reserve(body.children.size());
    for (const auto& c : body.children) children.push_back(substitute_rec(c, args));
    return Tree{body.label, std::move(children)};
}

Context substitute(const Context& ctx, std::span<const Context> args, int result_arity) {
    if (static_cast<int>(args.size()) != ctx.arity)
        throw ValidationError("substitute: expected " + std::to_string(ctx.arity) +
                              " arguments, got " + std::to_string(args.size()));
    for (const auto& a : args) {
        Context probe = normalize(a);
        if (probe.arity > result_arity)
            throw ValidationError("substitute: argument uses parameter x" +
                                  std::to_string(probe.arity) + " beyond declared result arity " +
                                  std::to_string(result_arity));
    }
    return Context{result_arity, substitute_rec(ctx.body, args)};
}

static void max_param(const Tree& t, int& mx) {
    if (auto idx = param_index(t.label)) mx = std::max(mx, *idx);
    for (const auto& c : t.children) max_param(c, mx);
}

Context normalize(const Context& c) {
    int mx = 0;
    max_param(c.body, mx);
    return Context{mx, c.body};
}

std::string context_text(const Context& c) {
    if (c.arity == 0) return tree_text(c.body);
    std::string s;
    for (int i = 1; i <= c.arity; ++i) {
        if (i > 1) s += ",";
        s += "x" + std::to_string(i);
    }
    return s + " -> " + tree_text(c.body);
}

TreeIndex::TreeIndex(const Tree& t) {
    struct Item {
        const Tree* tree;
        size_t parent;
        int pos;
    };
    std::vector<Item> stack{{&t, 0, 0}};
    // preorder; children are pushed reversed so they pop left to right,
    // which also appends them to the parent's child list in order
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        size_t id = nodes_.size();
        nodes_.push_back(Node{it.tree->label, {}, it.parent, it.pos});
        if (id != 0) nodes_[it.parent].children.push_back(id);
        for (size_t i = it.tree->children.size(); i > 0; --i)
            stack.push_back({&it.tree->children[i - 1], id, static_cast<int>(i)});
    }
}

std::string TreeIndex::path(size_t id) const {
    if (id == 0) return "/";
    std::vector<int> steps;
    for (size_t cur = id; cur != 0; cur = nodes_[cur].parent)
        steps.push_back(nodes_[cur].child_pos);
    std::string out;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it)
        out += "/" + std::to_string(*it);
    return out;
}

Tree TreeIndex::subtree(size_t id) const {
    const Node& n = nodes_[id];
    std::vector<Tree> children;
    children.reserve(n.children.size());
    for (size_t c : n.children) children.push_back(subtree(c));
    return Tree{n.label, std::move(children)};
}

}  // namespace ttw
