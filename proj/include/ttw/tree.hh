#ifndef TTW_TREE_HH
#define TTW_TREE_HH

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ttw/alphabet.hh"

namespace ttw {

/// One output symbol of a string-valued transduction. Symbols are letter
/// names, so a string value is a sequence of names rather than raw chars.
using Sym = std::string;
using Word = std::vector<Sym>;

/// Joins symbol names with no separator ("cc", "cbca", ...).
std::string word_text(const Word& w);
/// Splits a plain string into one-character symbols.
Word word_from_chars(std::string_view s);

struct Tree {
    std::string label;
    std::vector<Tree> children;

    bool operator==(const Tree&) const = default;
};

Tree leaf(std::string label);
Tree node(std::string label, std::vector<Tree> children);

size_t tree_size(const Tree& t);
size_t tree_depth(const Tree& t);

/// "x3" -> 3; anything else -> nullopt. Labels of this shape are parameter
/// leaves; alphabets may not declare them.
std::optional<int> param_index(const std::string& label);

/// Printed form uses no whitespace: a(b(c),c)
std::string tree_text(const Tree& t);

/// Parses `name | name '(' term (',' term)* ')'` and checks every label's
/// arity against the alphabet. Parameter leaves x1,x2,... are accepted only
/// when allow_params is set (used for rule bodies and contexts).
Tree parse_term(std::string_view text, const RankedAlphabet& alphabet,
                bool allow_params = false);

/// Structural check without parsing: labels declared, arities respected.
void validate_tree(const Tree& t, const RankedAlphabet& alphabet, bool allow_params = false);

/// Left-to-right leaf word with neutral letters erased.
Word yield_of(const Tree& t, const RankedAlphabet& alphabet);

/// String <-> unary-tree codecs over a unary-shaped alphabet (all letters of
/// arity <= 1 and exactly one nullary end marker).
Tree encode_string(const Word& w, const RankedAlphabet& alphabet);
Word decode_string(const Tree& t, const RankedAlphabet& alphabet);

/// All well-formed trees with at most max_nodes nodes, each exactly once,
/// ordered by node count and then lexicographically by the preorder sequence
/// of letter declaration indices.
std::vector<Tree> enumerate_trees(const RankedAlphabet& alphabet, size_t max_nodes);

/// All words of length <= max_len over the given symbols, ordered by length
/// and then lexicographically by symbol declaration index.
std::vector<Word> enumerate_words(const std::vector<Sym>& symbols, size_t max_len);

/// A tree with numbered parameter leaves x_1..x_arity; the value stored in a
/// macro tree transducer register. Arity 0 contexts are plain trees.
struct Context {
    int arity = 0;
    Tree body;

    bool operator==(const Context&) const = default;
};

/// Checks parameter indices against the declared arity and the tree part
/// against the alphabet.
void validate_context(const Context& c, const RankedAlphabet& alphabet);

/// Replaces every x_i leaf of ctx's body by args[i-1]'s body. The caller
/// declares the arity of the result; every parameter occurring in any
/// args[i] must be within it.
Context substitute(const Context& ctx, std::span<const Context> args, int result_arity);

/// Shrinks the declared arity to the largest parameter index actually used.
Context normalize(const Context& c);

/// Renders `body` for arity 0, `x1 -> body` otherwise.
std::string context_text(const Context& c);

/// A flattened, addressable view of an input tree. Node 0 is the root and
/// ids follow preorder. Evaluators key their memo tables on these ids.
class TreeIndex {
  public:
    struct Node {
        std::string label;
        std::vector<size_t> children;
        size_t parent;
        int child_pos;  // 1-based position under parent, 0 for the root
    };

    explicit TreeIndex(const Tree& t);

    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& operator[](size_t id) const { return nodes_[id]; }
    size_t size() const { return nodes_.size(); }

    /// "/" for the root, "/2/1" for the first child of the second child.
    std::string path(size_t id) const;
    Tree subtree(size_t id) const;

  private:
    std::vector<Node> nodes_;
};

}  // namespace ttw

#endif  // TTW_TREE_HH
