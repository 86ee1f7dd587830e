#ifndef TTW_BUILTINS_HH
#define TTW_BUILTINS_HH

#include <string>
#include <vector>

#include "ttw/dbta.hh"
#include "ttw/mtt.hh"
#include "ttw/sst.hh"
#include "ttw/tdtt.hh"

namespace ttw {
namespace builtins {

/// The workbench's standing example alphabet {a:2, b:1, c:0}.
const RankedAlphabet& abc();
/// Unary alphabet {a:1, b:1, eps:0} for string codecs.
const RankedAlphabet& unary_ab();

/// r+ iff the tree contains a node labeled b; states declared r+ first.
const Dbta& contains_b();
/// Same recognizer over an arbitrary alphabet.
Dbta contains_letter(const RankedAlphabet& alphabet, const std::string& letter);

/// Swaps the children under every a, stops below other letters.
const TopDownTT& cond_swap();
/// Identity over abc() (two states would be pointless; one suffices).
const TopDownTT& identity_tdtt();
/// Replaces b(t) by a(t,t) when t contains no b, with contains-b lookahead.
const TopDownTT& b_replace();
/// Reverse Polish form of the input tree (string output).
const TopDownTT& postfix();
/// S^n(0) -> a(b^n(c), a(b^(n-1)(c), ... a(b(c),c)...)), quadratic growth.
const TopDownTT& quadratic();
Tree quadratic_input(size_t n);  // S^n(0)

/// Unary-input string-output machines (inputs are strings encoded as unary
/// chains; the nullary input letter is the end marker).
const TopDownTT& unary_postfix();   // over {b:1,c:0}: b^n |-> c b^n (postfix of the chain)
const TopDownTT& unary_identity();  // copies the input string
const TopDownTT& unary_mark();      // keeps a's only while a b still follows (lookahead demo)

/// b-replacement recast as a macro tree transducer (all states 0-ary).
const MacroTT& b_replace_mtt();
/// String reversal on unary trees: q<t>(x) accumulates the prefix reversed.
const MacroTT& reverse_mtt();
/// Plain identity homomorphism as an MTT over abc().
const MacroTT& identity_mtt();
/// The parameter-squaring example: q1<t>(x) duplicates x at every c.
const MacroTT& squaring_mtt();

/// One register X := X.sigma; reading right to left reverses the input.
const Sst& reverse_sst();
/// X := sigma.X keeps the input order.
const Sst& identity_sst();
/// a^n -> a^n, a^n b w -> a^n b b^|w|; copyless.
const Sst& remark_sst();
/// X := X.X doubles per input symbol: |output| = 2^|input|.
const Sst& doubling_sst();
/// Two registers swapped on every symbol; distinguishes simultaneous from
/// sequential update semantics.
const Sst& swap_sst();

std::vector<std::string> tdtt_names();
std::vector<std::string> mtt_names();
std::vector<std::string> sst_names();

const TopDownTT* find_tdtt(const std::string& name);
const MacroTT* find_mtt(const std::string& name);
const Sst* find_sst(const std::string& name);

}  // namespace builtins
}  // namespace ttw

#endif  // TTW_BUILTINS_HH
