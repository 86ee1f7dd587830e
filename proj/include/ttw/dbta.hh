#ifndef TTW_DBTA_HH
#define TTW_DBTA_HH

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ttw/alphabet.hh"
#include "ttw/tree.hh"

namespace ttw {

/// Deterministic bottom-up tree automaton: the lookahead device. The
/// transition map must be total over (letter x state-vectors).
struct Dbta {
    RankedAlphabet alphabet;
    std::vector<std::string> states;  // declaration order; indexing is 1-based in selector contexts
    std::map<std::pair<std::string, std::vector<std::string>>, std::string> delta;
};

struct MissingEntry {
    std::string letter;
    std::vector<std::string> child_states;
};

/// Empty result iff delta is total. Unknown states or letters in delta are
/// reported through ValidationError instead.
std::vector<MissingEntry> check_total(const Dbta& a);

/// Throws ValidationError when check_total is non-empty or delta is malformed.
void ensure_total(const Dbta& a);

/// The unique state at the root. Totality is assumed (ensure_total first).
std::string run_dbta(const Dbta& a, const Tree& t);

/// One bottom-up pass over an indexed tree; result[i] is the state index
/// (position in a.states) at node i.
std::vector<size_t> annotate_states(const Dbta& a, const TreeIndex& idx);

size_t state_index(const Dbta& a, const std::string& state);

}  // namespace ttw

#endif  // TTW_DBTA_HH
