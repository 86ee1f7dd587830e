#ifndef TTW_RULES_HH
#define TTW_RULES_HH

#include <optional>
#include <string>
#include <vector>

#include "ttw/error.hh"

namespace ttw {

/// One lookahead constraint per child: a concrete lookahead state or the
/// wildcard (nullopt, written `_`).
using LaPattern = std::vector<std::optional<std::string>>;

inline LaPattern all_wildcards(size_t arity) { return LaPattern(arity, std::nullopt); }

inline bool pattern_matches(const LaPattern& p, const std::vector<std::string>& states) {
    if (p.size() != states.size()) return false;
    for (size_t i = 0; i < p.size(); ++i)
        if (p[i] && *p[i] != states[i]) return false;
    return true;
}

/// True when a's concrete positions include b's. Two patterns matching the
/// same state vector are comparable iff one refines the other this way.
inline bool pattern_refines(const LaPattern& a, const LaPattern& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (b[i] && !a[i]) return false;
    return true;
}

inline std::string pattern_text(const LaPattern& p) {
    std::string s = "(";
    for (size_t i = 0; i < p.size(); ++i) {
        if (i) s += ",";
        s += p[i] ? *p[i] : "_";
    }
    return s + ")";
}

/// Among candidate rule indices whose patterns match `states`, picks the
/// unique most specific one. Returns nullopt if none match; throws
/// ValidationError if two matching patterns are incomparable (the
/// well-formedness check reports this up front with better context).
template <typename GetPattern>
std::optional<size_t> most_specific(const std::vector<size_t>& candidates,
                                    const std::vector<std::string>& states,
                                    GetPattern&& pattern_of) {
    std::vector<size_t> matching;
    for (size_t idx : candidates)
        if (pattern_matches(pattern_of(idx), states)) matching.push_back(idx);
    if (matching.empty()) return std::nullopt;
    // applicable rules must form a specificity chain
    std::optional<size_t> best;
    for (size_t idx : matching) {
        const LaPattern& p = pattern_of(idx);
        for (size_t other : matching) {
            if (other == idx) continue;
            const LaPattern& q = pattern_of(other);
            if (!pattern_refines(p, q) && !pattern_refines(q, p))
                throw ValidationError("ambiguous rules: patterns " + pattern_text(p) + " and " +
                                      pattern_text(q) + " are incomparable");
        }
        if (!best || pattern_refines(p, pattern_of(*best))) best = idx;
    }
    return best;
}

}  // namespace ttw

#endif  // TTW_RULES_HH
