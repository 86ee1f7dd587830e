#include "ttw/dbta.hh"

#include <algorithm>

#include "ttw/error.hh"

namespace ttw {

size_t state_index(const Dbta& a, const std::string& state) {
    auto it = std::find(a.states.begin(), a.states.end(), state);
    if (it == a.states.end()) throw ValidationError("unknown lookahead state '" + state + "'");
    return static_cast<size_t>(it - a.states.begin());
}

namespace {

void validate_entries(const Dbta& a) {
    if (a.states.empty()) throw ValidationError("lookahead automaton has no states");
    for (const auto& s : a.states) RankedAlphabet::validate_name(s);
    for (const auto& [key, to] : a.delta) {
        const auto& [letter, kids] = key;
        if (!a.alphabet.has(letter))
            throw ValidationError("lookahead transition on unknown letter '" + letter + "'");
        if (a.alphabet.arity(letter) != static_cast<int>(kids.size()))
            throw ValidationError("lookahead transition arity mismatch at letter '" + letter + "'");
        for (const auto& s : kids) state_index(a, s);
        state_index(a, to);
    }
}

// enumerate state vectors of length k in lexicographic declaration order
template <typename F>
void for_each_vector(const std::vector<std::string>& states, size_t k, F&& f) {
    std::vector<std::string> v(k);
    auto go = [&](auto&& self, size_t i) -> void {
        if (i == k) {
            f(v);
            return;
        }
        for (const auto& s : states) {
            v[i] = s;
            self(self, i + 1);
        }
    };
    go(go, 0);
}

}  // namespace

std::vector<MissingEntry> check_total(const Dbta& a) {
    validate_entries(a);
    std::vector<MissingEntry> missing;
    for (const auto& [letter, arity] : a.alphabet.letters()) {
        for_each_vector(a.states, static_cast<size_t>(arity), [&](const std::vector<std::string>& v) {
            if (!a.delta.count({letter, v})) missing.push_back({letter, v});
        });
    }
    return missing;
}

void ensure_total(const Dbta& a) {
    auto missing = check_total(a);
    if (missing.empty()) return;
    std::string msg = "lookahead automaton is not total; missing:";
    for (size_t i = 0; i < missing.size() && i < 5; ++i) {
        msg += " " + missing[i].letter + "(";
        for (size_t j = 0; j < missing[i].child_states.size(); ++j) {
            if (j) msg += ",";
            msg += missing[i].child_states[j];
        }
        msg += ")";
    }
    if (missing.size() > 5) msg += " ...";
    throw ValidationError(msg);
}

std::string run_dbta(const Dbta& a, const Tree& t) {
    std::vector<std::string> kid_states;
    kid_states.reserve(t.children.size());
    for (const auto& c : t.children) kid_states.push_back(run_dbta(a, c));
    auto it = a.delta.find({t.label, kid_states});
    if (it == a.delta.end())
        throw ValidationError("lookahead automaton has no transition for letter '" + t.label +
                              "' (automaton not total?)");
    return it->second;
}

std::vector<size_t> annotate_states(const Dbta& a, const TreeIndex& idx) {
    std::vector<size_t> result(idx.size());
    // nodes are in preorder, so children have larger ids: walk backwards
    for (size_t i = idx.size(); i > 0; --i) {
        size_t id = i - 1;
        const auto& n = idx[id];
        std::vector<std::string> kid_states;
        kid_states.reserve(n.children.size());
        for (size_t c : n.children) kid_states.push_back(a.states[result[c]]);
        auto it = a.delta.find({n.label, kid_states});
        if (it == a.delta.end())
            throw ValidationError("lookahead automaton has no transition for letter '" + n.label +
                                  "' (automaton not total?)");
        result[id] = state_index(a, it->second);
    }
    return result;
}

}  // namespace ttw
