#ifndef TTW_ALPHABET_HH
#define TTW_ALPHABET_HH

#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace ttw {

/// A finite set of letters, each with a fixed arity. Letters keep their
/// declaration order; that order is the tiebreaker for canonical tree
/// enumeration and for printing. Neutral letters are nullary letters that
/// the yield operation erases.
class RankedAlphabet {
  public:
    RankedAlphabet() = default;
    RankedAlphabet(std::initializer_list<std::pair<std::string, int>> letters,
                   std::initializer_list<std::string> neutral = {});

    void add_letter(const std::string& name, int arity);
    void mark_neutral(const std::string& name);

    bool has(const std::string& name) const { return index_.count(name) != 0; }
    int arity(const std::string& name) const;
    bool is_neutral(const std::string& name) const { return neutral_.count(name) != 0; }
    size_t index_of(const std::string& name) const;

    const std::vector<std::pair<std::string, int>>& letters() const { return letters_; }
    const std::set<std::string>& neutral() const { return neutral_; }
    size_t size() const { return letters_.size(); }

    std::vector<std::string> nullary_letters() const;
    std::vector<std::string> letters_of_arity(int k) const;

    /// For string codecs: the single nullary end-of-string letter of a
    /// unary-shaped alphabet (all letters of arity <= 1, exactly one nullary).
    /// Empty when the alphabet is not unary-shaped.
    std::optional<std::string> end_marker() const;
    /// The arity-1 letters, i.e. the string symbols of a unary-shaped alphabet.
    std::vector<std::string> unary_letters() const { return letters_of_arity(1); }

    /// Equality ignores declaration order; it compares the name->arity map
    /// and the neutral set.
    bool operator==(const RankedAlphabet& other) const;
    bool operator!=(const RankedAlphabet& other) const { return !(*this == other); }

    /// Letter/state naming rules shared by the whole workbench. Rejects
    /// names that cannot survive a print/parse round trip and the reserved
    /// shapes x<digits> (parameters), t<digits> (rule child variables),
    /// "_" (lookahead wildcard) and "undef".
    static void validate_name(const std::string& name);

  private:
    std::vector<std::pair<std::string, int>> letters_;
    std::map<std::string, size_t> index_;
    std::set<std::string> neutral_;
};

}  // namespace ttw

#endif  // TTW_ALPHABET_HH
