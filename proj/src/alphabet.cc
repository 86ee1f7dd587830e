#include "ttw/alphabet.hh"

#include <cctype>

#include "ttw/error.hh"

namespace ttw {

namespace {

bool is_reserved_shape(const std::string& name) {
    if (name == "_" || name == "undef") return true;
    if (name.size() >= 2 && (name[0] == 'x' || name[0] == 't')) {
        bool digits = true;
        for (size_t i = 1; i < name.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(name[i]))) { digits = false; break; }
        if (digits) return true;
    }
    return false;
}

}  // namespace

void RankedAlphabet::validate_name(const std::string& name) {
    if (name.empty()) throw ValidationError("empty letter name");
    static const std::string forbidden = "(),<>|.{};=:'\"#";
    for (char c : name) {
        if (std::isspace(static_cast<unsigned char>(c)))
            throw ValidationError("letter name contains whitespace: '" + name + "'");
        if (forbidden.find(c) != std::string::npos)
            throw ValidationError("letter name contains reserved character '" +
                                  std::string(1, c) + "': '" + name + "'");
    }
    if (is_reserved_shape(name))
        throw ValidationError("name '" + name + "' is reserved");
}

RankedAlphabet::RankedAlphabet(std::initializer_list<std::pair<std::string, int>> letters,
                               std::initializer_list<std::string> neutral) {
    for (const auto& [name, arity] : letters) add_letter(name, arity);
    for (const auto& name : neutral) mark_neutral(name);
}

void RankedAlphabet::add_letter(const std::string& name, int arity) {
    validate_name(name);
    if (arity < 0) throw ValidationError("negative arity for letter '" + name + "'");
    if (has(name)) throw ValidationError("duplicate letter '" + name + "'");
    index_.emplace(name, letters_.size());
    letters_.emplace_back(name, arity);
}

void RankedAlphabet::mark_neutral(const std::string& name) {
    if (!has(name)) throw ValidationError("neutral letter '" + name + "' not declared");
    if (arity(name) != 0)
        throw ValidationError("neutral letter '" + name + "' must be nullary");
    neutral_.insert(name);
}

int RankedAlphabet::arity(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ValidationError("unknown letter '" + name + "'");
    return letters_[it->second].second;
}

size_t RankedAlphabet::index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ValidationError("unknown letter '" + name + "'");
    return it->second;
}

std::vector<std::string> RankedAlphabet::nullary_letters() const { return letters_of_arity(0); }

std::vector<std::string> RankedAlphabet::letters_of_arity(int k) const {
    std::vector<std::string> out;
    for (const auto& [name, arity] : letters_)
        if (arity == k) out.push_back(name);
    return out;
}

std::optional<std::string> RankedAlphabet::end_marker() const {
    std::optional<std::string> marker;
    for (const auto& [name, arity] : letters_) {
        if (arity > 1) return std::nullopt;
        if (arity == 0) {
            if (marker) return std::nullopt;  // more than one candidate
            marker = name;
        }
    }
    return marker;
}

bool RankedAlphabet::operator==(const RankedAlphabet& other) const {
    if (letters_.size() != other.letters_.size()) return false;
    for (const auto& [name, arity] : letters_) {
        if (!other.has(name) || other.arity(name) != arity) return false;
    }
    return neutral_ == other.neutral_;
}

}  // namespace ttw
