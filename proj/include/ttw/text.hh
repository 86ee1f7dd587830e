#ifndef TTW_TEXT_HH
#define TTW_TEXT_HH

#include <string>
#include <string_view>
#include <variant>

#include "ttw/mtt.hh"
#include "ttw/sst.hh"
#include "ttw/tdtt.hh"

namespace ttw {

/// Concrete syntax for machines. tdtt and mtt definitions are section lists
/// (`input {...} output {...} states {...} initial q; lookahead {...}
/// rules {...}`), optionally wrapped in `tdtt { ... }` / `mtt { ... }`;
/// `sst { ... }` and `regmachine { ... }` always carry their keyword.
/// Printing is canonical and round-trips through parse_machine.

std::string print_tdtt(const TopDownTT& tt);
std::string print_mtt(const MacroTT& m);
std::string print_sst(const Sst& s);
std::string print_register_machine(const RegisterMachine& m);

using AnyMachine = std::variant<TopDownTT, MacroTT, Sst, RegisterMachine>;

AnyMachine parse_machine(std::string_view text);
std::string print_machine(const AnyMachine& m);

TopDownTT parse_tdtt(std::string_view text);
MacroTT parse_mtt(std::string_view text);
Sst parse_sst(std::string_view text);
RegisterMachine parse_register_machine(std::string_view text);

}  // namespace ttw

#endif  // TTW_TEXT_HH
