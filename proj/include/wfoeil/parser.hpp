#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "wfoeil/formula.hpp"
#include "wfoeil/system.hpp"

namespace wfoeil {

// System files (.wcb):
//   wcb 1
//   semiring natural
//   type master { port p_m weight 2  lts { states s0 s1 initial s0 transition s0 p_m s1 } }
//   instances { master = 2 }
ParametricSystem parse_system(std::string_view text);
std::string print_system(const ParametricSystem& system);

// Parses, then checks the requested layer and the well-formedness rules; the first
// problem is thrown as a ParseError pointing at the offending subformula.
FormulaPtr parse_formula(std::string_view text, const ParametricSystem& system,
                         Layer layer = Layer::wfoeil);
// Syntax and name resolution only.
FormulaPtr parse_formula_unchecked(std::string_view text, const ParametricSystem& system);

// Canonical text that parses back to a structurally equal formula.
std::string print_formula(const Formula& f, const ParametricSystem& system);

// Words: `{master.p_m(1), slave.p_s(1)} {master.p_m(2)}`; `eps` is the empty word.
Interaction parse_interaction(std::string_view text, const SystemView& view);
Word parse_word(std::string_view text, const SystemView& view);
// One word per non-blank line; `#` starts a comment.
std::vector<Word> parse_words(std::string_view text, const SystemView& view);
// Interactions separated by whitespace or newlines.
std::vector<Interaction> parse_alphabet(std::string_view text, const SystemView& view);

// Blanks an optional leading `<keyword> 1` header line, keeping source positions;
// ParseError on another version.
std::string strip_header(std::string_view text, std::string_view keyword);

// Parses `t1=n1,t2=n2` against the system's type names.
InstanceMap parse_instance_map(std::string_view text, const ParametricSystem& system);

}  // namespace wfoeil
