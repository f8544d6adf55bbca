#pragma once

#include <string>
#include <string_view>

#include "nspec/program.hpp"

namespace nspec {

/// Parses a program file:
///
///   % comment
///   constructors 0/0 s/1 true/0 false/0 ;
///   operations leq/2 add/2 ;
///   leq(0,N) -> true ;
///
/// Identifiers starting with an uppercase letter are variables. Infix sugar
/// `A + B`, `A <= B`, `A ~ B` and `A : B` stands for add, leq, eq and cons
/// and is only accepted when the corresponding symbol is declared.
/// Throws ParseError (with line/column) or ProgramError.
Program parse_program(std::string_view text);

/// Parses a single term against a signature (same grammar as rule bodies).
Term parse_term(std::string_view text, const Signature& signature);

/// Inverse of parse_program: parse_program(print_program(p)) == p.
std::string print_program(const Program& p);

}  // namespace nspec
