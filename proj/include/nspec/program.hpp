#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nspec/term.hpp"

namespace nspec {

inline constexpr const char* kEqName = "eq";
inline constexpr const char* kAndName = "and";
inline constexpr const char* kTrueName = "true";

/// Ordered symbol table. Names are unique across kinds.
class Signature {
 public:
  /// Adds the symbol; re-adding an identical symbol is a no-op, a conflicting
  /// redeclaration throws ProgramError.
  void add(const Symbol& symbol);
  const Symbol* find(const std::string& name) const;
  bool contains(const std::string& name) const { return find(name) != nullptr; }

  const std::vector<Symbol>& symbols() const { return symbols_; }
  std::vector<Symbol> constructors() const;
  std::vector<Symbol> operations() const;

  /// Throws ProgramError naming the first undeclared or misused symbol.
  void check_term(const Term& t) const;

  /// Same constructors and same operations, each in the same order.
  friend bool operator==(const Signature& a, const Signature& b) {
    return a.constructors() == b.constructors() && a.operations() == b.operations();
  }

 private:
  std::vector<Symbol> symbols_;
  std::map<std::string, std::size_t> index_;
};

struct Rule {
  Term lhs;
  Term rhs;
  std::string label;

  std::string to_string() const { return lhs.to_string() + " -> " + rhs.to_string(); }
  /// Rules compare by their equations; labels are positional.
  friend bool operator==(const Rule& a, const Rule& b) { return a.lhs == b.lhs && a.rhs == b.rhs; }
};

/// A signature plus an ordered rule list. Rules are labelled R1..Rn by
/// position at construction.
class Program {
 public:
  Program() = default;
  /// Throws ProgramError when a rule mentions an undeclared symbol, has a
  /// variable or non-operation left-hand side, or an extra variable on its
  /// right-hand side.
  Program(Signature signature, std::vector<Rule> rules);

  const Signature& signature() const { return signature_; }
  const std::vector<Rule>& rules() const { return rules_; }
  std::vector<Rule> rules_for(const std::string& operation) const;
  /// Operations with at least one rule, in signature order.
  std::vector<std::string> defined_operations() const;
  /// True when eq/and carry exactly the strict-equality definition.
  bool has_strict_equality() const;

  /// Builds a term over this signature, picking the kind from the symbol table.
  Term make_term(const std::string& name, std::vector<Term> args = {}) const;

  friend bool operator==(const Program& a, const Program& b) {
    return a.signature_ == b.signature_ && a.rules_ == b.rules_;
  }

 private:
  Signature signature_;
  std::vector<Rule> rules_;
};

struct Overlap {
  std::size_t outer_rule = 0;  // index into Program::rules()
  std::size_t inner_rule = 0;
  Position position;           // position in the outer rule's lhs
  Substitution mgu;
};

struct ValidationReport {
  bool left_linear = true;
  bool constructor_based = true;
  std::vector<Overlap> overlaps;

  bool orthogonal() const { return left_linear && overlaps.empty(); }
};

ValidationReport validate(const Program& p);

/// Rules defining eq and and for the constructors of p (p's own eq/and
/// definitions, if any, are ignored).
std::vector<Rule> strict_equality_rules(const Signature& signature);

/// Adds eq/2, and/2 (and true/0 if missing) with their defining rules.
/// Idempotent. Throws ProgramError if eq or and are user-defined differently.
Program add_strict_equality(const Program& p);

/// True for eq and and, which closedness and renaming treat like constructors.
inline bool is_primitive(const std::string& name) { return name == kEqName || name == kAndName; }

}  // namespace nspec
