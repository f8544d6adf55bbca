#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nspec/program.hpp"

namespace nspec {

/// Case-analysis tree over the rules of one operation. Branch nodes split on
/// the variable at `inductive_position()`; every child pattern replaces that
/// variable with a distinct constructor applied to fresh variables. Leaves
/// hold a rule whose left-hand side is a variant of the leaf pattern.
class DefinitionalTree {
 public:
  static DefinitionalTree leaf(Term pattern, Rule rule);
  static DefinitionalTree branch(Term pattern, Position inductive, std::vector<DefinitionalTree> children);

  const Term& pattern() const { return pattern_; }
  bool is_leaf() const { return rule_.has_value(); }
  const Rule& rule() const { return *rule_; }
  const Position& inductive_position() const { return inductive_; }
  const std::vector<DefinitionalTree>& children() const { return children_; }

  /// Constructor that child `i` places at the inductive position.
  std::string child_constructor(std::size_t i) const;
  /// Child whose pattern has constructor `name` at the inductive position.
  const DefinitionalTree* child_for(const std::string& name) const;

  /// Indented text dump, one node per line.
  std::string to_text(int indent = 0) const;

 private:
  Term pattern_ = Term::variable("_");
  Position inductive_;
  std::vector<DefinitionalTree> children_;
  std::optional<Rule> rule_;
};

bool structurally_equal_modulo_variables(const DefinitionalTree& a, const DefinitionalTree& b);

using TreeTable = std::map<std::string, DefinitionalTree>;

/// Which qualifying inductive position to try first. Construction falls back
/// to the others when the first choice fails.
enum class TieBreak { Leftmost, Rightmost };

/// Definitional tree whose leaves are exactly variants of the given rules'
/// left-hand sides, or nullopt (with `diagnostic` set) when none exists.
std::optional<DefinitionalTree> build_tree(const std::string& operation, const std::vector<Rule>& rules,
                                           TieBreak tie_break = TieBreak::Leftmost,
                                           std::string* diagnostic = nullptr);

struct SequentialityReport {
  bool sequential = false;
  TreeTable trees;                     // witness per defined operation
  std::vector<std::string> failing;    // operations without a tree
  std::map<std::string, std::string> diagnostics;
};

SequentialityReport check_inductively_sequential(const Program& p, TieBreak tie_break = TieBreak::Leftmost);
inline bool is_inductively_sequential(const Program& p) { return check_inductively_sequential(p).sequential; }

/// Trees for every defined operation; throws ClassViolation naming the first
/// operation that is not inductively sequential.
TreeTable require_trees(const Program& p, TieBreak tie_break = TieBreak::Leftmost);

/// Every operation is defined by one rule f(X1..Xn) -> r or by rules that
/// differ only in one distinct constructor c(Y..) at a fixed argument.
/// The strict-equality rules are primitive and not inspected.
bool is_uniform(const Program& p);

/// Flattens nested patterns: each inner branch node of each tree becomes a
/// fresh operation named f_1, f_2, ... over the variables of its pattern.
/// Throws ClassViolation if p is not inductively sequential.
Program uniform_transform(const Program& p);

}  // namespace nspec
