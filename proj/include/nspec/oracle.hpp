#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nspec/program.hpp"

namespace nspec {

inline constexpr std::size_t kDefaultVisitCap = 100000;

/// Breadth-first search over every (position, rule) rewrite: true iff some
/// sequence of at most max_steps steps turns t into target. Gives up (false)
/// after visiting max_visited distinct terms.
bool rewrites_to(const Program& p, const Term& t, const Term& target, std::size_t max_steps,
                 std::size_t max_visited = kDefaultVisitCap);

/// All one-step rewrites of t, every position and rule.
std::vector<Term> rewrite_successors(const Program& p, const Term& t);

/// Ground constructor terms of size <= k (size = number of symbol
/// occurrences), by increasing size, duplicate-free.
class GroundEnumeration {
 public:
  GroundEnumeration(std::vector<Symbol> constructors, std::size_t k);

  std::optional<Term> next();
  void reset() { size_ = 1, index_ = 0; }
  /// All remaining terms.
  std::vector<Term> collect();

  /// Terms of exactly size n.
  const std::vector<Term>& of_size(std::size_t n);

 private:
  std::vector<Symbol> constructors_;
  std::size_t k_;
  std::size_t size_ = 1;
  std::size_t index_ = 0;
  std::map<std::size_t, std::vector<Term>> cache_;
};

/// Per-variable constructor sets inferred from how constructors and
/// operations are used in the rules and in `goal`. A variable whose sort has
/// no constructor falls back to every constructor.
std::map<std::string, std::vector<Symbol>> infer_variable_sorts(const Program& p, const Term& goal);

/// Ground constructor substitutions over Var(e), terms of size <= k, with
/// sigma(e) rewriting to true. Candidate terms respect inferred sorts.
std::vector<Substitution> ground_solutions(const Program& p, const Term& e, std::size_t k, std::size_t max_steps);
/// Same, drawing every variable from the given constructors.
std::vector<Substitution> ground_solutions(const Program& p, const Term& e, const std::vector<Symbol>& constructors,
                                           std::size_t k, std::size_t max_steps);

/// Some x in V has non-unifiable images under s1 and s2.
bool independent(const Substitution& s1, const Substitution& s2, const std::vector<std::string>& V);

}  // namespace nspec
