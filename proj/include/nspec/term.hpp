#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nspec {

enum class SymbolKind { Variable, Constructor, Operation };

struct Symbol {
  std::string name;
  std::size_t arity = 0;
  SymbolKind kind = SymbolKind::Constructor;

  friend bool operator==(const Symbol&, const Symbol&) = default;
};

/// Immutable first-order term. Copies share structure.
class Term {
 public:
  static Term variable(std::string name);
  static Term constructor(std::string name, std::vector<Term> args = {});
  static Term operation(std::string name, std::vector<Term> args = {});
  static Term make(SymbolKind kind, std::string name, std::vector<Term> args);

  SymbolKind kind() const;
  const std::string& name() const;
  std::span<const Term> args() const;
  std::size_t arity() const { return args().size(); }
  /// 0-based argument access.
  const Term& arg(std::size_t i) const { return args()[i]; }

  bool is_variable() const { return kind() == SymbolKind::Variable; }
  bool is_constructor_rooted() const { return kind() == SymbolKind::Constructor; }
  bool is_operation_rooted() const { return kind() == SymbolKind::Operation; }

  std::size_t hash() const;
  /// Number of symbol occurrences.
  std::size_t size() const;

  std::string to_string() const;

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

/// Path of 1-based argument indices; the empty path is the root position.
class Position {
 public:
  Position() = default;
  explicit Position(std::vector<std::size_t> path);
  static Position root() { return {}; }

  const std::vector<std::size_t>& path() const { return path_; }
  bool is_root() const { return path_.empty(); }
  std::size_t depth() const { return path_.size(); }

  Position child(std::size_t index) const;
  /// this.other
  Position concat(const Position& other) const;
  bool is_prefix_of(const Position& other) const;
  bool disjoint(const Position& other) const;

  std::string to_string() const;

  friend bool operator==(const Position&, const Position&) = default;
  friend auto operator<=>(const Position&, const Position&) = default;

 private:
  std::vector<std::size_t> path_;
};

Term subterm_at(const Term& t, const Position& p);
Term replace_at(const Term& t, const Position& p, const Term& replacement);
bool valid_position(const Term& t, const Position& p);

/// All positions of t in pre-order (root first, then arguments left to right).
std::vector<Position> positions(const Term& t);

/// Distinct variables in left-to-right order of first occurrence.
std::vector<std::string> variables(const Term& t);
void collect_variables(const Term& t, std::vector<std::string>& out);
bool occurs(const std::string& var, const Term& t);

bool is_linear(const Term& t);
bool is_ground(const Term& t);
/// No operation symbol anywhere (variables allowed).
bool is_constructor_term(const Term& t);
/// f(d1,...,dn) with f an operation and every di a constructor term.
bool is_pattern(const Term& t);
bool is_linear_pattern(const Term& t);

/// Finite map from variable names to terms. Identity bindings are never
/// stored. Application is simultaneous.
class Substitution {
 public:
  using Map = std::map<std::string, Term>;

  Substitution() = default;
  /// Stores the bindings as given, dropping x -> x.
  explicit Substitution(Map bindings);
  /// Applies the bindings to their own ranges until nothing changes so the
  /// result is idempotent. Throws std::invalid_argument on a cyclic binding.
  static Substitution normalized(Map bindings);
  static Substitution single(const std::string& var, Term t);

  Term apply(const Term& t) const;
  const Term* lookup(const std::string& var) const;
  bool binds(const std::string& var) const { return bindings_.count(var) != 0; }

  const Map& bindings() const { return bindings_; }
  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  std::vector<std::string> domain() const;

  Substitution restrict_to(const std::vector<std::string>& vars) const;
  bool is_idempotent() const;

  /// "{X -> 0, N -> add(0,0)}"; "{}" for the identity.
  std::string to_string() const;

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  Map bindings_;
};

/// r with r(t) = outer(inner(t)).
Substitution compose(const Substitution& outer, const Substitution& inner);

/// Most general unifier; variable-variable pairs bind the left variable.
std::optional<Substitution> unify(const Term& s, const Term& t);
/// Simultaneous unification of several equations.
std::optional<Substitution> unify_all(std::vector<std::pair<Term, Term>> equations);

/// theta with theta(pattern) == t. Variables of t are treated as constants.
std::optional<Substitution> match(const Term& pattern, const Term& t);
bool is_instance_of(const Term& t, const Term& pattern);
bool is_variant(const Term& a, const Term& b);

struct LUResult {
  enum class Tag { Succ, Fail, Demand };
  Tag tag = Tag::Fail;
  Substitution subst;
  std::vector<Position> demanded;

  bool succeeded() const { return tag == Tag::Succ; }
  bool failed() const { return tag == Tag::Fail; }
  bool suspended() const { return tag == Tag::Demand; }
};

/// Linear unification of a linear pattern f(d...) against a goal f(t...)
/// sharing no variables with it. A clash anywhere yields Fail; otherwise
/// every operation-rooted goal subterm met by a pattern constructor is
/// demanded; otherwise the collected bindings are returned.
LUResult linear_unify(const Term& pattern, const Term& goal);

/// Fresh variable supply for one derivation. Names are base_k where k is a
/// monotonic counter; names listed as reserved are skipped.
class FreshVars {
 public:
  explicit FreshVars(std::size_t seed = 0) : counter_(seed) {}

  void reserve(const std::string& name) { reserved_.insert(name); }
  void reserve_all(const Term& t);

  std::string fresh_name(std::string_view base);
  Term fresh(std::string_view base) { return Term::variable(fresh_name(base)); }
  /// Renaming of every variable of t to a fresh one.
  Substitution renaming_for(const std::vector<std::string>& vars);

 private:
  std::size_t counter_;
  std::set<std::string> reserved_;
};

/// Strips a trailing _digits suffix, so repeated renaming keeps names short.
std::string base_name(std::string_view var);

/// Renames the variables of t to V1, V2, ... in order of first occurrence.
Term canonical_variant(const Term& t);

}  // namespace nspec
