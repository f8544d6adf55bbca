#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nspec/deftree.hpp"
#include "nspec/program.hpp"

namespace nspec {

/// One narrowing step t ~>(position, rule, subst) reduct.
struct Step {
  Position position;
  Rule rule;          // renamed-apart variant of a program rule
  Substitution subst; // bindings of variables of the narrowed term
  /// Needed narrowing only: phi_1 .. phi_k with subst = phi_k o ... o phi_1.
  /// Each entry is the identity or a single binding x -> c(fresh vars).
  std::vector<Substitution> canonical;
  Term reduct;
};

/// Needed narrowing steps of the operation-rooted term t guided by `tree`
/// (whose pattern must subsume t). Operation-rooted subterms at inductive
/// positions are handled with their own trees from `trees`.
std::vector<Step> nns(const Term& t, const DefinitionalTree& tree, const TreeTable& trees, FreshVars& fresh);
/// nns with the tree of t's root; empty when the root has no tree.
std::vector<Step> needed_steps(const Term& t, const TreeTable& trees, FreshVars& fresh);

/// Lazy narrowing steps of the operation-rooted term t over all rules of p,
/// in rule order, duplicates (up to renaming) removed.
std::vector<Step> lns(const Term& t, const Program& p, FreshVars& fresh);

/// t[theta(rhs)]_p where theta matches the rule's lhs against t|_p.
/// Throws std::invalid_argument when t|_p is not an instance of the lhs.
Term rewrite_step(const Term& t, const Position& p, const Rule& r);

struct Redex {
  Position position;
  Rule rule;
};

/// Outermost-needed redex of an operation-rooted term; nullopt when the
/// selection is undefined (a variable or an unmatched constructor sits at a
/// demanded position).
std::optional<Redex> outermost_needed(const Term& t, const TreeTable& trees);
std::optional<Position> outermost_needed_redex(const Term& t, const TreeTable& trees);

/// Position of the subterm a strategy works on: the root if t is
/// operation-rooted, otherwise the leftmost-outermost operation-rooted
/// subterm; nullopt for constructor terms.
std::optional<Position> narrowing_focus(const Term& t);

enum class Strategy { Needed, Lazy };

struct SearchBounds {
  std::size_t max_steps = 25;  // path length
  std::size_t max_solutions = std::numeric_limits<std::size_t>::max();
  std::size_t max_nodes = 100000;
};

enum class NodeStatus { Expanded, Success, Failure, Incomplete };
const char* to_string(NodeStatus s);

struct NarrowingTree {
  struct Node {
    Term term;
    NodeStatus status = NodeStatus::Incomplete;
    std::size_t depth = 0;
    std::optional<std::size_t> parent;
    std::optional<std::size_t> incoming;  // index into arcs
    std::vector<std::size_t> children;
  };
  struct Arc {
    std::size_t from = 0;
    std::size_t to = 0;
    Step step;
  };

  std::vector<Node> nodes;
  std::vector<Arc> arcs;

  const Node& root() const { return nodes.front(); }
  std::size_t add_root(Term t);
  std::size_t add_child(std::size_t parent, Step step);
  /// Arcs from the root to `node`, in derivation order.
  std::vector<const Arc*> path_to(std::size_t node) const;
  /// step_k o ... o step_1 along the path.
  Substitution path_substitution(std::size_t node) const;
  std::vector<std::size_t> leaves() const;
};

struct Answer {
  Substitution subst;   // restricted to the goal's variables
  Term result = Term::constructor("_");
  std::size_t steps = 0;
  bool deterministic = true;  // every node on the path had exactly one step
  std::size_t leaf = 0;
  /// Canonical rendering of (subst on every goal variable, result) with free
  /// variables renamed V1, V2, ...; equal keys mean equal up to renaming.
  std::string key;
};

struct SearchResult {
  NarrowingTree tree;
  std::vector<Answer> answers;
  bool complete = true;  // no node was left unexpanded because of a bound
};

/// Depth-first, left-to-right narrowing tree of `goal`. Nodes whose term is a
/// constructor term are successes. Throws ClassViolation for the needed
/// strategy on a program that is not inductively sequential.
SearchResult search(const Term& goal, const Program& p, Strategy strategy, const SearchBounds& bounds,
                    std::size_t seed = 0);
SearchResult search(const Term& goal, const Program& p, const TreeTable& trees, Strategy strategy,
                    const SearchBounds& bounds, std::size_t seed = 0);

/// key of Answer for an arbitrary (substitution, result) pair.
std::string answer_key(const Substitution& subst, const Term& result, const std::vector<std::string>& goal_vars);

enum class Determinism { Deterministic, NonDeterministic, Indeterminate };

Determinism deterministically_evaluable(const Term& t, const Program& p, const SearchBounds& bounds);

struct RewriteTrace {
  std::vector<Term> terms;  // starting term first
  std::vector<Redex> redexes;
  bool normal_form = false;  // ended in a constructor term
};

/// Rewrites with outermost-needed redexes until a constructor term, a stuck
/// term or the step bound.
RewriteTrace rewrite_normalize(const Term& t, const TreeTable& trees, std::size_t max_steps);

}  // namespace nspec
