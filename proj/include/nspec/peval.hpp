#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "nspec/narrowing.hpp"

namespace nspec {

struct UnfoldPolicy {
  std::size_t depth = 2;
  bool whistle = true;
  /// Past the first step, only expand nodes with exactly one step.
  bool determinate = true;
  std::size_t max_iters = 32;
  std::size_t seed = 0;
};

/// sigma(call) -> rhs, read off one root-to-leaf derivation.
struct Resultant {
  Term lhs;
  Term rhs;
  Term call;
  std::vector<Step> path;
};

/// Finite needed-narrowing tree for the operation-rooted call s. Variable and
/// constructor-rooted nodes are never expanded. Throws std::invalid_argument
/// on depth 0 or a call that is not operation-rooted.
NarrowingTree unfold(const Term& s, const TreeTable& trees, const UnfoldPolicy& policy, FreshVars& fresh);
NarrowingTree unfold(const Term& s, const Program& p, const UnfoldPolicy& policy);

/// One resultant per leaf reached by at least one step; failures dropped.
std::vector<Resultant> resultants(const NarrowingTree& tree);

/// s homeomorphically embeds into t (variables embed only variables).
bool embeds(const Term& s, const Term& t);
/// As embeds, but the roots must couple.
bool embeds_coupled(const Term& s, const Term& t);

struct Generalization {
  Term term;
  Substitution left;
  Substitution right;
};
/// Most specific generalization (anti-unification).
Generalization msg(const Term& t1, const Term& t2);

/// Set of (position, covering call) pairs from one derivation of closed().
using ClosureSet = std::vector<std::pair<Position, Term>>;

bool closed(const std::vector<Term>& S, const Term& t);
/// Every derivation of closed(S, t); empty iff t is not S-closed.
std::vector<ClosureSet> closure_sets(const std::vector<Term>& S, const Term& t, std::size_t limit = 1024);
/// Operation-rooted subterms that keep t from being S-closed.
std::vector<Term> uncovered_calls(const std::vector<Term>& S, const Term& t);

class Renaming {
 public:
  void add(Term call, Term pattern) { entries_.emplace_back(std::move(call), std::move(pattern)); }
  /// rho(s) for an element of S (compared up to variable names).
  const Term* find(const Term& call) const;
  const std::vector<std::pair<Term, Term>>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::vector<Term> patterns() const;

 private:
  std::vector<std::pair<Term, Term>> entries_;
};

/// rho(s) = root_peK(distinct vars of s), K counting over S in order; names
/// avoid the signature and every symbol occurring in S.
Renaming independent_renaming(const std::vector<Term>& S, const Signature& signature);

/// Deterministic ren_rho: most specific covering call, ties by S order.
Term rename_term(const Renaming& rho, const std::vector<Term>& S, const Term& t);

struct PEReport {
  bool closed = false;  // output rules and renamed calls are rho(S)-closed
  std::vector<std::string> uncovered;
  std::size_t iterations = 0;
};

struct PEResult {
  Program program;
  Renaming renaming;
  std::vector<Term> calls;  // S
  std::vector<Resultant> resultants;
  PEReport report;
};

/// Renamed resultants of S plus the original constructors, declarations of
/// any original operation still referenced, and strict equality when the
/// input had it. Throws ClassViolation for non-IS programs and
/// std::invalid_argument for an empty S.
PEResult partial_evaluate(const Program& p, const std::vector<Term>& S, const UnfoldPolicy& policy = {});

/// Grows S from `roots` until every call is covered. Throws ControlFailure
/// when the iteration cap is hit or the result is not closed.
PEResult pe_control(const Program& p, const std::vector<Term>& roots, const UnfoldPolicy& policy = {});

namespace detail {

using Stepper = std::function<std::vector<Step>(const Term&, FreshVars&)>;

NarrowingTree unfold_with(const Term& s, const Stepper& stepper, const UnfoldPolicy& policy, FreshVars& fresh);
PEResult partial_evaluate_with(const Program& p, const std::vector<Term>& S, const Stepper& stepper,
                               const UnfoldPolicy& policy);
PEResult pe_control_with(const Program& p, const std::vector<Term>& roots, const Stepper& stepper,
                         const UnfoldPolicy& policy);

}  // namespace detail

}  // namespace nspec
