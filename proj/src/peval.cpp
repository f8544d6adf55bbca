#include "nspec/peval.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "nspec/error.hpp"

namespace nspec {

// ---------------------------------------------------------------------------
// Embedding and generalization

bool embeds(const Term& s, const Term& t) {
  if (s.is_variable() && t.is_variable()) return true;
  if (embeds_coupled(s, t)) return true;
  if (!t.is_variable()) {
    for (const auto& a : t.args()) {
      if (embeds(s, a)) return true;
    }
  }
  return false;
}

bool embeds_coupled(const Term& s, const Term& t) {
  if (s.is_variable() || t.is_variable()) return s.is_variable() && t.is_variable();
  if (s.name() != t.name() || s.arity() != t.arity()) return false;
  for (std::size_t i = 0; i < s.arity(); ++i) {
    if (!embeds(s.arg(i), t.arg(i))) return false;
  }
  return true;
}

namespace {

class AntiUnifier {
 public:
  AntiUnifier(const Term& a, const Term& b) {
    fresh_.reserve_all(a);
    fresh_.reserve_all(b);
  }

  Term run(const Term& a, const Term& b) {
    if (a == b) return a;
    if (!a.is_variable() && !b.is_variable() && a.kind() == b.kind() && a.name() == b.name() &&
        a.arity() == b.arity()) {
      std::vector<Term> args;
      for (std::size_t i = 0; i < a.arity(); ++i) args.push_back(run(a.arg(i), b.arg(i)));
      return Term::make(a.kind(), a.name(), std::move(args));
    }
    auto key = std::make_pair(a, b);
    if (auto it = memo_.find(key); it != memo_.end()) return Term::variable(it->second);
    std::string v = fresh_.fresh_name("G");
    memo_.emplace(key, v);
    left_.emplace(v, a);
    right_.emplace(v, b);
    return Term::variable(v);
  }

  Substitution::Map left_, right_;

 private:
  FreshVars fresh_;
  std::map<std::pair<Term, Term>, std::string> memo_;
};

}  // namespace

Generalization msg(const Term& t1, const Term& t2) {
  AntiUnifier au(t1, t2);
  Term g = au.run(t1, t2);
  return {g, Substitution(au.left_), Substitution(au.right_)};
}

// ---------------------------------------------------------------------------
// Unfolding

namespace detail {

NarrowingTree unfold_with(const Term& s, const Stepper& stepper, const UnfoldPolicy& policy, FreshVars& fresh) {
  if (policy.depth == 0) throw std::invalid_argument("unfold: depth must be at least 1");
  if (!s.is_operation_rooted()) {
    throw std::invalid_argument("unfold: " + s.to_string() + " is not operation-rooted");
  }
  fresh.reserve_all(s);
  NarrowingTree tree;
  tree.add_root(s);
  std::vector<std::size_t> stack{0};
  // Depth-first, children in step order.
  while (!stack.empty()) {
    std::size_t id = stack.back();
    stack.pop_back();
    const Term term = tree.nodes[id].term;
    const std::size_t depth = tree.nodes[id].depth;
    auto& status = tree.nodes[id].status;
    if (!term.is_operation_rooted()) {
      status = NodeStatus::Success;
      continue;
    }
    if (depth >= policy.depth) {
      status = NodeStatus::Incomplete;
      continue;
    }
    if (policy.whistle && depth >= 1) {
      bool blow = false;
      for (auto a = tree.nodes[id].parent; a && tree.nodes[*a].depth >= 1; a = tree.nodes[*a].parent) {
        if (embeds(tree.nodes[*a].term, term)) {
          blow = true;
          break;
        }
      }
      if (blow) {
        status = NodeStatus::Incomplete;
        continue;
      }
    }
    auto steps = stepper(term, fresh);
    if (steps.empty()) {
      tree.nodes[id].status = NodeStatus::Failure;
      continue;
    }
    if (policy.determinate && depth >= 1 && steps.size() > 1) {
      tree.nodes[id].status = NodeStatus::Incomplete;
      continue;
    }
    tree.nodes[id].status = NodeStatus::Expanded;
    std::vector<std::size_t> kids;
    for (auto& st : steps) kids.push_back(tree.add_child(id, std::move(st)));
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return tree;
}

}  // namespace detail

NarrowingTree unfold(const Term& s, const TreeTable& trees, const UnfoldPolicy& policy, FreshVars& fresh) {
  return detail::unfold_with(
      s, [&](const Term& t, FreshVars& f) { return needed_steps(t, trees, f); }, policy, fresh);
}

NarrowingTree unfold(const Term& s, const Program& p, const UnfoldPolicy& policy) {
  TreeTable trees = require_trees(p);
  FreshVars fresh(policy.seed);
  return unfold(s, trees, policy, fresh);
}

std::vector<Resultant> resultants(const NarrowingTree& tree) {
  std::vector<Resultant> out;
  if (tree.nodes.empty()) return out;
  // Preorder so that resultants follow the tree's left-to-right order.
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    std::size_t id = stack.back();
    stack.pop_back();
    const auto& node = tree.nodes[id];
    if (node.children.empty()) {
      if (node.depth >= 1 && node.status != NodeStatus::Failure) {
        Resultant r{tree.path_substitution(id).apply(tree.root().term), node.term, tree.root().term, {}};
        for (const auto* arc : tree.path_to(id)) r.path.push_back(arc->step);
        out.push_back(std::move(r));
      }
      continue;
    }
    for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Closedness

namespace {

bool constructor_like(const Term& t) {
  return t.is_constructor_rooted() || (t.is_operation_rooted() && is_primitive(t.name()));
}

bool images_closed(const std::vector<Term>& S, const Term& s, const Substitution& theta) {
  for (const auto& v : variables(s)) {
    if (const Term* img = theta.lookup(v); img && !closed(S, *img)) return false;
  }
  return true;
}

bool instance_closed(const std::vector<Term>& S, const Term& t) {
  for (const auto& s : S) {
    if (auto theta = match(s, t); theta && images_closed(S, s, *theta)) return true;
  }
  return false;
}

void append_product(std::vector<ClosureSet>& acc, const std::vector<ClosureSet>& more, std::size_t limit) {
  std::vector<ClosureSet> out;
  for (const auto& a : acc) {
    for (const auto& b : more) {
      if (out.size() >= limit) break;
      ClosureSet c = a;
      c.insert(c.end(), b.begin(), b.end());
      out.push_back(std::move(c));
    }
  }
  acc = std::move(out);
}

std::vector<ClosureSet> sets_at(const std::vector<Term>& S, const Term& t, const Position& pos, std::size_t limit);

std::vector<ClosureSet> args_sets(const std::vector<Term>& S, const Term& t, const Position& pos,
                                  std::size_t limit) {
  std::vector<ClosureSet> acc{ClosureSet{}};
  for (std::size_t i = 0; i < t.arity() && !acc.empty(); ++i) {
    append_product(acc, sets_at(S, t.arg(i), pos.child(i + 1), limit), limit);
  }
  return acc;
}

std::vector<ClosureSet> instance_sets(const std::vector<Term>& S, const Term& t, const Position& pos,
                                      std::size_t limit) {
  std::vector<ClosureSet> out;
  for (const auto& s : S) {
    auto theta = match(s, t);
    if (!theta) continue;
    std::vector<ClosureSet> acc{ClosureSet{{pos, s}}};
    std::set<std::string> done;
    for (const auto& q : positions(s)) {
      Term sub = subterm_at(s, q);
      if (!sub.is_variable() || !done.insert(sub.name()).second) continue;
      append_product(acc, sets_at(S, *theta->lookup(sub.name()), pos.concat(q), limit), limit);
      if (acc.empty()) break;
    }
    for (auto& c : acc) {
      if (out.size() >= limit) break;
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<ClosureSet> sets_at(const std::vector<Term>& S, const Term& t, const Position& pos, std::size_t limit) {
  if (t.is_variable()) return {ClosureSet{}};
  if (t.is_constructor_rooted()) return args_sets(S, t, pos, limit);
  auto out = instance_sets(S, t, pos, limit);
  if (is_primitive(t.name())) {
    auto dec = args_sets(S, t, pos, limit);
    dec.insert(dec.end(), out.begin(), out.end());
    out = std::move(dec);
    if (out.size() > limit) out.resize(limit);
  }
  return out;
}

void collect_uncovered(const std::vector<Term>& S, const Term& t, std::vector<Term>& out) {
  if (t.is_variable() || closed(S, t)) return;
  if (constructor_like(t)) {
    for (const auto& a : t.args()) collect_uncovered(S, a, out);
    return;
  }
  for (const auto& s : S) {
    if (auto theta = match(s, t)) {
      for (const auto& v : variables(s)) collect_uncovered(S, *theta->lookup(v), out);
      return;
    }
  }
  if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
}

}  // namespace

bool closed(const std::vector<Term>& S, const Term& t) {
  if (t.is_variable()) return true;
  if (constructor_like(t)) {
    bool all = std::all_of(t.args().begin(), t.args().end(), [&](const Term& a) { return closed(S, a); });
    if (all || t.is_constructor_rooted()) return all;
  }
  return instance_closed(S, t);
}

std::vector<ClosureSet> closure_sets(const std::vector<Term>& S, const Term& t, std::size_t limit) {
  auto out = sets_at(S, t, Position::root(), limit);
  for (auto& c : out) std::sort(c.begin(), c.end());
  return out;
}

std::vector<Term> uncovered_calls(const std::vector<Term>& S, const Term& t) {
  std::vector<Term> out;
  collect_uncovered(S, t, out);
  return out;
}

// ---------------------------------------------------------------------------
// Renaming

const Term* Renaming::find(const Term& call) const {
  for (const auto& [s, pat] : entries_) {
    if (s == call) return &pat;
  }
  for (const auto& [s, pat] : entries_) {
    if (is_variant(s, call)) return &pat;
  }
  return nullptr;
}

std::vector<Term> Renaming::patterns() const {
  std::vector<Term> out;
  for (const auto& e : entries_) out.push_back(e.second);
  return out;
}

namespace {

void collect_symbols(const Term& t, std::set<std::string>& out) {
  if (t.is_variable()) return;
  out.insert(t.name());
  for (const auto& a : t.args()) collect_symbols(a, out);
}

}  // namespace

Renaming independent_renaming(const std::vector<Term>& S, const Signature& signature) {
  std::set<std::string> used;
  for (const auto& sym : signature.symbols()) used.insert(sym.name);
  for (const auto& s : S) collect_symbols(s, used);
  Renaming rho;
  std::size_t k = 0;
  for (const auto& s : S) {
    if (!s.is_operation_rooted()) {
      throw std::invalid_argument("independent_renaming: " + s.to_string() + " is not operation-rooted");
    }
    std::string name;
    do {
      name = s.name() + "_pe" + std::to_string(k++);
    } while (used.count(name));
    used.insert(name);
    std::vector<Term> args;
    for (const auto& v : variables(s)) args.push_back(Term::variable(v));
    rho.add(s, Term::operation(name, std::move(args)));
  }
  return rho;
}

namespace {

/// Index into S of the most specific element subsuming t.
std::optional<std::size_t> best_cover(const std::vector<Term>& S, const Term& t) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (!is_instance_of(t, S[i])) continue;
    if (!best || (is_instance_of(S[i], S[*best]) && !is_variant(S[i], S[*best]))) best = i;
  }
  return best;
}

}  // namespace

Term rename_term(const Renaming& rho, const std::vector<Term>& S, const Term& t) {
  if (t.is_variable()) return t;
  auto recurse_args = [&]() {
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(rename_term(rho, S, a));
    return Term::make(t.kind(), t.name(), std::move(args));
  };
  if (t.is_constructor_rooted()) return recurse_args();
  auto best = best_cover(S, t);
  if (!best) return is_primitive(t.name()) ? recurse_args() : t;
  const Term& s = S[*best];
  const Term* pattern = rho.find(s);
  if (!pattern) return is_primitive(t.name()) ? recurse_args() : t;
  auto theta = *match(s, t);
  Substitution::Map renamed;
  for (const auto& [v, img] : theta.bindings()) renamed.emplace(v, rename_term(rho, S, img));
  return Substitution(std::move(renamed)).apply(*pattern);
}

// ---------------------------------------------------------------------------
// Assembly and control

namespace detail {

namespace {

void referenced_operations(const Term& t, std::set<std::string>& out) {
  if (t.is_variable()) return;
  if (t.is_operation_rooted()) out.insert(t.name());
  for (const auto& a : t.args()) referenced_operations(a, out);
}

}  // namespace

PEResult partial_evaluate_with(const Program& p, const std::vector<Term>& S, const Stepper& stepper,
                               const UnfoldPolicy& policy) {
  if (S.empty()) throw std::invalid_argument("partial evaluation needs at least one call");
  for (const auto& s : S) {
    if (!s.is_operation_rooted()) throw std::invalid_argument("call " + s.to_string() + " is not operation-rooted");
    p.signature().check_term(s);
  }
  PEResult result;
  result.calls = S;
  result.renaming = independent_renaming(S, p.signature());
  FreshVars fresh(policy.seed);
  for (const auto& s : S) fresh.reserve_all(s);

  std::vector<Rule> rules;
  for (const auto& s : S) {
    auto tree = unfold_with(s, stepper, policy, fresh);
    for (auto& r : resultants(tree)) {
      auto theta = match(s, r.lhs);
      if (!theta) throw std::logic_error("resultant " + r.lhs.to_string() + " is not an instance of its call");
      rules.push_back({theta->apply(*result.renaming.find(s)), rename_term(result.renaming, S, r.rhs), ""});
      result.resultants.push_back(std::move(r));
    }
  }

  Signature sig;
  for (const auto& c : p.signature().constructors()) sig.add(c);
  for (const auto& [s, pat] : result.renaming.entries()) sig.add({pat.name(), pat.arity(), SymbolKind::Operation});
  std::set<std::string> referenced;
  for (const auto& r : rules) referenced_operations(r.rhs, referenced);
  const bool strict = p.has_strict_equality();
  for (const auto& op : p.signature().operations()) {
    if (strict && is_primitive(op.name)) continue;
    if (referenced.count(op.name)) sig.add(op);
  }
  result.program = Program(std::move(sig), std::move(rules));
  if (strict) result.program = add_strict_equality(result.program);

  const auto patterns = result.renaming.patterns();
  std::vector<Term> uncovered;
  for (const auto& r : result.program.rules()) {
    for (auto& u : uncovered_calls(patterns, r.rhs)) {
      if (std::find(uncovered.begin(), uncovered.end(), u) == uncovered.end()) uncovered.push_back(u);
    }
  }
  result.report.closed = uncovered.empty();
  for (const auto& u : uncovered) result.report.uncovered.push_back(u.to_string());
  result.report.iterations = 1;
  return result;
}

namespace {

void calls_in(const Term& t, std::vector<Term>& out) {
  if (t.is_variable()) return;
  if (constructor_like(t)) {
    for (const auto& a : t.args()) calls_in(a, out);
    return;
  }
  out.push_back(t);
}

bool has_variant(const std::vector<Term>& S, const Term& t) {
  return std::any_of(S.begin(), S.end(), [&](const Term& s) { return is_variant(s, t); });
}

/// Adds what is needed to cover `c`; true if S changed.
bool abstract_call(std::vector<Term>& S, const Term& c, std::vector<Term>& work) {
  if (has_variant(S, c)) return false;
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (!embeds_coupled(S[i], c)) continue;
    auto g = msg(S[i], c);
    for (const auto& [v, img] : g.right.bindings()) calls_in(img, work);
    if (is_variant(g.term, S[i]) || has_variant(S, g.term)) return false;
    S.push_back(g.term);
    return true;
  }
  S.push_back(c);
  return true;
}

}  // namespace

PEResult pe_control_with(const Program& p, const std::vector<Term>& roots, const Stepper& stepper,
                         const UnfoldPolicy& policy) {
  if (roots.empty()) throw std::invalid_argument("partial evaluation needs at least one call");
  std::vector<Term> S;
  for (const auto& r : roots) {
    if (!has_variant(S, r)) S.push_back(r);
  }
  PEResult result;
  for (std::size_t iter = 1; iter <= policy.max_iters; ++iter) {
    result = partial_evaluate_with(p, S, stepper, policy);
    result.report.iterations = iter;
    std::vector<Term> work;
    for (const auto& r : result.resultants) calls_in(r.rhs, work);
    bool changed = false;
    for (std::size_t i = 0; i < work.size(); ++i) {
      Term c = work[i];  // work may grow
      changed = abstract_call(S, c, work) || changed;
    }
    if (!changed) {
      if (!result.report.closed) {
        throw ControlFailure("specialized program is not closed", result.report.uncovered);
      }
      return result;
    }
  }
  throw ControlFailure("control loop did not converge within " + std::to_string(policy.max_iters) + " iterations",
                       result.report.uncovered.empty() ? std::vector<std::string>{} : result.report.uncovered);
}

}  // namespace detail

namespace {

detail::Stepper needed_stepper(const TreeTable& trees) {
  return [&trees](const Term& t, FreshVars& f) { return needed_steps(t, trees, f); };
}

}  // namespace

PEResult partial_evaluate(const Program& p, const std::vector<Term>& S, const UnfoldPolicy& policy) {
  TreeTable trees = require_trees(p);
  return detail::partial_evaluate_with(p, S, needed_stepper(trees), policy);
}

PEResult pe_control(const Program& p, const std::vector<Term>& roots, const UnfoldPolicy& policy) {
  TreeTable trees = require_trees(p);
  return detail::pe_control_with(p, roots, needed_stepper(trees), policy);
}

}  // namespace nspec
