#include "nspec/narrowing.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "nspec/error.hpp"

namespace nspec {

namespace {

Rule fresh_variant(const Rule& r, FreshVars& fresh) {
  auto ren = fresh.renaming_for(variables(r.lhs));
  return {ren.apply(r.lhs), ren.apply(r.rhs), r.label};
}

Substitution compose_list(const std::vector<Substitution>& phis) {
  Substitution acc;
  for (const auto& phi : phis) acc = compose(phi, acc);
  return acc;
}

struct PartialStep {
  Position position;
  Rule rule;
  std::vector<Substitution> phis;
};

void nns_rec(const Term& t, const DefinitionalTree& node, const TreeTable& trees, FreshVars& fresh,
             std::vector<PartialStep>& out) {
  if (node.is_leaf()) {
    out.push_back({Position::root(), fresh_variant(node.rule(), fresh), {Substitution{}}});
    return;
  }
  const Position& o = node.inductive_position();
  const Term sub = subterm_at(t, o);
  switch (sub.kind()) {
    case SymbolKind::Variable:
      for (const auto& child : node.children()) {
        Term shape = subterm_at(child.pattern(), o);
        std::vector<Term> args;
        for (const auto& a : shape.args()) args.push_back(fresh.fresh(a.name()));
        auto tau = Substitution::single(sub.name(), Term::constructor(shape.name(), std::move(args)));
        std::vector<PartialStep> inner;
        nns_rec(tau.apply(t), child, trees, fresh, inner);
        for (auto& s : inner) {
          s.phis.insert(s.phis.begin(), tau);
          out.push_back(std::move(s));
        }
      }
      break;
    case SymbolKind::Constructor:
      if (const auto* child = node.child_for(sub.name())) {
        std::vector<PartialStep> inner;
        nns_rec(t, *child, trees, fresh, inner);
        for (auto& s : inner) {
          s.phis.insert(s.phis.begin(), Substitution{});
          out.push_back(std::move(s));
        }
      }
      break;
    case SymbolKind::Operation:
      if (auto it = trees.find(sub.name()); it != trees.end()) {
        std::vector<PartialStep> inner;
        nns_rec(sub, it->second, trees, fresh, inner);
        for (auto& s : inner) {
          s.position = o.concat(s.position);
          s.phis.insert(s.phis.begin(), Substitution{});
          out.push_back(std::move(s));
        }
      }
      break;
  }
}

Term instantiate_and_reduce(const Term& t, const Substitution& sigma, const Position& p, const Rule& r) {
  return rewrite_step(sigma.apply(t), p, r);
}

}  // namespace

std::vector<Step> nns(const Term& t, const DefinitionalTree& tree, const TreeTable& trees, FreshVars& fresh) {
  if (!t.is_operation_rooted() || !is_instance_of(t, tree.pattern())) {
    throw std::invalid_argument("nns: pattern " + tree.pattern().to_string() + " does not subsume " +
                                t.to_string());
  }
  fresh.reserve_all(t);
  std::vector<PartialStep> partial;
  nns_rec(t, tree, trees, fresh, partial);
  const auto vars = variables(t);
  std::vector<Step> out;
  out.reserve(partial.size());
  for (auto& ps : partial) {
    Substitution sigma = compose_list(ps.phis).restrict_to(vars);
    Term reduct = instantiate_and_reduce(t, sigma, ps.position, ps.rule);
    out.push_back({std::move(ps.position), std::move(ps.rule), std::move(sigma), std::move(ps.phis),
                   std::move(reduct)});
  }
  return out;
}

std::vector<Step> needed_steps(const Term& t, const TreeTable& trees, FreshVars& fresh) {
  if (!t.is_operation_rooted()) return {};
  auto it = trees.find(t.name());
  if (it == trees.end()) return {};
  return nns(t, it->second, trees, fresh);
}

// ---------------------------------------------------------------------------
// Lazy narrowing

namespace {

class LazyNarrower {
 public:
  LazyNarrower(const Term& t, const Program& p, FreshVars& fresh)
      : t_(t), rules_(p.rules()), fresh_(fresh), goal_vars_(variables(t)) {}

  std::vector<Step> run() {
    for (std::size_t k = 0; k < rules_.size(); ++k) lambda(Position::root(), k);
    return std::move(out_);
  }

 private:
  void lambda(const Position& p, std::size_t k) {
    const Term sub = subterm_at(t_, p);
    const Rule& rule = rules_[k];
    if (!sub.is_operation_rooted() || rule.lhs.name() != sub.name()) return;
    Rule variant = fresh_variant(rule, fresh_);
    LUResult lu = linear_unify(variant.lhs, sub);
    switch (lu.tag) {
      case LUResult::Tag::Succ: {
        Term reduct = replace_at(lu.subst.apply(t_), p, lu.subst.apply(variant.rhs));
        Substitution sigma = lu.subst.restrict_to(goal_vars_);
        std::string key = p.to_string() + "|" + rule.label + "|" + answer_key(sigma, reduct, goal_vars_);
        if (seen_.insert(key).second) {
          out_.push_back({p, std::move(variant), std::move(sigma), {}, std::move(reduct)});
        }
        break;
      }
      case LUResult::Tag::Fail:
        break;
      case LUResult::Tag::Demand:
        for (const auto& q : lu.demanded) {
          for (std::size_t j = 0; j < rules_.size(); ++j) lambda(p.concat(q), j);
        }
        break;
    }
  }

  const Term& t_;
  const std::vector<Rule>& rules_;
  FreshVars& fresh_;
  std::vector<std::string> goal_vars_;
  std::vector<Step> out_;
  std::set<std::string> seen_;
};

void require_linear_patterns(const Program& p) {
  for (const auto& r : p.rules()) {
    if (!is_linear_pattern(r.lhs)) {
      throw ClassViolation("lazy narrowing needs left-linear constructor-based rules; rule " + r.label +
                               " has left-hand side " + r.lhs.to_string(),
                           r.lhs.name());
    }
  }
}

}  // namespace

std::vector<Step> lns(const Term& t, const Program& p, FreshVars& fresh) {
  if (!t.is_operation_rooted()) return {};
  require_linear_patterns(p);
  fresh.reserve_all(t);
  return LazyNarrower(t, p, fresh).run();
}

// ---------------------------------------------------------------------------
// Rewriting

Term rewrite_step(const Term& t, const Position& p, const Rule& r) {
  Term redex = subterm_at(t, p);
  auto theta = match(r.lhs, redex);
  if (!theta) {
    throw std::invalid_argument("rewrite_step: " + redex.to_string() + " at " + p.to_string() +
                                " is not an instance of " + r.lhs.to_string());
  }
  return replace_at(t, p, theta->apply(r.rhs));
}

namespace {

std::optional<Redex> phi(const Term& t, const DefinitionalTree& node, const TreeTable& trees) {
  if (node.is_leaf()) return Redex{Position::root(), node.rule()};
  const Position& o = node.inductive_position();
  const Term sub = subterm_at(t, o);
  if (sub.is_constructor_rooted()) {
    if (const auto* child = node.child_for(sub.name())) return phi(t, *child, trees);
    return std::nullopt;
  }
  if (sub.is_operation_rooted()) {
    auto it = trees.find(sub.name());
    if (it == trees.end()) return std::nullopt;
    auto inner = phi(sub, it->second, trees);
    if (!inner) return std::nullopt;
    inner->position = o.concat(inner->position);
    return inner;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Redex> outermost_needed(const Term& t, const TreeTable& trees) {
  if (!t.is_operation_rooted()) return std::nullopt;
  auto it = trees.find(t.name());
  if (it == trees.end()) return std::nullopt;
  return phi(t, it->second, trees);
}

std::optional<Position> outermost_needed_redex(const Term& t, const TreeTable& trees) {
  if (auto r = outermost_needed(t, trees)) return r->position;
  return std::nullopt;
}

std::optional<Position> narrowing_focus(const Term& t) {
  if (t.is_variable()) return std::nullopt;
  if (t.is_operation_rooted()) return Position::root();
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (auto inner = narrowing_focus(t.arg(i))) return Position{{i + 1}}.concat(*inner);
  }
  return std::nullopt;
}

RewriteTrace rewrite_normalize(const Term& t, const TreeTable& trees, std::size_t max_steps) {
  RewriteTrace trace;
  trace.terms.push_back(t);
  Term cur = t;
  for (std::size_t i = 0; i <= max_steps; ++i) {
    auto focus = narrowing_focus(cur);
    if (!focus) {
      trace.normal_form = true;
      break;
    }
    if (i == max_steps) break;
    auto redex = outermost_needed(subterm_at(cur, *focus), trees);
    if (!redex) break;
    redex->position = focus->concat(redex->position);
    cur = rewrite_step(cur, redex->position, redex->rule);
    trace.redexes.push_back(*redex);
    trace.terms.push_back(cur);
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Narrowing trees and search

const char* to_string(NodeStatus s) {
  switch (s) {
    case NodeStatus::Expanded: return "expanded";
    case NodeStatus::Success: return "success";
    case NodeStatus::Failure: return "fail";
    case NodeStatus::Incomplete: return "incomplete";
  }
  return "?";
}

std::size_t NarrowingTree::add_root(Term t) {
  nodes.clear();
  arcs.clear();
  nodes.push_back({std::move(t), NodeStatus::Incomplete, 0, std::nullopt, std::nullopt, {}});
  return 0;
}

std::size_t NarrowingTree::add_child(std::size_t parent, Step step) {
  std::size_t id = nodes.size();
  std::size_t arc = arcs.size();
  Term reduct = step.reduct;
  arcs.push_back({parent, id, std::move(step)});
  nodes.push_back({std::move(reduct), NodeStatus::Incomplete, nodes[parent].depth + 1, parent, arc, {}});
  nodes[parent].children.push_back(id);
  return id;
}

std::vector<const NarrowingTree::Arc*> NarrowingTree::path_to(std::size_t node) const {
  std::vector<const Arc*> path;
  for (auto cur = node; nodes[cur].incoming; cur = *nodes[cur].parent) {
    path.push_back(&arcs[*nodes[cur].incoming]);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

Substitution NarrowingTree::path_substitution(std::size_t node) const {
  Substitution acc;
  for (const auto* arc : path_to(node)) acc = compose(arc->step.subst, acc);
  return acc;
}

std::vector<std::size_t> NarrowingTree::leaves() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].children.empty()) out.push_back(i);
  }
  return out;
}

std::string answer_key(const Substitution& subst, const Term& result, const std::vector<std::string>& goal_vars) {
  std::vector<Term> parts;
  for (const auto& v : goal_vars) parts.push_back(subst.apply(Term::variable(v)));
  parts.push_back(result);
  Term tuple = canonical_variant(Term::operation("answer", std::move(parts)));
  std::string out;
  for (std::size_t i = 0; i < goal_vars.size(); ++i) {
    out += goal_vars[i] + "=" + tuple.arg(i).to_string() + ";";
  }
  return out + "=>" + tuple.arg(goal_vars.size()).to_string();
}

namespace {

class Searcher {
 public:
  Searcher(const Term& goal, const Program& p, const TreeTable* trees, Strategy strategy,
           const SearchBounds& bounds, std::size_t seed)
      : program_(p), trees_(trees), strategy_(strategy), bounds_(bounds), fresh_(seed),
        goal_vars_(variables(goal)) {
    fresh_.reserve_all(goal);
    result_.tree.add_root(goal);
  }

  SearchResult run() {
    expand(0, Substitution{}, true);
    return std::move(result_);
  }

 private:
  std::vector<Step> steps_for(const Term& t) {
    auto focus = narrowing_focus(t);
    if (!focus) return {};
    Term sub = subterm_at(t, *focus);
    std::vector<Step> steps = strategy_ == Strategy::Needed ? needed_steps(sub, *trees_, fresh_)
                                                           : lns(sub, program_, fresh_);
    if (!focus->is_root()) {
      for (auto& s : steps) {
        s.reduct = replace_at(s.subst.apply(t), *focus, s.reduct);
        s.position = focus->concat(s.position);
      }
    }
    return steps;
  }

  void expand(std::size_t id, const Substitution& acc, bool deterministic) {
    auto& tree = result_.tree;
    const Term term = tree.nodes[id].term;
    if (is_constructor_term(term)) {
      tree.nodes[id].status = NodeStatus::Success;
      Answer a;
      a.subst = acc.restrict_to(goal_vars_);
      a.result = term;
      a.steps = tree.nodes[id].depth;
      a.deterministic = deterministic;
      a.leaf = id;
      a.key = answer_key(a.subst, a.result, goal_vars_);
      result_.answers.push_back(std::move(a));
      return;
    }
    if (result_.answers.size() >= bounds_.max_solutions || tree.nodes[id].depth >= bounds_.max_steps ||
        tree.nodes.size() >= bounds_.max_nodes) {
      tree.nodes[id].status = NodeStatus::Incomplete;
      result_.complete = false;
      return;
    }
    auto steps = steps_for(term);
    if (steps.empty()) {
      tree.nodes[id].status = NodeStatus::Failure;
      return;
    }
    tree.nodes[id].status = NodeStatus::Expanded;
    const bool det = deterministic && steps.size() == 1;
    for (auto& step : steps) {
      if (tree.nodes.size() >= bounds_.max_nodes || result_.answers.size() >= bounds_.max_solutions) {
        result_.complete = false;
        break;
      }
      Substitution next = compose(step.subst, acc);
      std::size_t child = tree.add_child(id, std::move(step));
      expand(child, next, det);
    }
  }

  const Program& program_;
  const TreeTable* trees_;
  Strategy strategy_;
  SearchBounds bounds_;
  FreshVars fresh_;
  std::vector<std::string> goal_vars_;
  SearchResult result_;
};

}  // namespace

SearchResult search(const Term& goal, const Program& p, const TreeTable& trees, Strategy strategy,
                    const SearchBounds& bounds, std::size_t seed) {
  return Searcher(goal, p, &trees, strategy, bounds, seed).run();
}

SearchResult search(const Term& goal, const Program& p, Strategy strategy, const SearchBounds& bounds,
                    std::size_t seed) {
  TreeTable trees;
  if (strategy == Strategy::Needed) trees = require_trees(p);
  return search(goal, p, trees, strategy, bounds, seed);
}

Determinism deterministically_evaluable(const Term& t, const Program& p, const SearchBounds& bounds) {
  auto result = search(t, p, Strategy::Needed, bounds);
  for (const auto& node : result.tree.nodes) {
    if (node.status == NodeStatus::Expanded && node.children.size() > 1) {
      return Determinism::NonDeterministic;
    }
  }
  return result.complete ? Determinism::Deterministic : Determinism::Indeterminate;
}

}  // namespace nspec
