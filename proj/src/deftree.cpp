#include "nspec/deftree.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "nspec/error.hpp"

namespace nspec {

DefinitionalTree DefinitionalTree::leaf(Term pattern, Rule rule) {
  DefinitionalTree t;
  t.pattern_ = std::move(pattern);
  t.rule_ = std::move(rule);
  return t;
}

DefinitionalTree DefinitionalTree::branch(Term pattern, Position inductive,
                                          std::vector<DefinitionalTree> children) {
  DefinitionalTree t;
  t.pattern_ = std::move(pattern);
  t.inductive_ = std::move(inductive);
  t.children_ = std::move(children);
  return t;
}

std::string DefinitionalTree::child_constructor(std::size_t i) const {
  return subterm_at(children_.at(i).pattern(), inductive_).name();
}

const DefinitionalTree* DefinitionalTree::child_for(const std::string& name) const {
  for (const auto& c : children_) {
    if (subterm_at(c.pattern(), inductive_).name() == name) return &c;
  }
  return nullptr;
}

std::string DefinitionalTree::to_text(int indent) const {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (is_leaf()) {
    return pad + "leaf " + pattern_.to_string() + "  [" + rule_->label + ": " + rule_->to_string() +
           "]\n";
  }
  std::string out = pad + "branch " + pattern_.to_string() + " at " + inductive_.to_string() + "\n";
  for (const auto& c : children_) out += c.to_text(indent + 1);
  return out;
}

bool structurally_equal_modulo_variables(const DefinitionalTree& a, const DefinitionalTree& b) {
  if (a.is_leaf() != b.is_leaf() || !is_variant(a.pattern(), b.pattern())) return false;
  if (a.is_leaf()) return is_variant(a.rule().lhs, b.rule().lhs);
  if (a.inductive_position() != b.inductive_position() ||
      a.children().size() != b.children().size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.children().size(); ++i) {
    if (!structurally_equal_modulo_variables(a.children()[i], b.children()[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Construction

namespace {

std::string pick_name(const std::string& preferred, std::set<std::string>& used) {
  std::string base = preferred.empty() ? "X" : preferred;
  std::string name = base;
  for (std::size_t k = 1; used.count(name); ++k) name = base + std::to_string(k);
  used.insert(name);
  return name;
}

class TreeBuilder {
 public:
  TreeBuilder(std::string op, TieBreak tb) : op_(std::move(op)), tie_break_(tb) {}

  std::optional<DefinitionalTree> build(const Term& pattern, const std::vector<Rule>& rules) {
    if (rules.size() == 1 && is_variant(rules[0].lhs, pattern)) {
      return DefinitionalTree::leaf(pattern, rules[0]);
    }
    std::vector<Position> candidates;
    for (const auto& pos : positions(pattern)) {
      if (!subterm_at(pattern, pos).is_variable()) continue;
      bool all_constructors = std::all_of(rules.begin(), rules.end(), [&](const Rule& r) {
        return subterm_at(r.lhs, pos).is_constructor_rooted();
      });
      if (all_constructors) candidates.push_back(pos);
    }
    if (tie_break_ == TieBreak::Rightmost) std::reverse(candidates.begin(), candidates.end());
    if (candidates.empty()) {
      diagnostic_ = "no inductive position for pattern " + pattern.to_string() + " covering";
      for (const auto& r : rules) diagnostic_ += " " + r.label + " (" + r.lhs.to_string() + ")";
      return std::nullopt;
    }
    for (const auto& pos : candidates) {
      if (auto t = split(pattern, rules, pos)) return t;
    }
    return std::nullopt;
  }

  const std::string& diagnostic() const { return diagnostic_; }

 private:
  std::optional<DefinitionalTree> split(const Term& pattern, const std::vector<Rule>& rules,
                                        const Position& pos) {
    // Partition by constructor, in order of first appearance.
    std::vector<std::pair<std::string, std::vector<Rule>>> groups;
    for (const auto& r : rules) {
      const auto& c = subterm_at(r.lhs, pos).name();
      auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == c; });
      if (it == groups.end()) {
        groups.push_back({c, {r}});
      } else {
        it->second.push_back(r);
      }
    }
    const auto vars = variables(pattern);
    std::vector<DefinitionalTree> children;
    for (const auto& [c, group] : groups) {
      Term first = subterm_at(group.front().lhs, pos);
      std::set<std::string> used(vars.begin(), vars.end());
      std::vector<Term> fresh_args;
      for (const auto& a : first.args()) {
        fresh_args.push_back(Term::variable(pick_name(a.is_variable() ? a.name() : "X", used)));
      }
      Term child = replace_at(pattern, pos, Term::constructor(c, std::move(fresh_args)));
      auto sub = build(child, group);
      if (!sub) return std::nullopt;
      children.push_back(std::move(*sub));
    }
    return DefinitionalTree::branch(pattern, pos, std::move(children));
  }

  std::string op_;
  TieBreak tie_break_;
  std::string diagnostic_;
};

}  // namespace

std::optional<DefinitionalTree> build_tree(const std::string& operation, const std::vector<Rule>& rules,
                                           TieBreak tie_break, std::string* diagnostic) {
  auto fail = [&](std::string msg) -> std::optional<DefinitionalTree> {
    if (diagnostic) *diagnostic = std::move(msg);
    return std::nullopt;
  };
  if (rules.empty()) return fail("operation '" + operation + "' has no rules");
  std::size_t arity = rules.front().lhs.arity();
  for (const auto& r : rules) {
    if (r.lhs.name() != operation || r.lhs.arity() != arity) {
      return fail("rule " + r.label + " does not define " + operation);
    }
    if (!is_linear_pattern(r.lhs)) {
      return fail("rule " + r.label + ": " + r.lhs.to_string() + " is not a linear pattern");
    }
  }
  // Root variables take the name of the first rule with a variable there.
  std::set<std::string> used;
  std::vector<Term> args;
  for (std::size_t i = 0; i < arity; ++i) {
    std::string preferred;
    for (const auto& r : rules) {
      if (r.lhs.arg(i).is_variable()) {
        preferred = r.lhs.arg(i).name();
        break;
      }
    }
    args.push_back(Term::variable(pick_name(preferred, used)));
  }
  TreeBuilder builder(operation, tie_break);
  auto tree = builder.build(Term::operation(operation, std::move(args)), rules);
  if (!tree) return fail(builder.diagnostic());
  return tree;
}

SequentialityReport check_inductively_sequential(const Program& p, TieBreak tie_break) {
  SequentialityReport report;
  for (const auto& op : p.defined_operations()) {
    std::string diag;
    if (auto t = build_tree(op, p.rules_for(op), tie_break, &diag)) {
      report.trees.emplace(op, std::move(*t));
    } else {
      report.failing.push_back(op);
      report.diagnostics.emplace(op, diag);
    }
  }
  report.sequential = report.failing.empty();
  return report;
}

TreeTable require_trees(const Program& p, TieBreak tie_break) {
  auto report = check_inductively_sequential(p, tie_break);
  if (!report.sequential) {
    const auto& f = report.failing.front();
    throw ClassViolation("program is not inductively sequential: operation '" + f + "': " +
                             report.diagnostics[f],
                         f);
  }
  return std::move(report.trees);
}

// ---------------------------------------------------------------------------
// Uniform programs

bool is_uniform(const Program& p) {
  const bool skip_primitives = p.has_strict_equality();
  for (const auto& op : p.defined_operations()) {
    if (skip_primitives && is_primitive(op)) continue;
    auto rules = p.rules_for(op);
    auto all_distinct_vars = [](std::span<const Term> args) {
      std::set<std::string> seen;
      for (const auto& a : args) {
        if (!a.is_variable() || !seen.insert(a.name()).second) return false;
      }
      return true;
    };
    if (rules.size() == 1 && all_distinct_vars(rules[0].lhs.args())) continue;
    std::optional<std::size_t> index;
    std::set<std::string> constructors;
    for (const auto& r : rules) {
      if (!is_linear(r.lhs)) return false;
      std::optional<std::size_t> here;
      for (std::size_t i = 0; i < r.lhs.arity(); ++i) {
        const auto& a = r.lhs.arg(i);
        if (a.is_variable()) continue;
        if (here || !a.is_constructor_rooted() || !all_distinct_vars(a.args())) return false;
        here = i;
      }
      if (!here || (index && *index != *here)) return false;
      index = here;
      if (!constructors.insert(r.lhs.arg(*here).name()).second) return false;
    }
  }
  return true;
}

Program uniform_transform(const Program& p) {
  TreeTable trees = require_trees(p);
  const bool keep_primitives = p.has_strict_equality();
  Signature sig = p.signature();
  std::vector<Rule> out;

  std::vector<std::string> order;
  for (const auto& r : p.rules()) {
    if (std::find(order.begin(), order.end(), r.lhs.name()) == order.end()) order.push_back(r.lhs.name());
  }

  for (const auto& op : order) {
    if (keep_primitives && is_primitive(op)) {
      for (const auto& r : p.rules_for(op)) out.push_back(r);
      continue;
    }
    const DefinitionalTree& root = trees.at(op);
    if (root.is_leaf()) {
      out.push_back(root.rule());
      continue;
    }
    // Breadth-first naming of inner branch nodes: f_1, f_2, ...
    std::size_t next_index = 1;
    auto fresh_name = [&]() {
      for (;;) {
        std::string name = op + "_" + std::to_string(next_index++);
        if (!sig.contains(name)) return name;
      }
    };
    std::deque<std::pair<const DefinitionalTree*, std::string>> queue{{&root, op}};
    while (!queue.empty()) {
      auto [node, name] = queue.front();
      queue.pop_front();
      const auto vars = variables(node->pattern());
      std::vector<Term> var_terms;
      for (const auto& v : vars) var_terms.push_back(Term::variable(v));
      Term head = Term::operation(name, var_terms);
      const auto& x = subterm_at(node->pattern(), node->inductive_position()).name();
      for (const auto& child : node->children()) {
        Term lhs = Substitution::single(x, subterm_at(child.pattern(), node->inductive_position()))
                       .apply(head);
        if (child.is_leaf()) {
          Substitution to_rule = *match(child.pattern(), child.rule().lhs);
          out.push_back({to_rule.apply(lhs), child.rule().rhs, ""});
        } else {
          std::string child_name = fresh_name();
          auto child_vars = variables(child.pattern());
          std::vector<Term> args;
          for (const auto& v : child_vars) args.push_back(Term::variable(v));
          sig.add({child_name, args.size(), SymbolKind::Operation});
          out.push_back({lhs, Term::operation(child_name, args), ""});
          queue.emplace_back(&child, child_name);
        }
      }
    }
  }
  return Program(std::move(sig), std::move(out));
}

}  // namespace nspec
