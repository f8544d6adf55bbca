#include "nspec/program.hpp"

#include <algorithm>

#include "nspec/error.hpp"

namespace nspec {

namespace {

const char* kind_name(SymbolKind k) {
  switch (k) {
    case SymbolKind::Variable: return "variable";
    case SymbolKind::Constructor: return "constructor";
    case SymbolKind::Operation: return "operation";
  }
  return "?";
}

}  // namespace

void Signature::add(const Symbol& symbol) {
  if (symbol.kind == SymbolKind::Variable) {
    throw ProgramError("cannot declare variable '" + symbol.name + "' as a symbol");
  }
  if (auto it = index_.find(symbol.name); it != index_.end()) {
    const auto& existing = symbols_[it->second];
    if (existing == symbol) return;
    throw ProgramError("symbol '" + symbol.name + "' redeclared as " + kind_name(symbol.kind) +
                       "/" + std::to_string(symbol.arity) + " (was " +
                       kind_name(existing.kind) + "/" + std::to_string(existing.arity) + ")");
  }
  index_.emplace(symbol.name, symbols_.size());
  symbols_.push_back(symbol);
}

const Symbol* Signature::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &symbols_[it->second];
}

std::vector<Symbol> Signature::constructors() const {
  std::vector<Symbol> out;
  for (const auto& s : symbols_) {
    if (s.kind == SymbolKind::Constructor) out.push_back(s);
  }
  return out;
}

std::vector<Symbol> Signature::operations() const {
  std::vector<Symbol> out;
  for (const auto& s : symbols_) {
    if (s.kind == SymbolKind::Operation) out.push_back(s);
  }
  return out;
}

void Signature::check_term(const Term& t) const {
  if (t.is_variable()) return;
  const Symbol* s = find(t.name());
  if (!s) throw ProgramError("undeclared symbol '" + t.name() + "' in " + t.to_string());
  if (s->kind != t.kind()) {
    throw ProgramError("symbol '" + t.name() + "' is a " + kind_name(s->kind) + ", used as " +
                       kind_name(t.kind()));
  }
  if (s->arity != t.arity()) {
    throw ProgramError("symbol '" + t.name() + "' has arity " + std::to_string(s->arity) +
                       " but is applied to " + std::to_string(t.arity()) + " arguments");
  }
  for (const auto& a : t.args()) check_term(a);
}

Program::Program(Signature signature, std::vector<Rule> rules)
    : signature_(std::move(signature)), rules_(std::move(rules)) {
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    auto& r = rules_[i];
    r.label = "R" + std::to_string(i + 1);
    if (r.lhs.is_variable()) {
      throw ProgramError("rule " + r.label + ": left-hand side is a variable");
    }
    signature_.check_term(r.lhs);
    signature_.check_term(r.rhs);
    if (!r.lhs.is_operation_rooted()) {
      throw ProgramError("rule " + r.label + ": left-hand side " + r.lhs.to_string() +
                         " is not rooted by an operation");
    }
    auto lhs_vars = variables(r.lhs);
    for (const auto& v : variables(r.rhs)) {
      if (std::find(lhs_vars.begin(), lhs_vars.end(), v) == lhs_vars.end()) {
        throw ProgramError("rule " + r.label + ": variable " + v +
                           " of the right-hand side does not occur on the left");
      }
    }
  }
}

std::vector<Rule> Program::rules_for(const std::string& operation) const {
  std::vector<Rule> out;
  for (const auto& r : rules_) {
    if (r.lhs.name() == operation) out.push_back(r);
  }
  return out;
}

std::vector<std::string> Program::defined_operations() const {
  std::vector<std::string> out;
  for (const auto& s : signature_.operations()) {
    bool defined = std::any_of(rules_.begin(), rules_.end(),
                               [&](const Rule& r) { return r.lhs.name() == s.name; });
    if (defined) out.push_back(s.name);
  }
  return out;
}

Term Program::make_term(const std::string& name, std::vector<Term> args) const {
  const Symbol* s = signature_.find(name);
  if (!s) throw ProgramError("undeclared symbol '" + name + "'");
  auto t = Term::make(s->kind, name, std::move(args));
  signature_.check_term(t);
  return t;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

/// Renames variables of `term` that also occur in `avoid`.
Term rename_apart(const Term& term, const Term& avoid) {
  FreshVars fresh;
  fresh.reserve_all(term);
  fresh.reserve_all(avoid);
  auto avoid_vars = variables(avoid);
  std::vector<std::string> clashing;
  for (const auto& v : variables(term)) {
    if (std::find(avoid_vars.begin(), avoid_vars.end(), v) != avoid_vars.end()) {
      clashing.push_back(v);
    }
  }
  return fresh.renaming_for(clashing).apply(term);
}

}  // namespace

ValidationReport validate(const Program& p) {
  ValidationReport report;
  const auto& rules = p.rules();
  for (const auto& r : rules) {
    if (!is_linear(r.lhs)) report.left_linear = false;
    if (!is_pattern(r.lhs)) report.constructor_based = false;
  }
  for (std::size_t i = 0; i < rules.size(); ++i) {
    for (const auto& pos : positions(rules[i].lhs)) {
      Term sub = subterm_at(rules[i].lhs, pos);
      if (!sub.is_operation_rooted()) continue;
      for (std::size_t j = 0; j < rules.size(); ++j) {
        // Root overlaps are symmetric: report each unordered pair once.
        if (pos.is_root() && j <= i) continue;
        if (sub.name() != rules[j].lhs.name()) continue;
        Term other = rename_apart(rules[j].lhs, rules[i].lhs);
        if (auto mgu = unify(sub, other)) {
          report.overlaps.push_back({i, j, pos, *mgu});
        }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Strict equality

namespace {

Signature with_equality_symbols(const Signature& sig) {
  Signature out = sig;
  if (!out.contains(kTrueName)) out.add({kTrueName, 0, SymbolKind::Constructor});
  out.add({kEqName, 2, SymbolKind::Operation});
  out.add({kAndName, 2, SymbolKind::Operation});
  return out;
}

Term rule_term(const Rule& r) { return Term::operation("->", {r.lhs, r.rhs}); }

bool same_rules(const std::vector<Rule>& a, const std::vector<Rule>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(canonical_variant(rule_term(a[i])) == canonical_variant(rule_term(b[i])))) return false;
  }
  return true;
}

}  // namespace

std::vector<Rule> strict_equality_rules(const Signature& signature) {
  Signature sig = with_equality_symbols(signature);
  const Term truth = Term::constructor(kTrueName);
  std::vector<Rule> out;
  for (const auto& c : sig.constructors()) {
    if (c.arity == 0) {
      out.push_back({Term::operation(kEqName, {Term::constructor(c.name), Term::constructor(c.name)}),
                     truth, ""});
      continue;
    }
    std::vector<Term> xs, ys;
    for (std::size_t i = 1; i <= c.arity; ++i) {
      xs.push_back(Term::variable("X" + std::to_string(i)));
      ys.push_back(Term::variable("Y" + std::to_string(i)));
    }
    // Right-nested conjunction; a single conjunct is the bare equation.
    Term body = Term::operation(kEqName, {xs.back(), ys.back()});
    for (std::size_t i = c.arity - 1; i-- > 0;) {
      body = Term::operation(kAndName, {Term::operation(kEqName, {xs[i], ys[i]}), body});
    }
    out.push_back({Term::operation(kEqName, {Term::constructor(c.name, xs),
                                             Term::constructor(c.name, ys)}),
                   body, ""});
  }
  out.push_back({Term::operation(kAndName, {truth, Term::variable("X")}), Term::variable("X"), ""});
  return out;
}

bool Program::has_strict_equality() const {
  const Symbol* eq = signature_.find(kEqName);
  const Symbol* conj = signature_.find(kAndName);
  const Symbol* truth = signature_.find(kTrueName);
  if (!eq || !conj || !truth || eq->kind != SymbolKind::Operation || eq->arity != 2 ||
      conj->kind != SymbolKind::Operation || conj->arity != 2 ||
      truth->kind != SymbolKind::Constructor || truth->arity != 0) {
    return false;
  }
  std::vector<Rule> current;
  for (const auto& r : rules_) {
    if (is_primitive(r.lhs.name())) current.push_back(r);
  }
  return same_rules(current, strict_equality_rules(signature_));
}

Program add_strict_equality(const Program& p) {
  if (p.has_strict_equality()) return p;
  for (const char* name : {kEqName, kAndName}) {
    if (const Symbol* s = p.signature().find(name)) {
      if (s->kind != SymbolKind::Operation || s->arity != 2) {
        throw ProgramError("'" + std::string(name) + "' is reserved for strict equality");
      }
    }
  }
  if (const Symbol* t = p.signature().find(kTrueName);
      t && (t->kind != SymbolKind::Constructor || t->arity != 0)) {
    throw ProgramError("'true' must be a constant constructor");
  }
  std::vector<Rule> rules;
  for (const auto& r : p.rules()) {
    if (is_primitive(r.lhs.name())) {
      throw ProgramError("rule " + r.label + " defines reserved operation '" + r.lhs.name() + "'");
    }
    rules.push_back(r);
  }
  Signature sig = with_equality_symbols(p.signature());
  for (auto& r : strict_equality_rules(sig)) rules.push_back(std::move(r));
  return Program(std::move(sig), std::move(rules));
}

}  // namespace nspec
