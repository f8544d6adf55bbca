#include "nspec/term.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <stdexcept>

namespace nspec {

struct Term::Node {
  SymbolKind kind;
  std::string name;
  std::vector<Term> args;
  std::size_t hash;
  std::size_t size;
};

namespace {

std::size_t mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Term Term::make(SymbolKind kind, std::string name, std::vector<Term> args) {
  if (kind == SymbolKind::Variable && !args.empty()) {
    throw std::invalid_argument("variable '" + name + "' cannot take arguments");
  }
  std::size_t h = mix(std::hash<std::string>{}(name), static_cast<std::size_t>(kind));
  std::size_t size = 1;
  for (const auto& a : args) {
    h = mix(h, a.hash());
    size += a.size();
  }
  auto node = std::make_shared<const Node>(Node{kind, std::move(name), std::move(args), h, size});
  return Term(std::move(node));
}

Term Term::variable(std::string name) { return make(SymbolKind::Variable, std::move(name), {}); }

Term Term::constructor(std::string name, std::vector<Term> args) {
  return make(SymbolKind::Constructor, std::move(name), std::move(args));
}

Term Term::operation(std::string name, std::vector<Term> args) {
  return make(SymbolKind::Operation, std::move(name), std::move(args));
}

SymbolKind Term::kind() const { return node_->kind; }
const std::string& Term::name() const { return node_->name; }
std::span<const Term> Term::args() const { return node_->args; }
std::size_t Term::hash() const { return node_->hash; }
std::size_t Term::size() const { return node_->size; }

std::string Term::to_string() const {
  if (args().empty()) return name();
  std::string out = name();
  out += '(';
  bool first = true;
  for (const auto& a : args()) {
    if (!first) out += ',';
    first = false;
    out += a.to_string();
  }
  out += ')';
  return out;
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind() || a.name() != b.name() ||
      a.arity() != b.arity()) {
    return false;
  }
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (!(a.arg(i) == b.arg(i))) return false;
  }
  return true;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  if (auto c = a.name() <=> b.name(); c != 0) return c;
  if (auto c = a.arity() <=> b.arity(); c != 0) return c;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (auto c = a.arg(i) <=> b.arg(i); c != 0) return c;
  }
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// Positions

Position::Position(std::vector<std::size_t> path) : path_(std::move(path)) {
  for (auto i : path_) {
    if (i == 0) throw std::invalid_argument("positions use 1-based indices");
  }
}

Position Position::child(std::size_t index) const {
  auto p = path_;
  p.push_back(index);
  return Position(std::move(p));
}

Position Position::concat(const Position& other) const {
  auto p = path_;
  p.insert(p.end(), other.path_.begin(), other.path_.end());
  return Position(std::move(p));
}

bool Position::is_prefix_of(const Position& other) const {
  return path_.size() <= other.path_.size() &&
         std::equal(path_.begin(), path_.end(), other.path_.begin());
}

bool Position::disjoint(const Position& other) const {
  return !is_prefix_of(other) && !other.is_prefix_of(*this);
}

std::string Position::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < path_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(path_[i]);
  }
  return out + "]";
}

bool valid_position(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (auto i : p.path()) {
    if (i == 0 || i > cur->arity()) return false;
    cur = &cur->arg(i - 1);
  }
  return true;
}

Term subterm_at(const Term& t, const Position& p) {
  const Term* cur = &t;
  std::size_t depth = 0;
  for (auto i : p.path()) {
    ++depth;
    if (i == 0 || i > cur->arity()) {
      throw std::out_of_range("invalid position " + p.to_string() + " in " + t.to_string() +
                              ": index " + std::to_string(i) + " at depth " +
                              std::to_string(depth) + " exceeds arity " +
                              std::to_string(cur->arity()) + " of " + cur->name());
    }
    cur = &cur->arg(i - 1);
  }
  return *cur;
}

namespace {

Term replace_rec(const Term& t, const std::vector<std::size_t>& path, std::size_t at,
                 const Term& replacement, const Position& whole, const Term& root) {
  if (at == path.size()) return replacement;
  auto i = path[at];
  if (i == 0 || i > t.arity()) {
    throw std::out_of_range("invalid position " + whole.to_string() + " in " + root.to_string() +
                            ": index " + std::to_string(i) + " at depth " +
                            std::to_string(at + 1) + " exceeds arity " +
                            std::to_string(t.arity()) + " of " + t.name());
  }
  std::vector<Term> args(t.args().begin(), t.args().end());
  args[i - 1] = replace_rec(t.arg(i - 1), path, at + 1, replacement, whole, root);
  return Term::make(t.kind(), t.name(), std::move(args));
}

void positions_rec(const Term& t, const Position& here, std::vector<Position>& out) {
  out.push_back(here);
  for (std::size_t i = 0; i < t.arity(); ++i) positions_rec(t.arg(i), here.child(i + 1), out);
}

}  // namespace

Term replace_at(const Term& t, const Position& p, const Term& replacement) {
  return replace_rec(t, p.path(), 0, replacement, p, t);
}

std::vector<Position> positions(const Term& t) {
  std::vector<Position> out;
  positions_rec(t, Position::root(), out);
  return out;
}

// ---------------------------------------------------------------------------
// Term predicates

void collect_variables(const Term& t, std::vector<std::string>& out) {
  if (t.is_variable()) {
    if (std::find(out.begin(), out.end(), t.name()) == out.end()) out.push_back(t.name());
    return;
  }
  for (const auto& a : t.args()) collect_variables(a, out);
}

std::vector<std::string> variables(const Term& t) {
  std::vector<std::string> out;
  collect_variables(t, out);
  return out;
}

bool occurs(const std::string& var, const Term& t) {
  if (t.is_variable()) return t.name() == var;
  for (const auto& a : t.args()) {
    if (occurs(var, a)) return true;
  }
  return false;
}

namespace {

bool linear_rec(const Term& t, std::set<std::string>& seen) {
  if (t.is_variable()) return seen.insert(t.name()).second;
  for (const auto& a : t.args()) {
    if (!linear_rec(a, seen)) return false;
  }
  return true;
}

}  // namespace

bool is_linear(const Term& t) {
  std::set<std::string> seen;
  return linear_rec(t, seen);
}

bool is_ground(const Term& t) {
  if (t.is_variable()) return false;
  for (const auto& a : t.args()) {
    if (!is_ground(a)) return false;
  }
  return true;
}

bool is_constructor_term(const Term& t) {
  if (t.is_operation_rooted()) return false;
  for (const auto& a : t.args()) {
    if (!is_constructor_term(a)) return false;
  }
  return true;
}

bool is_pattern(const Term& t) {
  if (!t.is_operation_rooted()) return false;
  for (const auto& a : t.args()) {
    if (!is_constructor_term(a)) return false;
  }
  return true;
}

bool is_linear_pattern(const Term& t) { return is_pattern(t) && is_linear(t); }

// ---------------------------------------------------------------------------
// Substitutions

Substitution::Substitution(Map bindings) {
  for (auto& [var, t] : bindings) {
    if (t.is_variable() && t.name() == var) continue;
    bindings_.emplace(var, std::move(t));
  }
}

Substitution Substitution::normalized(Map bindings) {
  Substitution s(std::move(bindings));
  // Each pass resolves one more level of chained bindings; more passes than
  // bindings means a cycle.
  for (std::size_t pass = 0; pass <= s.bindings_.size() + 1; ++pass) {
    if (s.is_idempotent()) return s;
    Map next;
    for (const auto& [var, t] : s.bindings_) next.emplace(var, s.apply(t));
    s = Substitution(std::move(next));
  }
  for (const auto& [var, t] : s.bindings_) {
    if (occurs(var, t)) {
      throw std::invalid_argument("cyclic binding " + var + " -> " + t.to_string());
    }
  }
  return s;
}

Substitution Substitution::single(const std::string& var, Term t) {
  Map m;
  m.emplace(var, std::move(t));
  return Substitution(std::move(m));
}

Term Substitution::apply(const Term& t) const {
  if (bindings_.empty()) return t;
  if (t.is_variable()) {
    auto it = bindings_.find(t.name());
    return it == bindings_.end() ? t : it->second;
  }
  if (t.arity() == 0) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (const auto& a : t.args()) {
    args.push_back(apply(a));
    changed = changed || !(args.back() == a);
  }
  if (!changed) return t;
  return Term::make(t.kind(), t.name(), std::move(args));
}

const Term* Substitution::lookup(const std::string& var) const {
  auto it = bindings_.find(var);
  return it == bindings_.end() ? nullptr : &it->second;
}

std::vector<std::string> Substitution::domain() const {
  std::vector<std::string> out;
  for (const auto& [var, _] : bindings_) out.push_back(var);
  return out;
}

Substitution Substitution::restrict_to(const std::vector<std::string>& vars) const {
  Map m;
  for (const auto& v : vars) {
    if (auto it = bindings_.find(v); it != bindings_.end()) m.emplace(v, it->second);
  }
  return Substitution(std::move(m));
}

bool Substitution::is_idempotent() const {
  for (const auto& [_, t] : bindings_) {
    for (const auto& v : variables(t)) {
      if (bindings_.count(v)) return false;
    }
  }
  return true;
}

std::string Substitution::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [var, t] : bindings_) {
    if (!first) out += ", ";
    first = false;
    out += var + " -> " + t.to_string();
  }
  return out + "}";
}

Substitution compose(const Substitution& outer, const Substitution& inner) {
  Substitution::Map m;
  for (const auto& [var, t] : inner.bindings()) m.emplace(var, outer.apply(t));
  for (const auto& [var, t] : outer.bindings()) m.emplace(var, t);  // keeps inner's entries
  return Substitution(std::move(m));
}

// ---------------------------------------------------------------------------
// Unification and matching

namespace {

/// Incrementally maintained idempotent substitution.
class Solver {
 public:
  Term resolve(const Term& t) const { return subst_.apply(t); }

  bool bind(const std::string& var, const Term& t) {
    Term value = resolve(t);
    if (value.is_variable() && value.name() == var) return true;
    if (occurs(var, value)) return false;
    auto single = Substitution::single(var, value);
    Substitution::Map next;
    for (const auto& [v, r] : subst_.bindings()) next.emplace(v, single.apply(r));
    next.emplace(var, value);
    subst_ = Substitution(std::move(next));
    return true;
  }

  const Substitution& result() const { return subst_; }

 private:
  Substitution subst_;
};

}  // namespace

std::optional<Substitution> unify_all(std::vector<std::pair<Term, Term>> equations) {
  Solver solver;
  // Processed front to back so variables are bound in order of first
  // occurrence.
  std::vector<std::pair<Term, Term>> work(equations.rbegin(), equations.rend());
  while (!work.empty()) {
    auto [a, b] = std::move(work.back());
    work.pop_back();
    a = solver.resolve(a);
    b = solver.resolve(b);
    if (a == b) continue;
    if (a.is_variable()) {
      if (!solver.bind(a.name(), b)) return std::nullopt;
    } else if (b.is_variable()) {
      if (!solver.bind(b.name(), a)) return std::nullopt;
    } else {
      if (a.kind() != b.kind() || a.name() != b.name() || a.arity() != b.arity()) {
        return std::nullopt;
      }
      for (std::size_t i = a.arity(); i-- > 0;) work.emplace_back(a.arg(i), b.arg(i));
    }
  }
  return solver.result();
}

std::optional<Substitution> unify(const Term& s, const Term& t) { return unify_all({{s, t}}); }

namespace {

bool match_rec(const Term& p, const Term& t, Substitution::Map& m) {
  if (p.is_variable()) {
    auto [it, inserted] = m.emplace(p.name(), t);
    return inserted || it->second == t;
  }
  if (p.kind() != t.kind() || p.name() != t.name() || p.arity() != t.arity()) return false;
  for (std::size_t i = 0; i < p.arity(); ++i) {
    if (!match_rec(p.arg(i), t.arg(i), m)) return false;
  }
  return true;
}

}  // namespace

std::optional<Substitution> match(const Term& pattern, const Term& t) {
  Substitution::Map m;
  if (!match_rec(pattern, t, m)) return std::nullopt;
  return Substitution(std::move(m));
}

bool is_instance_of(const Term& t, const Term& pattern) { return match(pattern, t).has_value(); }

bool is_variant(const Term& a, const Term& b) {
  return is_instance_of(a, b) && is_instance_of(b, a);
}

// ---------------------------------------------------------------------------
// Linear unification

namespace {

class LinearUnifier {
 public:
  void walk(const Term& pat, const Term& goal, const Position& at) {
    Term p = pat.is_variable() ? solver_.resolve(pat) : pat;
    Term g = goal.is_variable() ? solver_.resolve(goal) : goal;
    if (p == g) return;
    if (p.is_variable()) {
      if (!solver_.bind(p.name(), g)) clash_ = true;
    } else if (g.is_variable()) {
      if (!solver_.bind(g.name(), p)) clash_ = true;
    } else if (g.is_operation_rooted() || p.is_operation_rooted()) {
      demanded_.push_back(at);
    } else if (p.name() != g.name() || p.arity() != g.arity()) {
      clash_ = true;
    } else {
      for (std::size_t i = 0; i < p.arity() && !clash_; ++i) {
        walk(p.arg(i), g.arg(i), at.child(i + 1));
      }
    }
  }

  LUResult result() const {
    LUResult r;
    if (clash_) {
      r.tag = LUResult::Tag::Fail;
    } else if (!demanded_.empty()) {
      r.tag = LUResult::Tag::Demand;
      r.demanded = demanded_;
    } else {
      r.tag = LUResult::Tag::Succ;
      r.subst = solver_.result();
    }
    return r;
  }

 private:
  Solver solver_;
  bool clash_ = false;
  std::vector<Position> demanded_;
};

}  // namespace

LUResult linear_unify(const Term& pattern, const Term& goal) {
  if (!is_linear_pattern(pattern)) {
    throw std::invalid_argument("linear_unify: " + pattern.to_string() +
                                " is not a linear pattern");
  }
  if (!goal.is_operation_rooted() || goal.name() != pattern.name() ||
      goal.arity() != pattern.arity()) {
    throw std::invalid_argument("linear_unify: root of " + goal.to_string() +
                                " differs from root of " + pattern.to_string());
  }
  LinearUnifier lu;
  for (std::size_t i = 0; i < pattern.arity(); ++i) {
    lu.walk(pattern.arg(i), goal.arg(i), Position{{i + 1}});
  }
  return lu.result();
}

// ---------------------------------------------------------------------------
// Fresh variables

std::string base_name(std::string_view var) {
  auto us = var.rfind('_');
  if (us != std::string_view::npos && us > 0 && us + 1 < var.size() &&
      std::all_of(var.begin() + us + 1, var.end(),
                  [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return std::string(var.substr(0, us));
  }
  return std::string(var);
}

void FreshVars::reserve_all(const Term& t) {
  for (const auto& v : variables(t)) reserved_.insert(v);
}

std::string FreshVars::fresh_name(std::string_view base) {
  std::string stem = base_name(base);
  if (stem.empty()) stem = "V";
  for (;;) {
    std::string name = stem + "_" + std::to_string(++counter_);
    if (!reserved_.count(name)) {
      reserved_.insert(name);
      return name;
    }
  }
}

Substitution FreshVars::renaming_for(const std::vector<std::string>& vars) {
  Substitution::Map m;
  for (const auto& v : vars) m.emplace(v, fresh(v));
  return Substitution(std::move(m));
}

Term canonical_variant(const Term& t) {
  Substitution::Map m;
  std::size_t k = 0;
  for (const auto& v : variables(t)) m.emplace(v, Term::variable("V" + std::to_string(++k)));
  return Substitution(std::move(m)).apply(t);
}

}  // namespace nspec
