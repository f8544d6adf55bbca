#include "nspec/oracle.hpp"

#include <deque>
#include <functional>
#include <numeric>
#include <unordered_set>

#include "nspec/error.hpp"

namespace nspec {

std::vector<Term> rewrite_successors(const Program& p, const Term& t) {
  std::vector<Term> out;
  for (const auto& pos : positions(t)) {
    Term sub = subterm_at(t, pos);
    if (!sub.is_operation_rooted()) continue;
    for (const auto& r : p.rules()) {
      if (r.lhs.name() != sub.name()) continue;
      if (auto theta = match(r.lhs, sub)) out.push_back(replace_at(t, pos, theta->apply(r.rhs)));
    }
  }
  return out;
}

bool rewrites_to(const Program& p, const Term& t, const Term& target, std::size_t max_steps, std::size_t max_visited) {
  if (t == target) return true;
  std::unordered_set<Term, TermHash> seen{t};
  std::deque<std::pair<Term, std::size_t>> queue{{t, 0}};
  while (!queue.empty()) {
    auto [cur, depth] = queue.front();
    queue.pop_front();
    if (depth >= max_steps) continue;
    for (auto& next : rewrite_successors(p, cur)) {
      if (next == target) return true;
      if (seen.size() >= max_visited) return false;
      if (seen.insert(next).second) queue.emplace_back(std::move(next), depth + 1);
    }
  }
  return false;
}

// ---------------------------------------------------------------------------

GroundEnumeration::GroundEnumeration(std::vector<Symbol> constructors, std::size_t k)
    : constructors_(std::move(constructors)), k_(k) {}

const std::vector<Term>& GroundEnumeration::of_size(std::size_t n) {
  if (auto it = cache_.find(n); it != cache_.end()) return it->second;
  std::vector<Term> out;
  for (const auto& c : constructors_) {
    if (c.arity == 0) {
      if (n == 1) out.push_back(Term::constructor(c.name));
      continue;
    }
    if (n < 1 + c.arity) continue;
    // Split n-1 over the arguments, each at least 1.
    std::vector<Term> args;
    std::function<void(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t left) {
      if (i + 1 == c.arity) {
        for (const auto& a : of_size(left)) {
          args.push_back(a);
          out.push_back(Term::constructor(c.name, args));
          args.pop_back();
        }
        return;
      }
      for (std::size_t m = 1; m + (c.arity - i - 1) <= left; ++m) {
        // of_size may rehash the cache; copy the slice.
        std::vector<Term> firsts = of_size(m);
        for (const auto& a : firsts) {
          args.push_back(a);
          go(i + 1, left - m);
          args.pop_back();
        }
      }
    };
    go(0, n - 1);
  }
  return cache_[n] = std::move(out);
}

std::optional<Term> GroundEnumeration::next() {
  while (size_ <= k_) {
    const auto& level = of_size(size_);
    if (index_ < level.size()) return level[index_++];
    ++size_;
    index_ = 0;
  }
  return std::nullopt;
}

std::vector<Term> GroundEnumeration::collect() {
  std::vector<Term> out;
  while (auto t = next()) out.push_back(*t);
  return out;
}

// ---------------------------------------------------------------------------
// Sort inference: unification over argument/result slots.

namespace {

class SortSolver {
 public:
  std::size_t fresh() {
    parent_.push_back(parent_.size());
    return parent_.size() - 1;
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

  std::size_t result_slot(const std::string& sym) { return slot("r:" + sym); }
  std::size_t arg_slot(const std::string& sym, std::size_t i) { return slot("a:" + sym + ":" + std::to_string(i)); }

  std::size_t type_of(const Term& t, std::map<std::string, std::size_t>& vars) {
    if (t.is_variable()) {
      auto it = vars.find(t.name());
      if (it == vars.end()) it = vars.emplace(t.name(), fresh()).first;
      return it->second;
    }
    if (t.name() == kEqName && t.arity() == 2) {
      unite(type_of(t.arg(0), vars), type_of(t.arg(1), vars));
      return result_slot(kTrueName);
    }
    if (t.name() == kAndName && t.arity() == 2) {
      unite(type_of(t.arg(0), vars), result_slot(kTrueName));
      return type_of(t.arg(1), vars);
    }
    for (std::size_t i = 0; i < t.arity(); ++i) unite(type_of(t.arg(i), vars), arg_slot(t.name(), i));
    return result_slot(t.name());
  }

 private:
  std::size_t slot(const std::string& key) {
    auto it = slots_.find(key);
    if (it == slots_.end()) it = slots_.emplace(key, fresh()).first;
    return it->second;
  }
  std::vector<std::size_t> parent_;
  std::map<std::string, std::size_t> slots_;
};

struct SortedGenerator {
  SortSolver& solver;
  std::vector<Symbol> constructors;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Term>> cache;

  std::vector<Symbol> members(std::size_t cls) {
    std::vector<Symbol> out;
    for (const auto& c : constructors) {
      if (solver.find(solver.result_slot(c.name)) == cls) out.push_back(c);
    }
    return out.empty() ? constructors : out;
  }

  std::vector<Term> of_size(std::size_t cls, std::size_t n) {
    cls = solver.find(cls);
    auto key = std::make_pair(cls, n);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    std::vector<Term> out;
    for (const auto& c : members(cls)) {
      if (c.arity == 0) {
        if (n == 1) out.push_back(Term::constructor(c.name));
        continue;
      }
      if (n < 1 + c.arity) continue;
      std::vector<Term> args;
      std::function<void(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t left) {
        std::size_t arg_cls = solver.arg_slot(c.name, i);
        if (i + 1 == c.arity) {
          for (const auto& a : of_size(arg_cls, left)) {
            args.push_back(a);
            out.push_back(Term::constructor(c.name, args));
            args.pop_back();
          }
          return;
        }
        for (std::size_t m = 1; m + (c.arity - i - 1) <= left; ++m) {
          for (const auto& a : of_size(arg_cls, m)) {
            args.push_back(a);
            go(i + 1, left - m);
            args.pop_back();
          }
        }
      };
      go(0, n - 1);
    }
    return cache[key] = out;
  }

  std::vector<Term> up_to(std::size_t cls, std::size_t k) {
    std::vector<Term> out;
    for (std::size_t n = 1; n <= k; ++n) {
      auto level = of_size(cls, n);
      out.insert(out.end(), level.begin(), level.end());
    }
    return out;
  }
};

void infer(SortSolver& solver, const Program& p) {
  for (const auto& r : p.rules()) {
    if (is_primitive(r.lhs.name())) continue;
    std::map<std::string, std::size_t> vars;
    solver.unite(solver.type_of(r.lhs, vars), solver.type_of(r.rhs, vars));
  }
}

Program with_equality(const Program& p) { return p.has_strict_equality() ? p : add_strict_equality(p); }

std::vector<Substitution> solve(const Program& p, const Term& e, const std::vector<std::vector<Term>>& domains,
                                const std::vector<std::string>& vars, std::size_t max_steps) {
  const Term truth = Term::constructor(kTrueName);
  std::vector<Substitution> out;
  std::vector<std::size_t> idx(vars.size(), 0);
  for (const auto& d : domains) {
    if (d.empty()) return out;
  }
  for (;;) {
    Substitution::Map m;
    for (std::size_t i = 0; i < vars.size(); ++i) m.emplace(vars[i], domains[i][idx[i]]);
    Substitution sigma(std::move(m));
    if (rewrites_to(p, sigma.apply(e), truth, max_steps)) out.push_back(sigma);
    std::size_t i = 0;
    for (; i < vars.size(); ++i) {
      if (++idx[i] < domains[i].size()) break;
      idx[i] = 0;
    }
    if (i == vars.size()) break;
  }
  return out;
}

void require_equation(const Term& e) {
  if (!e.is_operation_rooted() || e.name() != kEqName || e.arity() != 2) {
    throw std::invalid_argument("ground_solutions expects an equation eq(l, r), got " + e.to_string());
  }
}

}  // namespace

std::map<std::string, std::vector<Symbol>> infer_variable_sorts(const Program& p, const Term& goal) {
  SortSolver solver;
  infer(solver, p);
  std::map<std::string, std::size_t> vars;
  solver.type_of(goal, vars);
  SortedGenerator gen{solver, p.signature().constructors(), {}};
  std::map<std::string, std::vector<Symbol>> out;
  for (const auto& [v, slot] : vars) out.emplace(v, gen.members(solver.find(slot)));
  return out;
}

std::vector<Substitution> ground_solutions(const Program& p0, const Term& e, std::size_t k, std::size_t max_steps) {
  require_equation(e);
  Program p = with_equality(p0);
  SortSolver solver;
  infer(solver, p);
  std::map<std::string, std::size_t> slots;
  solver.type_of(e, slots);
  SortedGenerator gen{solver, p.signature().constructors(), {}};
  auto vars = variables(e);
  std::vector<std::vector<Term>> domains;
  for (const auto& v : vars) domains.push_back(gen.up_to(slots.at(v), k));
  return solve(p, e, domains, vars, max_steps);
}

std::vector<Substitution> ground_solutions(const Program& p0, const Term& e, const std::vector<Symbol>& constructors,
                                           std::size_t k, std::size_t max_steps) {
  require_equation(e);
  Program p = with_equality(p0);
  GroundEnumeration en(constructors, k);
  auto terms = en.collect();
  auto vars = variables(e);
  std::vector<std::vector<Term>> domains(vars.size(), terms);
  return solve(p, e, domains, vars, max_steps);
}

bool independent(const Substitution& s1, const Substitution& s2, const std::vector<std::string>& V) {
  for (const auto& x : V) {
    Term v = Term::variable(x);
    if (!unify(s1.apply(v), s2.apply(v))) return true;
  }
  return false;
}

}  // namespace nspec
