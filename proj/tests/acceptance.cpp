// Runs the acceptance checks and prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nspec/deftree.hpp"
#include "nspec/error.hpp"
#include "nspec/narrowing.hpp"
#include "nspec/oracle.hpp"
#include "nspec/peval.hpp"
#include "nspec/testing/ln_pe.hpp"
#include "property_support.hpp"
#include "support.hpp"

using namespace nspec;
using namespace nspec::test;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
  void expect(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

Term rename_ops(const Term& t, const std::map<std::string, std::string>& m) {
  if (t.is_variable()) return t;
  std::vector<Term> args;
  for (const auto& a : t.args()) args.push_back(rename_ops(a, m));
  auto it = m.find(t.name());
  if (it == m.end()) return t.is_operation_rooted() ? Term::operation(t.name(), args) : Term::constructor(t.name(), args);
  return Term::operation(it->second, args);
}

std::multiset<std::string> rule_shapes(const std::vector<Rule>& rules, const std::map<std::string, std::string>& m) {
  std::multiset<std::string> out;
  for (const auto& r : rules) {
    out.insert(canonical_variant(Term::operation("rule", {rename_ops(r.lhs, m), rename_ops(r.rhs, m)})).to_string());
  }
  return out;
}

std::vector<Rule> user_rules(const Program& p) {
  std::vector<Rule> out;
  for (const auto& r : p.rules()) {
    if (!is_primitive(r.lhs.name())) out.push_back(r);
  }
  return out;
}

/// Rule sets equal after some bijection between the defined operation names.
bool isomorphic(const std::vector<Rule>& got, const std::vector<Rule>& want) {
  std::set<std::string> gs, ws;
  for (const auto& r : got) gs.insert(r.lhs.name());
  for (const auto& r : want) ws.insert(r.lhs.name());
  if (gs.size() != ws.size() || got.size() != want.size()) return false;
  std::vector<std::string> g(gs.begin(), gs.end()), w(ws.begin(), ws.end());
  auto target = rule_shapes(want, {});
  do {
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < g.size(); ++i) m[g[i]] = w[i];
    if (rule_shapes(got, m) == target) return true;
  } while (std::next_permutation(w.begin(), w.end()));
  return false;
}

std::string show(const std::vector<Rule>& rules) {
  std::string out;
  for (const auto& r : rules) out += (out.empty() ? "" : "; ") + r.to_string();
  return out;
}

bool same_step(const Step& s, const Position& pos, const Substitution& subst, const Term& reduct,
               const std::vector<std::string>& vars) {
  return s.position == pos && answer_key(s.subst, s.reduct, vars) == answer_key(subst, reduct, vars);
}

Outcome criterion1() {
  Outcome o;
  Program p = corpus("leq.flp");
  Term t = term(p, "X <= X + X");
  FreshVars fresh;
  fresh.reserve_all(t);
  auto steps = needed_steps(t, require_trees(p), fresh);
  o.expect(steps.size() == 2, "expected 2 steps, got " + std::to_string(steps.size()));
  if (!o.ok) return o;
  Term m = Term::variable("M");
  Term sm = Term::constructor("s", {m});
  o.expect(same_step(steps[0], Position::root(), Substitution::single("X", Term::constructor("0")),
                     Term::constructor("true"), {"X"}),
           "first step differs");
  o.expect(same_step(steps[1], Position({2}), Substitution::single("X", sm),
                     Term::operation("leq", {sm, Term::constructor("s", {Term::operation("add", {m, sm})})}), {"X"}),
           "second step differs");
  return o;
}

Outcome criterion2() {
  Outcome o;
  Program p = corpus("leq.flp");
  Term t = term(p, "X <= X + X");
  FreshVars fresh;
  fresh.reserve_all(t);
  auto steps = lns(t, p, fresh);
  o.expect(steps.size() == 3, "expected 3 steps, got " + std::to_string(steps.size()));
  if (!o.ok) return o;
  Term zero = Term::constructor("0");
  Term m = Term::variable("M");
  Term sm = Term::constructor("s", {m});
  auto x0 = Substitution::single("X", zero);
  o.expect(same_step(steps[0], Position::root(), x0, Term::constructor("true"), {"X"}), "root step differs");
  o.expect(same_step(steps[1], Position({2}), x0, Term::operation("leq", {zero, zero}), {"X"}),
           "redundant inner step missing");
  o.expect(same_step(steps[2], Position({2}), Substitution::single("X", sm),
                     Term::operation("leq", {sm, Term::constructor("s", {Term::operation("add", {m, sm})})}), {"X"}),
           "inner successor step differs");
  return o;
}

Outcome criterion3() {
  Outcome o;
  Program p = corpus("leq.flp");
  const auto& rs = p.rules_for("leq");
  auto V = [](const char* n) { return Term::variable(n); };
  auto s = [](Term t) { return Term::constructor("s", {std::move(t)}); };
  auto leq = [](Term a, Term b) { return Term::operation("leq", {std::move(a), std::move(b)}); };
  auto fig = DefinitionalTree::branch(
      leq(V("X"), V("Y")), Position({1}),
      {DefinitionalTree::leaf(leq(Term::constructor("0"), V("Y")), rs[0]),
       DefinitionalTree::branch(leq(s(V("X1")), V("Y")), Position({2}),
                                {DefinitionalTree::leaf(leq(s(V("X1")), Term::constructor("0")), rs[1]),
                                 DefinitionalTree::leaf(leq(s(V("X1")), s(V("Y1"))), rs[2])})});
  auto tree = build_tree("leq", rs);
  o.expect(tree.has_value(), "no tree built");
  if (tree) o.expect(structurally_equal_modulo_variables(*tree, fig), "tree differs:\n" + tree->to_text());
  return o;
}

Outcome criterion4() {
  Outcome o;
  Program p = corpus("leq.flp");
  Program u = uniform_transform(p);
  std::vector<Rule> got;
  for (const auto& r : u.rules()) {
    if (r.lhs.name() != "add" && !is_primitive(r.lhs.name())) got.push_back(r);
  }
  Program want = parse_program(
      "constructors 0/0 s/1 true/0 false/0 ; operations leq/2 leqq/2 ;"
      "leq(0,N) -> true ; leq(s(M),N) -> leqq(M,N) ; leqq(M,0) -> false ; leqq(M,s(N)) -> leq(M,N) ;");
  o.expect(got.size() == 4, "expected 4 rules, got " + std::to_string(got.size()));
  o.expect(isomorphic(got, want.rules()), "rules differ: " + show(got));
  o.expect(is_uniform(u), "output is not uniform");
  o.expect(is_inductively_sequential(u), "output is not inductively sequential");
  return o;
}

Outcome criterion5() {
  Outcome o;
  Program p = corpus("append.flp");
  auto r = pe_control(p, {term(p, "append(append(Xs,Ys),Zs)")});
  Program want = parse_program(
      "constructors nil/0 cons/2 ; operations dapp/3 app/2 ;"
      "dapp(nil,Ys,Zs) -> app(Ys,Zs) ; dapp(X : Xs,Ys,Zs) -> X : dapp(Xs,Ys,Zs) ;"
      "app(nil,Ys) -> Ys ; app(X : Xs,Ys) -> X : app(Xs,Ys) ;");
  auto got = user_rules(r.program);
  o.expect(isomorphic(got, want.rules()), "rules differ: " + show(got));
  o.expect(r.report.closed, "output is not closed");
  o.expect(is_inductively_sequential(r.program), "output is not inductively sequential");
  return o;
}

Outcome criterion6() {
  Outcome o;
  Program p = corpus("leq.flp");
  Term call = term(p, "X <= X + Y");
  auto nn = user_rules(pe_control(p, {call}).program);
  o.expect(nn.size() == 2, "needed: expected 2 rules, got " + show(nn));
  auto ln = user_rules(testing::ln_pe_control(p, {call}).program);
  o.expect(ln.size() == 3, "lazy: expected 3 rules, got " + show(ln));
  std::set<std::string> shapes;
  for (const auto& r : ln) shapes.insert(*rule_shapes({r}, {}).begin());
  o.expect(shapes.size() == 2, "lazy: expected two rules equal up to renaming: " + show(ln));
  return o;
}

Outcome criterion7() {
  Outcome o;
  Program p = corpus("hfg.flp");
  Term call = term(p, "h(f(X, g(Y)))");
  auto nn = pe_control(p, {call}).program;
  Program want = parse_program(
      "constructors 0/0 s/1 ; operations h2/2 h1/0 ;"
      "h2(0,0) -> h1 ; h2(s(X),Y) -> 0 ; h1 -> h1 ;");
  o.expect(is_inductively_sequential(nn), "needed output is not inductively sequential");
  o.expect(isomorphic(user_rules(nn), want.rules()), "needed rules differ: " + show(user_rules(nn)));
  auto ln = testing::ln_pe_control(p, {call}).program;
  o.expect(!is_inductively_sequential(ln), "lazy output is inductively sequential: " + show(user_rules(ln)));
  return o;
}

Outcome criterion8() {
  Outcome o;
  Program p = corpus("unsafe.flp");
  auto rs = resultants(unfold(term(p, "g(X)"), p, UnfoldPolicy{}));
  o.expect(rs.size() == 1 && rs[0].rhs.to_string() == "s(f(X))", "unfolding g(X) does not stop at s(f(X))");
  auto r = pe_control(p, {term(p, "g(X)"), term(p, "h(X)")});
  Term forbidden = term(p, "g(0)");
  for (const auto& res : r.resultants) {
    o.expect(!is_variant(res.lhs, forbidden), "forbidden resultant " + res.lhs.to_string());
  }
  Term goal = term(p, "h(g(s(0))) ~ X");
  Term renamed = rename_term(r.renaming, r.calls, goal);
  SearchBounds b;
  b.max_steps = 12;
  auto before = search(goal, p, Strategy::Needed, b);
  auto after = search(renamed, r.program, Strategy::Needed, b);
  std::string want = answer_key(Substitution::single("X", term(p, "s(0)")), Term::constructor("true"), {"X"});
  o.expect(keys(before) == std::set<std::string>{want}, "original program answers differ");
  o.expect(keys(after) == std::set<std::string>{want}, "specialized program answers differ");
  return o;
}

Outcome criterion9() {
  Outcome o;
  std::size_t not_is = 0, bad_prefix = 0, dependent = 0, mismatches = 0;
  auto cases = random_cases(200);
  std::vector<Program> corpus_progs;
  for (const char* f : {"leq.flp", "append.flp", "double.flp", "hfg.flp"}) corpus_progs.push_back(corpus(f));

  for (const auto& c : cases) {
    if (!is_inductively_sequential(partial_evaluate(c.program, {c.call}).program)) ++not_is;
    try {
      if (!is_inductively_sequential(pe_control(c.program, {c.call}).program)) ++not_is;
    } catch (const ControlFailure&) {
    }
    SearchBounds b;
    b.max_steps = 6;
    b.max_nodes = 2000;
    auto r = search(c.call, c.program, Strategy::Needed, b);
    for (const auto& node : r.tree.nodes) {
      if (node.children.size() < 2) continue;
      for (std::size_t x = 0; x < node.children.size(); ++x) {
        for (std::size_t y = x + 1; y < node.children.size(); ++y) {
          const auto& sx = r.tree.arcs[*r.tree.nodes[node.children[x]].incoming].step;
          const auto& sy = r.tree.arcs[*r.tree.nodes[node.children[y]].incoming].step;
          if (!prefix_or_diverge(sx.canonical, sy.canonical)) ++bad_prefix;
        }
      }
    }
    auto vars = variables(c.call);
    for (std::size_t x = 0; x < r.answers.size(); ++x) {
      for (std::size_t y = x + 1; y < r.answers.size(); ++y) {
        if (r.answers[x].subst.empty() && r.answers[y].subst.empty()) continue;
        if (!independent(r.answers[x].subst, r.answers[y].subst, vars)) ++dependent;
      }
    }
  }
  for (const auto& p : corpus_progs) {
    for (const auto& [f, tree] : require_trees(p)) {
      if (is_primitive(f)) continue;
      if (!is_inductively_sequential(partial_evaluate(p, {tree.pattern()}).program)) ++not_is;
    }
  }
  auto goals = corpus_goals();
  std::size_t checked = 0;
  for (const auto& g : goals) {
    Program p = corpus(g.file);
    Term goal = term(p, g.goal);
    auto r = pe_control(p, {goal.args()[0]});
    Term renamed = rename_term(r.renaming, r.calls, goal);
    SearchBounds b;
    b.max_steps = 25;
    b.max_nodes = 20000;
    auto before = search(goal, p, Strategy::Needed, b);
    auto after = search(renamed, r.program, Strategy::Needed, b);
    if (keys(before) != keys(after)) ++mismatches;
    ++checked;
  }
  o.expect(not_is == 0, std::to_string(not_is) + " specialized programs not inductively sequential");
  o.expect(bad_prefix == 0, std::to_string(bad_prefix) + " step pairs violate the prefix/divergence property");
  o.expect(dependent == 0, std::to_string(dependent) + " dependent answer pairs");
  o.expect(checked >= 50, "only " + std::to_string(checked) + " corpus goals");
  o.expect(mismatches == 0, std::to_string(mismatches) + " answer-set mismatches");
  return o;
}

Outcome criterion10() {
  Outcome o;
  Program p = corpus("leq.flp");
  std::size_t misses = 0, solutions = 0;
  for (const auto& text : leq_equations()) {
    Term goal = term(p, text);
    auto vars = variables(goal);
    std::vector<Term> vs;
    for (const auto& v : vars) vs.push_back(Term::variable(v));
    Term tuple = Term::operation("tuple", vs);
    SearchBounds b;
    b.max_steps = 25;
    b.max_nodes = 20000;
    auto r = search(goal, p, Strategy::Needed, b);
    for (const auto& theta : ground_solutions(p, goal, 3, 25)) {
      ++solutions;
      bool covered = false;
      for (const auto& a : r.answers) covered = covered || match(a.subst.apply(tuple), theta.apply(tuple)).has_value();
      if (!covered) {
        ++misses;
        o.fail(text + ": " + theta.to_string() + " not covered");
      }
    }
  }
  o.expect(solutions > 0, "no ground solutions enumerated");
  if (o.ok) o.detail = std::to_string(solutions) + " ground solutions covered";
  (void)misses;
  return o;
}

Outcome criterion11() {
  Outcome o;
  std::size_t violations = 0;
  for (const auto& g : ground_goals()) {
    Program p = corpus(g.file);
    auto r = pe_control(p, {term(p, g.root)});
    Term goal = term(p, g.goal);
    Term renamed = rename_term(r.renaming, r.calls, goal);
    SearchBounds b;
    b.max_steps = 25;
    bool ok = deterministically_evaluable(goal, p, b) == Determinism::Deterministic &&
              deterministically_evaluable(renamed, r.program, b) == Determinism::Deterministic;
    auto res = search(renamed, r.program, Strategy::Needed, b);
    ok = ok && res.answers.size() == 1 && res.answers[0].subst.empty() && res.answers[0].deterministic &&
         res.answers[0].result.to_string() == "true";
    if (!ok) {
      ++violations;
      o.fail(std::string(g.goal));
    }
  }
  o.expect(violations == 0, std::to_string(violations) + " violations");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"needed narrowing steps of X <= X + X", criterion1},
      {"lazy narrowing steps of X <= X + X", criterion2},
      {"definitional tree of leq", criterion3},
      {"uniform transformation of leq", criterion4},
      {"append specialization", criterion5},
      {"leq(X, X + Y) specialization", criterion6},
      {"h(f(X, g(Y))) specialization", criterion7},
      {"no unfolding below constructor roots", criterion8},
      {"property suite", criterion9},
      {"ground solutions covered by computed answers", criterion10},
      {"determinism preserved by specialization", criterion11},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first;
    if (!o.detail.empty()) std::cout << " (" << o.detail << ")";
    std::cout << "\n";
    if (!o.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
