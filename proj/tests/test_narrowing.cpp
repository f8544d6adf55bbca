#include <doctest.h>

#include <set>

#include "nspec/error.hpp"
#include "nspec/narrowing.hpp"
#include "nspec/oracle.hpp"
#include "support.hpp"

using namespace nspec;
using nspec::test::corpus;
using nspec::test::term;

namespace {

std::set<std::string> keys(const SearchResult& r) {
  std::set<std::string> out;
  for (const auto& a : r.answers) out.insert(a.key);
  return out;
}

void check_canonical(const Step& s) {
  Substitution acc;
  for (const auto& phi : s.canonical) {
    CHECK(phi.size() <= 1);
    for (const auto& [x, t] : phi.bindings()) {
      CHECK(t.is_constructor_rooted());
      for (const auto& a : t.args()) CHECK(a.is_variable());
      (void)x;
    }
    acc = compose(phi, acc);
  }
  CHECK(acc == s.subst);
}

}  // namespace

TEST_CASE("nns on X <= X + X") {
  Program p = corpus("leq.flp");
  auto trees = require_trees(p);
  FreshVars fresh;
  Term t = term(p, "X <= X + X");
  fresh.reserve_all(t);
  auto steps = needed_steps(t, trees, fresh);
  REQUIRE(steps.size() == 2);

  CHECK(steps[0].position == Position::root());
  CHECK(steps[0].subst.to_string() == "{X -> 0}");
  CHECK(steps[0].reduct.to_string() == "true");

  CHECK(steps[1].position == Position({2}));
  REQUIRE(steps[1].subst.binds("X"));
  Term sx = steps[1].subst.apply(Term::variable("X"));
  REQUIRE(sx.name() == "s");
  Term m = sx.args()[0];
  CHECK(m.is_variable());
  Term sm = Term::constructor("s", {m});
  CHECK(steps[1].reduct ==
        Term::operation("leq", {sm, Term::constructor("s", {Term::operation("add", {m, sm})})}));
  for (const auto& s : steps) check_canonical(s);
}

TEST_CASE("nns on 0 <= X + X and double(W)") {
  Program p = corpus("leq.flp");
  auto trees = require_trees(p);
  FreshVars fresh;
  auto steps = needed_steps(term(p, "0 <= X + X"), trees, fresh);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].subst.empty());
  CHECK(steps[0].reduct.to_string() == "true");

  Program d = corpus("double.flp");
  auto dsteps = needed_steps(term(d, "double(W)"), require_trees(d), fresh);
  REQUIRE(dsteps.size() == 1);
  CHECK(dsteps[0].subst.empty());
  CHECK(dsteps[0].reduct.to_string() == "add(W,W)");
}

TEST_CASE("nns rejects a term outside the tree pattern") {
  Program p = corpus("leq.flp");
  auto trees = require_trees(p);
  FreshVars fresh;
  CHECK_THROWS_AS(nns(term(p, "add(0,0)"), trees.at("leq"), trees, fresh), std::invalid_argument);
}

TEST_CASE("lns on X <= X + X has three steps") {
  Program p = corpus("leq.flp");
  FreshVars fresh;
  Term t = term(p, "X <= X + X");
  fresh.reserve_all(t);
  auto steps = lns(t, p, fresh);
  REQUIRE(steps.size() == 3);
  CHECK(steps[0].position == Position::root());
  CHECK(steps[1].position == Position({2}));
  CHECK(steps[2].position == Position({2}));
  CHECK(steps[1].reduct.to_string() == "leq(0,0)");
}

TEST_CASE("lns on 0 <= 0 and on an operation without rules") {
  Program p = corpus("leq.flp");
  FreshVars fresh;
  auto steps = lns(term(p, "0 <= 0"), p, fresh);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].reduct.to_string() == "true");

  Program u = parse_program("constructors 0/0 ; operations f/1 ;");
  CHECK(lns(term(u, "f(0)"), u, fresh).empty());
}

TEST_CASE("lns rejects non-linear left-hand sides") {
  Program p = parse_program("constructors 0/0 ; operations f/2 ; f(X,X) -> 0 ;");
  FreshVars fresh;
  CHECK_THROWS_AS(lns(term(p, "f(0,0)"), p, fresh), ClassViolation);
}

TEST_CASE("rewrite_step") {
  Program p = corpus("leq.flp");
  const auto& add = p.rules_for("add");
  CHECK(rewrite_step(term(p, "s(0) + 0"), Position::root(), add[1]).to_string() == "s(add(0,0))");
  CHECK(rewrite_step(term(p, "0 <= 0 + 0"), Position({2}), add[0]).to_string() == "leq(0,0)");
  CHECK_THROWS_AS(rewrite_step(term(p, "0 + 0"), Position::root(), add[1]), std::invalid_argument);
}

TEST_CASE("outermost-needed redex") {
  Program p = corpus("leq.flp");
  auto trees = require_trees(p);
  CHECK(outermost_needed_redex(term(p, "0 <= 0 + 0"), trees) == Position::root());
  CHECK(outermost_needed_redex(term(p, "(0 + 0) <= Y"), trees) == Position({1}));
  CHECK_FALSE(outermost_needed_redex(term(p, "X <= 0 + 0"), trees));
  auto r = outermost_needed(term(p, "s(0) <= s(0 + 0)"), trees);
  REQUIRE(r);
  CHECK(r->rule.label == p.rules_for("leq")[2].label);
}

TEST_CASE("rewrite_normalize follows outermost-needed redexes") {
  Program p = corpus("leq.flp");
  auto trace = rewrite_normalize(term(p, "s(0) <= s(0) + 0"), require_trees(p), 10);
  CHECK(trace.normal_form);
  CHECK(trace.terms.back().to_string() == "true");
  CHECK(trace.redexes.size() + 1 == trace.terms.size());
}

TEST_CASE("narrowing_focus") {
  Program p = corpus("leq.flp");
  CHECK(narrowing_focus(term(p, "X + 0")) == Position::root());
  CHECK(narrowing_focus(term(p, "s(s(X + 0))")) == Position({1, 1}));
  CHECK_FALSE(narrowing_focus(term(p, "s(X)")));
}

TEST_CASE("search: leq(s(X),Y) ~ true") {
  Program p = corpus("leq.flp");
  Term goal = term(p, "s(X) <= Y ~ true");
  SearchBounds b;
  b.max_steps = 12;
  auto r = search(goal, p, Strategy::Needed, b);
  Substitution want(Substitution::Map{{"X", Term::constructor("0")},
                                      {"Y", Term::constructor("s", {Term::variable("Z")})}});
  std::string k = answer_key(want, Term::constructor("true"), {"X", "Y"});
  CHECK(keys(r).count(k) == 1);
  for (const auto& a : r.answers) {
    CHECK(a.result.to_string() == "true");
    for (const auto& v : a.subst.domain()) CHECK((v == "X" || v == "Y"));
  }
}

TEST_CASE("search: identity answer and lazy strategy") {
  Program p = corpus("leq.flp");
  auto r = search(term(p, "0 <= X + X"), p, Strategy::Needed, SearchBounds{});
  REQUIRE(r.answers.size() == 1);
  CHECK(r.answers[0].subst.empty());
  CHECK(r.answers[0].result.to_string() == "true");
  CHECK(r.answers[0].steps == 1);
  CHECK(r.complete);

  auto l = search(term(p, "0 + 0"), p, Strategy::Lazy, SearchBounds{});
  REQUIRE(l.answers.size() == 1);
  CHECK(l.answers[0].result.to_string() == "0");
}

TEST_CASE("search respects bounds") {
  Program p = corpus("leq.flp");
  SearchBounds b;
  b.max_steps = 3;
  CHECK_FALSE(search(term(p, "X <= Y"), p, Strategy::Needed, b).complete);
  CHECK(search(term(p, "X <= s(0)"), p, Strategy::Needed, b).complete);
  b.max_solutions = 1;
  CHECK(search(term(p, "X <= Y"), p, Strategy::Needed, b).answers.size() == 1);
  auto inf = search(term(p, "X + Y ~ Z"), p, Strategy::Needed, SearchBounds{4});
  CHECK_FALSE(inf.complete);
}

TEST_CASE("search: needed strategy needs an inductively sequential program") {
  Program p = corpus("overlap.flp");
  CHECK_THROWS_AS(search(term(p, "f(X)"), p, Strategy::Needed, SearchBounds{}), ClassViolation);
  CHECK_NOTHROW(search(term(p, "f(X)"), p, Strategy::Lazy, SearchBounds{}));
}

TEST_CASE("search tree bookkeeping") {
  Program p = corpus("leq.flp");
  auto r = search(term(p, "X <= X + X"), p, Strategy::Needed, SearchBounds{6});
  const auto& t = r.tree;
  for (std::size_t i = 1; i < t.nodes.size(); ++i) {
    REQUIRE(t.nodes[i].parent);
    CHECK(t.nodes[i].depth == t.nodes[*t.nodes[i].parent].depth + 1);
    CHECK(t.arcs[*t.nodes[i].incoming].to == i);
  }
  for (const auto& a : r.answers) {
    CHECK(t.nodes[a.leaf].status == NodeStatus::Success);
    CHECK(t.path_to(a.leaf).size() == a.steps);
  }
  CHECK(std::string(to_string(NodeStatus::Failure)) == "fail");
}

TEST_CASE("deterministic evaluation") {
  Program p = corpus("leq.flp");
  CHECK(deterministically_evaluable(term(p, "s(0) + s(0)"), p, SearchBounds{}) == Determinism::Deterministic);
  CHECK(deterministically_evaluable(term(p, "X <= 0"), p, SearchBounds{}) == Determinism::NonDeterministic);
  Program h = corpus("hfg.flp");
  CHECK(deterministically_evaluable(term(h, "g(0)"), h, SearchBounds{10}) == Determinism::Indeterminate);
}

TEST_CASE("every needed step carries a canonical decomposition") {
  for (const char* name : {"leq.flp", "append.flp", "hfg.flp", "f3.flp"}) {
    Program p = corpus(name);
    auto trees = require_trees(p);
    for (const auto& [f, tree] : trees) {
      FreshVars fresh;
      Term pat = tree.pattern();
      fresh.reserve_all(pat);
      for (const auto& s : needed_steps(pat, trees, fresh)) check_canonical(s);
    }
  }
}

TEST_CASE("needed and lazy narrowing agree on uniform programs") {
  Program p = corpus("append.flp");
  REQUIRE(is_uniform(p));
  auto trees = require_trees(p);
  for (const char* text : {"append(Xs, Ys)", "append(append(Xs, Ys), Zs)", "append(a : Xs, nil)"}) {
    CAPTURE(text);
    FreshVars f1, f2;
    Term t = term(p, text);
    f1.reserve_all(t);
    f2.reserve_all(t);
    auto n = needed_steps(t, trees, f1);
    auto l = lns(t, p, f2);
    REQUIRE(n.size() == l.size());
    for (std::size_t i = 0; i < n.size(); ++i) {
      CHECK(n[i].position == l[i].position);
      CHECK(answer_key(n[i].subst, n[i].reduct, variables(t)) == answer_key(l[i].subst, l[i].reduct, variables(t)));
    }
  }
}

TEST_CASE("needed narrowing on p matches lazy narrowing on its uniform transform") {
  Program p = corpus("leq.flp");
  Program u = uniform_transform(p);
  SearchBounds b;
  b.max_steps = 20;
  for (const char* text : {"X <= s(0) ~ true", "s(X) <= Y ~ false", "X + s(0) ~ s(s(0))", "X <= X + X ~ true"}) {
    CAPTURE(text);
    auto n = search(term(p, text), p, Strategy::Needed, b);
    auto l = search(term(u, text), u, Strategy::Lazy, b);
    if (n.complete && l.complete) {
      CHECK(keys(n) == keys(l));
    } else {
      // lazy on U(p) uses extra steps, so only check the needed answers found with room to spare
      auto lk = keys(search(term(u, text), u, Strategy::Lazy, SearchBounds{40}));
      for (const auto& a : n.answers) {
        if (a.steps <= 8) CHECK(lk.count(a.key) == 1);
      }
    }
  }
}

TEST_CASE("computed answers are sound") {
  for (const char* name : {"leq.flp", "append.flp", "double.flp"}) {
    Program p = corpus(name);
    std::vector<std::string> goals;
    if (std::string(name) == "leq.flp") goals = {"X <= X + X ~ true", "X + Y ~ s(0)", "s(X) <= Y ~ true"};
    if (std::string(name) == "append.flp") goals = {"append(Xs, Ys) ~ a : nil", "append(Xs, b : nil) ~ a : b : nil"};
    if (std::string(name) == "double.flp") goals = {"double(X) ~ s(s(0))"};
    for (const auto& g : goals) {
      CAPTURE(g);
      Term goal = term(p, g);
      SearchBounds b;
      b.max_steps = 12;
      auto r = search(goal, p, Strategy::Needed, b);
      CHECK_FALSE(r.answers.empty());
      for (const auto& a : r.answers) {
        CHECK(rewrites_to(p, a.subst.apply(goal), a.result, a.steps));
      }
    }
  }
}
