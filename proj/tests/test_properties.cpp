#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "nspec/error.hpp"
#include "nspec/oracle.hpp"
#include "nspec/peval.hpp"
#include "property_support.hpp"
#include "support.hpp"

using namespace nspec;
using nspec::test::corpus;
using nspec::test::term;
using namespace nspec::test;


TEST_CASE("random programs are inductively sequential and specialize into the class") {
  auto cases = random_cases(200);
  std::size_t closed_count = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    CAPTURE(i);
    REQUIRE(is_inductively_sequential(c.program));
    auto r = partial_evaluate(c.program, {c.call});
    CHECK(is_inductively_sequential(r.program));
    try {
      auto ctl = pe_control(c.program, {c.call});
      CHECK(is_inductively_sequential(ctl.program));
      CHECK(ctl.report.closed);
      ++closed_count;
    } catch (const ControlFailure&) {
    }
  }
  CHECK(closed_count > 150);
}

TEST_CASE("random programs: canonical lists share a prefix and then diverge") {
  auto cases = random_cases(200);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    CAPTURE(i);
    auto trees = require_trees(c.program);
    SearchBounds b;
    b.max_steps = 4;
    b.max_nodes = 500;
    auto r = search(c.call, c.program, trees, Strategy::Needed, b);
    for (const auto& node : r.tree.nodes) {
      std::vector<const Step*> out;
      for (auto ch : node.children) out.push_back(&r.tree.arcs[*r.tree.nodes[ch].incoming].step);
      for (std::size_t x = 0; x < out.size(); ++x) {
        for (std::size_t y = x + 1; y < out.size(); ++y) {
          CHECK(prefix_or_diverge(out[x]->canonical, out[y]->canonical));
        }
      }
    }
  }
}

TEST_CASE("random programs: computed answers are pairwise independent") {
  auto cases = random_cases(200);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    CAPTURE(i);
    SearchBounds b;
    b.max_steps = 8;
    b.max_nodes = 2000;
    auto r = search(c.call, c.program, Strategy::Needed, b);
    auto vars = variables(c.call);
    for (std::size_t x = 0; x < r.answers.size(); ++x) {
      for (std::size_t y = x + 1; y < r.answers.size(); ++y) {
        // answers that do not bind the goal at all can only repeat the same value
        if (r.answers[x].subst.empty() && r.answers[y].subst.empty()) continue;
        CHECK(independent(r.answers[x].subst, r.answers[y].subst, vars));
      }
    }
  }
}

TEST_CASE("random programs: specialization keeps the values of the call") {
  auto cases = random_cases(200);
  std::size_t compared = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    CAPTURE(i);
    PEResult r = [&] {
      try {
        return pe_control(c.program, {c.call});
      } catch (const ControlFailure&) {
        return partial_evaluate(c.program, {c.call});
      }
    }();
    if (!r.report.closed) continue;
    Term renamed = rename_term(r.renaming, r.calls, c.call);
    SearchBounds b;
    b.max_steps = 6;
    b.max_nodes = 3000;
    auto orig = search(c.call, c.program, Strategy::Needed, b);
    auto spec = search(renamed, r.program, Strategy::Needed, b);
    if (!spec.complete) continue;
    auto spec_keys = keys(spec);
    for (const auto& a : orig.answers) CHECK(spec_keys.count(a.key) == 1);
    ++compared;
  }
  CHECK(compared > 150);
}

TEST_CASE("strong correctness on corpus goals") {
  auto goals = corpus_goals();
  REQUIRE(goals.size() >= 50);
  for (const auto& g : goals) {
    const std::string text = g.goal;
    CAPTURE(text);
    Program p = corpus(g.file);
    Term goal = term(p, g.goal);
    auto r = pe_control(p, {goal.args()[0]});
    REQUIRE(r.report.closed);
    REQUIRE(closed(r.calls, goal));
    Term renamed = rename_term(r.renaming, r.calls, goal);
    SearchBounds b;
    b.max_steps = 25;
    b.max_nodes = 20000;
    auto orig = search(goal, p, Strategy::Needed, b);
    auto spec = search(renamed, r.program, Strategy::Needed, b);
    auto spec_keys = keys(spec);
    for (const auto& a : orig.answers) CHECK(spec_keys.count(a.key) == 1);
    SearchBounds wide = b;
    wide.max_steps = 75;
    auto orig_wide = keys(search(goal, p, Strategy::Needed, wide));
    for (const auto& a : spec.answers) {
      if (orig.complete) {
        CHECK(orig_wide.count(a.key) == 1);
      }
    }
  }
}

TEST_CASE("needed narrowing covers every small ground solution") {
  struct Eq {
    const char* file;
    const char* goal;
  };
  std::vector<Eq> eqs{{"append.flp", "append(Xs, Ys) ~ a : b : nil"}, {"double.flp", "double(X) ~ Y"}};
  static const auto leq = leq_equations();
  for (const auto& t : leq) eqs.push_back({"leq.flp", t.c_str()});
  for (const auto& e : eqs) {
    const std::string text = e.goal;
    CAPTURE(text);
    Program p = corpus(e.file);
    Term goal = term(p, e.goal);
    auto sols = ground_solutions(p, goal, 3, 25);
    CHECK_FALSE(sols.empty());
    SearchBounds b;
    b.max_steps = 25;
    b.max_nodes = 20000;
    auto r = search(goal, p, Strategy::Needed, b);
    auto vars = variables(goal);
    for (const auto& theta : sols) {
      bool covered = false;
      for (const auto& a : r.answers) {
        Term lhs = a.subst.apply(Term::operation("tuple", [&] {
          std::vector<Term> vs;
          for (const auto& v : vars) vs.push_back(Term::variable(v));
          return vs;
        }()));
        Term rhs = theta.apply(Term::operation("tuple", [&] {
          std::vector<Term> vs;
          for (const auto& v : vars) vs.push_back(Term::variable(v));
          return vs;
        }()));
        covered |= match(lhs, rhs).has_value();
      }
      CHECK_MESSAGE(covered, theta.to_string());
    }
  }
}

TEST_CASE("specialization preserves deterministic evaluation of ground goals") {
  auto goals = ground_goals();
  REQUIRE(goals.size() == 20);
  for (const auto& g : goals) {
    const std::string text = g.goal;
    CAPTURE(text);
    Program p = corpus(g.file);
    auto r = pe_control(p, {term(p, g.root)});
    Term goal = term(p, g.goal);
    REQUIRE(is_ground(goal));
    REQUIRE(closed(r.calls, goal));
    Term renamed = rename_term(r.renaming, r.calls, goal);
    SearchBounds b;
    b.max_steps = 25;
    CHECK(deterministically_evaluable(goal, p, b) == Determinism::Deterministic);
    CHECK(deterministically_evaluable(renamed, r.program, b) == Determinism::Deterministic);
    auto res = search(renamed, r.program, Strategy::Needed, b);
    REQUIRE(res.answers.size() == 1);
    CHECK(res.answers[0].subst.empty());
    CHECK(res.answers[0].result.to_string() == "true");
  }
}
